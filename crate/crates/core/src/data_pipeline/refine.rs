//! Offline trajectory-consistency refinement: positional outlier repair,
//! heading smoothing, and fragment stitching.

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Vec2};

use super::TrackRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineParams {
    /// Centered window width for the median filters.
    pub window: usize,
    /// Deviation from the window median above which a position is repaired.
    pub jump_threshold: f64,
    /// Longest gap, in frames, that stitching bridges.
    pub gap_max: u32,
    /// Largest extrapolation miss accepted when stitching, meters.
    pub stitch_gate: f64,
    /// Nominal frame period used to count gap frames.
    pub frame_dt: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            window: 5,
            jump_threshold: 3.0,
            gap_max: 10,
            stitch_gate: 2.0,
            frame_dt: 0.05,
        }
    }
}

const MAX_PASSES: usize = 64;
const YAW_EPS: f64 = 1e-9;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// One pass of coordinatewise-median outlier repair over truncated windows.
fn repair_positions_once(pts: &[Vec2], half: usize, threshold: f64) -> Vec<Vec2> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let mut xs: Vec<f64> = pts[lo..=hi].iter().map(|p| p.x).collect();
            let mut ys: Vec<f64> = pts[lo..=hi].iter().map(|p| p.y).collect();
            let med = Vec2::new(median(&mut xs), median(&mut ys));
            if pts[i].distance(med) > threshold {
                med
            } else {
                pts[i]
            }
        })
        .collect()
}

fn repair_positions(pts: Vec<Vec2>, half: usize, threshold: f64) -> Vec<Vec2> {
    let mut cur = pts;
    for _ in 0..MAX_PASSES {
        let next = repair_positions_once(&cur, half, threshold);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn unwrap(yaws: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(yaws.len());
    for (i, &y) in yaws.iter().enumerate() {
        if i == 0 {
            out.push(y);
        } else {
            let prev: f64 = out[i - 1];
            out.push(prev + wrap_angle(y - yaws[i - 1]));
        }
    }
    out
}

/// Median filter with edge replication, iterated to its root signal.
/// Values are only replaced when they move by more than `YAW_EPS`.
fn smooth_yaw(yaws: &[f64], half: usize) -> Vec<f64> {
    let n = yaws.len();
    if n < 3 {
        return yaws.to_vec();
    }
    let original = unwrap(yaws);
    let mut cur = original.clone();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let mut w: Vec<f64> = (0..=2 * half)
                    .map(|k| cur[(i + k).saturating_sub(half).min(n - 1)])
                    .collect();
                let m = median(&mut w);
                if (m - cur[i]).abs() > YAW_EPS {
                    changed = true;
                    m
                } else {
                    cur[i]
                }
            })
            .collect();
        cur = next;
        if !changed {
            break;
        }
    }
    yaws.iter()
        .zip(original.iter().zip(&cur))
        .map(|(&y, (&u0, &u))| if (u - u0).abs() > YAW_EPS { wrap_angle(u) } else { y })
        .collect()
}

fn refine_track(tr: &mut TrackRecord, p: &RefineParams) -> bool {
    if tr.states.is_empty() {
        return false;
    }
    let half = p.window.max(1) / 2;
    let pts: Vec<Vec2> = tr.states.iter().map(|s| s.planar()).collect();
    let fixed = repair_positions(pts.clone(), half, p.jump_threshold);
    let yaws: Vec<f64> = tr.states.iter().map(|s| s.yaw).collect();
    let smooth = smooth_yaw(&yaws, half);
    let changed = fixed != pts || smooth != yaws;
    for ((s, q), y) in tr.states.iter_mut().zip(fixed).zip(smooth) {
        s.set_planar(q);
        s.yaw = y;
    }
    changed
}

/// Finds the best (earlier, later) fragment pair to merge, if any.
fn stitch_candidate(tracks: &[TrackRecord], p: &RefineParams) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..tracks.len()).collect();
    order.sort_by(|&a, &b| {
        tracks[a]
            .end_time()
            .total_cmp(&tracks[b].end_time())
            .then_with(|| tracks[a].track_id.cmp(&tracks[b].track_id))
    });
    for &ai in &order {
        let a = &tracks[ai];
        let Some(last) = a.states.last() else { continue };
        let mut best: Option<(f64, usize)> = None;
        for (bi, b) in tracks.iter().enumerate() {
            if bi == ai || b.class != a.class || b.states.is_empty() {
                continue;
            }
            let gap = b.start_time() - a.end_time();
            if !(gap > 0.0) {
                continue;
            }
            let gap_frames = (gap / p.frame_dt).round();
            if gap_frames > f64::from(p.gap_max) {
                continue;
            }
            let predicted = last.planar() + last.velocity() * gap;
            let err = predicted.distance(b.states[0].planar());
            if err > p.stitch_gate {
                continue;
            }
            let better = match best {
                None => true,
                Some((be, bj)) => {
                    err < be
                        || (err == be
                            && (b.start_time(), &b.track_id)
                                < (tracks[bj].start_time(), &tracks[bj].track_id))
                }
            };
            if better {
                best = Some((err, bi));
            }
        }
        if let Some((_, bi)) = best {
            return Some((ai, bi));
        }
    }
    None
}

/// Refines tracks until nothing changes: stitches fragments (the earlier id
/// survives), repairs positional jumps against a centered median and
/// median-filters the unwrapped heading. State count is preserved.
pub fn refine_trajectories(tracks: &[TrackRecord], params: &RefineParams) -> Vec<TrackRecord> {
    let mut out: Vec<TrackRecord> = tracks.to_vec();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        while let Some((ai, bi)) = stitch_candidate(&out, params) {
            let b = out.remove(bi);
            let ai = if bi < ai { ai - 1 } else { ai };
            let a = &mut out[ai];
            for mut s in b.states {
                s.track_id = Some(a.track_id.clone());
                a.states.push(s);
            }
            a.hits += b.hits;
            changed = true;
        }
        for tr in &mut out {
            changed |= refine_track(tr, params);
        }
        if !changed {
            break;
        }
    }
    out.sort_by(|a, b| a.track_id.cmp(&b.track_id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_kernel::{ObjectClass, ObjectState, TrackId};

    fn track(id: &str, pts: &[(f64, f64)], t0: f64, dt: f64, speed: f64) -> TrackRecord {
        let states = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let mut s = ObjectState::new(ObjectClass::Car).with_id(id).at(x, y).moving(speed);
                s.timestamp = t0 + dt * i as f64;
                s
            })
            .collect();
        TrackRecord::from_states(TrackId::from(id), states)
    }

    fn positions(tr: &TrackRecord) -> Vec<(f64, f64)> {
        tr.states.iter().map(|s| (s.x, s.y)).collect()
    }

    #[test]
    fn outlier_replaced_by_window_median() {
        let tr = track("a", &[(0.0, 0.0), (1.0, 0.0), (9.0, 9.0), (3.0, 0.0), (4.0, 0.0)], 0.0, 0.05, 1.0);
        let out = refine_trajectories(&[tr], &RefineParams::default());
        assert_eq!(positions(&out[0]), vec![(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
    }

    #[test]
    fn smooth_track_unchanged() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (0.5 * i as f64, 0.25 * i as f64)).collect();
        let tr = track("a", &pts, 0.0, 0.05, 10.0);
        let out = refine_trajectories(std::slice::from_ref(&tr), &RefineParams::default());
        assert_eq!(out, vec![tr]);
    }

    #[test]
    fn fragments_stitched_under_earlier_id() {
        let a = track("A", &[(9.8, 0.0), (9.9, 0.0), (10.0, 0.0)], 0.0, 0.05, 2.0);
        let b = track("B", &[(10.8, 0.0), (10.9, 0.0), (11.0, 0.0)], 0.5, 0.05, 2.0);
        let out = refine_trajectories(&[b, a], &RefineParams::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].track_id, TrackId::from("A"));
        assert_eq!(out[0].states.len(), 6);
        assert!(out[0].states.iter().all(|s| s.id_str() == "A"));
    }

    #[test]
    fn different_classes_never_stitch() {
        let a = track("A", &[(9.8, 0.0), (9.9, 0.0), (10.0, 0.0)], 0.0, 0.05, 2.0);
        let mut b = track("B", &[(10.8, 0.0), (10.9, 0.0), (11.0, 0.0)], 0.5, 0.05, 2.0);
        b.class = ObjectClass::Truck;
        assert_eq!(refine_trajectories(&[a, b], &RefineParams::default()).len(), 2);
    }

    #[test]
    fn yaw_spike_removed_across_wrap() {
        let mut tr = track("a", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)], 0.0, 0.05, 1.0);
        let yaws = [3.1, -3.13, 0.5, 3.12, 3.13];
        for (s, y) in tr.states.iter_mut().zip(yaws) {
            s.yaw = y;
        }
        let out = refine_trajectories(&[tr], &RefineParams::default());
        let y2 = out[0].states[2].yaw;
        assert!(y2.abs() > 3.0, "spike should be replaced, got {y2}");
        let again = refine_trajectories(&out, &RefineParams::default());
        assert_eq!(again, out);
    }
}
