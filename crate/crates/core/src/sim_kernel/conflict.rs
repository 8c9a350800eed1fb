use serde::{Deserialize, Serialize};

use super::{ObjectState, TrackId};
use crate::geometry::boxes_overlap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    TtcBreach,
    OverlapCollision,
}

impl ConflictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictKind::TtcBreach => "ttc_breach",
            ConflictKind::OverlapCollision => "overlap_collision",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictEvent {
    pub time: f64,
    /// Ordered so that `pair.0 < pair.1`.
    pub pair: (TrackId, TrackId),
    pub kind: ConflictKind,
    pub ttc: Option<f64>,
    pub min_distance: f64,
}

/// Pairwise conflicts in one frame. Footprints that overlap now give an
/// `overlap_collision`; otherwise both objects are extrapolated at constant
/// velocity on a `dt` grid and the first sample whose footprints overlap
/// within `horizon` gives a `ttc_breach`. The reported time to collision is
/// therefore late by at most one `dt`. `min_distance` is the smallest center
/// distance seen up to the event.
pub fn detect_conflicts(frame: &[ObjectState], horizon: f64, dt: f64) -> Vec<ConflictEvent> {
    let mut order: Vec<&ObjectState> = frame.iter().collect();
    order.sort_by(|a, b| a.track_id.cmp(&b.track_id));
    let time = frame.first().map_or(0.0, |o| o.timestamp);
    let samples = (horizon / dt + 1e-9).floor() as usize;
    let mut out = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            let (a, b) = (order[i], order[j]);
            if let Some(e) = pair_conflict(a, b, horizon, dt, samples, time) {
                out.push(e);
            }
        }
    }
    out
}

fn pair_conflict(
    a: &ObjectState,
    b: &ObjectState,
    horizon: f64,
    dt: f64,
    samples: usize,
    time: f64,
) -> Option<ConflictEvent> {
    let fa = a.footprint();
    let fb = b.footprint();
    let pair = || {
        (
            a.track_id.clone().unwrap_or_else(|| TrackId::new("")),
            b.track_id.clone().unwrap_or_else(|| TrackId::new("")),
        )
    };
    let d0 = a.planar().distance(b.planar());
    if boxes_overlap(&fa, &fb) {
        return Some(ConflictEvent {
            time,
            pair: pair(),
            kind: ConflictKind::OverlapCollision,
            ttc: None,
            min_distance: d0,
        });
    }
    let reach = fa.bounding_radius() + fb.bounding_radius();
    let closing_bound = (a.speed + b.speed) * horizon;
    if d0 - reach > closing_bound {
        return None;
    }
    let (va, vb) = (a.velocity(), b.velocity());
    let mut min_d = d0;
    for k in 1..=samples {
        let tau = k as f64 * dt;
        let mut pa = fa;
        let mut pb = fb;
        pa.center = fa.center + va * tau;
        pb.center = fb.center + vb * tau;
        min_d = min_d.min(pa.center.distance(pb.center));
        if boxes_overlap(&pa, &pb) {
            return Some(ConflictEvent {
                time,
                pair: pair(),
                kind: ConflictKind::TtcBreach,
                ttc: Some(tau),
                min_distance: min_d,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_kernel::ObjectClass;
    use std::f64::consts::PI;

    fn car(id: &str, x: f64, y: f64, yaw: f64, v: f64) -> ObjectState {
        ObjectState::new(ObjectClass::Car).with_id(id).at(x, y).heading(yaw).moving(v)
    }

    #[test]
    fn head_on() {
        let f = [car("a", 0.0, 0.0, 0.0, 10.0), car("b", 100.0, 0.0, PI, 10.0)];
        let ev = detect_conflicts(&f, 6.0, 0.05);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, ConflictKind::TtcBreach);
        // Bumpers meet at (100 - 4.5) / 20 = 4.775 s.
        let ttc = ev[0].ttc.unwrap();
        assert!(ttc > 4.775 && ttc <= 4.775 + 0.05 + 1e-9, "{ttc}");
    }

    #[test]
    fn parallel_same_speed() {
        let f = [car("a", 0.0, 0.0, 0.0, 10.0), car("b", 0.0, 3.5, 0.0, 10.0)];
        assert!(detect_conflicts(&f, 6.0, 0.05).is_empty());
    }

    #[test]
    fn overlap_now() {
        let f = [car("a", 0.0, 0.0, 0.0, 0.0), car("b", 1.0, 0.5, 0.3, 0.0)];
        let ev = detect_conflicts(&f, 3.0, 0.05);
        assert_eq!(ev[0].kind, ConflictKind::OverlapCollision);
        assert_eq!(ev[0].ttc, None);
    }

    #[test]
    fn order_independent() {
        let f = [car("b", 100.0, 0.0, PI, 10.0), car("a", 0.0, 0.0, 0.0, 10.0)];
        let g = [f[1].clone(), f[0].clone()];
        assert_eq!(detect_conflicts(&f, 6.0, 0.05), detect_conflicts(&g, 6.0, 0.05));
        assert_eq!(detect_conflicts(&f, 6.0, 0.05)[0].pair.0.as_str(), "a");
    }
}
