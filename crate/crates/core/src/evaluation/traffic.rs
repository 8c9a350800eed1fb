use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::data_pipeline::DetectionFrame;
use crate::world_model::{point_in_intersection, IntersectionRegion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficParams {
    /// Throughput window, seconds.
    pub window: f64,
    /// Below this speed a vehicle inside the region counts as waiting.
    pub stop_speed: f64,
}

impl Default for TrafficParams {
    fn default() -> Self {
        TrafficParams {
            window: 60.0,
            stop_speed: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub start: f64,
    pub end: f64,
    pub crossings: usize,
    /// Vehicles per minute.
    pub throughput: f64,
    pub avg_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ApproachStats {
    pub entered: usize,
    pub crossings: usize,
    pub delay_avg: f64,
    pub delay_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrafficMetrics {
    /// Vehicles per minute over the whole log.
    pub throughput: f64,
    pub delay_avg: f64,
    pub delay_max: f64,
    /// m/s; zero when no vehicle was ever inside.
    pub avg_speed: f64,
    pub crossings: usize,
    pub vehicles_entered: usize,
    pub windows: Vec<WindowStats>,
    /// `(t, vehicles inside)` for every frame.
    pub count_series: Vec<(f64, usize)>,
    /// Keyed by the compass side a vehicle entered from.
    pub by_approach: BTreeMap<String, ApproachStats>,
}

#[derive(Default)]
struct VehicleTrack {
    seen_outside: bool,
    inside: bool,
    entered: bool,
    approach: Option<&'static str>,
    wait: f64,
    crossings: Vec<f64>,
}

fn compass(v: crate::geometry::Vec2) -> &'static str {
    let a = v.angle();
    if a.abs() <= FRAC_PI_4 {
        "east"
    } else if a > FRAC_PI_4 && a <= 3.0 * FRAC_PI_4 {
        "north"
    } else if (-3.0 * FRAC_PI_4..-FRAC_PI_4).contains(&a) {
        "south"
    } else {
        debug_assert!(a.abs() <= PI);
        "west"
    }
}

/// Throughput, delay and speed of vehicles (car, truck, bus) in a region.
///
/// Each frame stands for the interval up to the next frame (the last one
/// reuses the previous interval). A crossing is an observed entry followed
/// by an exit and is counted in the window holding the exit frame. Windows
/// are `[t0 + k*w, t0 + (k+1)*w)` and tile the log's span.
pub fn traffic_metrics(frames: &[DetectionFrame], region: &IntersectionRegion, params: &TrafficParams) -> TrafficMetrics {
    let mut out = TrafficMetrics::default();
    if frames.is_empty() {
        return out;
    }
    let n = frames.len();
    let interval = |k: usize| -> f64 {
        if n < 2 {
            0.0
        } else if k + 1 < n {
            frames[k + 1].timestamp - frames[k].timestamp
        } else {
            frames[k].timestamp - frames[k - 1].timestamp
        }
    };
    let t0 = frames[0].timestamp;
    let span = frames[n - 1].timestamp - t0 + interval(n - 1);
    let nw = ((span / params.window) - 1e-9).ceil().max(1.0) as usize;
    let window_of = |t: f64| (((t - t0) / params.window).floor().max(0.0) as usize).min(nw - 1);

    let mut tracks: BTreeMap<String, VehicleTrack> = BTreeMap::new();
    let mut frame_speeds: Vec<(usize, f64)> = Vec::new();
    for (k, f) in frames.iter().enumerate() {
        let dt = interval(k);
        let mut speeds = Vec::new();
        for o in f.states().filter(|o| o.class.is_vehicle()) {
            let Some(id) = &o.track_id else { continue };
            let tr = tracks.entry(id.0.clone()).or_default();
            let inside = point_in_intersection([o.x, o.y, o.z], region);
            if inside {
                speeds.push(o.speed);
                if !tr.entered {
                    tr.entered = true;
                    tr.approach = Some(compass(o.planar() - region.center));
                }
                if o.speed < params.stop_speed {
                    tr.wait += dt;
                }
            } else if tr.inside && tr.seen_outside {
                tr.crossings.push(f.timestamp);
            }
            if !inside {
                tr.seen_outside = true;
            }
            tr.inside = inside;
        }
        out.count_series.push((f.timestamp, speeds.len()));
        if !speeds.is_empty() {
            frame_speeds.push((k, speeds.iter().sum::<f64>() / speeds.len() as f64));
        }
    }

    let mut per_window = vec![0usize; nw];
    let mut waits = Vec::new();
    for tr in tracks.values() {
        for &t in &tr.crossings {
            per_window[window_of(t)] += 1;
        }
        if tr.entered {
            waits.push(tr.wait);
            let a = out.by_approach.entry(tr.approach.unwrap_or("unknown").to_string()).or_default();
            a.entered += 1;
            a.crossings += tr.crossings.len();
            a.delay_avg += tr.wait;
            a.delay_max = a.delay_max.max(tr.wait);
        }
    }
    for a in out.by_approach.values_mut() {
        a.delay_avg /= a.entered as f64;
    }
    out.crossings = per_window.iter().sum();
    out.vehicles_entered = waits.len();
    out.throughput = out.crossings as f64 * 60.0 / (nw as f64 * params.window);
    if !waits.is_empty() {
        out.delay_avg = waits.iter().sum::<f64>() / waits.len() as f64;
        out.delay_max = waits.iter().copied().fold(0.0, f64::max);
    }
    if !frame_speeds.is_empty() {
        out.avg_speed = frame_speeds.iter().map(|s| s.1).sum::<f64>() / frame_speeds.len() as f64;
    }
    for (w, &c) in per_window.iter().enumerate() {
        let in_w: Vec<f64> = frame_speeds
            .iter()
            .filter(|(k, _)| window_of(frames[*k].timestamp) == w)
            .map(|s| s.1)
            .collect();
        out.windows.push(WindowStats {
            start: t0 + w as f64 * params.window,
            end: t0 + (w + 1) as f64 * params.window,
            crossings: c,
            throughput: c as f64 * 60.0 / params.window,
            avg_speed: (!in_w.is_empty()).then(|| in_w.iter().sum::<f64>() / in_w.len() as f64),
        });
    }
    out
}
