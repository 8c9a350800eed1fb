use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::sim_kernel::{ScenarioConfig, SimClock, Simulation};
use crate::world_model::{load_map, VectorMap};

/// Gap left between neighbouring tiles, meters.
const TILE_GAP: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    /// Simulated seconds per run; the scenario's duration when `None`.
    pub duration: Option<f64>,
    /// Timed repetitions per count; the fastest is kept.
    pub reps: usize,
    /// Multiplier on the per-lane arrival rate.
    pub rate_scale: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            duration: None,
            reps: 3,
            rate_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityRecord {
    pub intersections: usize,
    pub steps: u64,
    pub steps_per_second: f64,
    /// Change in steps per second against the previous row, percent.
    pub delta_pct: Option<f64>,
    /// Most objects alive at once.
    pub peak_objects: usize,
    pub step_median_s: f64,
    pub step_p95_s: f64,
}

/// `count` copies of `base` laid side by side along x, ids prefixed `t{k}-`.
pub fn tile_map(base: &VectorMap, count: usize) -> Result<VectorMap> {
    if count == 0 {
        return Err(Error::Validation(vec!["intersection count must be at least 1".into()]));
    }
    if base.lanes.is_empty() && base.intersections.is_empty() {
        return Ok(base.clone());
    }
    let (lo, hi) = base.bounds();
    let pitch = hi.x - lo.x + TILE_GAP;
    let tiles: Vec<VectorMap> = (0..count)
        .map(|k| base.tiled_copy(Vec2::new(k as f64 * pitch, 0.0), &format!("t{k}-")))
        .collect();
    VectorMap::merged(&tiles)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Background-traffic throughput of the kernel at each intersection count.
pub fn profile_scalability(base: &ScenarioConfig, counts: &[usize], opts: &ProfileOptions) -> Result<Vec<ScalabilityRecord>> {
    if counts.is_empty() {
        return Err(Error::Validation(vec!["counts: must not be empty".into()]));
    }
    if counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(vec!["counts: must be strictly ascending".into()]));
    }
    let map = load_map(&base.scenario.map)?;
    let env = &base.environment;
    let steps = SimClock::steps_for(opts.duration.unwrap_or(env.duration), env.dt);
    let mut traffic = base.scenario.background_traffic.clone();
    traffic.rate_per_min *= opts.rate_scale;

    let mut out: Vec<ScalabilityRecord> = Vec::new();
    for &n in counts {
        let tiled = tile_map(&map, n)?;
        let mut best: Option<(f64, Vec<f64>, usize)> = None;
        for _ in 0..opts.reps.max(1) {
            let mut sim = Simulation::new(tiled.clone(), env.dt, env.seed);
            sim.set_background(traffic.clone());
            sim.set_conflict_horizon(base.scenario.conflict_horizon);
            let mut times = Vec::with_capacity(steps as usize);
            let mut peak = 0;
            let start = Instant::now();
            for _ in 0..steps {
                let s = Instant::now();
                sim.step()?;
                times.push(s.elapsed().as_secs_f64());
                peak = peak.max(sim.live_count());
            }
            let total = start.elapsed().as_secs_f64();
            if best.as_ref().is_none_or(|b| total < b.0) {
                best = Some((total, times, peak));
            }
        }
        let (total, mut times, peak) = best.expect("at least one repetition");
        times.sort_by(f64::total_cmp);
        let sps = if total > 0.0 { steps as f64 / total } else { f64::INFINITY };
        let delta_pct = out.last().map(|p| (sps - p.steps_per_second) / p.steps_per_second * 100.0);
        out.push(ScalabilityRecord {
            intersections: n,
            steps,
            steps_per_second: sps,
            delta_pct,
            peak_objects: peak,
            step_median_s: percentile(&times, 0.5),
            step_p95_s: percentile(&times, 0.95),
        });
    }
    Ok(out)
}

/// Columns `intersections,steps_per_second,delta_pct,peak_objects`.
pub fn write_scalability_csv<W: Write>(records: &[ScalabilityRecord], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["intersections", "steps_per_second", "delta_pct", "peak_objects"])?;
    for r in records {
        csv.write_record([
            r.intersections.to_string(),
            format!("{:.3}", r.steps_per_second),
            r.delta_pct.map(|d| format!("{d:.2}")).unwrap_or_default(),
            r.peak_objects.to_string(),
        ])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Line chart of steps per second against intersection count.
pub fn scalability_svg(records: &[ScalabilityRecord]) -> String {
    let (w, h, m) = (480.0, 320.0, 50.0);
    let xs: Vec<f64> = records.iter().map(|r| r.intersections as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.steps_per_second).collect();
    let x_lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_hi = ys.iter().copied().fold(0.0, f64::max).max(1e-9);
    let px = |x: f64| {
        if x_hi > x_lo {
            m + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * m)
        } else {
            w / 2.0
        }
    };
    let py = |y: f64| h - m - y / y_hi * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - m, w - m, h - m);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">intersections</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {})">steps/s</text>"#, h / 2.0, h / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{:.0}</text>"#, m - 4.0, m + 4.0, y_hi);
    let pts: Vec<String> = xs.iter().zip(&ys).map(|(&x, &y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
    if pts.len() > 1 {
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, pts.join(" "));
    }
    for (&x, &y) in xs.iter().zip(&ys) {
        let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="steelblue"/>"#, px(x), py(y));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">{x}</text>"#, px(x), h - m + 14.0);
    }
    s.push_str("</svg>\n");
    s
}
