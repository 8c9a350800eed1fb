//! The occlusion fixture: one unit's view of a crossing pedestrian is
//! blocked by a truck. Compares its own detections with late fusion of
//! both units across a few seeds.

use coopsim::evaluation::{evaluate_agent, MetricsReport};
use coopsim::sim_kernel::{run_scenario, ScenarioConfig};

fn main() -> coopsim::Result<()> {
    let mut cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios/occlusion.json"))?;
    println!("{:>4} {:>10} {:>10} {:>8} {:>8}", "seed", "AP nofuse", "AP late", "ATE no", "ATE late");
    let mut last = MetricsReport::default();
    for seed in 1..=5 {
        cfg.environment.seed = seed;
        let out = run_scenario(&cfg)?;
        let a = evaluate_agent(&out.frames, &out.no_fusion, &[0.5])?;
        let b = evaluate_agent(&out.frames, &out.late_fusion, &[0.5])?;
        println!(
            "{seed:>4} {:>10.3} {:>10.3} {:>8.3} {:>8.3}",
            a.ap_at_iou["0.5"].unwrap_or(f64::NAN),
            b.ap_at_iou["0.5"].unwrap_or(f64::NAN),
            a.ate.unwrap_or(f64::NAN),
            b.ate.unwrap_or(f64::NAN)
        );
        last.agent.insert("no_fusion".into(), a);
        last.agent.insert("late_fusion".into(), b);
    }
    let mut csv = Vec::new();
    last.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
