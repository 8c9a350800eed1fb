//! Injects each pre-crash template against a passive ego and lists the
//! conflicts it causes, then reruns the rear-end case with the ego
//! controller on.

use coopsim::sim_kernel::{run_scenario, PrecrashKind, ScenarioConfig};

fn main() -> coopsim::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios");
    for kind in PrecrashKind::ALL {
        let cfg = ScenarioConfig::load(format!("{dir}/precrash_{}.json", kind.as_str()))?;
        let out = run_scenario(&cfg)?;
        print!("{:<26}", kind.as_str());
        for c in &out.conflicts {
            print!(" {}@{:.2}s", c.kind.as_str(), c.time);
        }
        println!();
    }
    let cfg = ScenarioConfig::load(format!("{dir}/precrash_rear_end_decel_ego.json"))?;
    let out = run_scenario(&cfg)?;
    let hits = out.conflicts.iter().filter(|c| c.kind.as_str() == "overlap_collision").count();
    println!("rear_end_decel with ego control: {} conflicts, {} collisions", out.conflicts.len(), hits);
    Ok(())
}
