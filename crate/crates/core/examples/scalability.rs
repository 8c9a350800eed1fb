//! Steps per second of the kernel as the fixture map is tiled to more
//! intersections, with per-lane traffic held constant.

use coopsim::evaluation::{profile_scalability, write_scalability_csv, ProfileOptions};
use coopsim::sim_kernel::ScenarioConfig;

fn main() -> coopsim::Result<()> {
    let cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios/profile.json"))?;
    let opts = ProfileOptions { duration: Some(20.0), ..ProfileOptions::default() };
    let records = profile_scalability(&cfg, &[1, 2, 3, 4], &opts)?;
    write_scalability_csv(&records, std::io::stdout())?;
    for r in &records {
        println!("{} intersections: median step {:.1} us, p95 {:.1} us", r.intersections, r.step_median_s * 1e6, r.step_p95_s * 1e6);
    }
    Ok(())
}
