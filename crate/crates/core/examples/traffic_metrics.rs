//! Runs a minute of signalized background traffic and reports throughput,
//! delay and speed in the intersection region.

use coopsim::evaluation::{traffic_metrics, TrafficParams};
use coopsim::sim_kernel::{run_scenario, ScenarioConfig};
use coopsim::world_model::load_map;

fn main() -> coopsim::Result<()> {
    let cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios/traffic.json"))?;
    let map = load_map(&cfg.scenario.map)?;
    let out = run_scenario(&cfg)?;
    let spawned = out.events.iter().filter(|e| e.event == "spawn").count();
    println!("{} frames, {} vehicles spawned, peak {}", out.frames.len(), spawned, out.peak_objects);

    let params = TrafficParams { window: 20.0, ..TrafficParams::default() };
    let m = traffic_metrics(&out.frames, &map.intersections[0], &params);
    println!("throughput {:.1} veh/min, delay avg {:.2} s max {:.2} s, speed {:.2} m/s", m.throughput, m.delay_avg, m.delay_max, m.avg_speed);
    for w in &m.windows {
        println!("  [{:>4.0}, {:>4.0}) {:>2} crossings", w.start, w.end, w.crossings);
    }
    for (side, a) in &m.by_approach {
        println!("  from {side:<5} entered {:>2} crossed {:>2} delay {:.2} s", a.entered, a.crossings, a.delay_avg);
    }
    Ok(())
}
