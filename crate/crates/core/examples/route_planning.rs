//! Plans a right turn through the intersection with A* and smooths it.

use coopsim::geometry::Vec2;
use coopsim::sim_kernel::{plan_route, smooth_path};
use coopsim::world_model::{build_waypoint_graph, load_map};

fn main() -> coopsim::Result<()> {
    let map = load_map(concat!(env!("CARGO_MANIFEST_DIR"), "/data/maps/four_way.json"))?;
    let g = build_waypoint_graph(&map, 5.0)?;
    let start = g.nearest_node(Vec2::new(1.75, -60.0)).expect("non-empty graph");
    let goal = g.nearest_node(Vec2::new(60.0, -1.75)).expect("non-empty graph");
    let (nodes, cost) = plan_route(&g, start, goal)?;
    println!("{} waypoints, {:.2} m", nodes.len(), cost);

    let mut pts: Vec<Vec2> = nodes.iter().map(|&n| g.node(n).position).collect();
    pts.dedup_by(|a, b| a.distance(*b) < 1e-9);
    let path = smooth_path(&pts)?.resample(2.0);
    for p in path.points().iter().step_by(8) {
        println!("  ({:7.2}, {:7.2})", p.x, p.y);
    }
    Ok(())
}
