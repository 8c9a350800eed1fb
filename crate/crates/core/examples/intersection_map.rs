//! Loads the four-way fixture map, tests a few points against the
//! intersection region and builds the waypoint graph.

use coopsim::geometry::Vec2;
use coopsim::world_model::{build_waypoint_graph, load_map, nearest_lane, point_in_intersection};

fn main() -> coopsim::Result<()> {
    let map = load_map(concat!(env!("CARGO_MANIFEST_DIR"), "/data/maps/four_way.json"))?;
    let region = &map.intersections[0];
    println!("{} lanes, region `{}` radius {} m", map.lanes.len(), region.id, region.d_f);

    for p in [[0.0, 0.0, 1.0], [30.0, 40.0, 0.0], [30.0, 40.1, 0.0], [0.0, 0.0, 4.5]] {
        println!("  {:?} inside: {}", p, point_in_intersection(p, region));
    }

    let m = nearest_lane(&map, Vec2::new(2.0, -60.0))?;
    println!("nearest lane to (2, -60): {} at s={:.1} offset={:.2}", m.lane_id, m.arc_offset, m.lateral_offset);

    let g = build_waypoint_graph(&map, 5.0)?;
    println!("waypoint graph: {} nodes, {} edges, {:.1} m of lane", g.node_count(), g.edge_count(), g.total_weight());
    Ok(())
}
