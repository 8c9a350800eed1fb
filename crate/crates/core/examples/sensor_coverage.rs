//! Coverage and redundancy of the three preset sensor placements, with
//! shortened ranges so the differences show.

use coopsim::infrastructure::{placement_coverage, LayoutKind, PlacementLayout};
use coopsim::world_model::load_map;

fn main() -> coopsim::Result<()> {
    let map = load_map(concat!(env!("CARGO_MANIFEST_DIR"), "/data/maps/four_way.json"))?;
    let center = map.intersections[0].center;
    println!("{:<24} {:>8} {:>10}", "layout", "covered", "redundant");
    for kind in [LayoutKind::Centralized, LayoutKind::PartiallyDistributed, LayoutKind::FullyDistributed] {
        let mut layout = PlacementLayout::preset(&kind, center).expect("preset");
        for s in &mut layout.sensors {
            s.range = s.range.min(45.0);
        }
        let cov = placement_coverage(&layout, &map, 1.0);
        println!(
            "{:<24} {:>7.1}% {:>9.1}%",
            kind.name(),
            100.0 * cov.covered_fraction,
            100.0 * cov.redundancy_fraction
        );
    }
    Ok(())
}
