//! Raw roadside detections to a clean replay log: ingest, associate,
//! refine, snap to assets and export.

use coopsim::data_pipeline::{export_unified, ingest_stream, process_log, AssetCatalog, PipelineParams};

fn main() -> coopsim::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let raw = ingest_stream(format!("{dir}/logs/raw_two_cars.ndjson"))?;
    println!("{} frames, {} skipped", raw.frames.len(), raw.skipped_count());
    for s in &raw.skipped {
        println!("  line {}: {}", s.line, s.reason);
    }
    let catalog = AssetCatalog::load(format!("{dir}/assets/catalog.json"))?;
    let out = process_log(&raw.frames, &PipelineParams::default(), Some(&catalog))?;
    for tr in &out.tracks {
        println!(
            "{} {:?}: {} states, t {:.1}..{:.1}, asset {}",
            tr.track_id,
            tr.class,
            tr.states.len(),
            tr.start_time(),
            tr.end_time(),
            out.assets[&tr.track_id]
        );
    }
    let path = std::env::temp_dir().join("coopsim_refined.ndjson");
    export_unified(&out.frames, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
