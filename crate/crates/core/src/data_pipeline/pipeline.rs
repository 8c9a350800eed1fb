use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{match_asset, refine_trajectories, AssetCatalog, Detection, DetectionFrame, RefineParams, TrackRecord, Tracker, TrackerParams};
use crate::error::Result;
use crate::sim_kernel::TrackId;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub tracker: TrackerParams,
    pub refine: RefineParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedLog {
    /// One frame per input frame, same timestamps and sources.
    pub frames: Vec<DetectionFrame>,
    pub tracks: Vec<TrackRecord>,
    /// Asset chosen for each track when a catalog was given.
    pub assets: BTreeMap<TrackId, String>,
}

fn median_dims(tr: &TrackRecord) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut v: Vec<f64> = tr
            .states
            .iter()
            .map(|s| [s.length, s.width, s.height][k])
            .collect();
        v.sort_by(f64::total_cmp);
        *o = v[v.len() / 2];
    }
    out
}

/// Raw detections to a clean replay log: associate frame by frame, drop
/// tracks that never got confirmed, refine, optionally snap each track to
/// its closest asset size, and lay the states back out per frame.
///
/// Refined states carry confidence 1.
pub fn process_log(raw: &[DetectionFrame], params: &PipelineParams, catalog: Option<&AssetCatalog>) -> Result<ProcessedLog> {
    let mut tracker = Tracker::new(params.tracker.clone());
    for f in raw {
        tracker.associate(f)?;
    }
    let min_hits = params.tracker.min_hits;
    let confirmed: Vec<TrackRecord> = tracker.into_tracks().into_iter().filter(|t| t.is_confirmed(min_hits)).collect();
    let mut tracks = refine_trajectories(&confirmed, &params.refine);

    let mut assets = BTreeMap::new();
    if let Some(cat) = catalog {
        for tr in &mut tracks {
            let name = match_asset(median_dims(tr), cat, tr.class)?;
            let [l, w, h] = cat.entries[&tr.class][name];
            for s in &mut tr.states {
                (s.length, s.width, s.height) = (l, w, h);
            }
            assets.insert(tr.track_id.clone(), name.to_string());
        }
    }

    let mut frames: Vec<DetectionFrame> = raw.iter().map(|f| DetectionFrame::new(f.timestamp, f.source_id.clone())).collect();
    for tr in &tracks {
        for s in &tr.states {
            let k = frames.partition_point(|f| f.timestamp < s.timestamp);
            if let Some(f) = frames.get_mut(k).filter(|f| f.timestamp == s.timestamp) {
                f.objects.push(Detection::certain(s.clone()));
            }
        }
    }
    for f in &mut frames {
        f.objects.sort_by(|a, b| a.object.track_id.cmp(&b.object.track_id));
    }
    Ok(ProcessedLog { frames, tracks, assets })
}
