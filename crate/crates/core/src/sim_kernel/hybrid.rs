use std::collections::BTreeSet;

use super::{ObjectState, TrackId};
use crate::data_pipeline::{Detection, DetectionFrame};
use crate::error::{Error, Result};

pub const REPLAY_PREFIX: &str = "replay:";

/// Replayed objects with their ids moved into the replay namespace. Objects
/// logged without an id get one from their position in the frame.
pub fn prefixed_replay(replay: &DetectionFrame) -> Vec<Detection> {
    replay
        .objects
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let mut d = d.clone();
            let id = match &d.object.track_id {
                Some(id) => format!("{REPLAY_PREFIX}{id}"),
                None => format!("{REPLAY_PREFIX}#{k}"),
            };
            d.object.track_id = Some(TrackId(id));
            d
        })
        .collect()
}

/// Union of a replayed frame and synthetic objects at the same instant.
/// Replay ids are prefixed so the two sets never share a namespace; a
/// collision after prefixing means the log itself is malformed.
pub fn synthesize_hybrid_frame(replay: &DetectionFrame, synthetic: &[ObjectState], dt: f64) -> Result<DetectionFrame> {
    let tolerance = dt / 2.0;
    if let Some(s) = synthetic.first() {
        if (s.timestamp - replay.timestamp).abs() > tolerance {
            return Err(Error::TimestampMismatch {
                left: replay.timestamp,
                right: s.timestamp,
                tolerance,
            });
        }
    } else {
        return Ok(replay.clone());
    }
    let t = synthetic[0].timestamp;
    let mut seen = BTreeSet::new();
    let mut out = DetectionFrame::new(t, replay.source_id.clone());
    for mut d in prefixed_replay(replay) {
        d.object.timestamp = t;
        out.objects.push(d);
    }
    out.objects.extend(synthetic.iter().cloned().map(Detection::certain));
    for d in &out.objects {
        let id = d.object.track_id.clone().ok_or(Error::MissingTrackId(t))?;
        if !seen.insert(id.clone()) {
            return Err(Error::IdCollision(id.0));
        }
    }
    Ok(out)
}
