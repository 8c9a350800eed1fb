//! Replay ingestion, multi-frame association and offline trajectory
//! refinement, plus the newline-delimited JSON frame log shared with the
//! simulation kernel.

mod assets;
mod frame;
mod hungarian;
mod kalman;
mod pipeline;
mod refine;
mod stream;
mod tracker;

pub use assets::{match_asset, AssetCatalog};
pub use frame::{Detection, DetectionFrame, WireFrame, WireObject};
pub use hungarian::{assign_gated, hungarian};
pub use kalman::{kalman_predict_update, KalmanNoise, KalmanState};
pub use pipeline::{process_log, PipelineParams, ProcessedLog};
pub use refine::{refine_trajectories, RefineParams};
pub use stream::{
    export_unified, ingest_stream, read_frames, write_frames, IngestReport, SkippedLine,
};
pub use tracker::{associate, TrackRecord, Tracker, TrackerParams};
