//! Detection, pose and traffic metrics, plus kernel profiling.

mod ap;
mod iou;
mod matching;
mod pose;
mod report;
mod scalability;
mod traffic;

pub use ap::{
    align_frames, ap_at_distance, average_precision, class_ap_at_distance, class_average_precision, macro_average,
    run_average_precision, DIST_THRESHOLDS,
};
pub use iou::bev_iou;
pub use matching::{match_detections, MatchCriterion, MatchResult};
pub use pose::{pose_errors, run_pose_errors, scale_error, PoseErrors, POSE_MATCH_DISTANCE};
pub use report::{evaluate_agent, AgentMetrics, ClassMetrics, MetricsReport, DEFAULT_IOU_THRESHOLDS};
pub use scalability::{profile_scalability, scalability_svg, tile_map, write_scalability_csv, ProfileOptions, ScalabilityRecord};
pub use traffic::{traffic_metrics, ApproachStats, TrafficMetrics, TrafficParams, WindowStats};
