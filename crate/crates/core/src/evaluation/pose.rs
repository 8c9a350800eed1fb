use serde::{Deserialize, Serialize};

use super::{align_frames, match_detections, MatchCriterion, MatchResult};
use crate::data_pipeline::DetectionFrame;
use crate::error::Result;
use crate::geometry::angle_diff_abs;
use crate::sim_kernel::ObjectState;

/// Center distance used to pair boxes for pose errors, meters.
pub const POSE_MATCH_DISTANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PoseErrors {
    /// Mean BEV center distance, meters.
    pub ate: f64,
    /// Mean `1 - aligned 3D IoU`.
    pub ase: f64,
    /// Mean absolute yaw difference in `[0, pi]`, radians.
    pub aoe: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    t: f64,
    s: f64,
    o: f64,
    n: usize,
}

impl Sums {
    fn add(&mut self, g: &ObjectState, d: &ObjectState) {
        self.t += g.planar().distance(d.planar());
        self.s += scale_error(g, d);
        self.o += angle_diff_abs(g.yaw, d.yaw);
        self.n += 1;
    }

    fn mean(&self) -> Option<PoseErrors> {
        (self.n > 0).then(|| {
            let n = self.n as f64;
            PoseErrors {
                ate: self.t / n,
                ase: self.s / n,
                aoe: self.o / n,
                count: self.n,
            }
        })
    }
}

/// `1 - IoU` of the two boxes once centers and yaw are aligned.
pub fn scale_error(g: &ObjectState, d: &ObjectState) -> f64 {
    let dims = [(g.length, d.length), (g.width, d.width), (g.height, d.height)];
    let (num, den) = dims
        .iter()
        .fold((1.0, 1.0), |(n, m), &(a, b)| (n * a.min(b), m * a.max(b)));
    1.0 - num / den
}

/// Pose errors over the matched pairs of one frame.
pub fn pose_errors(m: &MatchResult, gt: &DetectionFrame, det: &DetectionFrame) -> Option<PoseErrors> {
    let mut sums = Sums::default();
    for &(g, d) in &m.pairs {
        sums.add(&gt.objects[g].object, &det.objects[d].object);
    }
    sums.mean()
}

/// Pose errors over a run, pairing boxes by center distance.
pub fn run_pose_errors(gt: &[DetectionFrame], det: &[DetectionFrame]) -> Result<Option<PoseErrors>> {
    let mut sums = Sums::default();
    for (g, d) in align_frames(gt, det)? {
        let Some(d) = d else { continue };
        let m = match_detections(g, d, MatchCriterion::Distance(POSE_MATCH_DISTANCE));
        for &(gi, di) in &m.pairs {
            sums.add(&g.objects[gi].object, &d.objects[di].object);
        }
    }
    Ok(sums.mean())
}
