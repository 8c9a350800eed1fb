use serde::{Deserialize, Serialize};

use super::bev_iou;
use crate::data_pipeline::DetectionFrame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchCriterion {
    /// BEV IoU at least this.
    Iou(f64),
    /// BEV center distance at most this, meters.
    Distance(f64),
}

/// Indices into the ground-truth and detection frames.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchResult {
    /// `(gt index, det index)`.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_det: Vec<usize>,
}

impl MatchResult {
    /// Matched pairs as `(gt id, det id)`.
    pub fn id_pairs(&self, gt: &DetectionFrame, det: &DetectionFrame) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|&(g, d)| {
                (
                    gt.objects[g].object.id_str().to_string(),
                    det.objects[d].object.id_str().to_string(),
                )
            })
            .collect()
    }

    /// Per detection: whether it was matched.
    pub fn det_is_tp(&self, n_det: usize) -> Vec<bool> {
        let mut tp = vec![false; n_det];
        for &(_, d) in &self.pairs {
            tp[d] = true;
        }
        tp
    }
}

/// Greedy matching in descending detection confidence. Each detection
/// takes the best still-free ground truth of the same class that meets the
/// criterion; ties go to the smaller ground-truth id.
pub fn match_detections(gt: &DetectionFrame, det: &DetectionFrame, criterion: MatchCriterion) -> MatchResult {
    let mut order: Vec<usize> = (0..det.objects.len()).collect();
    order.sort_by(|&a, &b| det.objects[b].confidence.total_cmp(&det.objects[a].confidence).then(a.cmp(&b)));
    let mut taken = vec![false; gt.objects.len()];
    let mut result = MatchResult::default();
    for d in order {
        let dobj = &det.objects[d].object;
        let dbox = dobj.footprint();
        let mut best: Option<(f64, usize)> = None;
        for (g, gd) in gt.objects.iter().enumerate() {
            let gobj = &gd.object;
            if taken[g] || gobj.class != dobj.class {
                continue;
            }
            // Score where larger is better.
            let score = match criterion {
                MatchCriterion::Iou(tau) => {
                    let iou = bev_iou(&gobj.footprint(), &dbox);
                    if iou < tau || iou <= 0.0 {
                        continue;
                    }
                    iou
                }
                MatchCriterion::Distance(delta) => {
                    let dist = gobj.planar().distance(dobj.planar());
                    if dist > delta {
                        continue;
                    }
                    -dist
                }
            };
            let better = match best {
                None => true,
                Some((s, bg)) => score > s || (score == s && gt_key(gt, g) < gt_key(gt, bg)),
            };
            if better {
                best = Some((score, g));
            }
        }
        match best {
            Some((_, g)) => {
                taken[g] = true;
                result.pairs.push((g, d));
            }
            None => result.unmatched_det.push(d),
        }
    }
    result.unmatched_gt = (0..gt.objects.len()).filter(|&g| !taken[g]).collect();
    result.unmatched_det.sort_unstable();
    result
}

fn gt_key(gt: &DetectionFrame, g: usize) -> (&str, usize) {
    (gt.objects[g].object.id_str(), g)
}
