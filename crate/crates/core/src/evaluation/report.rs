use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{align_frames, class_ap_at_distance, class_average_precision, macro_average, run_pose_errors, MatchCriterion, PoseErrors, TrafficMetrics};
use crate::data_pipeline::DetectionFrame;
use crate::error::Result;
use crate::sim_kernel::ObjectClass;

pub const DEFAULT_IOU_THRESHOLDS: [f64; 2] = [0.5, 0.7];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub n_gt: usize,
    /// Keyed by the IoU threshold as written, e.g. `"0.5"`.
    pub ap_at_iou: BTreeMap<String, Option<f64>>,
    pub ap_at_dist: Option<f64>,
}

/// Detection and pose quality of one detection log against ground truth.
/// `None` marks a value that is not applicable (no ground truth, no matches).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentMetrics {
    pub ate: Option<f64>,
    pub ase: Option<f64>,
    pub aoe: Option<f64>,
    pub matched: usize,
    pub ap_at_iou: BTreeMap<String, Option<f64>>,
    pub ap_at_dist: Option<f64>,
    pub per_class: BTreeMap<ObjectClass, ClassMetrics>,
}

fn iou_key(t: f64) -> String {
    format!("{t}")
}

pub fn evaluate_agent(gt: &[DetectionFrame], det: &[DetectionFrame], iou_thresholds: &[f64]) -> Result<AgentMetrics> {
    let frames = align_frames(gt, det)?;
    let mut out = AgentMetrics::default();
    for &t in iou_thresholds {
        let per = class_average_precision(&frames, MatchCriterion::Iou(t));
        out.ap_at_iou.insert(iou_key(t), macro_average(&per));
        for (c, (ap, n)) in per {
            let e = out.per_class.entry(c).or_default();
            e.n_gt = n;
            e.ap_at_iou.insert(iou_key(t), ap);
        }
    }
    let dist = class_ap_at_distance(&frames);
    out.ap_at_dist = macro_average(&dist);
    for (c, (ap, n)) in dist {
        let e = out.per_class.entry(c).or_default();
        e.n_gt = n;
        e.ap_at_dist = ap;
    }
    if let Some(PoseErrors { ate, ase, aoe, count }) = run_pose_errors(gt, det)? {
        out.ate = Some(ate);
        out.ase = Some(ase);
        out.aoe = Some(aoe);
        out.matched = count;
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Keyed by strategy name (`no_fusion`, `late_fusion`, ...).
    pub agent: BTreeMap<String, AgentMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficMetrics>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_else(|| "NA".into())
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows of `metric,class,strategy,value`; class `all` is the macro
    /// average and `NA` marks a value that is not applicable.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["metric", "class", "strategy", "value"])?;
        for (strategy, m) in &self.agent {
            let mut row = |metric: &str, class: &str, v: Option<f64>| csv.write_record([metric, class, strategy, &cell(v)]);
            for (t, v) in &m.ap_at_iou {
                row(&format!("ap@{t}"), "all", *v)?;
            }
            row("ap@dist", "all", m.ap_at_dist)?;
            row("ate", "all", m.ate)?;
            row("ase", "all", m.ase)?;
            row("aoe", "all", m.aoe)?;
            for (c, cm) in &m.per_class {
                for (t, v) in &cm.ap_at_iou {
                    row(&format!("ap@{t}"), c.as_str(), *v)?;
                }
                row("ap@dist", c.as_str(), cm.ap_at_dist)?;
            }
        }
        if let Some(t) = &self.traffic {
            for (metric, v) in [
                ("throughput", t.throughput),
                ("delay_avg", t.delay_avg),
                ("delay_max", t.delay_max),
                ("avg_speed", t.avg_speed),
            ] {
                csv.write_record([metric, "vehicle", "traffic", &format!("{v}")])?;
            }
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_pipeline::Detection;
    use crate::sim_kernel::ObjectState;

    fn log() -> Vec<DetectionFrame> {
        (0..3)
            .map(|k| {
                DetectionFrame::from_states(
                    k as f64 * 0.1,
                    "gt",
                    &[
                        ObjectState::new(ObjectClass::Car).with_id("a").at(k as f64, 0.0),
                        ObjectState::new(ObjectClass::Pedestrian).with_id("p").at(5.0, 5.0),
                    ],
                )
            })
            .collect()
    }

    #[test]
    fn self_evaluation_is_perfect() {
        let gt = log();
        let m = evaluate_agent(&gt, &gt, &DEFAULT_IOU_THRESHOLDS).unwrap();
        assert_eq!(m.ap_at_iou["0.5"], Some(1.0));
        assert_eq!(m.ap_at_dist, Some(1.0));
        assert_eq!(m.ate, Some(0.0));
        assert_eq!(m.matched, 6);
    }

    #[test]
    fn empty_detections_score_zero_and_pose_na() {
        let m = evaluate_agent(&log(), &[], &[0.5]).unwrap();
        assert_eq!(m.ap_at_iou["0.5"], Some(0.0));
        assert_eq!(m.ate, None);
    }

    #[test]
    fn csv_rows() {
        let gt = log();
        let mut det = gt.clone();
        det[0].objects.push(Detection::new(ObjectState::new(ObjectClass::Bus).at(50.0, 0.0), 0.3));
        let m = evaluate_agent(&gt, &det, &[0.5]).unwrap();
        // Bus has no ground truth: listed, but not applicable.
        assert_eq!(m.per_class[&ObjectClass::Bus].ap_at_dist, None);
        let report = MetricsReport {
            agent: BTreeMap::from([("late_fusion".to_string(), m)]),
            traffic: None,
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("metric,class,strategy,value\nap@0.5,all,late_fusion,1\n"));
        assert!(text.contains("ap@dist,bus,late_fusion,NA\n"));
    }
}
