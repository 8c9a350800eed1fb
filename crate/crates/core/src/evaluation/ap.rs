use std::collections::BTreeMap;

use super::{match_detections, MatchCriterion};
use crate::data_pipeline::DetectionFrame;
use crate::error::{Error, Result};
use crate::sim_kernel::ObjectClass;

/// Center-distance thresholds for distance AP, meters.
pub const DIST_THRESHOLDS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// All-point interpolated AP from `(confidence, is_true_positive)` pairs.
///
/// Detections sharing a confidence enter the sweep together, since no
/// threshold can separate them. `None` when there is no ground truth.
pub fn average_precision(scored: &[(f64, bool)], n_gt: usize) -> Option<f64> {
    if n_gt == 0 {
        return None;
    }
    let mut s: Vec<(f64, bool)> = scored.to_vec();
    s.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points: Vec<(f64, f64)> = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < s.len() {
        let c = s[i].0;
        while i < s.len() && s[i].0 == c {
            if s[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((tp as f64 / n_gt as f64, tp as f64 / (tp + fp) as f64));
    }
    Some(envelope_area(&points))
}

/// Area under the precision envelope of `(recall, precision)` points.
pub(crate) fn envelope_area(points: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    let mut recalls: Vec<f64> = points.iter().map(|p| p.0).collect();
    recalls.sort_by(f64::total_cmp);
    recalls.dedup();
    for r in recalls {
        let p = points
            .iter()
            .filter(|q| q.0 >= r)
            .map(|q| q.1)
            .fold(0.0, f64::max);
        area += (r - prev_recall) * p;
        prev_recall = r;
    }
    area
}

/// Pairs every ground-truth frame with its detection frame. An empty
/// detection log pairs every frame with nothing; otherwise the logs must
/// carry the same timestamps.
pub fn align_frames<'a>(
    gt: &'a [DetectionFrame],
    det: &'a [DetectionFrame],
) -> Result<Vec<(&'a DetectionFrame, Option<&'a DetectionFrame>)>> {
    if det.is_empty() {
        return Ok(gt.iter().map(|g| (g, None)).collect());
    }
    for i in 0..gt.len().max(det.len()) {
        let (g, d) = (gt.get(i).map(|f| f.timestamp), det.get(i).map(|f| f.timestamp));
        match (g, d) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-6 => {}
            _ => return Err(Error::LogDivergence { index: i, gt: g, det: d }),
        }
    }
    Ok(gt.iter().zip(det).map(|(g, d)| (g, Some(d))).collect())
}

/// Per-class AP over a run under one matching criterion, with the
/// ground-truth count of each class.
pub fn class_average_precision(
    frames: &[(&DetectionFrame, Option<&DetectionFrame>)],
    criterion: MatchCriterion,
) -> BTreeMap<ObjectClass, (Option<f64>, usize)> {
    let mut scored: BTreeMap<ObjectClass, Vec<(f64, bool)>> = BTreeMap::new();
    let mut n_gt: BTreeMap<ObjectClass, usize> = BTreeMap::new();
    for (gt, det) in frames {
        for g in gt.states() {
            *n_gt.entry(g.class).or_default() += 1;
        }
        let Some(det) = det else { continue };
        let m = match_detections(gt, det, criterion);
        for (d, tp) in det.objects.iter().zip(m.det_is_tp(det.objects.len())) {
            scored.entry(d.object.class).or_default().push((d.confidence, tp));
        }
    }
    let classes: Vec<ObjectClass> = n_gt.keys().chain(scored.keys()).copied().collect();
    classes
        .into_iter()
        .map(|c| {
            let n = n_gt.get(&c).copied().unwrap_or(0);
            let s = scored.get(&c).map_or(&[][..], Vec::as_slice);
            (c, (average_precision(s, n), n))
        })
        .collect()
}

/// Mean over classes that have ground truth.
pub fn macro_average(per_class: &BTreeMap<ObjectClass, (Option<f64>, usize)>) -> Option<f64> {
    let vals: Vec<f64> = per_class.values().filter_map(|(ap, _)| *ap).collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Macro-averaged AP over a run.
pub fn run_average_precision(gt: &[DetectionFrame], det: &[DetectionFrame], criterion: MatchCriterion) -> Result<Option<f64>> {
    let frames = align_frames(gt, det)?;
    Ok(macro_average(&class_average_precision(&frames, criterion)))
}

/// Per-class distance AP: mean over the four center-distance thresholds.
pub fn class_ap_at_distance(frames: &[(&DetectionFrame, Option<&DetectionFrame>)]) -> BTreeMap<ObjectClass, (Option<f64>, usize)> {
    let mut acc: BTreeMap<ObjectClass, (Vec<f64>, usize)> = BTreeMap::new();
    for delta in DIST_THRESHOLDS {
        for (c, (ap, n)) in class_average_precision(frames, MatchCriterion::Distance(delta)) {
            let e = acc.entry(c).or_insert((Vec::new(), n));
            if let Some(ap) = ap {
                e.0.push(ap);
            }
        }
    }
    acc.into_iter()
        .map(|(c, (aps, n))| {
            let v = (!aps.is_empty()).then(|| aps.iter().sum::<f64>() / aps.len() as f64);
            (c, (v, n))
        })
        .collect()
}

/// Distance AP over a run, macro-averaged across classes.
pub fn ap_at_distance(gt: &[DetectionFrame], det: &[DetectionFrame]) -> Result<Option<f64>> {
    let frames = align_frames(gt, det)?;
    Ok(macro_average(&class_ap_at_distance(&frames)))
}
