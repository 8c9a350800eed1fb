//! BEV IoU, greedy matching, average precision and pose errors on a small
//! hand-made frame.

use std::f64::consts::FRAC_PI_4;

use coopsim::data_pipeline::{Detection, DetectionFrame};
use coopsim::evaluation::{average_precision, bev_iou, match_detections, pose_errors, MatchCriterion};
use coopsim::geometry::{OrientedBox, Vec2};
use coopsim::sim_kernel::{ObjectClass, ObjectState};

fn main() {
    let a = OrientedBox::new(Vec2::ZERO, 1.0, 1.0, 0.0);
    let b = OrientedBox::new(Vec2::ZERO, 1.0, 1.0, FRAC_PI_4);
    println!("unit square vs rotated copy: IoU {:.6}", bev_iou(&a, &b));

    let car = |id: &str, x: f64| ObjectState::new(ObjectClass::Car).with_id(id).at(x, 0.0);
    let gt = DetectionFrame::from_states(0.0, "gt", &[car("g1", 0.0), car("g2", 10.0)]);
    let mut det = DetectionFrame::new(0.0, "det");
    det.objects.push(Detection::new(car("d1", 0.3), 0.9));
    det.objects.push(Detection::new(car("d2", 25.0), 0.8));
    det.objects.push(Detection::new(car("d3", 10.0).heading(0.2), 0.7));

    let m = match_detections(&gt, &det, MatchCriterion::Iou(0.5));
    println!("pairs {:?}, unmatched det {:?}", m.id_pairs(&gt, &det), m.unmatched_det);
    let scored: Vec<(f64, bool)> = det
        .objects
        .iter()
        .zip(m.det_is_tp(det.objects.len()))
        .map(|(d, tp)| (d.confidence, tp))
        .collect();
    println!("AP@0.5 = {:.4}", average_precision(&scored, gt.objects.len()).unwrap());
    if let Some(p) = pose_errors(&m, &gt, &det) {
        println!("ATE {:.3} m  ASE {:.3}  AOE {:.3} rad over {} pairs", p.ate, p.ase, p.aoe, p.count);
    }
}
