use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data_pipeline::{Detection, DetectionFrame};
use crate::geometry::{wrap_angle, Vec2};
use crate::infrastructure::{visible_objects, SensorKind, SensorSpec};
use crate::sim_kernel::{ObjectClass, ObjectState, TrackId};

/// Stand-in for a learned detector: Gaussian pose/size noise, random misses,
/// Poisson false positives and a confidence that decays with distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    pub pos_sigma: f64,
    pub yaw_sigma: f64,
    pub size_sigma: f64,
    pub miss_rate: f64,
    /// Expected false positives per frame.
    pub false_positive_rate: f64,
    /// Confidence at zero distance.
    pub conf_max: f64,
    /// e-folding distance of the confidence, meters.
    pub conf_range: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::for_kind(SensorKind::Lidar)
    }
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel {
        pos_sigma: 0.0,
        yaw_sigma: 0.0,
        size_sigma: 0.0,
        miss_rate: 0.0,
        false_positive_rate: 0.0,
        conf_max: 1.0,
        conf_range: 150.0,
    };

    pub fn for_kind(kind: SensorKind) -> Self {
        let (pos_sigma, yaw_sigma, size_sigma, miss_rate, false_positive_rate) = match kind {
            SensorKind::Lidar => (0.1, 0.02, 0.05, 0.02, 0.05),
            SensorKind::Camera => (0.3, 0.05, 0.1, 0.05, 0.1),
            SensorKind::Radar => (0.4, 0.1, 0.2, 0.05, 0.1),
        };
        NoiseModel {
            pos_sigma,
            yaw_sigma,
            size_sigma,
            miss_rate,
            false_positive_rate,
            conf_max: 0.95,
            conf_range: 150.0,
        }
    }

    /// Detection confidence at `distance` meters from the nearest sensor.
    pub fn confidence(&self, distance: f64) -> f64 {
        (self.conf_max * (-distance / self.conf_range).exp()).clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.pos_sigma < 0.0 || self.yaw_sigma < 0.0 || self.size_sigma < 0.0 {
            v.push("noise sigmas must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.miss_rate) {
            v.push("miss_rate must be in [0, 1]".into());
        }
        if self.false_positive_rate < 0.0 {
            v.push("false_positive_rate must be >= 0".into());
        }
        v
    }
}

fn gauss(rng: &mut impl Rng, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// Detections one agent produces from a ground-truth frame. Objects visible
/// to at least one of `sensors` survive the miss draw and get perturbed;
/// `exclude` names the object carrying the sensors, if any.
pub fn simulate_detections(
    source_id: &str,
    sensors: &[SensorSpec],
    truth: &[ObjectState],
    timestamp: f64,
    noise: &NoiseModel,
    rng: &mut impl Rng,
    exclude: Option<&TrackId>,
) -> DetectionFrame {
    let mut nearest = vec![f64::INFINITY; truth.len()];
    for s in sensors {
        for i in visible_objects(s, truth, exclude) {
            nearest[i] = nearest[i].min(s.planar().distance(truth[i].planar()));
        }
    }
    let mut frame = DetectionFrame::new(timestamp, source_id);
    for (obj, dist) in truth.iter().zip(&nearest) {
        if !dist.is_finite() {
            continue;
        }
        let u: f64 = rng.random();
        let dx = gauss(rng, noise.pos_sigma);
        let dy = gauss(rng, noise.pos_sigma);
        let dyaw = gauss(rng, noise.yaw_sigma);
        let dl = gauss(rng, noise.size_sigma);
        let dw = gauss(rng, noise.size_sigma);
        let dh = gauss(rng, noise.size_sigma);
        if u < noise.miss_rate {
            continue;
        }
        let mut o = obj.clone();
        o.x += dx;
        o.y += dy;
        if dyaw != 0.0 {
            o.yaw = wrap_angle(o.yaw + dyaw);
        }
        o.length = (o.length + dl).max(0.1);
        o.width = (o.width + dw).max(0.1);
        o.height = (o.height + dh).max(0.1);
        o.timestamp = timestamp;
        frame.objects.push(Detection::new(o, noise.confidence(*dist)));
    }
    if noise.false_positive_rate > 0.0 && !sensors.is_empty() {
        let count = Poisson::new(noise.false_positive_rate)
            .map(|p| p.sample(rng) as u64)
            .unwrap_or(0);
        for k in 0..count {
            let s = &sensors[rng.random_range(0..sensors.len())];
            let r = s.range * rng.random::<f64>().sqrt();
            let bearing = s.yaw + (rng.random::<f64>() - 0.5) * s.fov.min(TAU);
            let p = s.planar() + Vec2::from_angle(bearing) * r;
            let mut o = ObjectState::new(ObjectClass::Car)
                .with_id(format!("fp-{source_id}-{k}"))
                .at(p.x, p.y)
                .heading(wrap_angle(rng.random::<f64>() * TAU));
            o.timestamp = timestamp;
            frame.objects.push(Detection::new(o, 0.5 * noise.confidence(r)));
        }
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::subsystem_rng;

    fn lidar() -> SensorSpec {
        SensorSpec::new("l", SensorKind::Lidar, [0.0, 0.0, 4.0], 0.0, "p")
    }

    fn truth() -> Vec<ObjectState> {
        vec![
            ObjectState::new(ObjectClass::Car).with_id("a").at(10.0, 0.0).moving(3.0),
            ObjectState::new(ObjectClass::Pedestrian).with_id("b").at(0.0, 12.0),
            ObjectState::new(ObjectClass::Car).with_id("far").at(500.0, 0.0),
        ]
    }

    #[test]
    fn noiseless_is_identity_on_visible() {
        let mut rng = subsystem_rng(1, "noise");
        let f = simulate_detections("iu", &[lidar()], &truth(), 0.0, &NoiseModel::NOISELESS, &mut rng, None);
        let got: Vec<ObjectState> = f.states().cloned().collect();
        assert_eq!(got, truth()[..2].to_vec());
    }

    #[test]
    fn full_miss_rate_leaves_only_false_positives() {
        let mut rng = subsystem_rng(1, "noise");
        let noise = NoiseModel {
            miss_rate: 1.0,
            false_positive_rate: 3.0,
            ..NoiseModel::NOISELESS
        };
        let mut total = 0;
        for t in 0..20 {
            let f = simulate_detections("iu", &[lidar()], &truth(), t as f64, &noise, &mut rng, None);
            assert!(f.states().all(|o| o.id_str().starts_with("fp-")));
            total += f.objects.len();
        }
        assert!(total > 0);
    }

    #[test]
    fn position_noise_matches_sigma() {
        let mut rng = subsystem_rng(9, "noise");
        let noise = NoiseModel {
            pos_sigma: 0.2,
            ..NoiseModel::NOISELESS
        };
        let one = vec![truth()[0].clone()];
        let xs: Vec<f64> = (0..1000)
            .map(|_| {
                simulate_detections("iu", &[lidar()], &one, 0.0, &noise, &mut rng, None).objects[0]
                    .object
                    .x
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let sd = var.sqrt();
        assert!((0.18..=0.22).contains(&sd), "sample sd {sd}");
    }

    #[test]
    fn confidence_decreases_with_distance() {
        let n = NoiseModel::default();
        assert!(n.confidence(10.0) > n.confidence(50.0));
    }
}
