use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coop_perception::NoiseModel;
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Vec2};
use crate::sim_kernel::{ObjectState, TrackId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Lidar,
    Camera,
    Radar,
}

impl SensorKind {
    pub fn default_fov(self) -> f64 {
        match self {
            SensorKind::Lidar => TAU,
            SensorKind::Camera => FRAC_PI_2,
            SensorKind::Radar => FRAC_PI_3,
        }
    }

    pub fn default_range(self) -> f64 {
        match self {
            SensorKind::Lidar => 80.0,
            SensorKind::Camera => 60.0,
            SensorKind::Radar => 120.0,
        }
    }
}

#[derive(Deserialize)]
struct RawSensor {
    id: String,
    kind: SensorKind,
    position: [f64; 3],
    #[serde(default)]
    yaw: f64,
    fov: Option<f64>,
    range: Option<f64>,
    processing_unit: String,
    noise: Option<NoiseModel>,
}

impl From<RawSensor> for SensorSpec {
    fn from(r: RawSensor) -> Self {
        SensorSpec {
            fov: r.fov.unwrap_or(r.kind.default_fov()),
            range: r.range.unwrap_or(r.kind.default_range()),
            noise: r.noise.unwrap_or_else(|| NoiseModel::for_kind(r.kind)),
            id: r.id,
            kind: r.kind,
            position: r.position,
            yaw: r.yaw,
            processing_unit: r.processing_unit,
        }
    }
}

/// One roadside (or vehicle-mounted) sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSensor")]
pub struct SensorSpec {
    pub id: String,
    pub kind: SensorKind,
    pub position: [f64; 3],
    /// Direction the field of view is centered on.
    pub yaw: f64,
    /// Horizontal aperture in radians.
    pub fov: f64,
    pub range: f64,
    pub processing_unit: String,
    pub noise: NoiseModel,
}

impl SensorSpec {
    pub fn new(
        id: impl Into<String>,
        kind: SensorKind,
        position: [f64; 3],
        yaw: f64,
        processing_unit: impl Into<String>,
    ) -> Self {
        SensorSpec {
            id: id.into(),
            kind,
            position,
            yaw,
            fov: kind.default_fov(),
            range: kind.default_range(),
            processing_unit: processing_unit.into(),
            noise: NoiseModel::for_kind(kind),
        }
    }

    pub fn with_fov(mut self, fov: f64) -> Self {
        self.fov = fov;
        self
    }

    pub fn with_range(mut self, range: f64) -> Self {
        self.range = range;
        self
    }

    pub fn planar(&self) -> Vec2 {
        Vec2::new(self.position[0], self.position[1])
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.fov > 0.0 && self.fov <= TAU + 1e-12) {
            v.push(format!("sensor {}: fov must be in (0, 2π]", self.id));
        }
        if !(self.range > 0.0) {
            v.push(format!("sensor {}: range must be > 0", self.id));
        }
        v
    }

    /// Range and aperture test, ignoring occlusion.
    pub fn covers(&self, p: Vec2) -> bool {
        let d = p - self.planar();
        let dist = d.norm();
        if dist > self.range {
            return false;
        }
        if self.fov >= TAU || dist == 0.0 {
            return true;
        }
        wrap_angle(d.angle() - self.yaw).abs() <= self.fov / 2.0
    }
}

pub fn load_sensors(path: impl AsRef<Path>) -> Result<Vec<SensorSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sensors: Vec<SensorSpec> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let violations: Vec<String> = sensors.iter().flat_map(SensorSpec::validate).collect();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(sensors)
}

/// Indices of `objects` the sensor can see. An object is hidden when the
/// sight line to its center enters another object's footprint first.
/// `exclude` skips the object carrying the sensor.
pub fn visible_objects(
    sensor: &SensorSpec,
    objects: &[ObjectState],
    exclude: Option<&TrackId>,
) -> Vec<usize> {
    let origin = sensor.planar();
    let skip = |o: &ObjectState| exclude.is_some() && o.track_id.as_ref() == exclude;
    let footprints: Vec<_> = objects.iter().map(ObjectState::footprint).collect();
    let mut out = Vec::new();
    for (i, target) in objects.iter().enumerate() {
        if skip(target) || !sensor.covers(target.planar()) {
            continue;
        }
        let end = target.planar();
        let occluded = objects.iter().enumerate().any(|(j, other)| {
            j != i
                && !skip(other)
                && footprints[j]
                    .segment_entry(origin, end)
                    .is_some_and(|t| t < 1.0)
        });
        if !occluded {
            out.push(i);
        }
    }
    out
}

/// Ids of objects visible to `sensor`.
pub fn sensor_visibility(sensor: &SensorSpec, objects: &[ObjectState]) -> Vec<TrackId> {
    visible_objects(sensor, objects, None)
        .into_iter()
        .filter_map(|i| objects[i].track_id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_kernel::ObjectClass;
    use std::f64::consts::PI;

    fn camera() -> SensorSpec {
        SensorSpec::new("cam", SensorKind::Camera, [0.0, 0.0, 3.0], 0.0, "pu")
            .with_range(100.0)
            .with_fov(FRAC_PI_2)
    }

    #[test]
    fn object_ahead_visible() {
        let objs = vec![ObjectState::new(ObjectClass::Car).with_id("t").at(10.0, 0.0)];
        assert_eq!(sensor_visibility(&camera(), &objs), vec![TrackId::from("t")]);
    }

    #[test]
    fn object_behind_not_visible() {
        let objs = vec![ObjectState::new(ObjectClass::Car).with_id("t").at(-10.0, 0.0)];
        assert!(sensor_visibility(&camera(), &objs).is_empty());
        let mut s = camera();
        s.yaw = PI;
        assert_eq!(sensor_visibility(&s, &objs).len(), 1);
    }

    #[test]
    fn blocker_occludes_target() {
        // Ray along +x hits the 4 m wide blocker face at x = 9.
        let target = ObjectState::new(ObjectClass::Car).with_id("target").at(20.0, 0.0);
        let blocker = ObjectState::new(ObjectClass::Truck)
            .with_id("blocker")
            .at(10.0, 0.0)
            .sized(2.0, 4.0, 3.0);
        let both = vec![target.clone(), blocker];
        assert_eq!(sensor_visibility(&camera(), &both), vec![TrackId::from("blocker")]);
        assert_eq!(
            sensor_visibility(&camera(), &[target]),
            vec![TrackId::from("target")]
        );
    }

    #[test]
    fn blocker_beyond_target_does_not_occlude() {
        let target = ObjectState::new(ObjectClass::Pedestrian).with_id("p").at(10.0, 0.0);
        let far = ObjectState::new(ObjectClass::Truck).with_id("far").at(20.0, 0.0);
        // The pedestrian hides the truck, never the other way round.
        assert_eq!(sensor_visibility(&camera(), &[target, far]), vec![TrackId::from("p")]);
    }

    #[test]
    fn sensor_json_defaults() {
        let s: SensorSpec = serde_json::from_str(
            r#"{"id":"l1","kind":"lidar","position":[1,2,3],"processing_unit":"p"}"#,
        )
        .unwrap();
        assert_eq!(s.fov, TAU);
        assert_eq!(s.range, 80.0);
        assert_eq!(s.noise, NoiseModel::for_kind(SensorKind::Lidar));
        let back: SensorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
