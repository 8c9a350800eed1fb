use serde::{Deserialize, Serialize};

use crate::sim_kernel::{ObjectClass, ObjectState, TrackId};

/// A detected object together with the detector's confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub object: ObjectState,
    pub confidence: f64,
}

impl Detection {
    pub fn new(object: ObjectState, confidence: f64) -> Self {
        Detection { object, confidence }
    }

    pub fn certain(object: ObjectState) -> Self {
        Detection::new(object, 1.0)
    }
}

/// Everything one source reported at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionFrame {
    pub timestamp: f64,
    pub source_id: String,
    pub objects: Vec<Detection>,
}

impl DetectionFrame {
    pub fn new(timestamp: f64, source_id: impl Into<String>) -> Self {
        DetectionFrame {
            timestamp,
            source_id: source_id.into(),
            objects: Vec::new(),
        }
    }

    /// A frame of ground truth states at full confidence.
    pub fn from_states(timestamp: f64, source_id: impl Into<String>, states: &[ObjectState]) -> Self {
        DetectionFrame {
            timestamp,
            source_id: source_id.into(),
            objects: states.iter().cloned().map(Detection::certain).collect(),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &ObjectState> {
        self.objects.iter().map(|d| &d.object)
    }

    pub fn to_wire(&self) -> WireFrame {
        WireFrame {
            t: self.timestamp,
            source: self.source_id.clone(),
            objects: self
                .objects
                .iter()
                .map(|d| WireObject {
                    id: d.object.track_id.clone(),
                    class: d.object.class,
                    x: d.object.x,
                    y: d.object.y,
                    z: d.object.z,
                    yaw: d.object.yaw,
                    l: d.object.length,
                    w: d.object.width,
                    h: d.object.height,
                    speed: d.object.speed,
                    conf: d.confidence,
                })
                .collect(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("frame serializes")
    }
}

/// On-disk frame record: `{t, source, objects: [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireFrame {
    pub t: f64,
    pub source: String,
    pub objects: Vec<WireObject>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireObject {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<TrackId>,
    pub class: ObjectClass,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub l: f64,
    pub w: f64,
    pub h: f64,
    pub speed: f64,
    pub conf: f64,
}

impl WireFrame {
    /// Checks value ranges; returns a description of the first problem.
    pub fn check(&self) -> Result<(), String> {
        if !self.t.is_finite() {
            return Err("t is not finite".into());
        }
        for (i, o) in self.objects.iter().enumerate() {
            if !(0.0..=1.0).contains(&o.conf) {
                return Err(format!("objects[{i}].conf {} outside [0, 1]", o.conf));
            }
            if !(o.l > 0.0 && o.w > 0.0 && o.h > 0.0) {
                return Err(format!("objects[{i}]: size components must be > 0"));
            }
            if !(o.speed >= 0.0) {
                return Err(format!("objects[{i}].speed must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn into_frame(self) -> DetectionFrame {
        let t = self.t;
        DetectionFrame {
            timestamp: t,
            source_id: self.source,
            objects: self
                .objects
                .into_iter()
                .map(|o| Detection {
                    object: ObjectState {
                        track_id: o.id,
                        class: o.class,
                        x: o.x,
                        y: o.y,
                        z: o.z,
                        yaw: o.yaw,
                        length: o.l,
                        width: o.w,
                        height: o.h,
                        speed: o.speed,
                        timestamp: t,
                    },
                    confidence: o.conf,
                })
                .collect(),
        }
    }
}
