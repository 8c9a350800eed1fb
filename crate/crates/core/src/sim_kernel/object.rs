use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{OrientedBox, Vec2};

/// Identity of one tracked or simulated object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrackId(pub String);

impl TrackId {
    pub fn new(s: impl Into<String>) -> Self {
        TrackId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TrackId {
    fn from(s: &str) -> Self {
        TrackId(s.to_string())
    }
}

impl From<String> for TrackId {
    fn from(s: String) -> Self {
        TrackId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectClass {
    Car,
    Truck,
    Bus,
    Pedestrian,
    Cyclist,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 5] = [
        ObjectClass::Car,
        ObjectClass::Truck,
        ObjectClass::Bus,
        ObjectClass::Pedestrian,
        ObjectClass::Cyclist,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectClass::Car => "car",
            ObjectClass::Truck => "truck",
            ObjectClass::Bus => "bus",
            ObjectClass::Pedestrian => "pedestrian",
            ObjectClass::Cyclist => "cyclist",
        }
    }

    /// Typical (length, width, height) in meters.
    pub fn default_size(self) -> [f64; 3] {
        match self {
            ObjectClass::Car => [4.5, 1.8, 1.5],
            ObjectClass::Truck => [8.0, 2.5, 3.2],
            ObjectClass::Bus => [12.0, 2.55, 3.2],
            ObjectClass::Pedestrian => [0.6, 0.6, 1.7],
            ObjectClass::Cyclist => [1.8, 0.6, 1.7],
        }
    }

    pub fn is_vehicle(self) -> bool {
        matches!(self, ObjectClass::Car | ObjectClass::Truck | ObjectClass::Bus)
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One object at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectState {
    pub track_id: Option<TrackId>,
    pub class: ObjectClass,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub speed: f64,
    pub timestamp: f64,
}

impl ObjectState {
    /// An object of `class` with its default size, at rest at the origin.
    pub fn new(class: ObjectClass) -> Self {
        let [length, width, height] = class.default_size();
        ObjectState {
            track_id: None,
            class,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            yaw: 0.0,
            length,
            width,
            height,
            speed: 0.0,
            timestamp: 0.0,
        }
    }

    pub fn with_id(mut self, id: impl Into<TrackId>) -> Self {
        self.track_id = Some(id.into());
        self
    }

    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.x = x;
        self.y = y;
        self
    }

    pub fn heading(mut self, yaw: f64) -> Self {
        self.yaw = yaw;
        self
    }

    pub fn moving(mut self, speed: f64) -> Self {
        self.speed = speed;
        self
    }

    pub fn sized(mut self, length: f64, width: f64, height: f64) -> Self {
        self.length = length;
        self.width = width;
        self.height = height;
        self
    }

    pub fn planar(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn set_planar(&mut self, p: Vec2) {
        self.x = p.x;
        self.y = p.y;
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::from_angle(self.yaw) * self.speed
    }

    pub fn footprint(&self) -> OrientedBox {
        OrientedBox::new(self.planar(), self.length, self.width, self.yaw)
    }

    /// Constant-velocity extrapolation by `dt` seconds.
    pub fn extrapolated(&self, dt: f64) -> ObjectState {
        let mut o = self.clone();
        o.set_planar(self.planar() + self.velocity() * dt);
        o.timestamp = self.timestamp + dt;
        o
    }

    pub fn id_str(&self) -> &str {
        self.track_id.as_ref().map_or("", TrackId::as_str)
    }

    pub fn is_valid(&self) -> bool {
        self.length > 0.0 && self.width > 0.0 && self.height > 0.0 && self.speed >= 0.0
    }
}
