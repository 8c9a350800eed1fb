use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Polyline, Vec2};

pub const DEFAULT_HEIGHT_BAND: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub id: String,
    pub centerline: Vec<Vec2>,
    pub width: f64,
    #[serde(default)]
    pub successors: Vec<String>,
    pub speed_limit: f64,
}

/// Cylindrical region around an intersection center.
///
/// `z_c` is kept for completeness but membership only looks at the planar
/// radius and the height band above `ground`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionRegion {
    pub id: String,
    pub center: Vec2,
    pub d_f: f64,
    pub z_c: f64,
    pub ground: f64,
    pub height_band: f64,
}

impl IntersectionRegion {
    pub fn new(id: impl Into<String>, center: Vec2, d_f: f64, ground: f64) -> Self {
        IntersectionRegion {
            id: id.into(),
            center,
            d_f,
            z_c: ground,
            ground,
            height_band: DEFAULT_HEIGHT_BAND,
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        point_in_intersection(p, self)
    }

    pub fn contains_planar(&self, p: Vec2) -> bool {
        p.distance(self.center) <= self.d_f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficSignal {
    pub id: String,
    pub intersection_id: String,
    pub phase_durations: Vec<(String, f64)>,
    #[serde(default)]
    pub controlled_lane_ids: Vec<String>,
}

impl TrafficSignal {
    pub fn cycle_length(&self) -> f64 {
        self.phase_durations.iter().map(|(_, d)| d).sum()
    }
}

#[derive(Deserialize)]
struct RawRegion {
    id: String,
    center: Vec2,
    d_f: f64,
    #[serde(default)]
    z_c: Option<f64>,
    #[serde(default)]
    ground: Option<f64>,
    #[serde(default)]
    height_band: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    lanes: Vec<Lane>,
    #[serde(default)]
    intersections: Vec<RawRegion>,
    #[serde(default)]
    signals: Vec<TrafficSignal>,
    #[serde(default)]
    ground_z: f64,
}

/// The static digital-twin geometry. Immutable once built.
#[derive(Debug, Clone, Serialize)]
pub struct VectorMap {
    pub lanes: Vec<Lane>,
    pub intersections: Vec<IntersectionRegion>,
    pub signals: Vec<TrafficSignal>,
    pub ground_z: f64,
    #[serde(skip)]
    paths: Vec<Polyline>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl PartialEq for VectorMap {
    fn eq(&self, other: &Self) -> bool {
        self.lanes == other.lanes
            && self.intersections == other.intersections
            && self.signals == other.signals
            && self.ground_z == other.ground_z
    }
}

impl VectorMap {
    pub fn new(
        lanes: Vec<Lane>,
        intersections: Vec<IntersectionRegion>,
        signals: Vec<TrafficSignal>,
        ground_z: f64,
    ) -> Result<Self> {
        let violations = validate(&lanes, &intersections, &signals);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let paths = lanes
            .iter()
            .map(|l| Polyline::new(l.centerline.clone()))
            .collect();
        let index = lanes
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.clone(), i))
            .collect();
        Ok(VectorMap {
            lanes,
            intersections,
            signals,
            ground_z,
            paths,
            index,
        })
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawMap = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let ground_z = raw.ground_z;
        let intersections = raw
            .intersections
            .into_iter()
            .map(|r| {
                let ground = r.ground.unwrap_or(ground_z);
                IntersectionRegion {
                    id: r.id,
                    center: r.center,
                    d_f: r.d_f,
                    z_c: r.z_c.unwrap_or(ground),
                    ground,
                    height_band: r.height_band.unwrap_or(DEFAULT_HEIGHT_BAND),
                }
            })
            .collect();
        VectorMap::new(raw.lanes, intersections, raw.signals, ground_z)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serializes")
    }

    pub fn lane(&self, id: &str) -> Option<&Lane> {
        self.index.get(id).map(|&i| &self.lanes[i])
    }

    pub fn lane_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn lane_path(&self, id: &str) -> Option<&Polyline> {
        self.index.get(id).map(|&i| &self.paths[i])
    }

    pub(crate) fn paths(&self) -> &[Polyline] {
        &self.paths
    }

    pub fn intersection(&self, id: &str) -> Option<&IntersectionRegion> {
        self.intersections.iter().find(|r| r.id == id)
    }

    /// Lanes that no other lane lists as a successor: where traffic enters.
    pub fn entry_lanes(&self) -> Vec<&Lane> {
        let fed: BTreeSet<&str> = self
            .lanes
            .iter()
            .flat_map(|l| l.successors.iter().map(String::as_str))
            .collect();
        self.lanes
            .iter()
            .filter(|l| !fed.contains(l.id.as_str()))
            .collect()
    }

    /// Signal controlling a lane's downstream end, if any.
    pub fn signal_for_lane(&self, lane_id: &str) -> Option<&TrafficSignal> {
        self.signals
            .iter()
            .find(|s| s.controlled_lane_ids.iter().any(|l| l == lane_id))
    }

    /// Axis-aligned bounds of all lane geometry, `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.lanes.iter().flat_map(|l| l.centerline.iter()) {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        for r in &self.intersections {
            lo = Vec2::new(lo.x.min(r.center.x - r.d_f), lo.y.min(r.center.y - r.d_f));
            hi = Vec2::new(hi.x.max(r.center.x + r.d_f), hi.y.max(r.center.y + r.d_f));
        }
        (lo, hi)
    }

    /// Copy of this map shifted by `offset` with every identifier prefixed.
    pub fn tiled_copy(&self, offset: Vec2, prefix: &str) -> VectorMap {
        let p = |s: &str| format!("{prefix}{s}");
        let lanes = self
            .lanes
            .iter()
            .map(|l| Lane {
                id: p(&l.id),
                centerline: l.centerline.iter().map(|&c| c + offset).collect(),
                width: l.width,
                successors: l.successors.iter().map(|s| p(s)).collect(),
                speed_limit: l.speed_limit,
            })
            .collect();
        let intersections = self
            .intersections
            .iter()
            .map(|r| IntersectionRegion {
                id: p(&r.id),
                center: r.center + offset,
                ..r.clone()
            })
            .collect();
        let signals = self
            .signals
            .iter()
            .map(|s| TrafficSignal {
                id: p(&s.id),
                intersection_id: p(&s.intersection_id),
                phase_durations: s.phase_durations.clone(),
                controlled_lane_ids: s.controlled_lane_ids.iter().map(|l| p(l)).collect(),
            })
            .collect();
        VectorMap::new(lanes, intersections, signals, self.ground_z)
            .expect("tiling preserves validity")
    }

    /// Union of several maps; identifiers must already be disjoint.
    pub fn merged(maps: &[VectorMap]) -> Result<VectorMap> {
        let mut lanes = Vec::new();
        let mut intersections = Vec::new();
        let mut signals = Vec::new();
        for m in maps {
            lanes.extend(m.lanes.iter().cloned());
            intersections.extend(m.intersections.iter().cloned());
            signals.extend(m.signals.iter().cloned());
        }
        let ground_z = maps.first().map_or(0.0, |m| m.ground_z);
        VectorMap::new(lanes, intersections, signals, ground_z)
    }
}

fn validate(
    lanes: &[Lane],
    intersections: &[IntersectionRegion],
    signals: &[TrafficSignal],
) -> Vec<String> {
    let mut errs = Vec::new();
    let mut ids = BTreeSet::new();
    for l in lanes {
        if !ids.insert(l.id.as_str()) {
            errs.push(format!("lanes: duplicate lane id `{}`", l.id));
        }
    }
    for l in lanes {
        if l.centerline.len() < 2 {
            errs.push(format!("lanes[{}].centerline: needs at least 2 waypoints", l.id));
        }
        for (i, w) in l.centerline.windows(2).enumerate() {
            if w[0] == w[1] {
                errs.push(format!(
                    "lanes[{}].centerline: waypoints {} and {} coincide",
                    l.id,
                    i,
                    i + 1
                ));
            }
        }
        if !(l.width > 0.0) {
            errs.push(format!("lanes[{}].width: must be > 0, got {}", l.id, l.width));
        }
        if !(l.speed_limit > 0.0) {
            errs.push(format!(
                "lanes[{}].speed_limit: must be > 0, got {}",
                l.id, l.speed_limit
            ));
        }
        for s in &l.successors {
            if !ids.contains(s.as_str()) {
                errs.push(format!("lanes[{}].successors: unknown lane `{s}`", l.id));
            }
        }
    }
    let mut region_ids = BTreeSet::new();
    for r in intersections {
        if !region_ids.insert(r.id.as_str()) {
            errs.push(format!("intersections: duplicate id `{}`", r.id));
        }
        if !(r.d_f > 0.0) {
            errs.push(format!("intersections[{}].d_f: must be > 0", r.id));
        }
        if !(r.height_band > 0.0) {
            errs.push(format!("intersections[{}].height_band: must be > 0", r.id));
        }
    }
    for s in signals {
        if s.phase_durations.is_empty() {
            errs.push(format!("signals[{}].phase_durations: empty", s.id));
        }
        for (name, d) in &s.phase_durations {
            if !(*d > 0.0) {
                errs.push(format!(
                    "signals[{}].phase_durations: phase `{name}` has non-positive duration",
                    s.id
                ));
            }
        }
        if !region_ids.contains(s.intersection_id.as_str()) {
            errs.push(format!(
                "signals[{}].intersection_id: unknown intersection `{}`",
                s.id, s.intersection_id
            ));
        }
        for l in &s.controlled_lane_ids {
            if !ids.contains(l.as_str()) {
                errs.push(format!(
                    "signals[{}].controlled_lane_ids: unknown lane `{l}`",
                    s.id
                ));
            }
        }
    }
    errs
}

pub fn load_map(path: impl AsRef<Path>) -> Result<VectorMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    VectorMap::from_json(&text, path)
}

/// Membership in the region cylinder. Both bounds are inclusive.
pub fn point_in_intersection(p: [f64; 3], r: &IntersectionRegion) -> bool {
    let planar = (p[0] - r.center.x).hypot(p[1] - r.center.y);
    planar <= r.d_f && r.ground <= p[2] && p[2] <= r.ground + r.height_band
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneMatch {
    pub lane_id: String,
    pub arc_offset: f64,
    pub lateral_offset: f64,
}

/// Closest lane centerline to `p`; ties go to the smallest lane id.
pub fn nearest_lane(m: &VectorMap, p: Vec2) -> Result<LaneMatch> {
    let mut best: Option<(f64, &str, f64)> = None;
    for (lane, path) in m.lanes.iter().zip(m.paths()) {
        let pr = path.project(p);
        let better = match best {
            None => true,
            Some((d, id, _)) => pr.distance < d || (pr.distance == d && lane.id.as_str() < id),
        };
        if better {
            best = Some((pr.distance, lane.id.as_str(), pr.arc));
        }
    }
    let (d, id, arc) = best.ok_or(Error::EmptyMap)?;
    Ok(LaneMatch {
        lane_id: id.to_string(),
        arc_offset: arc,
        lateral_offset: d,
    })
}
