use serde::{Deserialize, Serialize};

use super::{ObjectClass, ObjectState, MAX_SPEED};
use crate::geometry::{Polyline, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecrashKind {
    RedLightRunner,
    LeftTurnAcrossPath,
    PedestrianCrossing,
    RearEndDecel,
    LateralCutIn,
    OppositeDirectionDrift,
}

impl PrecrashKind {
    pub const ALL: [PrecrashKind; 6] = [
        PrecrashKind::RedLightRunner,
        PrecrashKind::LeftTurnAcrossPath,
        PrecrashKind::PedestrianCrossing,
        PrecrashKind::RearEndDecel,
        PrecrashKind::LateralCutIn,
        PrecrashKind::OppositeDirectionDrift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrecrashKind::RedLightRunner => "red_light_runner",
            PrecrashKind::LeftTurnAcrossPath => "left_turn_across_path",
            PrecrashKind::PedestrianCrossing => "pedestrian_crossing",
            PrecrashKind::RearEndDecel => "rear_end_decel",
            PrecrashKind::LateralCutIn => "lateral_cut_in",
            PrecrashKind::OppositeDirectionDrift => "opposite_direction_drift",
        }
    }

    fn default_class(self) -> ObjectClass {
        match self {
            PrecrashKind::PedestrianCrossing => ObjectClass::Pedestrian,
            _ => ObjectClass::Car,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// Fires at the first step with `t >= time`.
    Time(f64),
    /// Fires once the ego is within `distance` of `point`.
    EgoWithin { point: Vec2, distance: f64 },
}

/// A parameterized hazardous encounter staged against the ego's path.
///
/// The template picks a conflict point on the ego path, either the
/// projection of `conflict_point` or the point the ego reaches after
/// `lead_time` (at least `min_ahead` meters out), and launches its actor so
/// that both arrive there together if nobody reacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecrashTemplate {
    pub kind: PrecrashKind,
    pub trigger: Trigger,
    /// Actor speed; each kind has its own default.
    #[serde(default)]
    pub speed: Option<f64>,
    #[serde(default)]
    pub class: Option<ObjectClass>,
    #[serde(default)]
    pub conflict_point: Option<Vec2>,
    #[serde(default = "default_lead_time")]
    pub lead_time: f64,
    #[serde(default = "default_min_ahead")]
    pub min_ahead: f64,
    /// Adjacent-lane offset for the cut-in, drift and turning actors.
    #[serde(default = "default_lane_offset")]
    pub lane_offset: f64,
    /// Bumper gap to the lead vehicle for `rear_end_decel`.
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default = "default_decel")]
    pub decel: f64,
    /// Seconds after injection before the lead vehicle brakes.
    #[serde(default = "default_decel_delay")]
    pub decel_delay: f64,
}

fn default_lead_time() -> f64 {
    4.0
}
fn default_min_ahead() -> f64 {
    15.0
}
fn default_lane_offset() -> f64 {
    3.5
}
fn default_gap() -> f64 {
    20.0
}
fn default_decel() -> f64 {
    6.0
}
fn default_decel_delay() -> f64 {
    1.0
}

impl PrecrashTemplate {
    pub fn new(kind: PrecrashKind, trigger: Trigger) -> Self {
        PrecrashTemplate {
            kind,
            trigger,
            speed: None,
            class: None,
            conflict_point: None,
            lead_time: default_lead_time(),
            min_ahead: default_min_ahead(),
            lane_offset: default_lane_offset(),
            gap: default_gap(),
            decel: default_decel(),
            decel_delay: default_decel_delay(),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if let Some(v) = self.speed {
            if !(v > 0.0 && v <= MAX_SPEED) {
                errs.push(format!("speed must be in (0, {MAX_SPEED}], got {v}"));
            }
        }
        for (name, v) in [
            ("lead_time", self.lead_time),
            ("gap", self.gap),
            ("decel", self.decel),
            ("min_ahead", self.min_ahead),
        ] {
            if !(v > 0.0) {
                errs.push(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.decel_delay >= 0.0) {
            errs.push("decel_delay must be >= 0".into());
        }
        if let Trigger::EgoWithin { distance, .. } = self.trigger {
            if !(distance >= 0.0) {
                errs.push("ego_within distance must be >= 0".into());
            }
        }
        errs
    }

    /// Actor for this template given the ego's state, path and arc position.
    /// `now` is the injection time.
    pub fn stage(&self, ego: &ObjectState, ego_path: &Polyline, ego_arc: f64, now: f64) -> Result<StagedActor, String> {
        let class = self.class.unwrap_or(self.kind.default_class());
        let (s_c, t_c) = match self.conflict_point {
            Some(p) => {
                let s = ego_path.project(p).arc;
                if s <= ego_arc {
                    return Err("conflict point is behind the ego".into());
                }
                let t = if ego.speed > 0.1 {
                    (s - ego_arc) / ego.speed
                } else {
                    self.lead_time
                };
                (s, t)
            }
            None => (ego_arc + (ego.speed * self.lead_time).max(self.min_ahead), self.lead_time),
        };
        let (c, heading) = point_on(ego_path, s_c);
        let fwd = Vec2::from_angle(heading);
        let left = fwd.perp();
        let off = self.lane_offset;
        let far = 200.0;
        let (pts, speed, brake) = match self.kind {
            PrecrashKind::RedLightRunner | PrecrashKind::PedestrianCrossing => {
                let v = self.speed.unwrap_or(if class == ObjectClass::Pedestrian { 1.5 } else { 12.0 });
                let start = c - left * (v * t_c);
                (vec![start, c + left * far], v, None)
            }
            PrecrashKind::LeftTurnAcrossPath => {
                let v = self.speed.unwrap_or(8.0);
                let corner = c + left * off + fwd * off;
                let turn = corner.distance(c);
                let lead_in = (v * t_c - turn).max(5.0);
                let v = (lead_in + turn) / t_c;
                (vec![corner + fwd * lead_in, corner, c, c - left * far], v, None)
            }
            PrecrashKind::RearEndDecel => {
                let v = self.speed.unwrap_or(ego.speed);
                let [l, ..] = class.default_size();
                let s_l = ego_arc + self.gap + (ego.length + l) / 2.0;
                let mut pts = vec![point_on(ego_path, s_l).0];
                let mut acc = 0.0;
                for w in ego_path.points().windows(2) {
                    acc += w[0].distance(w[1]);
                    if acc > s_l {
                        pts.push(w[1]);
                    }
                }
                let (end, end_heading) = point_on(ego_path, ego_path.length());
                pts.push(end + Vec2::from_angle(end_heading) * far);
                (pts, v, Some(now + self.decel_delay))
            }
            PrecrashKind::LateralCutIn => {
                let v = self.speed.unwrap_or(0.7 * ego.speed).max(1.0);
                let merge_start = c + left * off - fwd * 15.0;
                let run = v * t_c;
                let ramp = merge_start.distance(c);
                let pts = if run > ramp {
                    vec![merge_start - fwd * (run - ramp), merge_start, c, c + fwd * far]
                } else {
                    vec![c + (merge_start - c).normalized() * run, c, c + fwd * far]
                };
                (pts, v, None)
            }
            PrecrashKind::OppositeDirectionDrift => {
                let v = self.speed.unwrap_or(10.0);
                let drift_start = c + left * off + fwd * 25.0;
                let run = v * t_c;
                let ramp = drift_start.distance(c);
                let pts = if run > ramp {
                    vec![drift_start + fwd * (run - ramp), drift_start, c, c - fwd * far]
                } else {
                    vec![c + (drift_start - c).normalized() * run, c, c - fwd * far]
                };
                (pts, v, None)
            }
        };
        if !(speed > 0.0 || self.kind == PrecrashKind::RearEndDecel) || speed > MAX_SPEED {
            return Err(format!("actor speed {speed} out of range"));
        }
        let path = Polyline::new(pts);
        let start = path.point_at(0.0);
        let [l, w, h] = class.default_size();
        let mut state = ObjectState::new(class)
            .at(start.x, start.y)
            .heading(path.heading_at(0.0))
            .moving(speed)
            .sized(l, w, h);
        state.z = ego.z;
        state.timestamp = now;
        Ok(StagedActor {
            state,
            path,
            brake: brake.map(|from| (from, self.decel)),
        })
    }
}

/// Actor produced by [`PrecrashTemplate::stage`]: initial state, path to
/// follow, and an optional `(start time, deceleration)` braking schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedActor {
    pub state: ObjectState,
    pub path: Polyline,
    pub brake: Option<(f64, f64)>,
}

/// Position and heading at arc `s`, continuing straight past either end.
pub fn point_on(path: &Polyline, s: f64) -> (Vec2, f64) {
    let len = path.length();
    if s > len {
        let h = path.heading_at(len);
        (path.point_at(len) + Vec2::from_angle(h) * (s - len), h)
    } else if s < 0.0 {
        let h = path.heading_at(0.0);
        (path.point_at(0.0) + Vec2::from_angle(h) * s, h)
    } else {
        (path.point_at(s), path.heading_at(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ego() -> (ObjectState, Polyline) {
        let path = Polyline::new(vec![Vec2::new(0.0, -100.0), Vec2::new(0.0, 100.0)]);
        let e = ObjectState::new(ObjectClass::Car)
            .with_id("ego")
            .at(0.0, -100.0)
            .heading(std::f64::consts::FRAC_PI_2)
            .moving(10.0);
        (e, path)
    }

    #[test]
    fn actors_reach_conflict_point_with_ego() {
        let (e, path) = ego();
        for kind in PrecrashKind::ALL {
            if kind == PrecrashKind::RearEndDecel {
                continue;
            }
            let t = PrecrashTemplate::new(kind, Trigger::Time(0.0));
            let a = t.stage(&e, &path, 0.0, 0.0).unwrap();
            // Conflict point is 40 m ahead: the ego needs 4 s.
            let c = Vec2::new(0.0, -60.0);
            let s = a.path.project(c).arc;
            assert!(a.path.project(c).distance < 1e-9, "{kind:?}");
            assert!((s / a.state.speed - 4.0).abs() < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn rear_end_lead_sits_ahead_on_path() {
        let (e, path) = ego();
        let a = PrecrashTemplate::new(PrecrashKind::RearEndDecel, Trigger::Time(0.0))
            .stage(&e, &path, 0.0, 2.0)
            .unwrap();
        assert_eq!(a.state.planar(), Vec2::new(0.0, -100.0 + 20.0 + 4.5));
        assert_eq!(a.state.speed, 10.0);
        assert_eq!(a.brake, Some((3.0, 6.0)));
    }

    #[test]
    fn stationary_ego_uses_min_ahead() {
        let (mut e, path) = ego();
        e.speed = 0.0;
        let a = PrecrashTemplate::new(PrecrashKind::PedestrianCrossing, Trigger::Time(0.0))
            .stage(&e, &path, 0.0, 0.0)
            .unwrap();
        assert!(a.path.project(Vec2::new(0.0, -85.0)).distance < 1e-9);
    }

    #[test]
    fn json_trigger_forms() {
        let t: PrecrashTemplate =
            serde_json::from_str(r#"{"kind":"lateral_cut_in","trigger":{"ego_within":{"point":[0,0],"distance":30}}}"#).unwrap();
        assert_eq!(t.trigger, Trigger::EgoWithin { point: Vec2::ZERO, distance: 30.0 });
        let t: PrecrashTemplate = serde_json::from_str(r#"{"kind":"rear_end_decel","trigger":{"time":2.5}}"#).unwrap();
        assert_eq!(t.trigger, Trigger::Time(2.5));
    }
}
