use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{BackgroundTraffic, ObjectClass, ObjectState, SimClock, TrackId};
use crate::geometry::{boxes_overlap, OrientedBox, Polyline, Vec2};
use crate::world_model::VectorMap;

/// Longest successor chain a spawned vehicle will follow.
const MAX_ROUTE_LANES: usize = 16;

/// Intelligent-driver-model parameters for background vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdmParams {
    pub a_max: f64,
    /// Comfortable deceleration, also used to decide whether to stop on
    /// a caution phase.
    pub b_comf: f64,
    /// Standstill gap, meters.
    pub s0: f64,
    /// Desired time headway, seconds.
    pub headway: f64,
    /// Hardest braking a background vehicle will apply.
    pub b_max: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        IdmParams {
            a_max: 1.5,
            b_comf: 3.0,
            s0: 2.0,
            headway: 1.5,
            b_max: 9.0,
        }
    }
}

/// IDM acceleration toward `v0`, optionally behind a leader at bumper gap
/// `gap` moving at `v_lead`.
pub fn idm_accel(v: f64, v0: f64, leader: Option<(f64, f64)>, p: &IdmParams) -> f64 {
    let free = 1.0 - (v / v0.max(0.1)).powi(4);
    let interaction = match leader {
        Some((gap, v_lead)) => {
            let dv = v - v_lead;
            let s_star = p.s0 + (v * p.headway + v * dv / (2.0 * (p.a_max * p.b_comf).sqrt())).max(0.0);
            (s_star / gap.max(0.01)).powi(2)
        }
        None => 0.0,
    };
    (p.a_max * (free - interaction)).max(-p.b_max)
}

/// A lane's extent along a concatenated route polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteLeg {
    pub lane_id: String,
    pub start: f64,
    pub end: f64,
}

/// A freshly spawned background vehicle with the route it will follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrival {
    pub state: ObjectState,
    pub path: Polyline,
    pub legs: Vec<RouteLeg>,
}

/// Seeded Poisson arrivals on every entry lane. Arrivals that would
/// overlap existing traffic wait in a per-lane queue.
#[derive(Debug, Clone)]
pub struct TrafficSpawner {
    cfg: BackgroundTraffic,
    /// Entry lane ids in id order with their waiting arrivals.
    queues: Vec<(String, u32)>,
    next_id: u64,
    idm: IdmParams,
}

impl TrafficSpawner {
    pub fn new(cfg: BackgroundTraffic, m: &VectorMap) -> Self {
        let mut lanes: Vec<String> = m.entry_lanes().into_iter().map(|l| l.id.clone()).collect();
        lanes.sort();
        TrafficSpawner {
            cfg,
            queues: lanes.into_iter().map(|l| (l, 0)).collect(),
            next_id: 0,
            idm: IdmParams::default(),
        }
    }

    pub fn idm(&self) -> &IdmParams {
        &self.idm
    }

    pub fn pending(&self) -> u32 {
        self.queues.iter().map(|q| q.1).sum()
    }

    /// One step of arrivals. At most one vehicle enters each lane per step;
    /// a lane whose entry zone is occupied keeps its queue. The entry zone
    /// is the vehicle's footprint stretched ahead by the standstill gap plus
    /// one headway at lane speed, so a new vehicle never appears inside
    /// another's braking distance.
    pub fn spawn_background_traffic(
        &mut self,
        m: &VectorMap,
        clock: &SimClock,
        rng: &mut impl Rng,
        occupied: &[OrientedBox],
    ) -> Vec<Arrival> {
        let mut out = Vec::new();
        let mean = self.cfg.rate_per_min / 60.0 * clock.dt;
        let poisson = (mean > 0.0).then(|| Poisson::new(mean).expect("positive mean"));
        let classes: Vec<ObjectClass> = self.cfg.class_mix.keys().copied().collect();
        let weights = WeightedIndex::new(self.cfg.class_mix.values().copied()).ok();
        let mut claimed: Vec<OrientedBox> = Vec::new();
        for qi in 0..self.queues.len() {
            if let Some(p) = &poisson {
                self.queues[qi].1 += p.sample(rng) as u32;
            }
            if self.queues[qi].1 == 0 {
                continue;
            }
            let lane = m.lane(&self.queues[qi].0).expect("entry lane exists");
            let class = match &weights {
                Some(w) => classes[w.sample(rng)],
                None => ObjectClass::Car,
            };
            let [l, w, h] = class.default_size();
            let path0 = m.lane_path(&lane.id).expect("lane path exists");
            let heading = path0.heading_at(0.0);
            let start = path0.point_at(0.0);
            let clearance = self.idm.s0 + self.idm.headway * lane.speed_limit;
            let zone = OrientedBox::new(
                start + Vec2::from_angle(heading) * (clearance / 2.0),
                l + clearance,
                w,
                heading,
            );
            if occupied.iter().chain(&claimed).any(|b| boxes_overlap(b, &zone)) {
                continue;
            }
            let route = random_route(m, &lane.id, rng);
            let (path, legs) = route_path(m, &route);
            self.queues[qi].1 -= 1;
            claimed.push(zone);
            let mut state = ObjectState::new(class)
                .with_id(TrackId(format!("bg-{:05}", self.next_id)))
                .at(start.x, start.y)
                .heading(heading)
                .moving(lane.speed_limit)
                .sized(l, w, h);
            state.z = m.ground_z;
            state.timestamp = clock.t();
            self.next_id += 1;
            out.push(Arrival { state, path, legs });
        }
        out
    }
}

/// Successor chain from `entry`, choosing uniformly at each fork.
pub fn random_route(m: &VectorMap, entry: &str, rng: &mut impl Rng) -> Vec<String> {
    let mut route = vec![entry.to_string()];
    while route.len() < MAX_ROUTE_LANES {
        let lane = m.lane(route.last().unwrap()).expect("route lane exists");
        if lane.successors.is_empty() {
            break;
        }
        let k = rng.random_range(0..lane.successors.len());
        route.push(lane.successors[k].clone());
    }
    route
}

/// Concatenated centerlines of a route.
pub fn route_path(m: &VectorMap, route: &[String]) -> (Polyline, Vec<RouteLeg>) {
    let mut pts: Vec<Vec2> = Vec::new();
    let mut legs = Vec::new();
    let mut acc = 0.0;
    for id in route {
        let lane = m.lane(id).expect("route lane exists");
        let first = lane.centerline[0];
        if let Some(&last) = pts.last() {
            acc += last.distance(first);
        }
        let start = acc;
        for (i, p) in lane.centerline.iter().enumerate() {
            if i > 0 {
                acc += p.distance(lane.centerline[i - 1]);
            }
            pts.push(*p);
        }
        legs.push(RouteLeg {
            lane_id: id.clone(),
            start,
            end: acc,
        });
    }
    (Polyline::new(pts), legs)
}
