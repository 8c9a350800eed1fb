use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::hybrid::prefixed_replay;
use super::precrash::point_on;
use super::traffic::{idm_accel, IdmParams, RouteLeg, TrafficSpawner};
use super::{
    detect_conflicts, pid_speed_control, plan_route, smooth_path, traffic_light_phase, ActorConfig,
    BackgroundTraffic, ConflictEvent, ConflictKind, EgoConfig, ObjectClass, ObjectState, PerceptionConfig,
    PhaseAction, PidGains, PidState, PrecrashTemplate, ScenarioConfig, SimClock, TrackId, Trigger, MAX_SPEED,
};
use crate::coop_perception::{
    late_fuse, no_fusion, simulate_detections, transmit, ChannelConfig, Delivery, FusionParams, MessageQueue,
    NoiseModel, V2xMessage, V2xMode,
};
use crate::data_pipeline::{ingest_stream, DetectionFrame};
use crate::error::{Error, Result};
use crate::geometry::{boxes_overlap, wrap_angle, OrientedBox, Polyline, Vec2};
use crate::infrastructure::{assign_intersections, cluster_sensors_into_ius, load_sensors, InfrastructureUnit, SensorSpec};
use crate::rng::{subsystem_rng, SimRng, NOISE, TRAFFIC};
use crate::world_model::{build_waypoint_graph, load_map, VectorMap};

/// Agents leaving the map bounds by more than this are despawned.
const BOUNDS_MARGIN: f64 = 20.0;
/// Sideways slack when deciding whether another object is in one's path.
const PATH_MARGIN: f64 = 0.3;
const LOOKAHEAD: f64 = 80.0;
/// Ego braking assumed by its safe-speed rule, and its reaction time.
const EGO_BRAKE: f64 = 4.0;
const EGO_REACTION: f64 = 0.5;
const EGO_STANDSTILL: f64 = 3.0;
/// Deceleration used to come to rest at the goal.
const EGO_GOAL_DECEL: f64 = 2.0;
/// Resampling step of the smoothed ego path.
const EGO_PATH_STEP: f64 = 0.5;

/// How an agent chooses its acceleration.
#[derive(Debug, Clone, PartialEq)]
pub enum Driver {
    /// Constant speed, optionally braking at `decel` from time `from` on.
    Scripted { brake: Option<(f64, f64)> },
    /// Background vehicle: car-following and signal compliance.
    Traffic { legs: Vec<RouteLeg> },
    /// Planned ego. When disabled it holds its speed and never reacts.
    Ego {
        enabled: bool,
        cruise: f64,
        pid: PidState,
        gains: PidGains,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub state: ObjectState,
    /// Path followed by arc length; straight along yaw when absent.
    pub path: Option<Polyline>,
    pub arc: f64,
    pub driver: Driver,
}

impl Agent {
    pub fn scripted(state: ObjectState, path: Option<Polyline>) -> Self {
        Agent {
            state,
            path,
            arc: 0.0,
            driver: Driver::Scripted { brake: None },
        }
    }

    /// Kinematic update under constant acceleration over one step.
    pub fn advance(&mut self, accel: f64, dt: f64, t: f64) {
        let v0 = self.state.speed;
        let v1 = (v0 + accel * dt).clamp(0.0, MAX_SPEED);
        let dist = if v1 == v0 { v0 * dt } else { 0.5 * (v0 + v1) * dt };
        match &self.path {
            Some(path) => {
                self.arc += dist;
                let (p, h) = point_on(path, self.arc);
                self.state.set_planar(p);
                self.state.yaw = wrap_angle(h);
            }
            None => {
                let p = self.state.planar() + Vec2::from_angle(self.state.yaw) * dist;
                self.state.set_planar(p);
            }
        }
        self.state.speed = v1;
        self.state.timestamp = t;
    }

    /// Nearest object ahead within the agent's swept corridor, as
    /// `(bumper gap, leader speed along our heading)`.
    fn leader<'a>(&self, others: impl Iterator<Item = &'a ObjectState>) -> Option<(f64, f64)> {
        let me = &self.state;
        let mut best: Option<(f64, f64)> = None;
        for o in others {
            if o.track_id == me.track_id || o.planar().distance(me.planar()) > LOOKAHEAD + 15.0 {
                continue;
            }
            let (along, lateral, heading) = match &self.path {
                Some(path) => {
                    let pr = path.project(o.planar());
                    (pr.arc - self.arc, pr.distance, path.heading_at(pr.arc))
                }
                None => {
                    let fwd = Vec2::from_angle(me.yaw);
                    let rel = o.planar() - me.planar();
                    (rel.dot(fwd), rel.cross(fwd).abs(), me.yaw)
                }
            };
            if along <= 0.0 || along > LOOKAHEAD {
                continue;
            }
            let d = o.yaw - heading;
            let (s, c) = (d.sin().abs(), d.cos().abs());
            let half_across = o.length / 2.0 * s + o.width / 2.0 * c;
            if lateral > me.width / 2.0 + half_across + PATH_MARGIN {
                continue;
            }
            let half_along = o.length / 2.0 * c + o.width / 2.0 * s;
            let gap = along - me.length / 2.0 - half_along;
            let v_lead = (o.speed * d.cos()).max(0.0);
            if best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, v_lead));
            }
        }
        best
    }
}

/// Something worth recording in the run's event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub t: f64,
    pub event: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

#[derive(Debug, Clone)]
struct PendingInjection {
    template: PrecrashTemplate,
    armed: bool,
    attempts: u32,
    done: bool,
}

struct Perception {
    units: Vec<InfrastructureUnit>,
    local: usize,
    noise: Option<NoiseModel>,
    fusion: FusionParams,
    channel: ChannelConfig,
    queue: MessageQueue,
    latest: BTreeMap<String, DetectionFrame>,
    noise_rng: SimRng,
    channel_rng: SimRng,
}

/// Everything one step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    /// Ground truth at the new time.
    pub frame: DetectionFrame,
    /// Conflicts whose onset is this step.
    pub conflicts: Vec<ConflictEvent>,
    /// Local view and fused view, when perception is configured.
    pub detections: Option<(DetectionFrame, DetectionFrame)>,
}

/// Deterministic fixed-step scenario engine.
pub struct Simulation {
    map: VectorMap,
    bounds: Option<(Vec2, Vec2)>,
    clock: SimClock,
    agents: BTreeMap<TrackId, Agent>,
    used_ids: BTreeSet<TrackId>,
    spawner: TrafficSpawner,
    traffic_rng: SimRng,
    idm: IdmParams,
    injections: Vec<PendingInjection>,
    injection_retries: u32,
    injected: usize,
    conflict_horizon: f64,
    active: BTreeSet<(TrackId, TrackId, ConflictKind)>,
    replay: VecDeque<DetectionFrame>,
    perception: Option<Perception>,
    ego: Option<TrackId>,
    seed: u64,
    events: Vec<SimEvent>,
}

impl Simulation {
    /// An empty world on `map`: no traffic, no ego, no perception.
    pub fn new(map: VectorMap, dt: f64, seed: u64) -> Self {
        let (lo, hi) = map.bounds();
        let bounds = (lo.x <= hi.x).then(|| {
            let m = Vec2::new(BOUNDS_MARGIN, BOUNDS_MARGIN);
            (lo - m, hi + m)
        });
        let spawner = TrafficSpawner::new(BackgroundTraffic::default(), &map);
        Simulation {
            bounds,
            clock: SimClock::new(dt),
            agents: BTreeMap::new(),
            used_ids: BTreeSet::new(),
            idm: *spawner.idm(),
            spawner,
            traffic_rng: subsystem_rng(seed, TRAFFIC),
            injections: Vec::new(),
            injection_retries: 10,
            injected: 0,
            conflict_horizon: 3.0,
            active: BTreeSet::new(),
            replay: VecDeque::new(),
            perception: None,
            ego: None,
            seed,
            events: Vec::new(),
            map,
        }
    }

    /// Builds the full scenario: map, traffic, ego, actors, injections,
    /// replay log and perception, all from one config.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let map = load_map(&cfg.scenario.map)?;
        let env = &cfg.environment;
        let mut sim = Simulation::new(map, env.dt, env.seed);
        sim.set_background(cfg.scenario.background_traffic.clone());
        sim.conflict_horizon = cfg.scenario.conflict_horizon;
        sim.injection_retries = cfg.scenario.injection_retries;
        if let Some(ego) = &cfg.scenario.ego {
            sim.add_ego(ego)?;
        }
        for a in &cfg.scenario.actors {
            sim.add_actor(a)?;
        }
        for inj in &cfg.scenario.injections {
            sim.add_injection(inj.clone());
        }
        if let Some(path) = &cfg.scenario.replay {
            let report = ingest_stream(path)?;
            for s in &report.skipped {
                sim.log(None, "replay_line_skipped", format!("line {}: {}", s.line, s.reason));
            }
            sim.set_replay(report.frames);
        }
        if let Some(p) = &cfg.perception {
            let path = cfg
                .sensors
                .as_ref()
                .ok_or_else(|| Error::Validation(vec!["perception needs a sensors file".into()]))?;
            let sensors = load_sensors(path)?;
            sim.set_perception(&sensors, p, cfg.channel.clone())?;
        }
        Ok(sim)
    }

    pub fn set_background(&mut self, cfg: BackgroundTraffic) {
        self.spawner = TrafficSpawner::new(cfg, &self.map);
    }

    pub fn set_conflict_horizon(&mut self, horizon: f64) {
        self.conflict_horizon = horizon;
    }

    pub fn set_replay(&mut self, frames: Vec<DetectionFrame>) {
        self.replay = frames.into();
    }

    pub fn add_injection(&mut self, template: PrecrashTemplate) {
        self.injections.push(PendingInjection {
            template,
            armed: false,
            attempts: 0,
            done: false,
        });
    }

    /// Inserts an agent under its track id, which must be fresh.
    pub fn insert_agent(&mut self, mut agent: Agent) -> Result<TrackId> {
        let id = agent
            .state
            .track_id
            .clone()
            .ok_or(Error::MissingTrackId(self.clock.t()))?;
        if !self.used_ids.insert(id.clone()) {
            return Err(Error::DuplicateId(id.0));
        }
        agent.state.timestamp = self.clock.t();
        self.agents.insert(id.clone(), agent);
        Ok(id)
    }

    pub fn add_actor(&mut self, a: &ActorConfig) -> Result<TrackId> {
        let [l, w, h] = a.size.unwrap_or(a.class.default_size());
        let mut state = ObjectState::new(a.class)
            .with_id(a.id.as_str())
            .at(a.position.x, a.position.y)
            .heading(a.yaw)
            .moving(a.speed)
            .sized(l, w, h);
        state.z = self.map.ground_z;
        let path = if a.path.is_empty() {
            None
        } else {
            let mut pts = vec![a.position];
            pts.extend(&a.path);
            let p = Polyline::new(pts);
            state.yaw = p.heading_at(0.0);
            Some(p)
        };
        self.insert_agent(Agent::scripted(state, path))
    }

    /// Plans the ego route with A* on the waypoint graph, smooths it with a
    /// natural cubic spline and places the ego at its start.
    pub fn add_ego(&mut self, cfg: &EgoConfig) -> Result<TrackId> {
        let g = build_waypoint_graph(&self.map, cfg.waypoint_spacing)?;
        let start = g.nearest_node(cfg.start).ok_or(Error::EmptyMap)?;
        let goal = g.nearest_node(cfg.goal).ok_or(Error::EmptyMap)?;
        let (nodes, _) = plan_route(&g, start, goal)?;
        let mut pts: Vec<Vec2> = nodes.iter().map(|&n| g.node(n).position).collect();
        // Lane ends and successor starts are separate nodes at one position.
        pts.dedup_by(|a, b| a.distance(*b) < 1e-9);
        let path = if pts.len() >= 3 {
            smooth_path(&pts)?.resample(EGO_PATH_STEP)
        } else {
            Polyline::new(pts)
        };
        if !(path.length() > 0.0) {
            return Err(Error::InvalidArgument("ego start and goal coincide".into()));
        }
        let class = cfg.class.unwrap_or(ObjectClass::Car);
        let p0 = path.point_at(0.0);
        let mut state = ObjectState::new(class)
            .with_id("ego")
            .at(p0.x, p0.y)
            .heading(path.heading_at(0.0))
            .moving(cfg.speed);
        state.z = self.map.ground_z;
        let id = self.insert_agent(Agent {
            state,
            path: Some(path),
            arc: 0.0,
            driver: Driver::Ego {
                enabled: cfg.enabled,
                cruise: cfg.cruise_speed.unwrap_or(cfg.speed),
                pid: PidState::default(),
                gains: cfg.gains,
            },
        })?;
        self.ego = Some(id.clone());
        Ok(id)
    }

    /// Turns on per-unit perception and I2I sharing toward the `local` unit.
    pub fn set_perception(&mut self, sensors: &[SensorSpec], cfg: &PerceptionConfig, channel: ChannelConfig) -> Result<()> {
        let mut units = cluster_sensors_into_ius(sensors)?;
        assign_intersections(&mut units, &self.map);
        let local = units.iter().position(|u| u.id == cfg.local).ok_or_else(|| {
            let ids: Vec<&str> = units.iter().map(|u| u.id.as_str()).collect();
            Error::Validation(vec![format!(
                "perception.local `{}` is not an infrastructure unit (have: {})",
                cfg.local,
                ids.join(", ")
            )])
        })?;
        self.perception = Some(Perception {
            units,
            local,
            noise: cfg.noise,
            fusion: cfg.fusion,
            channel_rng: subsystem_rng(self.seed, &channel.seed_label),
            channel,
            queue: MessageQueue::new(),
            latest: BTreeMap::new(),
            noise_rng: subsystem_rng(self.seed, NOISE),
        });
        Ok(())
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn map(&self) -> &VectorMap {
        &self.map
    }

    pub fn agent(&self, id: &str) -> Option<&Agent> {
        self.agents.get(&TrackId::new(id))
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.agents.values()
    }

    pub fn live_count(&self) -> usize {
        self.agents.len()
    }

    pub fn events(&self) -> &[SimEvent] {
        &self.events
    }

    pub fn take_events(&mut self) -> Vec<SimEvent> {
        std::mem::take(&mut self.events)
    }

    pub fn states(&self) -> Vec<ObjectState> {
        self.agents.values().map(|a| a.state.clone()).collect()
    }

    fn log(&mut self, id: Option<&TrackId>, event: &str, detail: String) {
        self.events.push(SimEvent {
            t: self.clock.t(),
            event: event.into(),
            id: id.map(|i| i.0.clone()),
            detail,
        });
    }

    /// Advances one `dt`: controls, motion, despawns, arrivals, injections,
    /// then the logged frame, conflicts and perception at the new time.
    pub fn step(&mut self) -> Result<StepOutput> {
        let t_prev = self.clock.t();
        self.clock.advance();
        let t = self.clock.t();
        let dt = self.clock.dt;

        let accels = self.controls(t_prev);
        for (agent, a) in self.agents.values_mut().zip(accels) {
            agent.advance(a, dt, t);
        }
        self.despawn();
        self.spawn_traffic();
        self.run_injections(t)?;

        let frame = self.truth_frame(t)?;
        let states: Vec<ObjectState> = frame.states().cloned().collect();
        let conflicts = self.conflict_onsets(&states);
        let detections = self.perceive(&states, t)?;
        Ok(StepOutput {
            frame,
            conflicts,
            detections,
        })
    }

    fn controls(&mut self, t: f64) -> Vec<f64> {
        let snapshot: Vec<ObjectState> = self.agents.values().map(|a| a.state.clone()).collect();
        let mut out = Vec::with_capacity(self.agents.len());
        for agent in self.agents.values_mut() {
            let a = match &mut agent.driver {
                Driver::Scripted { brake } => match brake {
                    Some((from, decel)) if t >= *from => -*decel,
                    _ => 0.0,
                },
                Driver::Traffic { legs } => {
                    let legs = legs.clone();
                    traffic_accel(agent, &legs, &snapshot, &self.map, &self.idm, t)
                }
                Driver::Ego { enabled: false, .. } => 0.0,
                Driver::Ego { .. } => {
                    let leader = agent.leader(snapshot.iter());
                    let remaining = agent.path.as_ref().map_or(f64::INFINITY, |p| p.length() - agent.arc);
                    let v = agent.state.speed;
                    let Driver::Ego { cruise, pid, gains, .. } = &mut agent.driver else {
                        unreachable!()
                    };
                    let v_goal = (2.0 * EGO_GOAL_DECEL * (remaining - 1.0).max(0.0)).sqrt();
                    let v_safe = leader.map_or(f64::INFINITY, |(gap, v_lead)| {
                        let br = EGO_BRAKE * EGO_REACTION;
                        let disc = br * br + v_lead * v_lead + 2.0 * EGO_BRAKE * (gap - EGO_STANDSTILL).max(0.0);
                        (disc.sqrt() - br).max(0.0)
                    });
                    let target = cruise.min(v_safe).min(v_goal);
                    pid_speed_control(target, v, pid, gains, self.clock.dt)
                }
            };
            out.push(a);
        }
        out
    }

    fn despawn(&mut self) {
        let mut gone = Vec::new();
        for (id, a) in &self.agents {
            let reason = match (&a.driver, &a.path) {
                (Driver::Traffic { .. }, Some(p)) if a.arc >= p.length() => Some("route_end"),
                _ => self.bounds.and_then(|(lo, hi)| {
                    let p = a.state.planar();
                    (p.x < lo.x || p.y < lo.y || p.x > hi.x || p.y > hi.y).then_some("out_of_bounds")
                }),
            };
            if let Some(r) = reason {
                gone.push((id.clone(), r));
            }
        }
        for (id, reason) in gone {
            self.agents.remove(&id);
            if self.ego.as_ref() == Some(&id) {
                self.ego = None;
            }
            self.log(Some(&id), "despawn", reason.into());
        }
    }

    fn spawn_traffic(&mut self) {
        let occupied: Vec<OrientedBox> = self.agents.values().map(|a| a.state.footprint()).collect();
        let arrivals = self
            .spawner
            .spawn_background_traffic(&self.map, &self.clock, &mut self.traffic_rng, &occupied);
        for arr in arrivals {
            let agent = Agent {
                state: arr.state,
                path: Some(arr.path),
                arc: 0.0,
                driver: Driver::Traffic { legs: arr.legs },
            };
            let class = agent.state.class;
            match self.insert_agent(agent) {
                Ok(id) => self.log(Some(&id), "spawn", class.as_str().into()),
                Err(e) => self.log(None, "spawn_failed", e.to_string()),
            }
        }
    }

    fn run_injections(&mut self, t: f64) -> Result<()> {
        let ego = self.ego.as_ref().and_then(|id| self.agents.get(id)).cloned();
        for k in 0..self.injections.len() {
            let inj = &mut self.injections[k];
            if inj.done {
                continue;
            }
            if !inj.armed {
                inj.armed = match inj.template.trigger {
                    Trigger::Time(at) => t >= at,
                    Trigger::EgoWithin { point, distance } => {
                        ego.as_ref().is_some_and(|e| e.state.planar().distance(point) <= distance)
                    }
                };
                if !inj.armed {
                    continue;
                }
            }
            let kind = inj.template.kind;
            let staged = match &ego {
                Some(Agent {
                    state,
                    path: Some(path),
                    arc,
                    ..
                }) => inj.template.stage(state, path, *arc, t),
                _ => Err("no ego to stage against".into()),
            };
            let staged = match staged {
                Ok(s) => s,
                Err(reason) => {
                    inj.done = true;
                    self.log(None, "injection_failed", format!("{}: {reason}", kind.as_str()));
                    continue;
                }
            };
            let fp = staged.state.footprint();
            if self.agents.values().any(|a| boxes_overlap(&a.state.footprint(), &fp)) {
                inj.attempts += 1;
                if inj.attempts > self.injection_retries {
                    inj.done = true;
                    self.log(None, "injection_failed", format!("{}: placement overlaps", kind.as_str()));
                }
                continue;
            }
            inj.done = true;
            let id = TrackId(format!("inj-{:02}-{}", self.injected, kind.as_str()));
            self.injected += 1;
            let mut state = staged.state;
            state.track_id = Some(id);
            let agent = Agent {
                state,
                path: Some(staged.path),
                arc: 0.0,
                driver: Driver::Scripted { brake: staged.brake },
            };
            let id = self.insert_agent(agent)?;
            self.log(Some(&id), "injection", kind.as_str().into());
        }
        Ok(())
    }

    fn truth_frame(&mut self, t: f64) -> Result<DetectionFrame> {
        let dt = self.clock.dt;
        let mut frame = DetectionFrame::from_states(t, "world", &self.states());
        let mut current = None;
        while self.replay.front().is_some_and(|f| f.timestamp <= t + dt / 2.0) {
            current = self.replay.pop_front();
        }
        if let Some(r) = current.filter(|r| (r.timestamp - t).abs() <= dt / 2.0) {
            for mut d in prefixed_replay(&r) {
                d.object.timestamp = t;
                if d.object.track_id.as_ref().is_some_and(|id| self.agents.contains_key(id)) {
                    return Err(Error::IdCollision(d.object.id_str().to_string()));
                }
                frame.objects.push(d);
            }
            frame.objects.sort_by(|a, b| a.object.track_id.cmp(&b.object.track_id));
        }
        Ok(frame)
    }

    fn conflict_onsets(&mut self, states: &[ObjectState]) -> Vec<ConflictEvent> {
        let all = detect_conflicts(states, self.conflict_horizon, self.clock.dt);
        let mut now = BTreeSet::new();
        let mut onsets = Vec::new();
        for e in all {
            let key = (e.pair.0.clone(), e.pair.1.clone(), e.kind);
            if !self.active.contains(&key) {
                onsets.push(e);
            }
            now.insert(key);
        }
        self.active = now;
        onsets
    }

    fn perceive(&mut self, truth: &[ObjectState], t: f64) -> Result<Option<(DetectionFrame, DetectionFrame)>> {
        let Some(p) = self.perception.as_mut() else {
            return Ok(None);
        };
        let mut local = None;
        let model = p.channel.model_for(V2xMode::I2I);
        let local_pos = p.units[p.local].centroid();
        for (k, unit) in p.units.iter().enumerate() {
            let noise = p.noise.unwrap_or(unit.sensors[0].noise);
            let frame = simulate_detections(&unit.id, &unit.sensors, truth, t, &noise, &mut p.noise_rng, None);
            if k == p.local {
                local = Some(frame);
                continue;
            }
            let msg = V2xMessage::new(unit.id.clone(), t, frame, V2xMode::I2I)?;
            let distance = unit.centroid().distance(local_pos);
            if let Delivery::At(at) = transmit(&msg, &model, &mut p.channel_rng, Some(distance)) {
                p.queue.push(msg, at);
            }
        }
        for (_, msg) in p.queue.pop_ready(t) {
            let newer = p
                .latest
                .get(&msg.sender)
                .is_none_or(|f| f.timestamp < msg.payload.timestamp);
            if newer {
                p.latest.insert(msg.sender, msg.payload);
            }
        }
        let local = local.expect("local unit perceives");
        let received: Vec<DetectionFrame> = p.latest.values().cloned().collect();
        let fused = late_fuse(&local, &received, &p.fusion).frame;
        Ok(Some((no_fusion(&local), fused)))
    }
}

fn traffic_accel(
    agent: &Agent,
    legs: &[RouteLeg],
    others: &[ObjectState],
    map: &VectorMap,
    idm: &IdmParams,
    t: f64,
) -> f64 {
    let v = agent.state.speed;
    let half = agent.state.length / 2.0;
    let leg = legs
        .iter()
        .find(|l| agent.arc <= l.end)
        .unwrap_or_else(|| legs.last().expect("route has a lane"));
    let v0 = map.lane(&leg.lane_id).map_or(10.0, |l| l.speed_limit);
    let mut leader = agent.leader(others.iter());
    if let Some(sig) = map.signal_for_lane(&leg.lane_id) {
        let dist = leg.end - 0.5 - (agent.arc + half);
        if dist > 0.0 {
            let stop = match PhaseAction::of(traffic_light_phase(sig, t)) {
                PhaseAction::Stop => true,
                PhaseAction::Caution => dist >= v * v / (2.0 * idm.b_comf),
                PhaseAction::Go => false,
            };
            if stop && leader.is_none_or(|(g, _)| dist < g) {
                leader = Some((dist, 0.0));
            }
        }
    }
    idm_accel(v, v0, leader, idm)
}

/// Full output of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub frames: Vec<DetectionFrame>,
    pub conflicts: Vec<ConflictEvent>,
    pub events: Vec<SimEvent>,
    pub no_fusion: Vec<DetectionFrame>,
    pub late_fusion: Vec<DetectionFrame>,
    pub peak_objects: usize,
}

/// Runs a configured scenario for its whole duration.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulation::from_config(cfg)?;
    run_steps(&mut sim, SimClock::steps_for(cfg.environment.duration, cfg.environment.dt))
}

/// Steps an already built simulation `steps` times, collecting everything.
pub fn run_steps(sim: &mut Simulation, steps: u64) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    for _ in 0..steps {
        let s = sim.step()?;
        out.peak_objects = out.peak_objects.max(s.frame.objects.len());
        out.frames.push(s.frame);
        out.conflicts.extend(s.conflicts);
        if let Some((local, fused)) = s.detections {
            out.no_fusion.push(local);
            out.late_fusion.push(fused);
        }
    }
    out.events = sim.take_events();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::Lane;

    fn empty_map() -> VectorMap {
        VectorMap::new(vec![], vec![], vec![], 0.0).unwrap()
    }

    fn straight_map(len: f64) -> VectorMap {
        VectorMap::new(
            vec![Lane {
                id: "a".into(),
                centerline: vec![Vec2::new(0.0, 0.0), Vec2::new(len, 0.0)],
                width: 3.5,
                successors: vec![],
                speed_limit: 10.0,
            }],
            vec![],
            vec![],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn kinematic_step() {
        let mut sim = Simulation::new(empty_map(), 0.5, 0);
        sim.insert_agent(Agent::scripted(
            ObjectState::new(ObjectClass::Car).with_id("a").moving(2.0),
            None,
        ))
        .unwrap();
        let out = sim.step().unwrap();
        let a = &out.frame.objects[0].object;
        assert_eq!((a.x, a.y), (1.0, 0.0));
        assert_eq!(a.timestamp, 0.5);
    }

    #[test]
    fn empty_world_only_ticks() {
        let mut sim = Simulation::new(empty_map(), 0.05, 0);
        for _ in 0..20 {
            let out = sim.step().unwrap();
            assert!(out.frame.objects.is_empty());
        }
        assert_eq!(sim.clock().t(), 1.0);
        assert!(sim.events().is_empty());
    }

    #[test]
    fn ids_never_reused() {
        let mut sim = Simulation::new(empty_map(), 0.05, 0);
        let s = ObjectState::new(ObjectClass::Car).with_id("x");
        sim.insert_agent(Agent::scripted(s.clone(), None)).unwrap();
        sim.agents.clear();
        assert!(matches!(sim.insert_agent(Agent::scripted(s, None)), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn traffic_follows_without_collision() {
        let mut sim = Simulation::new(straight_map(600.0), 0.05, 3);
        sim.set_background(BackgroundTraffic {
            rate_per_min: 30.0,
            class_mix: [(ObjectClass::Car, 1.0), (ObjectClass::Truck, 1.0)].into(),
        });
        // A stalled truck down the road forces a queue.
        sim.insert_agent(Agent::scripted(
            ObjectState::new(ObjectClass::Truck).with_id("stall").at(400.0, 0.0),
            None,
        ))
        .unwrap();
        let out = run_steps(&mut sim, 2400).unwrap();
        assert!(out.events.iter().filter(|e| e.event == "spawn").count() > 10);
        assert!(
            out.conflicts.iter().all(|c| c.kind != ConflictKind::OverlapCollision),
            "{:?}",
            out.conflicts.iter().find(|c| c.kind == ConflictKind::OverlapCollision)
        );
    }
}
