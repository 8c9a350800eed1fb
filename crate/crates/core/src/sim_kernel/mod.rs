mod clock;
mod config;
mod conflict;
mod control;
mod engine;
mod hybrid;
mod object;
mod planning;
mod precrash;
mod signals;
mod spline;
mod traffic;

pub use clock::SimClock;
pub use config::{ActorConfig, BackgroundTraffic, EgoConfig, Environment, PerceptionConfig, Scenario, ScenarioConfig};
pub use conflict::{detect_conflicts, ConflictEvent, ConflictKind};
pub use control::{pid_speed_control, PidGains, PidState};
pub use engine::{run_scenario, run_steps, Agent, Driver, RunOutput, SimEvent, Simulation, StepOutput};
pub use hybrid::{prefixed_replay, synthesize_hybrid_frame, REPLAY_PREFIX};
pub use object::{ObjectClass, ObjectState, TrackId};
pub use planning::plan_route;
pub use precrash::{point_on, PrecrashKind, PrecrashTemplate, StagedActor, Trigger};
pub use signals::{traffic_light_phase, PhaseAction};
pub use spline::{smooth_path, NaturalCubicSpline, PathSpline};
pub use traffic::{idm_accel, random_route, route_path, Arrival, IdmParams, RouteLeg, TrafficSpawner};

/// Upper bound on any agent's speed, m/s.
pub const MAX_SPEED: f64 = 40.0;
