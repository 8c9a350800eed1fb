use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ObjectClass, PidGains, PrecrashTemplate};
use crate::coop_perception::{ChannelConfig, FusionParams, NoiseModel};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundTraffic {
    /// Arrivals per minute on each entry lane.
    pub rate_per_min: f64,
    #[serde(default = "default_mix")]
    pub class_mix: BTreeMap<ObjectClass, f64>,
}

fn default_mix() -> BTreeMap<ObjectClass, f64> {
    BTreeMap::from([(ObjectClass::Car, 1.0)])
}

impl Default for BackgroundTraffic {
    fn default() -> Self {
        BackgroundTraffic {
            rate_per_min: 0.0,
            class_mix: default_mix(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoConfig {
    pub start: Vec2,
    pub goal: Vec2,
    /// Speed at spawn.
    pub speed: f64,
    #[serde(default)]
    pub cruise_speed: Option<f64>,
    /// When false the ego drives its path at constant speed and never reacts.
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub gains: PidGains,
    #[serde(default = "default_spacing")]
    pub waypoint_spacing: f64,
    #[serde(default)]
    pub class: Option<ObjectClass>,
}

fn yes() -> bool {
    true
}

fn default_spacing() -> f64 {
    5.0
}

/// A scripted actor present from the start of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorConfig {
    pub id: String,
    pub class: ObjectClass,
    pub position: Vec2,
    #[serde(default)]
    pub yaw: f64,
    #[serde(default)]
    pub speed: f64,
    #[serde(default)]
    pub size: Option<[f64; 3]>,
    /// Waypoints to follow after `position`; straight along `yaw` if absent.
    #[serde(default)]
    pub path: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub map: PathBuf,
    #[serde(default)]
    pub background_traffic: BackgroundTraffic,
    #[serde(default)]
    pub ego: Option<EgoConfig>,
    #[serde(default)]
    pub injections: Vec<PrecrashTemplate>,
    #[serde(default)]
    pub actors: Vec<ActorConfig>,
    #[serde(default)]
    pub replay: Option<PathBuf>,
    #[serde(default = "default_horizon")]
    pub conflict_horizon: f64,
    /// Attempts before an injection whose placement overlaps is abandoned.
    #[serde(default = "default_retries")]
    pub injection_retries: u32,
}

fn default_horizon() -> f64 {
    3.0
}

fn default_retries() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    /// Metadata only.
    #[serde(default = "default_weather")]
    pub weather: String,
    pub duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_weather() -> String {
    "clear".into()
}

fn default_dt() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerceptionConfig {
    /// Infrastructure unit whose view is the local frame.
    pub local: String,
    /// Overrides every sensor's own noise model.
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub fusion: FusionParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub sensors: Option<PathBuf>,
    pub environment: Environment,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub perception: Option<PerceptionConfig>,
}

impl ScenarioConfig {
    /// Parses and validates a config. Relative paths inside are resolved
    /// against `base_dir`.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = origin.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.scenario.map);
        if let Some(p) = cfg.scenario.replay.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.sensors.as_mut() {
            resolve(p);
        }
        let errs = cfg.violations();
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let env = &self.environment;
        if !(env.dt > 0.0) {
            errs.push(format!("environment.dt must be > 0, got {}", env.dt));
        }
        if !(env.duration > 0.0) {
            errs.push(format!("environment.duration must be > 0, got {}", env.duration));
        }
        let bg = &self.scenario.background_traffic;
        if !(bg.rate_per_min >= 0.0) {
            errs.push(format!("background_traffic.rate_per_min must be >= 0, got {}", bg.rate_per_min));
        }
        if bg.class_mix.values().any(|w| !(*w >= 0.0)) || bg.class_mix.values().sum::<f64>() <= 0.0 {
            errs.push("background_traffic.class_mix needs non-negative weights with a positive sum".into());
        }
        if !(self.scenario.conflict_horizon > 0.0) {
            errs.push("scenario.conflict_horizon must be > 0".into());
        }
        if let Some(ego) = &self.scenario.ego {
            if !(ego.speed >= 0.0 && ego.speed <= super::MAX_SPEED) {
                errs.push(format!("ego.speed must be in [0, {}]", super::MAX_SPEED));
            }
            if !(ego.waypoint_spacing > 0.0) {
                errs.push("ego.waypoint_spacing must be > 0".into());
            }
        }
        for (k, inj) in self.scenario.injections.iter().enumerate() {
            errs.extend(inj.violations().into_iter().map(|e| format!("injections[{k}]: {e}")));
        }
        for a in &self.scenario.actors {
            if !(a.speed >= 0.0 && a.speed <= super::MAX_SPEED) {
                errs.push(format!("actor `{}` speed out of range", a.id));
            }
            if a.size.is_some_and(|s| s.iter().any(|v| !(*v > 0.0))) {
                errs.push(format!("actor `{}` size must be positive", a.id));
            }
        }
        errs.extend(self.channel.base.validate());
        if let Some(p) = &self.perception {
            if self.sensors.is_none() {
                errs.push("perception needs a sensors file".into());
            }
            if !(p.fusion.fuse_gate > 0.0) || !(p.fusion.staleness >= 0.0) {
                errs.push("perception.fusion needs fuse_gate > 0 and staleness >= 0".into());
            }
            if let Some(n) = &p.noise {
                errs.extend(n.validate());
            }
        }
        errs
    }
}
