//! Batch commands behind the `coopsim` binary. Every command writes into a
//! staging directory next to `--out` and renames it into place only once
//! everything, including `manifest.json`, has been written.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data_pipeline::{ingest_stream, process_log, write_frames, AssetCatalog, PipelineParams};
use crate::error::{Error, Result};
use crate::evaluation::{
    evaluate_agent, profile_scalability, scalability_svg, traffic_metrics, write_scalability_csv, MetricsReport,
    ProfileOptions, TrafficParams, DEFAULT_IOU_THRESHOLDS,
};
use crate::geometry::Vec2;
use crate::infrastructure::{load_sensors, placement_coverage, CoverageMap, LayoutKind, PlacementLayout};
use crate::sim_kernel::{run_steps, ConflictEvent, RunOutput, ScenarioConfig, SimClock, Simulation};
use crate::world_model::{load_map, IntersectionRegion, VectorMap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coopsim", version, about = "Cooperative driving simulation kernel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its frame log, conflicts and detections.
    Run(RunArgs),
    /// Track and refine the scenario's replay log, then run on top of it.
    Replay(ReplayArgs),
    /// Score detection logs against ground truth.
    Evaluate(EvaluateArgs),
    /// Steps per second of background traffic at growing intersection counts.
    Profile(ProfileArgs),
    /// Sensor coverage of the map's intersection regions.
    Coverage(CoverageArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Asset catalog to snap replayed object sizes to.
    #[arg(long)]
    pub assets: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Ap,
    ApDist,
    Pose,
    Traffic,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Ground-truth frame log.
    #[arg(long)]
    pub gt: PathBuf,
    /// Detection logs, one per strategy.
    #[arg(long, required = true)]
    pub det: Vec<PathBuf>,
    /// Names for the detection logs, in order. Defaults to the file stem
    /// without a leading `detections_`.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values = ["ap", "ap-dist", "pose"])]
    pub metrics: Vec<Metric>,
    /// Intersection id in `--map`, or `x,y,radius`.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Throughput window, seconds.
    #[arg(long, default_value_t = 60.0)]
    pub window: f64,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_IOU_THRESHOLDS)]
    pub iou: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4])]
    pub counts: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated seconds per run; the config's duration by default.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rate_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Centralized,
    PartiallyDistributed,
    FullyDistributed,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Preset placement around the region center instead of the config's sensors.
    #[arg(long)]
    pub layout: Option<LayoutArg>,
    /// Intersection id used to center a preset layout.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub grid: f64,
}

/// Written last into every output directory.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Unix seconds.
    pub started_at: f64,
    pub finished_at: f64,
    pub outputs: Vec<String>,
}

/// A failed command: the error and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl Failure {
    fn config(error: Error) -> Self {
        Failure { code: EXIT_CONFIG, error }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { code: EXIT_RUNTIME, error }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(64);
    for b in Sha256::digest(bytes).iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

struct Staging {
    tmp: PathBuf,
    out: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Staging {
    fn new(out: &Path) -> Result<Self> {
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
        let name = out.file_name().map_or("out".into(), |n| n.to_string_lossy().into_owned());
        let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        }
        fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        Ok(Staging {
            tmp,
            out: out.to_path_buf(),
            files: Vec::new(),
            committed: false,
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.tmp.join(name)
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
        Ok(BufWriter::new(f))
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, bytes).map_err(|e| Error::io(&p, e))
    }

    fn commit(mut self, mut manifest: RunManifest) -> Result<RunManifest> {
        manifest.outputs = self.files.clone();
        manifest.finished_at = now();
        let text = serde_json::to_string_pretty(&manifest)?;
        let p = self.tmp.join("manifest.json");
        fs::write(&p, text + "\n").map_err(|e| Error::io(&p, e))?;
        if self.out.exists() {
            let old = self.tmp.with_extension("old");
            fs::rename(&self.out, &old).map_err(|e| Error::io(&self.out, e))?;
            fs::rename(&self.tmp, &self.out).map_err(|e| Error::io(&self.out, e))?;
            let _ = fs::remove_dir_all(&old);
        } else {
            fs::rename(&self.tmp, &self.out).map_err(|e| Error::io(&self.out, e))?;
        }
        self.committed = true;
        Ok(manifest)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp);
        }
    }
}

fn manifest(command: &str, config: Option<(&Path, &[u8])>, seed: Option<u64>) -> RunManifest {
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config: config.map(|(p, _)| p.to_path_buf()),
        config_sha256: config.map(|(_, b)| sha256_hex(b)),
        seed,
        started_at: now(),
        finished_at: 0.0,
        outputs: Vec::new(),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> CmdResult<(ScenarioConfig, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Failure::config(Error::io(path, e)))?;
    let mut cfg = ScenarioConfig::load(path).map_err(Failure::config)?;
    if let Some(s) = seed {
        cfg.environment.seed = s;
    }
    Ok((cfg, bytes))
}

/// `time,pair_a,pair_b,kind,ttc,min_distance`; `ttc` is empty for overlaps.
pub fn write_conflicts_csv<W: Write>(events: &[ConflictEvent], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["time", "pair_a", "pair_b", "kind", "ttc", "min_distance"])?;
    for e in events {
        csv.write_record([
            e.time.to_string(),
            e.pair.0.to_string(),
            e.pair.1.to_string(),
            e.kind.as_str().to_string(),
            e.ttc.map(|t| t.to_string()).unwrap_or_default(),
            e.min_distance.to_string(),
        ])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_run(stage: &mut Staging, out: &RunOutput) -> Result<()> {
    write_frames(stage.create("frames.ndjson")?, &out.frames)?;
    write_conflicts_csv(&out.conflicts, stage.create("conflicts.csv")?)?;
    let mut ev = stage.create("events.ndjson")?;
    for e in &out.events {
        writeln!(ev, "{}", serde_json::to_string(e)?).map_err(|e| Error::io("events.ndjson", e))?;
    }
    ev.flush().map_err(|e| Error::io("events.ndjson", e))?;
    if !out.no_fusion.is_empty() {
        write_frames(stage.create("detections_no_fusion.ndjson")?, &out.no_fusion)?;
        write_frames(stage.create("detections_late_fusion.ndjson")?, &out.late_fusion)?;
    }
    Ok(())
}

fn steps(cfg: &ScenarioConfig) -> u64 {
    SimClock::steps_for(cfg.environment.duration, cfg.environment.dt)
}

pub fn execute_run(args: &RunArgs) -> CmdResult<RunManifest> {
    let (cfg, bytes) = load_config(&args.config, args.seed)?;
    let mut sim = Simulation::from_config(&cfg).map_err(Failure::config)?;
    let mut stage = Staging::new(&args.out)?;
    let m = manifest("run", Some((&args.config, &bytes)), Some(cfg.environment.seed));
    let out = run_steps(&mut sim, steps(&cfg))?;
    write_run(&mut stage, &out)?;
    Ok(stage.commit(m)?)
}

pub fn execute_replay(args: &ReplayArgs) -> CmdResult<RunManifest> {
    let (mut cfg, bytes) = load_config(&args.config, args.seed)?;
    let log = cfg.scenario.replay.take().ok_or_else(|| {
        Failure::config(Error::Validation(vec!["scenario.replay: replay needs a log to replay".into()]))
    })?;
    let catalog = args
        .assets
        .as_ref()
        .map(AssetCatalog::load)
        .transpose()
        .map_err(Failure::config)?;
    let report = ingest_stream(&log).map_err(Failure::config)?;
    let mut sim = Simulation::from_config(&cfg).map_err(Failure::config)?;
    let mut stage = Staging::new(&args.out)?;
    let m = manifest("replay", Some((&args.config, &bytes)), Some(cfg.environment.seed));

    let processed = process_log(&report.frames, &PipelineParams::default(), catalog.as_ref())?;
    write_frames(stage.create("replay_refined.ndjson")?, &processed.frames)?;
    let summary = serde_json::json!({
        "frames": report.frames.len(),
        "skipped": report.skipped.iter().map(|s| serde_json::json!({"line": s.line, "reason": s.reason})).collect::<Vec<_>>(),
        "tracks": processed.tracks.len(),
        "assets": processed.assets.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<std::collections::BTreeMap<_, _>>(),
    });
    stage.write("replay_report.json", serde_json::to_string_pretty(&summary)? + "\n")?;
    sim.set_replay(processed.frames);
    let out = run_steps(&mut sim, steps(&cfg))?;
    write_run(&mut stage, &out)?;
    Ok(stage.commit(m)?)
}

fn parse_region(text: &str, map: Option<&Path>) -> Result<IntersectionRegion> {
    let nums: Vec<f64> = text.split(',').filter_map(|s| s.trim().parse().ok()).collect();
    if nums.len() == 3 && text.split(',').count() == 3 {
        return Ok(IntersectionRegion::new("region", Vec2::new(nums[0], nums[1]), nums[2], 0.0));
    }
    let path = map.ok_or_else(|| Error::InvalidArgument(format!("--region `{text}` needs --map")))?;
    let m = load_map(path)?;
    m.intersection(text)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("map {} has no intersection `{text}`", path.display())))
}

fn strategy_name(path: &Path) -> String {
    let stem = path.file_stem().map_or("det".into(), |s| s.to_string_lossy().into_owned());
    stem.strip_prefix("detections_").map(str::to_string).unwrap_or(stem)
}

pub fn execute_evaluate(args: &EvaluateArgs) -> CmdResult<RunManifest> {
    if !args.strategy.is_empty() && args.strategy.len() != args.det.len() {
        return Err(Failure::config(Error::InvalidArgument(format!(
            "{} strategies for {} detection logs",
            args.strategy.len(),
            args.det.len()
        ))));
    }
    let wants = |m: Metric| args.metrics.contains(&m);
    let region = match (&args.region, wants(Metric::Traffic)) {
        (Some(r), _) => Some(parse_region(r, args.map.as_deref()).map_err(Failure::config)?),
        (None, true) => {
            return Err(Failure::config(Error::InvalidArgument("traffic metrics need --region".into())));
        }
        (None, false) => None,
    };
    let gt = ingest_stream(&args.gt).map_err(Failure::config)?.frames;
    let mut report = MetricsReport::default();
    let mut stage = Staging::new(&args.out)?;
    let m = manifest("evaluate", None, None);
    for (k, path) in args.det.iter().enumerate() {
        let det = ingest_stream(path).map_err(Failure::config)?.frames;
        let mut a = evaluate_agent(&gt, &det, &args.iou)?;
        if !wants(Metric::Ap) {
            a.ap_at_iou.clear();
            a.per_class.values_mut().for_each(|c| c.ap_at_iou.clear());
        }
        if !wants(Metric::ApDist) {
            a.ap_at_dist = None;
            a.per_class.values_mut().for_each(|c| c.ap_at_dist = None);
        }
        if !wants(Metric::Pose) {
            (a.ate, a.ase, a.aoe, a.matched) = (None, None, None, 0);
        }
        let name = args.strategy.get(k).cloned().unwrap_or_else(|| strategy_name(path));
        report.agent.insert(name, a);
    }
    if let (Some(r), true) = (&region, wants(Metric::Traffic)) {
        let params = TrafficParams {
            window: args.window,
            ..TrafficParams::default()
        };
        report.traffic = Some(traffic_metrics(&gt, r, &params));
    }
    stage.write("metrics.json", report.to_json() + "\n")?;
    report.write_csv(stage.create("metrics.csv")?)?;
    Ok(stage.commit(m)?)
}

pub fn execute_profile(args: &ProfileArgs) -> CmdResult<RunManifest> {
    let (cfg, bytes) = load_config(&args.config, args.seed)?;
    if args.counts.is_empty() || args.counts.windows(2).any(|w| w[0] >= w[1]) || args.counts[0] == 0 {
        return Err(Failure::config(Error::InvalidArgument(
            "--counts must be non-empty, positive and strictly ascending".into(),
        )));
    }
    load_map(&cfg.scenario.map).map_err(Failure::config)?;
    let opts = ProfileOptions {
        duration: args.duration,
        reps: args.reps,
        rate_scale: args.rate_scale,
    };
    let mut stage = Staging::new(&args.out)?;
    let m = manifest("profile", Some((&args.config, &bytes)), Some(cfg.environment.seed));
    let records = profile_scalability(&cfg, &args.counts, &opts)?;
    write_scalability_csv(&records, stage.create("scalability.csv")?)?;
    stage.write("scalability.json", serde_json::to_string_pretty(&records)? + "\n")?;
    stage.write("scalability.svg", scalability_svg(&records))?;
    Ok(stage.commit(m)?)
}

/// Cells shaded by how many sensors see them.
pub fn coverage_svg(cov: &CoverageMap) -> String {
    let mut s = String::new();
    if cov.cells.is_empty() {
        s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"10\" height=\"10\"/>\n");
        return s;
    }
    let g = cov.grid;
    let lo_x = cov.cells.iter().map(|c| c.center.x).fold(f64::INFINITY, f64::min) - g / 2.0;
    let hi_y = cov.cells.iter().map(|c| c.center.y).fold(f64::NEG_INFINITY, f64::max) + g / 2.0;
    let hi_x = cov.cells.iter().map(|c| c.center.x).fold(f64::NEG_INFINITY, f64::max) + g / 2.0;
    let lo_y = cov.cells.iter().map(|c| c.center.y).fold(f64::INFINITY, f64::min) - g / 2.0;
    let scale = 600.0 / (hi_x - lo_x).max(hi_y - lo_y);
    let max = cov.cells.iter().map(|c| c.count).max().unwrap_or(0).max(1) as f64;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}">"#,
        (hi_x - lo_x) * scale,
        (hi_y - lo_y) * scale
    );
    for c in &cov.cells {
        let shade = if c.count == 0 { 255 } else { 220 - (170.0 * c.count as f64 / max) as u8 };
        let fill = if c.count == 0 { "rgb(230,80,80)".to_string() } else { format!("rgb({shade},{shade},255)") };
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            (c.center.x - g / 2.0 - lo_x) * scale,
            (hi_y - c.center.y - g / 2.0) * scale,
            g * scale,
            g * scale
        );
    }
    s.push_str("</svg>\n");
    s
}

fn layout_for(args: &CoverageArgs, cfg: &ScenarioConfig, map: &VectorMap) -> Result<PlacementLayout> {
    let Some(kind) = args.layout else {
        let path = cfg
            .sensors
            .as_ref()
            .ok_or_else(|| Error::Validation(vec!["coverage needs a sensors file or --layout".into()]))?;
        let name = path.file_stem().map_or("sensors".into(), |s| s.to_string_lossy().into_owned());
        return Ok(PlacementLayout::custom(name, load_sensors(path)?));
    };
    let region = match &args.region {
        Some(id) => map
            .intersection(id)
            .ok_or_else(|| Error::InvalidArgument(format!("no intersection `{id}`")))?,
        None => map.intersections.first().ok_or_else(|| Error::InvalidArgument("map has no intersections".into()))?,
    };
    let kind = match kind {
        LayoutArg::Centralized => LayoutKind::Centralized,
        LayoutArg::PartiallyDistributed => LayoutKind::PartiallyDistributed,
        LayoutArg::FullyDistributed => LayoutKind::FullyDistributed,
    };
    Ok(PlacementLayout::preset(&kind, region.center).expect("built-in layout"))
}

pub fn execute_coverage(args: &CoverageArgs) -> CmdResult<RunManifest> {
    let (cfg, bytes) = load_config(&args.config, None)?;
    if !(args.grid > 0.0) {
        return Err(Failure::config(Error::InvalidArgument("--grid must be positive".into())));
    }
    let map = load_map(&cfg.scenario.map).map_err(Failure::config)?;
    let layout = layout_for(args, &cfg, &map).map_err(Failure::config)?;
    let mut stage = Staging::new(&args.out)?;
    let m = manifest("coverage", Some((&args.config, &bytes)), None);
    let cov = placement_coverage(&layout, &map, args.grid);
    let summary = serde_json::json!({
        "layout": layout.name.name(),
        "sensors": layout.sensors.len(),
        "grid": cov.grid,
        "cells": cov.cells.len(),
        "covered_fraction": cov.covered_fraction,
        "redundancy_fraction": cov.redundancy_fraction,
    });
    stage.write("coverage.json", serde_json::to_string_pretty(&summary)? + "\n")?;
    let mut csv = csv::Writer::from_writer(stage.create("coverage.csv")?);
    csv.write_record(["x", "y", "count"]).map_err(Error::from)?;
    for c in &cov.cells {
        csv.write_record([c.center.x.to_string(), c.center.y.to_string(), c.count.to_string()])
            .map_err(Error::from)?;
    }
    csv.flush().map_err(|e| Error::from(csv::Error::from(e)))?;
    drop(csv);
    stage.write("coverage.svg", coverage_svg(&cov))?;
    Ok(stage.commit(m)?)
}

fn report(r: CmdResult<RunManifest>) -> i32 {
    match r {
        Ok(m) => {
            eprintln!("{}: wrote {}", m.command, m.outputs.join(", "));
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.error);
            f.code
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    report(execute_run(args))
}

pub fn cmd_replay(args: &ReplayArgs) -> i32 {
    report(execute_replay(args))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> i32 {
    report(execute_evaluate(args))
}

pub fn cmd_profile(args: &ProfileArgs) -> i32 {
    report(execute_profile(args))
}

pub fn cmd_coverage(args: &CoverageArgs) -> i32 {
    report(execute_coverage(args))
}

/// Runs one parsed command line and returns the process exit code.
pub fn dispatch(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Coverage(a) => cmd_coverage(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_kernel::{ConflictKind, TrackId};

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn conflict_csv_layout() {
        let e = ConflictEvent {
            time: 1.5,
            pair: (TrackId::from("a"), TrackId::from("b")),
            kind: ConflictKind::OverlapCollision,
            ttc: None,
            min_distance: 0.25,
        };
        let mut buf = Vec::new();
        write_conflicts_csv(&[e], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "time,pair_a,pair_b,kind,ttc,min_distance\n1.5,a,b,overlap_collision,,0.25\n"
        );
    }

    #[test]
    fn region_literal_and_strategy_names() {
        let r = parse_region("1,2,30", None).unwrap();
        assert_eq!((r.center, r.d_f), (Vec2::new(1.0, 2.0), 30.0));
        assert!(parse_region("x0", None).is_err());
        assert_eq!(strategy_name(Path::new("run/detections_late_fusion.ndjson")), "late_fusion");
        assert_eq!(strategy_name(Path::new("mine.ndjson")), "mine");
    }

    #[test]
    fn failed_stage_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        {
            let mut s = Staging::new(&out).unwrap();
            s.write("a.txt", "x").unwrap();
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn commit_replaces_previous_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        fs::create_dir(&out).unwrap();
        fs::write(out.join("stale.txt"), "old").unwrap();
        let mut s = Staging::new(&out).unwrap();
        s.write("a.txt", "x").unwrap();
        let m = s.commit(manifest("test", None, None)).unwrap();
        assert_eq!(m.outputs, vec!["a.txt"]);
        assert!(!out.join("stale.txt").exists());
        assert!(out.join("manifest.json").exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
