use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn coopsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_map_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scenario.json");
    fs::write(
        &cfg,
        r#"{"scenario": {"map": "nowhere/map.json"}, "environment": {"duration": 1, "dt": 0.1, "seed": 1}}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = coopsim(&["run", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nowhere/map.json"), "stderr: {stderr}");
    assert!(!out_dir.exists());
}

#[test]
fn run_is_byte_identical_and_seed_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = data("scenarios/traffic.json");
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    for (d, seed) in dirs.iter().zip(["3", "3", "4"]) {
        let out = coopsim(&["run", "--config", s(&cfg), "--out", s(d), "--seed", seed]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["frames.ndjson", "conflicts.csv", "events.ndjson"] {
        assert_eq!(fs::read(dirs[0].join(f)).unwrap(), fs::read(dirs[1].join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(dirs[0].join("frames.ndjson")).unwrap(), fs::read(dirs[2].join("frames.ndjson")).unwrap());
    let manifest = json(&dirs[0].join("manifest.json"));
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["command"], "run");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn evaluate_against_itself_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(coopsim(&["run", "--config", s(&data("scenarios/occlusion.json")), "--out", s(&run)]).status.code(), Some(0));
    let frames = run.join("frames.ndjson");
    let eval = tmp.path().join("eval");
    let out = coopsim(&["evaluate", "--gt", s(&frames), "--det", s(&frames), "--strategy", "self", "--out", s(&eval)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&eval.join("metrics.json"));
    let me = &m["agent"]["self"];
    assert_eq!(me["ap_at_iou"]["0.5"], 1.0);
    assert_eq!(me["ap_at_iou"]["0.7"], 1.0);
    assert_eq!(me["ate"], 0.0);
    assert!(fs::read_to_string(eval.join("metrics.csv")).unwrap().starts_with("metric,class,strategy,value\n"));
}

#[test]
fn evaluate_fusion_outputs_with_default_names() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(coopsim(&["run", "--config", s(&data("scenarios/occlusion.json")), "--out", s(&run)]).status.code(), Some(0));
    let eval = tmp.path().join("eval");
    let out = coopsim(&[
        "evaluate",
        "--gt",
        s(&run.join("frames.ndjson")),
        "--det",
        s(&run.join("detections_no_fusion.ndjson")),
        "--det",
        s(&run.join("detections_late_fusion.ndjson")),
        "--out",
        s(&eval),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&eval.join("metrics.json"));
    let ap = |k: &str| m["agent"][k]["ap_at_iou"]["0.5"].as_f64().unwrap();
    assert!(ap("late_fusion") > ap("no_fusion"));
}

#[test]
fn empty_detection_log_scores_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.ndjson");
    fs::write(&empty, "").unwrap();
    let eval = tmp.path().join("eval");
    let out = coopsim(&["evaluate", "--gt", s(&data("logs/traffic_20.ndjson")), "--det", s(&empty), "--out", s(&eval)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&eval.join("metrics.json"));
    assert_eq!(m["agent"]["empty"]["ap_at_iou"]["0.5"], 0.0);
    assert!(m["agent"]["empty"]["ate"].is_null());
}

#[test]
fn diverging_timestamps_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = data("logs/traffic_20.ndjson");
    let shifted = tmp.path().join("shifted.ndjson");
    let text = fs::read_to_string(&gt).unwrap();
    let lines: Vec<String> = text
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v["t"] = serde_json::json!(v["t"].as_f64().unwrap() + 0.2);
            v.to_string()
        })
        .collect();
    fs::write(&shifted, lines.join("\n")).unwrap();
    let eval = tmp.path().join("eval");
    let out = coopsim(&["evaluate", "--gt", s(&gt), "--det", s(&shifted), "--out", s(&eval)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!eval.exists());
}

#[test]
fn traffic_metrics_from_the_command_line() {
    let tmp = tempfile::tempdir().unwrap();
    let log = data("logs/traffic_20.ndjson");
    let eval = tmp.path().join("eval");
    let out = coopsim(&[
        "evaluate", "--gt", s(&log), "--det", s(&log), "--metrics", "traffic", "--region", "0,0,10", "--window", "10",
        "--out", s(&eval),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&eval.join("metrics.json"));
    assert_eq!(m["traffic"]["throughput"], 12.0);
    assert_eq!(m["traffic"]["delay_max"], 3.0);
}

#[test]
fn profile_single_count() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("prof");
    let out = coopsim(&[
        "profile", "--config", s(&data("scenarios/profile.json")), "--counts", "1", "--duration", "5", "--reps", "1",
        "--out", s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("scalability.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "intersections,steps_per_second,delta_pct,peak_objects");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,"));
    let svg = fs::read_to_string(out_dir.join("scalability.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("<polyline"));
}

#[test]
fn profile_rejects_unordered_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = coopsim(&[
        "profile", "--config", s(&data("scenarios/profile.json")), "--counts", "2,1", "--out",
        s(&tmp.path().join("p")),
    ]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn replay_refines_and_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("replay");
    let out = coopsim(&[
        "replay", "--config", s(&data("scenarios/replay.json")), "--assets", s(&data("assets/catalog.json")), "--out",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out_dir.join("replay_report.json"));
    assert_eq!(report["skipped"].as_array().map(|a| a.len()), Some(1), "{report}");
    let frames = fs::read_to_string(out_dir.join("frames.ndjson")).unwrap();
    assert!(frames.contains("\"replay:"));
    let refined = fs::read_to_string(out_dir.join("replay_refined.ndjson")).unwrap();
    assert!(refined.lines().count() > 0);
}

#[test]
fn coverage_with_preset_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("cov");
    let out = coopsim(&[
        "coverage", "--config", s(&data("scenarios/traffic.json")), "--layout", "centralized", "--grid", "2", "--out",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["coverage.json", "coverage.csv", "coverage.svg", "manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}
