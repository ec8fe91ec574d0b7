//! End-to-end tests of the `courtfusion` binary: exit codes, file outputs,
//! config precedence, and the SVG plot surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin(dir: &Path, envs: &[(&str, &str)], args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_courtfusion"));
    cmd.current_dir(dir).env_remove("COURTFUSION_CONFIG").args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn calibrate_identity_corners_give_identity_maps() {
    let dir = TempDir::new().unwrap();
    let corners = r#"{
        "image_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]],
        "world_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]]
    }"#;
    fs::write(dir.path().join("corners.json"), corners).unwrap();
    let out = bin(dir.path(), &[], &["calibrate", "corners.json"]);
    assert_eq!(out.status.code(), Some(0));

    let cal: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for matrix in ["to_world", "from_world"] {
        let m = cal[matrix]["m"].as_array().unwrap();
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.as_array().unwrap().iter().enumerate() {
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!(
                    (v.as_f64().unwrap() - expected).abs() < 1e-12,
                    "{matrix}[{r}][{c}] = {v}"
                );
            }
        }
    }
    let err = stderr(&out);
    assert!(err.contains("reprojection error"), "stderr: {err}");
}

#[test]
fn calibrate_sample_corners_reproject_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let corners = r#"{
        "image_corners": [[70,1230],[650,1230],[640,50],[80,50]],
        "world_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]]
    }"#;
    fs::write(dir.path().join("corners.json"), corners).unwrap();
    let out = bin(dir.path(), &[], &["calibrate", "corners.json", "--out", "cal.json"]);
    assert_eq!(out.status.code(), Some(0));

    let reported: f64 = stderr(&out)
        .split(':')
        .next_back()
        .unwrap()
        .trim()
        .parse()
        .expect("stderr ends with the error value");
    assert!(reported < 1e-9, "reprojection error {reported}");
    assert!(dir.path().join("cal.json").exists());
}

#[test]
fn calibrate_collinear_corners_exit_2_naming_the_triple() {
    let dir = TempDir::new().unwrap();
    let corners = r#"{
        "image_corners": [[0,0],[1,1],[2,2],[0,1]],
        "world_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]]
    }"#;
    fs::write(dir.path().join("corners.json"), corners).unwrap();
    let out = bin(dir.path(), &[], &["calibrate", "corners.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("0, 1, 2") && err.contains("collinear"), "stderr: {err}");
}

#[test]
fn track_consumes_simulated_frame_streams() {
    let dir = TempDir::new().unwrap();
    let sim = bin(
        dir.path(),
        &[],
        &["simulate", "--scenario", "crossing", "--seed", "3", "--out", "frames.jsonl"],
    );
    assert_eq!(sim.status.code(), Some(0));

    let track = bin(
        dir.path(),
        &[],
        &["track", "--frames", "frames.jsonl", "--out", "traj.csv", "--bindings-out", "bind.csv"],
    );
    assert_eq!(track.status.code(), Some(0));
    let traj = fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert!(traj.starts_with("frame_index,track_id,world_x_m,world_y_m,state\n"));
    // 120 frames, two players tracked throughout.
    assert_eq!(traj.lines().count(), 1 + 240);
    let bind = fs::read_to_string(dir.path().join("bind.csv")).unwrap();
    assert!(bind.starts_with("frame_index,track_id,player_id\n"));
}

#[test]
fn track_requires_a_scenario_or_frames() {
    let dir = TempDir::new().unwrap();
    let out = bin(dir.path(), &[], &["track"]);
    assert_eq!(out.status.code(), Some(2));
    let both = bin(
        dir.path(),
        &[],
        &["track", "--scenario", "crossing", "--frames", "x.jsonl"],
    );
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn unknown_scenario_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = bin(dir.path(), &[], &["evaluate", "--scenario", "no_such"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no_such"));
}

#[test]
fn evaluate_trivial_scenario_is_perfect() {
    let dir = TempDir::new().unwrap();
    let scenario = serde_json::json!({
        "name": "solo",
        "top_cal": {
            "image_corners": [[70,1230],[650,1230],[640,50],[80,50]],
            "world_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]]
        },
        "rear_cal": {
            "image_corners": [[140,700],[1140,700],[810,250],[470,250]],
            "world_corners": [[0,0],[6.1,0],[6.1,13.4],[0,13.4]]
        },
        "players": [{
            "player_name": "solo",
            "waypoints": [{"t": 0.0, "x": 1.0, "y": 2.0}, {"t": 2.0, "x": 4.0, "y": 9.0}],
            "feature_basis": [1.0, 0.0, 0.0, 0.0]
        }],
        "duration": 2.0,
        "noise_sigma": 0.0
    });
    fs::write(dir.path().join("solo.json"), scenario.to_string()).unwrap();
    let out = bin(dir.path(), &[], &["evaluate", "--scenario", "solo.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["id_switches"], 0);
    assert!(report["trajectory_rmse"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["frames_fully_correct"], 1.0);
}

#[test]
fn strict_mode_gates_on_id_switches() {
    let dir = TempDir::new().unwrap();
    let fused = bin(
        dir.path(),
        &[],
        &["evaluate", "--scenario", "crossing", "--seed", "7", "--strict"],
    );
    assert_eq!(fused.status.code(), Some(0));

    let rear = bin(
        dir.path(),
        &[],
        &["evaluate", "--scenario", "crossing", "--seed", "7", "--strict", "--rear-only"],
    );
    assert_eq!(rear.status.code(), Some(1));
    assert!(stderr(&rear).contains("identity switches"));
}

#[test]
fn seed_fanout_merges_reports_in_seed_order() {
    let dir = TempDir::new().unwrap();
    let out = bin(
        dir.path(),
        &[],
        &["evaluate", "--scenario", "crossing", "--seed", "5", "--seeds", "3"],
    );
    assert_eq!(out.status.code(), Some(0));
    let merged: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(merged["seeds"], serde_json::json!([5, 6, 7]));
    assert_eq!(merged["reports"].as_array().unwrap().len(), 3);
    assert_eq!(merged["mode"], "fused");
    assert_eq!(merged["total_id_switches"], 0);
    assert!(merged["mean_trajectory_rmse"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_sits_between_flags_and_scenario_defaults() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("config.json"), r#"{"seed": 9}"#).unwrap();
    let config = dir.path().join("config.json");
    let config = [("COURTFUSION_CONFIG", config.to_str().unwrap())];

    // Config seed overrides the scenario seed.
    bin(dir.path(), &config, &["simulate", "--scenario", "crossing", "--out", "via_config.jsonl"]);
    bin(dir.path(), &[], &["simulate", "--scenario", "crossing", "--seed", "9", "--out", "via_flag.jsonl"]);
    assert_eq!(
        fs::read(dir.path().join("via_config.jsonl")).unwrap(),
        fs::read(dir.path().join("via_flag.jsonl")).unwrap()
    );

    // A CLI seed beats the config seed.
    bin(dir.path(), &config, &["simulate", "--scenario", "crossing", "--seed", "11", "--out", "flag_wins.jsonl"]);
    bin(dir.path(), &[], &["simulate", "--scenario", "crossing", "--seed", "11", "--out", "plain.jsonl"]);
    assert_eq!(
        fs::read(dir.path().join("flag_wins.jsonl")).unwrap(),
        fs::read(dir.path().join("plain.jsonl")).unwrap()
    );
}

#[test]
fn config_problems_are_input_errors() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"gait_radius": 2.0}"#).unwrap();
    let bad_key = dir.path().join("bad.json");
    let out = bin(
        dir.path(),
        &[("COURTFUSION_CONFIG", bad_key.to_str().unwrap())],
        &["evaluate", "--scenario", "crossing"],
    );
    assert_eq!(out.status.code(), Some(2));

    let missing = bin(
        dir.path(),
        &[("COURTFUSION_CONFIG", "does_not_exist.json")],
        &["evaluate", "--scenario", "crossing"],
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn plot_empty_csv_renders_outline_only() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("empty.csv"),
        "frame_index,track_id,world_x_m,world_y_m,state\n",
    )
    .unwrap();
    let out = bin(dir.path(), &[], &["plot", "empty.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = stdout(&out);
    assert!(svg.contains("<rect x=\"0\" y=\"0\""));
    assert!(!svg.contains("<polyline"));
}

#[test]
fn plot_malformed_csv_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.csv"), "not,a,trajectory\n").unwrap();
    let out = bin(dir.path(), &[], &["plot", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

/// Extracts the (x, y) point lists of every polyline in the SVG.
fn polyline_points(svg: &str) -> Vec<Vec<(f64, f64)>> {
    let mut lines = Vec::new();
    for chunk in svg.split("<polyline").skip(1) {
        let attr = chunk.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let points = attr
            .split_whitespace()
            .map(|pair| {
                let (x, y) = pair.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        lines.push(points);
    }
    lines
}

#[test]
fn plot_crossing_run_draws_two_polylines_passing_mid_court() {
    let dir = TempDir::new().unwrap();
    bin(
        dir.path(),
        &[],
        &["track", "--scenario", "crossing", "--seed", "7", "--out", "traj.csv"],
    );
    let out = bin(dir.path(), &[], &["plot", "traj.csv", "--out", "court.svg"]);
    assert_eq!(out.status.code(), Some(0));

    let svg = fs::read_to_string(dir.path().join("court.svg")).unwrap();
    let polylines = polyline_points(&svg);
    assert_eq!(polylines.len(), 2);

    // The players swap sides, so both trajectories sweep through the
    // scripted pass point's x mid-court while staying in separate y bands.
    let mid_x = 6.1 / 2.0;
    for points in &polylines {
        let min_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        assert!(min_x < mid_x && mid_x < max_x, "x range [{min_x}, {max_x}]");
    }

    // Distinct stroke colors for the two ids.
    let strokes: Vec<&str> = svg
        .split("<polyline")
        .skip(1)
        .map(|c| c.split("stroke=\"").nth(1).unwrap().split('"').next().unwrap())
        .collect();
    assert_ne!(strokes[0], strokes[1]);
}

#[test]
fn help_and_version_exit_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(bin(dir.path(), &[], &["--help"]).status.code(), Some(0));
    assert_eq!(bin(dir.path(), &[], &["--version"]).status.code(), Some(0));
    assert_eq!(bin(dir.path(), &[], &["frobnicate"]).status.code(), Some(2));
}
