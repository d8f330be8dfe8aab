use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use schoolnet::{EstimateSeries, Vec2, WeightMatrix, WindowEstimate};
use schoolnet_cli::emit::{parse_estimates, render_estimates};

fn schoolnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schoolnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    if !dir.exists() {
        return Vec::new();
    }
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn help_lists_every_config_field_with_a_default() {
    let out = schoolnet(&["estimate", "--help"]);
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for key in [
        "input",
        "output_dir",
        "emit",
        "flip_y",
        "seed",
        "network_threshold",
        "max_gap",
        "frame_rate",
        "length_unit",
        "stimulus",
        "estimator.lag_frames",
        "estimator.window_len",
        "estimator.lambda",
        "estimator.solver_tol",
        "estimator.max_iters",
        "estimator.velocity_scheme",
    ] {
        let line = help
            .lines()
            .find(|l| l.contains(&format!("`{key}`")))
            .unwrap_or_else(|| panic!("{key} missing from help"));
        assert!(line.contains("[default:"), "{key} has no default: {line}");
    }
}

#[test]
fn indices_schema_for_a_simulated_scene() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = schoolnet(&[
        "run",
        "--input",
        "simulate:stim-follow",
        "--emit",
        "indices",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(listing(&out_dir), ["indices.csv"]);
    let text = std::fs::read_to_string(out_dir.join("indices.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "window,s_att,s_stim,s_auto,I_1,I_2,I_3,I_4,I_5");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2068);
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
}

#[test]
fn thresholded_networks() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = schoolnet(&[
        "estimate",
        "--input",
        "simulate:leader",
        "--emit",
        "networks",
        "--threshold",
        "0.05",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("networks.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,i,j,w");
    let mut count = 0;
    for row in lines {
        let f: Vec<&str> = row.split(',').collect();
        let (i, j): (usize, usize) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert!(i != j && (1..=5).contains(&i) && (1..=5).contains(&j));
        assert!(f[3].parse::<f64>().unwrap() >= 0.05);
        count += 1;
    }
    assert!(count > 0);
}

#[test]
fn missing_input_fails_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = schoolnet(&[
        "estimate",
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nope.csv"));
    assert!(listing(&out_dir).is_empty());
}

#[test]
fn ingest_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("frame,id,x\n0,1,0\n", 10),
        ("frame,id,x,y\n0,1,0,0\n0,3,0,0\n", 11),
        ("frame,id,x,y\n0,1,0,0\n0,2,0,0\n9,1,0,0\n9,2,0,0\n", 12),
    ];
    for (k, (text, code)) in cases.into_iter().enumerate() {
        let path = dir.path().join(format!("t{k}.csv"));
        std::fs::write(&path, text).unwrap();
        let out = schoolnet(&["validate", "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{}", stderr(&out));
        assert!(stderr(&out).starts_with("error: ingest:"));
    }
}

#[test]
fn simulate_then_estimate_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    let out = schoolnet(&[
        "simulate",
        "--scenario",
        "free-school",
        "--frames",
        "120",
        "--output-dir",
        scene.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(listing(&scene), ["scenario.json", "trajectories.csv", "truth.jsonl"]);
    let csv = scene.join("trajectories.csv");
    let out = schoolnet(&["validate", "--input", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok: 5 individuals, 120 frames, 88 windows");

    let config = dir.path().join("run.json");
    let body = serde_json::json!({
        "input": csv,
        "estimator": {"window_len": 30, "lag_frames": 3},
        "stimulus": {"variant": "rotating", "center": [20, 20],
                     "angular_speed_deg_per_frame": 0.286, "sense": "clockwise"},
        "output_dir": dir.path().join("ignored"),
        "emit": ["estimates"]
    });
    std::fs::write(&config, body.to_string()).unwrap();
    let fitted = dir.path().join("fit");
    let out = schoolnet(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        fitted.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!dir.path().join("ignored").exists());
    let estimates = fitted.join("estimates.jsonl");
    assert_eq!(std::fs::read_to_string(&estimates).unwrap().lines().count(), 88);

    let derived = dir.path().join("derived");
    let out = schoolnet(&[
        "indices",
        "--estimates",
        estimates.to_str().unwrap(),
        "--output-dir",
        derived.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(listing(&derived), ["entropy.json", "indices.csv", "networks.csv"]);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"input": "simulate:leader", "emit": []}"#).unwrap();
    let out = schoolnet(&["validate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("emit"));
    let out = schoolnet(&["validate", "--input", "simulate:nothing"]);
    assert_eq!(out.status.code(), Some(2));
}

fn series() -> impl Strategy<Value = EstimateSeries> {
    (2usize..=6, 1usize..=5)
        .prop_flat_map(|(n, len)| {
            prop::collection::vec(
                (
                    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], n * n),
                    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], n),
                    prop::collection::vec(0.0f64..std::f64::consts::TAU, n),
                ),
                len,
            )
        })
        .prop_map(|windows| {
            let list = windows
                .into_iter()
                .enumerate()
                .map(|(k, (data, stim, angles))| {
                    let n = stim.len();
                    let weights = WeightMatrix::from_row_major(n, data).unwrap();
                    let preferred_dirs = (0..n)
                        .map(|i| {
                            if weights.get(i, i) > 0.0 {
                                Vec2::new(angles[i].cos(), angles[i].sin())
                            } else {
                                Vec2::ZERO
                            }
                        })
                        .collect();
                    WindowEstimate {
                        window_index: k,
                        weights,
                        stim_weights: stim,
                        preferred_dirs,
                    }
                })
                .collect();
            EstimateSeries::new(list)
        })
}

proptest! {
    // Nine significant digits bound the round-trip error by 5e-9 relative.
    #[test]
    fn estimates_round_trip(series in series()) {
        let text = render_estimates(&series);
        let back = parse_estimates(&text, Path::new("e.jsonl")).unwrap();
        prop_assert_eq!(back.len(), series.len());
        let close = |a: f64, b: f64| (a - b).abs() <= 5e-9 * a.abs().max(b.abs());
        for (a, b) in series.iter().zip(&back) {
            prop_assert_eq!(a.window_index, b.window_index);
            for (x, y) in a.weights.as_row_major().iter().zip(b.weights.as_row_major()) {
                prop_assert!(close(*x, *y), "{} vs {}", x, y);
            }
            for (x, y) in a.stim_weights.iter().zip(&b.stim_weights) {
                prop_assert!(close(*x, *y));
            }
            for (x, y) in a.preferred_dirs.iter().zip(&b.preferred_dirs) {
                prop_assert!((*x - *y).norm() <= 1e-8);
            }
        }
        // A second pass is byte-stable.
        prop_assert_eq!(render_estimates(&back), text);
    }
}
