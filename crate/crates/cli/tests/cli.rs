// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end checks of the command-line interface: exit codes, file
//! outputs, manifest contents, config-file precedence, and
//! reproducibility of every command.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zenoprobe"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed with {:?}: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("missing output {name}: {e}"))
}

fn read_json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap_or_else(|e| panic!("bad JSON in {name}: {e}"))
}

/// Parses a CSV with a header row into named f64 columns.
fn csv_columns(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for line in lines {
        for (i, tok) in line.split(',').enumerate() {
            if let Ok(v) = tok.parse::<f64>() {
                cols[i].push(v);
            }
        }
    }
    (header, cols)
}

#[test]
fn trajectory_writes_one_dataset_per_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&["trajectory", "--n", "8", "--out", out.to_str().unwrap()]);
    // default interval list has four panels
    for i in 0..4 {
        let traj = read(out, &format!("trajectory_{i}.csv"));
        assert!(traj.starts_with("time,p_g,p_e\n"), "header: {}", &traj[..30]);
        assert!(traj.lines().count() > 8, "population curve has samples");
        let rec = read(out, &format!("record_{i}.csv"));
        assert!(rec.starts_with("index,time,outcome\n"));
        assert_eq!(rec.lines().count(), 1 + 1 + 8, "prepared state + 8 outcomes");
        let json = read_json(out, &format!("record_{i}.json"));
        assert_eq!(json["outcomes"].as_array().unwrap().len(), 8);
    }
    let manifest = read_json(out, "manifest.json");
    assert_eq!(manifest["artifact"], "zenoprobe");
    assert_eq!(manifest["command"], "trajectory");
    assert_eq!(manifest["config"]["n"], 8);
    assert_eq!(manifest["config"]["omega"], 1.0);
    assert!(manifest["command_line"].as_array().unwrap().len() >= 4);
    assert!(manifest["version"].as_str().unwrap().contains('.'));
}

#[test]
fn trajectory_with_zero_measurements_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["trajectory", "--n", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n"));
}

#[test]
fn unknown_flag_is_a_config_error() {
    let out = run(&["trajectory", "--frequency", "2.0"]);
    assert_eq!(out.status.code(), Some(2), "clap usage errors exit 2");
}

#[test]
fn fixed_seed_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "trajectory".to_string(),
            "--tau".into(),
            "0.8,2.0".into(),
            "--n".into(),
            "25".into(),
            "--seed".into(),
            "42".into(),
            "--gamma".into(),
            "0.2".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    run_ok(&args(a.path()).iter().map(String::as_str).collect::<Vec<_>>());
    run_ok(&args(b.path()).iter().map(String::as_str).collect::<Vec<_>>());
    for i in 0..2 {
        for name in [
            format!("trajectory_{i}.csv"),
            format!("record_{i}.csv"),
            format!("record_{i}.json"),
        ] {
            assert_eq!(read(a.path(), &name), read(b.path(), &name), "{name} differs");
        }
    }
    // manifests agree on everything except the verbatim command line
    let ma = read_json(a.path(), "manifest.json");
    let mb = read_json(b.path(), "manifest.json");
    assert_eq!(ma["config"], mb["config"]);
    assert_eq!(ma["seed"], mb["seed"]);
}

#[test]
fn resonant_scan_information_rate_is_linear_in_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "fisher", "--mode", "scan", "--tau-min", "0.2", "--tau-max", "3.0", "--points", "150",
        "--out", out.to_str().unwrap(),
    ]);
    let (header, cols) = csv_columns(&read(out, "fisher_scan.csv"));
    assert_eq!(
        header,
        ["tau", "fisher_per_measurement", "fisher_per_time"]
    );
    // without damping or detuning, F per time equals the interval itself
    for (tau, rate) in cols[0].iter().zip(&cols[2]) {
        assert!(
            (rate - tau).abs() <= 1e-12 * tau.max(1.0),
            "rate {rate} vs tau {tau}"
        );
    }
    // the refined-optimum row sits at the range end for this linear law
    assert_eq!(*cols[0].last().unwrap(), 3.0);
}

#[test]
fn dephasing_map_ridge_matches_the_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "fisher", "--mode", "map", "--tau-min", "0.1", "--tau-max", "14.0", "--points", "400",
        "--gamma-min", "0.1", "--gamma-max", "0.5", "--gamma-points", "3",
        "--out", out.to_str().unwrap(),
    ]);
    let (mh, mc) = csv_columns(&read(out, "fisher_map.csv"));
    assert_eq!(mh, ["gamma", "tau", "fisher_per_measurement", "fisher_per_time"]);
    assert_eq!(mc[0].len(), 3 * 400, "map rows = gamma points x tau points");
    let (rh, rc) = csv_columns(&read(out, "fisher_ridge.csv"));
    assert_eq!(rh, ["gamma", "tau_star", "fisher_per_time_star"]);
    assert_eq!(rc[0][0], 0.1);
    assert!(
        (rc[1][0] - 4.83).abs() <= 0.05,
        "ridge optimum at gamma=0.1: {}",
        rc[1][0]
    );
}

#[test]
fn growth_staircase_favors_the_longer_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "fisher", "--mode", "growth", "--tau", "0.3,3.0", "--total-time", "60",
        "--points", "200", "--out", out.to_str().unwrap(),
    ]);
    let (header, cols) = csv_columns(&read(out, "fisher_growth.csv"));
    assert_eq!(header.len(), 3);
    assert!(header[1].starts_with("f_tau_") && header[2].starts_with("f_tau_"));
    // accumulated information at the end of the budget: floor(T/tau)*tau^2
    let last = cols[0].len() - 1;
    let expect_short = (60.0f64 / 0.3).floor() * 0.09;
    let expect_long = (60.0f64 / 3.0).floor() * 9.0;
    assert!((cols[1][last] - expect_short).abs() < 1e-9);
    assert!((cols[2][last] - expect_long).abs() < 1e-9);
    assert!(cols[2][last] > cols[1][last], "longer interval dominates");
    // staircase: values never decrease along the time grid
    for c in [&cols[1], &cols[2]] {
        for w in c.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }
}

#[test]
fn growth_without_a_time_budget_is_a_config_error() {
    let out = run(&["fisher", "--mode", "growth", "--tau", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("total_time"));
}

#[test]
fn three_candidate_demo_writes_one_posterior_column_per_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "bayes", "--candidates", "0.5,1.0,1.5", "--schedule", "1.0:40", "--seed", "7",
        "--out", out.to_str().unwrap(),
    ]);
    let (header, cols) = csv_columns(&read(out, "posterior.csv"));
    assert_eq!(header.len(), 4, "step column + three candidates");
    assert_eq!(cols[0].len(), 41, "prior row + one row per measurement");
    // every row is a normalized distribution
    for (r, ((a, b), c)) in cols[1].iter().zip(&cols[2]).zip(&cols[3]).enumerate() {
        let total = a + b + c;
        assert!((total - 1.0).abs() < 1e-9, "row {r} total {total}");
    }
    let stats = read_json(out, "stats.json");
    assert_eq!(stats["map"], 1.0, "truth recovered");
    assert_eq!(stats["n_measurements"], 40);
}

#[test]
fn single_interval_schedule_leaves_aliased_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "bayes", "--gamma", "0.1", "--schedule", "4.8322749774900107:4000", "--seed", "11",
        "--grid-min", "0", "--grid-max", "2.5", "--grid-points", "501",
        "--out", out.to_str().unwrap(),
    ]);
    let stats = read_json(out, "stats.json");
    let peaks = stats["peak_candidates"].as_array().unwrap();
    assert!(
        peaks.len() >= 2,
        "one interval duration cannot separate aliased candidates, got {peaks:?}"
    );
}

#[test]
fn hybrid_planning_writes_the_plan_and_runs_the_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "bayes", "--hybrid", "--total-time", "100", "--gamma", "0.1", "--guess", "1.0",
        "--omega-max", "2.5", "--seed", "4", "--out", out.to_str().unwrap(),
    ]);
    let plan = read_json(out, "plan.json");
    assert_eq!(plan["plan"]["q"], 12);
    assert_eq!(plan["plan"]["n_total"], 28);
    let tau_s = plan["plan"]["tau_s"].as_f64().unwrap();
    assert!((tau_s - 1.7887678886640226).abs() < 1e-12);
    assert!(plan["planned_total_time"].as_f64().unwrap() <= 100.0);
    let stats = read_json(out, "stats.json");
    assert_eq!(stats["n_measurements"], 28);
    assert_eq!(stats["plan"]["q"], 12);
    // posterior matrix covers prior + every measurement
    let (_, cols) = csv_columns(&read(out, "posterior.csv"));
    assert_eq!(cols[0].len(), 29);
}

#[test]
fn loaded_record_reproduces_the_simulated_run() {
    let sim = tempfile::tempdir().unwrap();
    run_ok(&[
        "bayes", "--candidates", "0.5,1.0,1.5", "--schedule", "1.0:30", "--seed", "3",
        "--out", sim.path().to_str().unwrap(),
    ]);
    let replay = tempfile::tempdir().unwrap();
    let record_path = sim.path().join("record.json");
    run_ok(&[
        "bayes", "--candidates", "0.5,1.0,1.5", "--record", record_path.to_str().unwrap(),
        "--out", replay.path().to_str().unwrap(),
    ]);
    assert_eq!(
        read(sim.path(), "posterior.csv"),
        read(replay.path(), "posterior.csv"),
        "replaying the saved record gives the identical posterior trajectory"
    );
    assert_eq!(read(sim.path(), "stats.json"), read(replay.path(), "stats.json"));
}

#[test]
fn record_with_schedule_flags_is_a_config_error() {
    let out = run(&[
        "bayes", "--record", "/nonexistent.json", "--schedule", "1.0:5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("its own schedule"));
}

#[test]
fn impossible_record_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    // a full 2*pi rotation makes the kernel the identity: any flip in
    // the record is impossible under the single candidate
    let tau = 2.0 * std::f64::consts::PI;
    let record = serde_json::json!({
        "labels": ["g", "e"],
        "initial": "g",
        "seed": 0,
        "schedule": [{"tau": tau, "count": 3}],
        "outcomes": [0, 1, 0],
        "pair_counts": [[[1, 1], [1, 0]]],
    });
    let path = dir.path().join("record.json");
    std::fs::write(&path, serde_json::to_string(&record).unwrap()).unwrap();
    let out = run(&[
        "bayes", "--record", path.to_str().unwrap(), "--candidates", "1.0",
        "--out", dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("impossible"));
}

#[test]
fn zeno_reports_expansion_coefficients_and_decay_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&["zeno", "--tau", "0.05,0.1", "--out", out.to_str().unwrap()]);
    let z = read_json(out, "zeno.json");
    assert_eq!(z["a"].as_f64().unwrap(), 0.0);
    assert!((z["b"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    let rates = z["rates"].as_array().unwrap();
    assert_eq!(rates.len(), 2);
    assert!((rates[0]["zeno_rate"].as_f64().unwrap() - 0.05 * 0.25).abs() < 1e-15);
    assert!(z["empirical"].is_null());
}

#[test]
fn zeno_excited_state_decay_rate_appears_in_the_linear_term() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "zeno", "--rho0", "e", "--omega", "0", "--gamma-spont", "0.7",
        "--out", out.to_str().unwrap(),
    ]);
    let z = read_json(out, "zeno.json");
    assert!((z["a"].as_f64().unwrap().abs() - 0.7).abs() < 1e-12);
}

#[test]
fn zeno_empirical_flip_rate_tracks_the_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_ok(&[
        "zeno", "--empirical", "--empirical-tau", "0.05", "--n", "100000", "--seed", "0",
        "--out", out.to_str().unwrap(),
    ]);
    let z = read_json(out, "zeno.json");
    let emp = &z["empirical"];
    let measured = emp["flip_fraction"].as_f64().unwrap();
    let predicted = emp["predicted_flip_probability"].as_f64().unwrap();
    assert!((predicted - 6.25e-4).abs() < 1e-9);
    assert!(
        (measured - predicted).abs() / predicted < 0.10,
        "measured {measured} vs predicted {predicted}"
    );
    assert!(emp["statistical_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "omega = 2.0\ntau = 1.5\nn = 5\nseed = 9\n# comment\n",
    )
    .unwrap();
    let out_a = dir.path().join("a");
    run_ok(&[
        "trajectory", "--config", cfg_path.to_str().unwrap(),
        "--out", out_a.to_str().unwrap(),
    ]);
    let ma = read_json(&out_a, "manifest.json");
    assert_eq!(ma["config"]["omega"], 2.0);
    assert_eq!(ma["config"]["taus"], serde_json::json!([1.5]));
    assert_eq!(ma["config"]["n"], 5);
    assert_eq!(ma["config"]["seed"], 9);

    let out_b = dir.path().join("b");
    run_ok(&[
        "trajectory", "--config", cfg_path.to_str().unwrap(), "--omega", "3.0",
        "--out", out_b.to_str().unwrap(),
    ]);
    let mb = read_json(&out_b, "manifest.json");
    assert_eq!(mb["config"]["omega"], 3.0, "flag overrides file");
    assert_eq!(mb["config"]["n"], 5, "file value still used where no flag");
}

#[test]
fn unknown_config_key_is_rejected_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "omeag = 2.0\n").unwrap();
    let out = run(&["trajectory", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omeag"));
}

#[test]
fn environment_variable_sets_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["zeno", "--tau", "0.1"])
        .env("ZENOPROBE_OUT", dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("zeno.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn negative_rates_are_config_errors() {
    let out = run(&["zeno", "--gamma", "-0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["trajectory", "--gamma-spont", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}
