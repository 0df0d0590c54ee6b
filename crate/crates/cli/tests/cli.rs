//! End-to-end CLI behavior: exit codes, report structure, sweep output, and
//! the self-describing-config contract.

use std::path::Path;
use std::process::{Command, Output};

use agency_core::losses::{BeliefModel, Distribution};
use agency_core::mdp::{make_gridworld, make_random_reward};
use agency_core::measure::FunctionCube;

fn agency(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agency"))
        .args(args)
        .output()
        .expect("spawn agency")
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON report")
}

fn stderr_error(output: &Output, code: i32, class: &str) {
    assert_eq!(output.status.code(), Some(code), "wrong exit code");
    let err: serde_json::Value =
        serde_json::from_slice(&output.stderr).expect("stderr carries a JSON error object");
    assert_eq!(err["error"]["class"], class);
    assert_eq!(err["error"]["exit_code"], code);
}

#[test]
fn exit_codes_partition_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let missing = agency(&["empowerment", "--set", "input.mdp=/nonexistent.json"]);
    stderr_error(&missing, 3, "file_not_found");

    let garbled_path = dir.join("garbled.json");
    std::fs::write(&garbled_path, "{\"num_states\": ").unwrap();
    let parse = agency(&[
        "empowerment",
        "--set",
        &format!("input.mdp={}", garbled_path.display()),
    ]);
    stderr_error(&parse, 4, "parse");

    let unknown_key = agency(&["measure", "--set", "bogus.key=1"]);
    stderr_error(&unknown_key, 5, "validation");

    let p = write_json(dir, "p.json", &Distribution::new(vec![0.5, 0.5]).unwrap());
    let q = write_json(dir, "q.json", &Distribution::new(vec![1.0, 0.0]).unwrap());
    let singular = agency(&[
        "curiosity",
        "--set",
        &format!("input.p={p}"),
        "--set",
        &format!("input.q={q}"),
        "--set",
        "curiosity.smoothing=0",
    ]);
    stderr_error(&singular, 7, "singularity");

    let mdp = write_json(dir, "mdp.json", &make_gridworld(2, 2, 0.0).unwrap());
    let capped = agency(&[
        "empowerment",
        "--set",
        &format!("input.mdp={mdp}"),
        "--set",
        "empowerment.horizon=20",
    ]);
    stderr_error(&capped, 9, "resource");

    let shallow = agency(&["convergence", "--set", "convergence.depth_l=2"]);
    stderr_error(&shallow, 10, "domain");
}

#[test]
fn commands_never_mutate_their_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let mdp = make_gridworld(2, 2, 0.1).unwrap();
    let mdp_path = write_json(dir, "mdp.json", &mdp);
    let before = std::fs::read(&mdp_path).unwrap();
    let output = agency(&[
        "empowerment",
        "--set",
        &format!("input.mdp={mdp_path}"),
        "--no-timestamp",
    ]);
    assert!(output.status.success());
    assert_eq!(before, std::fs::read(&mdp_path).unwrap());
}

#[test]
fn config_and_subcommand_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(&config, r#"{"command": "rates"}"#).unwrap();
    let mismatch = agency(&["convergence", "--config", &config.display().to_string()]);
    stderr_error(&mismatch, 5, "validation");

    // `run` without a command in the config is also a validation error.
    std::fs::write(&config, r#"{"seed": 1}"#).unwrap();
    let no_command = agency(&["run", "--config", &config.display().to_string()]);
    stderr_error(&no_command, 5, "validation");
}

#[test]
fn format_and_sweep_flags_are_checked() {
    let csv_without_sweep = agency(&["rates", "--format", "csv"]);
    stderr_error(&csv_without_sweep, 5, "validation");

    let json_sweep = agency(&[
        "rates",
        "--sweep",
        "rates.sparsity_s",
        "--sweep-values",
        "1,2",
        "--format",
        "json",
    ]);
    stderr_error(&json_sweep, 5, "validation");

    let unknown_param = agency(&[
        "rates",
        "--sweep",
        "rates.nonsense",
        "--sweep-values",
        "1,2",
    ]);
    stderr_error(&unknown_param, 5, "validation");
}

#[test]
fn identical_reward_files_are_at_distance_zero() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let mdp = make_gridworld(2, 2, 0.1).unwrap();
    let reward = make_random_reward(5, &mdp, -1.0, 1.0).unwrap();
    let mdp_path = write_json(dir, "mdp.json", &mdp);
    let reward_path = write_json(dir, "r.json", &reward);
    let output = agency(&[
        "starc-distance",
        "--set",
        &format!("input.mdp={mdp_path}"),
        "--set",
        &format!("input.reward_f={reward_path}"),
        "--set",
        &format!("input.reward_a={reward_path}"),
        "--no-timestamp",
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["results"]["distance"], 0.0);
    assert_eq!(report["results"]["canonical_policy"], "uniform");
}

#[test]
fn convergence_report_reproduces_the_headline() {
    // Through the log10 default.
    let report = stdout_json(&agency(&["convergence", "--no-timestamp"]));
    assert_eq!(report["results"]["log10_epsilon"], -360.0);
    // And through the linear parameter-count path.
    let report = stdout_json(&agency(&[
        "convergence",
        "--set",
        "convergence.params_n=1e10",
        "--no-timestamp",
    ]));
    assert_eq!(report["results"]["log10_epsilon"], -360.0);
    assert_eq!(report["results"]["nc_log"], 360.0);
}

#[test]
fn reports_embed_a_rerunnable_config() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let cube = FunctionCube::new(vec![0.3, 0.5], 1.0, 0.2).unwrap();
    let cube_path = write_json(dir, "cube.json", &cube);
    let first = stdout_json(&agency(&[
        "measure",
        "--set",
        &format!("input.cube={cube_path}"),
        "--set",
        "mc.samples=20000",
        "--seed",
        "11",
        "--no-timestamp",
    ]));

    let rerun_config = dir.join("rerun.json");
    std::fs::write(
        &rerun_config,
        serde_json::to_string(&first["config"]).unwrap(),
    )
    .unwrap();
    let second = stdout_json(&agency(&[
        "run",
        "--config",
        &rerun_config.display().to_string(),
        "--no-timestamp",
    ]));
    assert_eq!(first, second, "embedded config must reproduce bit-exactly");
}

#[test]
fn measure_file_overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let cube_path = write_json(
        dir,
        "cube.json",
        &FunctionCube::new(vec![0.5, 0.5], 1.0, 0.1).unwrap(),
    );
    // Epsilon may be re-dialed against a file cube.
    let ok = agency(&[
        "measure",
        "--set",
        &format!("input.cube={cube_path}"),
        "--set",
        "measure.epsilon=0.25",
        "--no-timestamp",
    ]);
    let report = stdout_json(&ok);
    assert_eq!(report["results"]["cube"]["epsilon"], 0.25);
    // But n must agree with the file.
    let clash = agency(&[
        "measure",
        "--set",
        &format!("input.cube={cube_path}"),
        "--set",
        "measure.n=5",
    ]);
    stderr_error(&clash, 5, "validation");
}

// ---------------------------------------------------------------------------
// Sweep output
// ---------------------------------------------------------------------------

fn csv_column(csv: &str, column: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == column)
        .unwrap_or_else(|| panic!("column {column} missing from {header:?}"));
    lines
        .map(|line| line.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn measure_epsilon_sweep_is_strictly_decreasing() {
    let output = agency(&[
        "measure",
        "--sweep",
        "measure.epsilon",
        "--sweep-values",
        "0.1,0.01,0.001",
    ]);
    assert!(output.status.success());
    let csv = String::from_utf8(output.stdout).unwrap();
    let probs = csv_column(&csv, "log10_probability");
    assert_eq!(probs.len(), 3);
    assert!(probs[0] > probs[1] && probs[1] > probs[2], "{probs:?}");
}

#[test]
fn measure_dimension_sweep_is_linear_with_the_predicted_slope() {
    let epsilon = 0.05f64;
    let bound_m = 1.0f64;
    let values: Vec<String> = (1..=10).map(|n| n.to_string()).collect();
    let output = agency(&[
        "measure",
        "--set",
        &format!("measure.epsilon={epsilon}"),
        "--set",
        &format!("measure.bound_m={bound_m}"),
        "--sweep",
        "measure.n",
        "--sweep-values",
        &values.join(","),
    ]);
    assert!(output.status.success());
    let csv = String::from_utf8(output.stdout).unwrap();
    let probs = csv_column(&csv, "log10_probability");

    // Least-squares fit of log10 P against n.
    let n = probs.len() as f64;
    let xs: Vec<f64> = (1..=probs.len()).map(|i| i as f64).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = probs.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&probs).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let syy: f64 = probs.iter().map(|y| (y - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = sxy * sxy / (sxx * syy);

    let predicted = (2.0 * epsilon / bound_m).log10();
    assert!(
        (slope - predicted).abs() <= 1e-9,
        "slope {slope} vs predicted {predicted}"
    );
    assert!(r_squared >= 1.0 - 1e-12, "R^2 = {r_squared}");
}

#[test]
fn empowerment_horizon_sweep_is_non_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let mdp_path = write_json(dir.path(), "mdp.json", &make_gridworld(3, 3, 0.0).unwrap());
    let output = agency(&[
        "empowerment",
        "--set",
        &format!("input.mdp={mdp_path}"),
        "--set",
        "empowerment.state=4",
        "--sweep",
        "empowerment.horizon",
        "--sweep-values",
        "1,2,3",
    ]);
    assert!(output.status.success());
    let csv = String::from_utf8(output.stdout).unwrap();
    let caps = csv_column(&csv, "capacity_bits");
    assert_eq!(caps.len(), 3);
    assert!(caps[0] <= caps[1] + 1e-9 && caps[1] <= caps[2] + 1e-9, "{caps:?}");
    assert!((caps[0] - 2.0).abs() <= 1e-6, "center horizon 1 is 2 bits");
}

#[test]
fn agency_reward_report_carries_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let mdp = make_gridworld(2, 2, 0.0).unwrap();
    let mdp_path = write_json(dir, "mdp.json", &mdp);
    let belief_path = write_json(dir, "belief.json", &BeliefModel::from_mdp(&mdp));
    let report = stdout_json(&agency(&[
        "agency-reward",
        "--set",
        &format!("input.mdp={mdp_path}"),
        "--set",
        &format!("input.belief={belief_path}"),
        "--set",
        "weights.alpha=0",
        "--set",
        "weights.beta=1",
        "--no-timestamp",
    ]));
    let values = &report["results"]["reward"]["values"];
    assert!(values.is_array());
    // Beta-only reward on the 2x2 grid: ln 3 everywhere (three reachable
    // cells from every corner).
    let v000 = values[0][0][0].as_f64().unwrap();
    assert!((v000 - 3.0f64.ln()).abs() <= 1e-6);
}
