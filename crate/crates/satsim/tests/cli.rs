//! End-to-end checks of the `satsim` binary: subcommand output, exit
//! codes, and export determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn satsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("satsim_cli_{tag}_{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const TINY_CONFIG: &str = r#"
seed = 11
[market]
consumers = 500
attention_per_consumer = 1.0
builders = 25
monetization = 1.0
entry_cost = 1.0
[outside]
weight = 5.0
[quality]
distribution = "normal"
mu = 0.0
sigma = 1.0
[dynamics]
alpha = 0.5
beta = 1.0
delta = 0.1
steps = 80
[metrics]
lorenz_points = 20
"#;

#[test]
fn dilution_prints_published_rows() {
    let out = satsim(&["dilution"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for row in [
        ("100", "50.0", "49.0"),
        ("500", "16.7", "15.7"),
        ("1000", "9.09", "8.09"),
        ("5000", "1.96", "0.96"),
        ("9900", "1.00", "0.00"),
        ("50000", "0.20", "-0.80"),
    ] {
        let line = stdout
            .lines()
            .find(|l| l.split_whitespace().next() == Some(row.0))
            .unwrap_or_else(|| panic!("no row for B = {}", row.0));
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(&cols[1..3], &[row.1, row.2], "row B = {}", row.0);
    }
    assert!(stdout.contains("B* = 9900"));
}

#[test]
fn dilution_accepts_custom_b_list() {
    let out = satsim(&["dilution", "--B-list", "10,200"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout
        .lines()
        .any(|l| l.split_whitespace().next() == Some("10")));
    assert!(stdout
        .lines()
        .any(|l| l.split_whitespace().next() == Some("200")));
}

#[test]
fn equilibrium_reports_entry_and_welfare() {
    let out = satsim(&[
        "equilibrium",
        "--p",
        "1",
        "--A",
        "10000",
        "--k",
        "1",
        "--z",
        "100",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("B* = 9900"));
    assert!(stdout.contains("attention per builder: 1"));
    assert!(stdout.contains("excess entry: true"));
}

#[test]
fn run_scenario_with_config_and_export() {
    let dir = tmp_dir("run");
    let config = dir.join("tiny.toml");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out_dir = dir.join("out");

    let out = satsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("gini:"));

    let metrics = fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("name,value\n"));
    let lorenz = fs::read_to_string(out_dir.join("lorenz.csv")).unwrap();
    assert_eq!(lorenz.lines().next().unwrap(), "cum_population,cum_share");
    assert_eq!(lorenz.lines().count(), 22);
    let state = fs::read_to_string(out_dir.join("final_state.csv")).unwrap();
    assert_eq!(
        state.lines().next().unwrap(),
        "builder_id,quality,attention"
    );
    assert_eq!(state.lines().count(), 26);

    // Re-running the identical config produces byte-identical exports.
    let out_dir2 = dir.join("out2");
    let out = satsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for name in ["metrics.csv", "lorenz.csv", "rank.csv", "final_state.csv"] {
        assert_eq!(
            fs::read(out_dir.join(name)).unwrap(),
            fs::read(out_dir2.join(name)).unwrap(),
            "{name} not reproducible"
        );
    }

    // A different seed changes the draw.
    let out_dir3 = dir.join("out3");
    let out = satsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        out_dir3.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_ne!(
        fs::read(out_dir.join("final_state.csv")).unwrap(),
        fs::read(out_dir3.join("final_state.csv")).unwrap()
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn run_json_format_writes_bundle() {
    let dir = tmp_dir("json");
    let config = dir.join("tiny.toml");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out_dir = dir.join("out");
    let out = satsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(bundle["config_echo"]["seed"], 11);
    assert!(out_dir.join("lorenz.csv").exists());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_writes_summary_contract() {
    let dir = tmp_dir("sweep");
    let config = dir.join("tiny.toml");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out_dir = dir.join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_satsim"))
        .env("SATSIM_THREADS", "1")
        .args([
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--axis",
            "dynamics.alpha",
            "--values",
            "0,0.5,1.0",
            "--replicates",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(out_dir.join("sweep_summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "axis_value,replicate,seed,gini,top_1pct,top_10pct,median_mean,share_below_100"
    );
    assert_eq!(summary.lines().count(), 7); // header + 3 values x 2 replicates
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn builtin_scenarios_resolve_by_name() {
    let out = satsim(&["run", "--scenario", "dilution"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("scenario: dilution"));
    assert!(stdout.contains("target checks:"));
    assert!(!stdout.contains("FAIL"), "dilution targets must all pass");
}

#[test]
fn fixed_point_subcommand() {
    let dir = tmp_dir("fp");
    let config = dir.join("tiny.toml");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out = satsim(&["fixed-point", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("fixed point at alpha = 0.5"));
    assert!(stdout.contains("gini:"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_follow_error_taxonomy() {
    // 2: validation (bad config content).
    let dir = tmp_dir("codes");
    let bad = dir.join("bad.toml");
    fs::write(&bad, TINY_CONFIG.replace("delta = 0.1", "delta = 0.0")).unwrap();
    let out = satsim(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // 2: unknown key.
    let unknown = dir.join("unknown.toml");
    fs::write(
        &unknown,
        TINY_CONFIG.replace("steps = 80", "steps = 80\nstepz = 3"),
    )
    .unwrap();
    let out = satsim(&["run", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // 2: unknown built-in name.
    let out = satsim(&["run", "--scenario", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));

    // 3: numerical regime error (fixed point above the alpha cap).
    let hot = dir.join("hot.toml");
    fs::write(&hot, TINY_CONFIG.replace("alpha = 0.5", "alpha = 0.99")).unwrap();
    let out = satsim(&["fixed-point", "--config", hot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // 4: missing file.
    let out = satsim(&["run", "--config", "/nonexistent/nope.toml"]);
    assert_eq!(out.status.code(), Some(4));

    fs::remove_dir_all(&dir).ok();
}
