use std::fs;
use std::path::Path;
use std::process::Command;

use kgdefect::evolution::snapshot::read_snapshot;
use kgdefect_cli::config::{
    apply_override, config_from_table, parse_config, parse_table, split_assignment,
};
use kgdefect_cli::experiment::run_experiment;
use kgdefect_cli::sweep::sweep;
use kgdefect_cli::{run_preset, CliError, Preset};
use tempfile::tempdir;

const MINIMAL: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.5, 0.25]
[grid]
L = 100.0
num_points = 10001
[time]
T = 200.0
[initial]
type = "gaussian"
"#;

const SMALL: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.5, 0.25]
[grid]
L = 20.0
num_points = 2001
[time]
T = 5.0
[initial]
type = "gaussian"
amplitude = 1.0
[sponge]
width = 4.0
[record]
R = 3.0
"#;

fn config_key(e: CliError) -> String {
    match e {
        CliError::Config { key, .. } => key,
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn minimal_config_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.sim.grid.dx(), 0.02);
    assert!((cfg.sim.dt - 0.018).abs() < 1e-15);
    assert_eq!(cfg.sim.grid.len(), 10001);
}

#[test]
fn unbounded_coupling_is_rejected() {
    let text = MINIMAL.replace("[0.0, -0.5, 0.25]", "[0.0, -1.5]");
    let err = parse_config(&text).unwrap_err();
    let shown = err.to_string();
    assert!(shown.contains("well-posedness"), "{shown}");
    assert_eq!(config_key(err), "model.coeffs");
}

#[test]
fn even_grid_is_rejected() {
    let text = MINIMAL.replace("10001", "10000");
    let err = parse_config(&text).unwrap_err();
    assert!(err.to_string().contains("odd"));
    assert_eq!(config_key(err), "grid.num_points");
}

#[test]
fn unknown_and_missing_keys_name_the_path() {
    let text = MINIMAL.replace("T = 200.0", "T = 200.0\ntypo = 1");
    assert_eq!(config_key(parse_config(&text).unwrap_err()), "time.typo");

    let text = MINIMAL.replace("L = 100.0", "");
    assert_eq!(config_key(parse_config(&text).unwrap_err()), "grid.L");
}

#[test]
fn overrides_edit_the_document() {
    let mut table = parse_table(MINIMAL).unwrap();
    let (k, v) = split_assignment("time.dt=0.01").unwrap();
    apply_override(&mut table, &k, &v).unwrap();
    apply_override(&mut table, "initial.amplitude", "[1.0, 0.5]").unwrap();
    let cfg = config_from_table(&table).unwrap();
    assert_eq!(cfg.sim.dt, 0.01);

    assert!(split_assignment("time.dt").is_err());
    apply_override(&mut table, "time.nope", "1").unwrap();
    assert_eq!(
        config_key(config_from_table(&table).unwrap_err()),
        "time.nope"
    );
}

#[test]
fn presets_parse_and_resolve() {
    for p in kgdefect_cli::presets::ALL {
        assert_eq!(Preset::from_name(p.name()).unwrap(), p);
        p.config(&[]).unwrap();
    }
    assert!(Preset::from_name("nope").is_err());
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn preset_outputs_are_reproducible() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let overrides = vec![("time.T".to_string(), "60.0".to_string())];
    let ra = run_preset(Preset::Attraction, &overrides, a.path()).unwrap();
    run_preset(Preset::Attraction, &overrides, b.path()).unwrap();
    assert!(ra.main.is_complete());
    for f in &ra.main.files {
        assert_eq!(
            read(a.path(), &f.name),
            read(b.path(), &f.name),
            "{} differs",
            f.name
        );
    }
    let summary: toml::Table = fs::read_to_string(a.path().join("summary.toml"))
        .unwrap()
        .parse()
        .unwrap();
    let metrics = summary["metrics"].as_table().unwrap();
    assert!(metrics.contains_key("dist_ratio"));
    assert!(metrics.contains_key("band_mass_late"));
}

#[test]
fn convergence_preset_writes_order() {
    let dir = tempdir().unwrap();
    let run = run_preset(Preset::ConvergenceOrder, &[], dir.path()).unwrap();
    let ratio = run.convergence_ratio().unwrap();
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    assert!(dir.path().join("order.toml").exists());
    assert!(dir.path().join("refined/trace.csv").exists());
}

#[test]
fn sweep_orders_rows_and_isolates_failures() {
    let base = parse_table(SMALL).unwrap();
    let values: Vec<String> = ["2", "0.5", "1e7", "1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let rows = sweep(&base, "initial.amplitude", &values, 3, a.path()).unwrap();
    let order: Vec<&str> = rows.iter().map(|r| r.value.as_str()).collect();
    assert_eq!(order, ["0.5", "1", "2", "1e7"]);
    for r in &rows[..3] {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.metrics.dist_final.is_some());
    }
    assert!(rows[3].error.is_some());

    sweep(&base, "initial.amplitude", &values, 1, b.path()).unwrap();
    assert_eq!(read(a.path(), "sweep.csv"), read(b.path(), "sweep.csv"));

    assert!(sweep(&base, "initial.bogus", &values, 1, a.path()).is_err());
}

#[test]
fn snapshot_restarts_a_run() {
    let dir = tempdir().unwrap();
    let first = dir.path().join("first");
    let cfg = parse_config(SMALL).unwrap();
    run_experiment("first", &cfg, &first).unwrap();
    let snap = first.join("final.kgd");
    let (_, state) = read_snapshot::<f64, _>(fs::File::open(&snap).unwrap()).unwrap();
    let origin = cfg.sim.grid.origin();
    let text = SMALL.replace(
        "type = \"gaussian\"\namplitude = 1.0",
        &format!("type = \"snapshot\"\npath = {:?}", snap.to_str().unwrap()),
    );
    let cfg = parse_config(&text).unwrap();
    run_experiment("second", &cfg, &dir.path().join("second")).unwrap();
    let trace = fs::read_to_string(dir.path().join("second/trace.csv")).unwrap();
    let first_row: Vec<f64> = trace
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .take(4)
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(first_row[0], 0.0);
    assert_eq!(
        [first_row[1], first_row[2]],
        [state.psi[origin].re, state.psi[origin].im]
    );

    let mismatch = text.replace("num_points = 2001", "num_points = 1001");
    assert!(parse_config(&mismatch).is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kgdefect"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, SMALL).unwrap();
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(dir.path().join("g"))
        .output();
    assert_eq!(status.unwrap().status.code(), Some(0));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, SMALL.replace("2001", "2000")).unwrap();
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.num_points"));

    let blow = dir.path().join("blow.toml");
    fs::write(&blow, SMALL.replace("amplitude = 1.0", "amplitude = 1e7")).unwrap();
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&blow)
        .arg("--out")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("x/manifest.toml").exists());

    let status = bin()
        .args(["simulate", "--config"])
        .arg(dir.path().join("missing.toml"))
        .arg("--out")
        .arg(dir.path())
        .output();
    assert_eq!(status.unwrap().status.code(), Some(1));
}

#[test]
fn solitary_subcommand_lists_branches() {
    let out = bin()
        .args([
            "solitary",
            "--coeffs",
            "0,-0.5,0.25",
            "--omega-samples",
            "64",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "branch,omega,kappa,c,energy");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    for r in &rows {
        assert!((r[1] * r[1] + r[2] * r[2] - 1.0).abs() < 1e-12);
        assert!(r[3] >= 0.0);
    }
    // The quartic coupling has nonzero waves exactly for |omega| > sqrt(3)/2.
    let mut nonzero = rows.iter().filter(|r| r[3] > 0.0);
    assert!(nonzero.clone().count() > 0);
    assert!(nonzero.all(|r| r[1].abs() > 0.75f64.sqrt()));
}

#[test]
fn analyze_subcommand_reads_a_trace() {
    let dir = tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(&cfg_path, SMALL.replace("T = 5.0", "T = 60.0")).unwrap();
    let run_dir = dir.path().join("run");
    assert!(bin()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&run_dir)
        .output()
        .unwrap()
        .status
        .success());
    let out = bin()
        .args(["analyze", "--trace"])
        .arg(run_dir.join("trace.csv"))
        .args(["--window", "10,60"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in ["spectrum.csv", "split.csv", "concentration.csv"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
}
