use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_asympheat"));
    cmd.env_remove("ASYMPHEAT_OUT");
    cmd
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn trivial_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "trivial"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"S(0) v = v"));
    assert!(names.contains(&"S(t) 0 = 0"));
    assert!(dir.path().join("config_echo.json").exists());
}

#[test]
fn oracle_suite_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "oracle"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let oracle: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("oracle_report.json")).unwrap()).unwrap();
    let entries = oracle.as_array().unwrap();
    assert_eq!(entries.len(), 5);
    assert!(entries.iter().all(|e| e["passed"] == true));
}

#[test]
fn negative_order_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"chart": {"N": -1}}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["evolve", "--config", cfg.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chart.N"));
    assert!(!out_dir.join("report.json").exists());
}

#[test]
fn semantic_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("evolve", r#"{"chart": {"n": 3, "N": 2}}"#, "chart.N"),
        ("evolve", r#"{"grid": {"d": 4}}"#, "grid.d"),
        ("evolve", r#"{"evolve": {"times": [0.0, 2.0, 1.0]}}"#, "evolve.times[2]"),
        ("equilibrium", r#"{"grid": {"d": 2}}"#, "grid.d"),
        ("equilibrium", r#"{"problem": {"psi": {"amplitude": -1.0}}}"#, "problem.psi.amplitude"),
        ("flow", r#"{"flow": {"dt": 0.0}}"#, "flow.dt"),
        ("resolvent", r#"{"resolvent": {"eps": 4.0}}"#, "resolvent.eps"),
        ("evolve", r#"{"grid": {"d": 2, "n": 32, "spacing": 0.5}}"#, "grid.spacing"),
    ];
    for (cmd, text, field) in cases {
        let cfg = write_config(dir.path(), text);
        let out = run(&[cmd, "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "{text}: {err}");
        assert!(err.contains(field), "{text}: {err}");
    }
}

#[test]
fn evolve_matches_the_golden_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("evolve_d2.json");
    let out = run(&["evolve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for t in ["0", "0.5", "1", "2", "4", "8"] {
        assert!(dir.path().join(format!("chart_t{t}.json")).exists());
        assert!(dir.path().join(format!("remainder_t{t}.json")).exists());
        assert!(dir.path().join(format!("remainder_t{t}.f64")).exists());
    }
    let (header, rows) = read_csv(&dir.path().join("curves.csv"));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/evolve_d2_curves.csv");
    let (gheader, grows) = read_csv(&golden);
    assert_eq!(header, gheader);
    assert_eq!(rows.len(), grows.len());
    for (r, g) in rows.iter().zip(&grows) {
        for (x, y) in r.iter().zip(g) {
            assert!((x - y).abs() <= 1e-9 * y.abs().max(1e-300), "{x} vs {y}");
        }
    }
}

#[test]
fn runs_are_deterministic_and_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("evolve_d2.json");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for out in [&a, &b] {
        let o = bin()
            .args(["evolve", "--config", cfg.to_str().unwrap(), "--threads", "2", "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    let ra = fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, fs::read(b.join("report.json")).unwrap());
    let echo = a.join("config_echo.json");
    let o = bin()
        .args(["evolve", "--threads", "2", "--config"])
        .arg(&echo)
        .arg("--out")
        .arg(&c)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ra, fs::read(c.join("report.json")).unwrap());
    assert_eq!(fs::read(a.join("remainder_t8.f64")).unwrap(), fs::read(c.join("remainder_t8.f64")).unwrap());
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("evolve_d2.json");
    let out = dir.path().join("s");
    let o = run(&["evolve", "--config", cfg.to_str().unwrap(), "--seed", "99"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["seed"], 99);
    let echo: Value = serde_json::from_str(&fs::read_to_string(out.join("config_echo.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], 99);
}

#[test]
fn out_dir_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_env");
    let o = bin().args(["verify"]).env("ASYMPHEAT_OUT", &target).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("report.json").exists());
}

#[test]
fn relaxation_flow_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("flow_relax.json");
    let o = run(&["flow", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("monitors.csv"));
    assert_eq!(header[..3], ["t", "lp_norm_p2", "lp_norm_p4"]);
    assert_eq!(rows.len(), 101);
    assert!(dir.path().join("chart_t1.json").exists());
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"n": 44}, "flow": {"t_end": 0.1, "stationary_tol": 0.0}, "problem": {"skip_max_principle": true}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["flow", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "stays at equilibrium");
}

#[test]
fn resolvent_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("resolvent.json");
    let o = run(&["resolvent", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("sector_sweep.csv"));
    assert_eq!(header[0], "lambda_re");
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite())));
}

#[test]
fn equilibrium_writes_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("equilibrium.json");
    let o = run(&["equilibrium", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["u_star.json", "u_star.f64", "chart.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let r = report(dir.path());
    assert!(r["data"]["summary"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn small_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"seed": 3, "problem": {"skip_max_principle": true}, "sweep": {"trials": 4, "min_fraction": 0.5}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 4);
}
