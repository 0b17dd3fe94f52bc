use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SQUID: [&str; 4] = ["system=squid", "squid.L=150e-12", "squid.C=0.15e-12", "squid.I_c=2.5e-6"];

fn run(subcommand: &str, config: Option<&Path>, sets: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_temporal-bell"));
    cmd.arg(subcommand);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    for s in sets {
        cmd.arg("--set").arg(s);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn parse_rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn spin_overlap_curve_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("curve.csv");
    let side = dir.path().join("curve.json");
    fs::write(&cfg, r#"{"system":"spin","omega":1.0}"#).unwrap();
    let o = run(
        "overlap-curve",
        Some(&cfg),
        &[&format!("output={}", out.display()), &format!("sidecar={}", side.display())],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(!csv.contains('\r'));
    let (header, rows) = parse_rows(&csv);
    assert_eq!(header, ["xi_over_absX", "overlap_I", "overlap_II"]);
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0][0], "0.00000000000e0");

    let meta: Value = serde_json::from_str(&fs::read_to_string(&side).unwrap()).unwrap();
    for key in ["xi_I", "xi_II"] {
        assert!(meta[key]["lo"].as_f64().unwrap() > 1.4, "{key}");
    }
    assert_eq!(meta["n_time"], 256);
}

#[test]
fn all_sign_assignments_agree() {
    let o = run("overlap-curve", None, &["system=spin", "omega=1", "signs=all", "n_time=64", "n_xi=50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = parse_rows(&stdout(&o));
    assert_eq!(header, ["signs", "xi_over_absX", "overlap_I", "overlap_II"]);
    assert_eq!(rows.len(), 8 * 50);
    assert_eq!(rows[0][0], "+++");
    assert_eq!(rows[399][0], "---");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = run(
        "overlap-curve",
        None,
        &["system=spin", "omega=1", "signs=all", "n_time=64", "n_xi=50", &format!("output={}", out.display())],
    );
    let meta: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(meta["max_pairwise_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(meta["assignments"].as_array().unwrap().len(), 8);
}

#[test]
fn squid_curves_follow_spin_curves() {
    let dir = tempfile::tempdir().unwrap();
    let curve = |sets: &[&str]| -> Vec<Vec<f64>> {
        let out = dir.path().join("x.csv");
        let mut all: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        all.extend(["n_time=48".into(), "n_xi=40".into(), format!("output={}", out.display())]);
        let refs: Vec<&str> = all.iter().map(String::as_str).collect();
        let o = run("overlap-curve", None, &refs);
        assert!(o.status.success(), "{}", stderr(&o));
        let (_, rows) = parse_rows(&fs::read_to_string(&out).unwrap());
        rows.iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect()
    };
    let spin = curve(&["system=spin", "omega=1"]);
    let flux = curve(&SQUID);
    let worst =
        spin.iter().zip(&flux).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max);
    assert!(worst <= 0.02, "{worst}");
}

#[test]
fn violation_map_rows_and_peak() {
    let o = run("violation-map", None, &["system=spin", "omega=1", "n_time=4"]);
    assert!(o.status.success());
    let (header, rows) = parse_rows(&stdout(&o));
    assert_eq!(header, ["t_ab", "t_bc", "delta_p", "dx_ab", "dx_ac", "dx_bc"]);
    assert_eq!(rows.len(), 16);

    let o = run("violation-map", None, &["system=spin", "omega=1"]);
    let (_, rows) = parse_rows(&stdout(&o));
    let peak = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);

    // dense search of sin²(x+y) − sin²x − cos²x·sin²y
    let mut best = f64::MIN;
    let n = 1000;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (std::f64::consts::PI * i as f64 / n as f64, std::f64::consts::PI * j as f64 / n as f64);
            let v = (x + y).sin().powi(2) - x.sin().powi(2) - x.cos().powi(2) * y.sin().powi(2);
            best = best.max(v);
        }
    }
    assert!((peak - best).abs() < 1e-3, "{peak} vs {best}");
    assert!((peak - 0.33).abs() < 0.01);
}

#[test]
fn type_three_is_a_config_error() {
    let o = run("violation-map", None, &["system=spin", "omega=1", "inequality=III"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("prepared in a definite state"));
}

#[test]
fn pseudo_map_schema_and_identity() {
    let o = run("pseudo-map", None, &["system=spin", "omega=1", "n_time=32"]);
    assert!(o.status.success());
    let (header, rows) = parse_rows(&stdout(&o));
    assert_eq!(header, ["t_ab", "t_bc", "q_pp", "q_pm", "q_mp", "q_mm", "delta_p_I", "min_q"]);
    assert_eq!(rows.len(), 32 * 32);
    for r in rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        if v[6] > 0.0 {
            assert!(v[7] < 0.0);
            assert!((v[6] + v[4]).abs() < 1e-10);
        }
    }
}

#[test]
fn squid_report_contents() {
    let o = run("squid-report", None, &SQUID);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((report["beta"].as_f64().unwrap() - 1.139).abs() < 0.01);
    for form in ["quartic", "full_cosine"] {
        let r = &report["forms"][form];
        for key in
            ["beta", "phi0", "barrier_J", "omega0_rad_s", "sigma0_sq_over_phi0_sq", "deltaE0_J", "tunnel_freq_Hz"]
        {
            assert!(r[key].as_f64().unwrap() > 0.0, "{form}.{key}");
        }
        let ratio = r["tunnel_freq_Hz"].as_f64().unwrap() * 6.62607015e-34 / r["deltaE0_J"].as_f64().unwrap();
        assert!((ratio - 1.0).abs() < 1e-9);
        assert!(r["convergence"]["deltaE0_relative_change"].as_f64().unwrap().abs() < 1e-3);
    }
}

#[test]
fn monostable_squid_fails_with_beta() {
    let o = run("squid-report", None, &["system=squid", "squid.L=150e-12", "squid.C=0.15e-12", "squid.I_c=0.1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("not bistable") && msg.contains("beta = 0.04"), "{msg}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let o = run("squid-report", None, &["system=squid"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("squid.L"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"system":"spin","omega":1.0,"n_tme":3}"#).unwrap();
    let o = run("overlap-curve", Some(&cfg), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_tme"));

    fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(run("overlap-curve", Some(&cfg), &[]).status.code(), Some(2));
    assert_eq!(run("overlap-curve", Some(&dir.path().join("missing.json")), &[]).status.code(), Some(2));
    assert_eq!(run("overlap-curve", None, &["system=spin", "omega"]).status.code(), Some(2));
    assert_eq!(run("squid-report", None, &["system=spin", "omega=1"]).status.code(), Some(2));
}

#[test]
fn frozen_dynamics_is_a_computational_failure() {
    let o = run("overlap-curve", None, &["system=spin", "omega=0", "n_time=8", "n_xi=4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no violation region"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.json"));
        let o = run(
            "overlap-curve",
            None,
            &["system=spin", "omega=1.3", "n_time=96", "format=json", &format!("output={}", out.display())],
        );
        assert!(o.status.success());
        outputs.push((fs::read(&out).unwrap(), o.stdout));
    }
    assert_eq!(outputs[0], outputs[1]);
    let again = |sub| stdout(&run(sub, None, &["system=spin", "omega=1", "n_time=40", "signs=all"]));
    for sub in ["violation-map", "pseudo-map"] {
        assert_eq!(again(sub), again(sub));
    }
}
