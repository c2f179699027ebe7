use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    run(&all)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect())
        .collect()
}

// (9/2)^{1/3}, the power-solution constant at γ = 2
fn c2() -> f64 {
    4.5f64.cbrt()
}

#[test]
fn exact_csv_format() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["exact", "--gamma", "2", "--t-max", "10", "--n", "1000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("power_profile.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,v,dv"));
    assert_eq!(lines.next(), Some("0,0,inf"));
    assert_eq!(text.lines().count(), 1002);
    let r = rows(&d.path().join("power_profile.csv"));
    let last = r.last().unwrap();
    assert_eq!(last[0], 10.0);
    assert!((last[1] / (c2() * 10f64.powf(2.0 / 3.0)) - 1.0).abs() < 1e-14);
}

#[test]
fn exact_json_and_svg_formats() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run_in(d.path(), &["exact", "--n", "20", "--format", "json"])), 0);
    let v = json(&d.path().join("power_profile.json"));
    assert_eq!(v["t"].as_array().unwrap().len(), 21);
    assert_eq!(v["dv"][0], Value::Null);
    assert_eq!(code(&run_in(d.path(), &["exact", "--n", "20", "--format", "svg"])), 0);
    let svg = fs::read_to_string(d.path().join("power_profile.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(d.path().join("power_profile.csv").exists());
}

#[test]
fn exact_rejects_small_gamma() {
    let o = run(&["exact", "--gamma", "0.5", "--t-max", "10", "--n", "10"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gamma > 1"), "{}", stderr(&o));
}

#[test]
fn shoot_report_and_scaling() {
    let d1 = TempDir::new().unwrap();
    let d2 = TempDir::new().unwrap();
    assert_eq!(code(&run_in(d1.path(), &["shoot", "--gamma", "2", "--slope", "1"])), 0);
    assert_eq!(code(&run_in(d2.path(), &["shoot", "--gamma", "2", "--slope", "2"])), 0);
    let rep = json(&d1.path().join("shoot_report.json"));
    assert!(rep["discrepancy_sup_rel"].as_f64().unwrap() <= 1e-4);
    assert_eq!(rep["pass"], true);

    // slope 2 is slope 1 under λ = 2^{(γ+1)/(γ−1)} = 8: t ↦ t/8, v ↦ v/4
    let a = rows(&d1.path().join("profile.csv"));
    let b = rows(&d2.path().join("profile.csv"));
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (ra, rb) in a.iter().zip(&b) {
        if rb[0] == 0.0 || rb[0] > 10.0 {
            continue;
        }
        compared += 1;
        assert!((ra[0] / 8.0 - rb[0]).abs() <= 1e-9 * rb[0]);
        worst = worst.max((ra[1] / 4.0 - rb[1]).abs() / rb[1]);
    }
    assert!(worst <= 1e-5, "{worst}");
    assert_eq!(compared, b.iter().filter(|r| r[0] > 0.0 && r[0] <= 10.0).count());
}

#[test]
fn shoot_rejects_negative_slope() {
    assert_eq!(code(&run(&["shoot", "--slope", "-1"])), 2);
}

#[test]
fn shoot_threshold_failure_still_writes_report() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["shoot", "--route-tol", "1e-15"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&d.path().join("shoot_report.json"))["pass"], false);
}

#[test]
fn verify_power_profile() {
    let d = TempDir::new().unwrap();
    run_in(d.path(), &["exact", "--n", "1000"]);
    let input = d.path().join("power_profile.csv");
    let o = run_in(d.path(), &["verify", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let certs = json(&d.path().join("certificates.json"));
    let certs = certs.as_array().unwrap();
    assert_eq!(certs.len(), 5);
    assert!(certs.iter().all(|c| c["pass"] == true));
    for k in [0, 1] {
        let c = certs[k]["empirical_constant"].as_f64().unwrap();
        assert!((c / c2() - 1.0).abs() < 1e-13, "{c}");
    }
    let kinds: Vec<&str> = certs.iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(
        kinds,
        ["upper_power", "lower_power", "linear_growth", "gradient_strip", "gradient_far"]
    );
}

#[test]
fn verify_slope_one_profile() {
    let d = TempDir::new().unwrap();
    run_in(d.path(), &["shoot", "--slope", "1"]);
    let input = d.path().join("profile.csv");
    let o = run_in(d.path(), &["verify", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let certs = json(&d.path().join("certificates.json"));
    let lin = certs[2]["empirical_constant"].as_f64().unwrap();
    assert!((lin - 1.0).abs() <= 0.02, "{lin}");
}

#[test]
fn verify_reports_corrupt_line() {
    let d = TempDir::new().unwrap();
    run_in(d.path(), &["exact", "--n", "100"]);
    let text = fs::read_to_string(d.path().join("power_profile.csv")).unwrap();
    let mut cut: Vec<&str> = text.lines().take(50).collect();
    cut.push("0.6,1.2");
    let bad = d.path().join("bad.csv");
    fs::write(&bad, cut.join("\n")).unwrap();
    let o = run(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 51"), "{}", stderr(&o));

    fs::write(&bad, "t,v,dv\n0,0,inf\n0.5,abc,1\n").unwrap();
    let o = run(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn halfplane_unperturbed_is_x_independent() {
    let d = TempDir::new().unwrap();
    let o = run_in(
        d.path(),
        &["halfplane", "--gamma", "2", "--width", "8", "--height", "4", "--h", "0.0625", "--perturb", "0"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = json(&d.path().join("halfplane_report.json"));
    assert!(rep["max_dev"].as_f64().unwrap() <= 1e-10);
    assert_eq!(rep["iteration"]["ordered_between_barriers"], true);
    let curve = rows(&d.path().join("symmetry.csv"));
    assert_eq!(curve.len(), 65);
    let field = rows(&d.path().join("field.csv"));
    assert_eq!(field.len(), 129 * 65);
}

#[test]
fn halfplane_rejects_noncommensurate_mesh() {
    let o = run(&["halfplane", "--width", "8", "--h", "0.3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn halfplane_nonconvergence_exits_one() {
    let o = run(&["halfplane", "--width", "2", "--height", "1", "--h", "0.125", "--tol", "1e-300"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        run_in(d.path(), &["shoot", "--slope", "0.5", "--format", "svg"]);
        run_in(d.path(), &["halfplane", "--width", "4", "--height", "2", "--h", "0.125", "--perturb", "0.1"]);
    }
    for f in ["profile.csv", "profile.svg", "shoot_report.json", "field.csv", "symmetry.csv", "halfplane_report.json"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn flags_override_config_file() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(&cfg, r#"{"gamma": 3, "n": 10, "format": "json"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&run_in(d.path(), &["exact", "--config", c])), 0);
    let v = json(&d.path().join("power_profile.json"));
    assert_eq!(v["gamma"], 3.0);
    assert_eq!(code(&run_in(d.path(), &["exact", "--config", c, "--gamma", "1.5"])), 0);
    assert_eq!(json(&d.path().join("power_profile.json"))["gamma"], 1.5);

    fs::write(&cfg, r#"{"gama": 3}"#).unwrap();
    assert_eq!(code(&run(&["exact", "--config", c])), 2);
    assert_eq!(code(&run(&["exact", "--config", "/nonexistent/run.json"])), 2);
}

#[test]
fn scale_by_lambda_and_by_slope_agree() {
    let d = TempDir::new().unwrap();
    run_in(d.path(), &["shoot", "--slope", "1"]);
    let input = d.path().join("profile.csv");
    let i = input.to_str().unwrap();
    let l = TempDir::new().unwrap();
    let s = TempDir::new().unwrap();
    assert_eq!(code(&run_in(l.path(), &["scale", "--input", i, "--lambda", "8"])), 0);
    assert_eq!(code(&run_in(s.path(), &["scale", "--input", i, "--slope", "2"])), 0);
    let a = rows(&l.path().join("scaled.csv"));
    let b = rows(&s.path().join("scaled.csv"));
    for (ra, rb) in a.iter().zip(&b).skip(1) {
        assert!((ra[1] - rb[1]).abs() <= 1e-9 * ra[1]);
    }
    assert_eq!(code(&run(&["scale", "--input", i])), 2);
    assert_eq!(code(&run(&["scale", "--input", i, "--lambda", "-2"])), 2);
}

#[test]
fn report_collects_halfplane_runs() {
    let d = TempDir::new().unwrap();
    let h = TempDir::new().unwrap();
    run_in(h.path(), &["halfplane", "--width", "4", "--height", "2", "--h", "0.125", "--perturb", "0.2"]);
    let r = h.path().join("halfplane_report.json");
    let o = run_in(d.path(), &["report", "--halfplane", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = json(&d.path().join("summary.json"));
    assert!((s["c_gamma"].as_f64().unwrap() - c2()).abs() < 1e-13);
    assert_eq!(s["certificates"].as_array().unwrap().len(), 5);
    assert_eq!(s["halfplane"][0]["width"], 4.0);
    for f in ["profile.svg", "certificates.svg", "symmetry_decay.svg"] {
        assert!(d.path().join(f).exists(), "{f}");
    }
}
