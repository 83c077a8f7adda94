use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn freeconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeconv"))
        .args(args)
        .env("FREECONV_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn result_moments(dir: &Path) -> Vec<String> {
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("moments.json")).unwrap()).unwrap();
    doc["result"]["moments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

fn write_density(path: &Path, lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) {
    let mut text = String::from("t,density\n");
    for i in 0..points {
        let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        text.push_str(&format!("{t:.16e},{:.16e}\n", f(t)));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn additive_convolution_moments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = freeconv(&["convolve", "add", "semicircle", "free-poisson:0.5", "--order", "3", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(result_moments(dir.path()), ["1/2", "7/4", "23/8"]);
    assert!(stdout(&o).contains("m2 = 7/4"));
}

#[test]
fn multiplicative_convolution_of_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeconv(&["convolve", "mult", "point:2", "point:3", "--order", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(result_moments(dir.path()), ["6", "36", "216"]);
}

#[test]
fn zero_mean_product_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeconv(&["convolve", "mult", "semicircle", "point:1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("S-transform undefined"));
}

#[test]
fn output_json_reingests() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = freeconv(&["convolve", "add", "semicircle:2", "free-poisson:3:1@1/2,-1@1/2", "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let second = dir.path().join("second");
    let json = first.join("moments.json");
    let o = freeconv(&["convolve", "add", json.to_str().unwrap(), "point:0", "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(result_moments(&first), result_moments(&second));

    // downstream results agree with a direct three-term sum
    let direct = dir.path().join("direct");
    let third = dir.path().join("third");
    freeconv(&["convolve", "add", json.to_str().unwrap(), "point:1", "--out", third.to_str().unwrap()]);
    let shifted = dir.path().join("shifted");
    freeconv(&["convolve", "add", "semicircle:2", "point:1", "--out", shifted.to_str().unwrap()]);
    let shifted_json = shifted.join("moments.json");
    freeconv(&[
        "convolve",
        "add",
        shifted_json.to_str().unwrap(),
        "free-poisson:3:1@1/2,-1@1/2",
        "--out",
        direct.to_str().unwrap(),
    ]);
    assert_eq!(result_moments(&third), result_moments(&direct));
}

#[test]
fn density_output_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeconv(&[
        "convolve",
        "add",
        "semicircle",
        "semicircle",
        "--density",
        "--grid-points",
        "400",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    let mass: f64 = rows.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    assert!((mass - 1.0).abs() < 0.01, "mass {mass}");
    // variance 2 semicircle: ρ(0) = 1/(π√2)
    let peak = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    assert!((peak - 1.0 / (std::f64::consts::PI * 2f64.sqrt())).abs() < 2e-3);
}

#[test]
fn density_needs_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeconv(&["convolve", "add", "moments:0,1", "semicircle", "--order", "2", "--density", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"order": 2}"#).unwrap();
    let out = dir.path().join("out");
    let o = freeconv(&["convolve", "add", "point:1", "point:2", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(result_moments(&out), ["3", "9"]);
    // flags override the file
    freeconv(&["convolve", "add", "point:1", "point:2", "--config", good.to_str().unwrap(), "--order", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(result_moments(&out).len(), 3);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"order": 2, "colour": "red"}"#).unwrap();
    let o = freeconv(&["convolve", "add", "point:1", "point:2", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn entropy_command_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("sc.csv");
    write_density(&sc, -2.0, 2.0, 4001, |t| (4.0 - t * t).max(0.0).sqrt() / (2.0 * std::f64::consts::PI));
    let o = freeconv(&["entropy", sc.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let chi: f64 = text.lines().next().unwrap().trim_start_matches("chi = ").parse().unwrap();
    assert!((chi - 1.41894).abs() < 1e-3, "{text}");
    assert!(text.contains("disagreement"));

    let uniform = dir.path().join("uniform.csv");
    write_density(&uniform, -1.0, 1.0, 2001, |_| 0.5);
    let text = stdout(&freeconv(&["entropy", uniform.to_str().unwrap()]));
    let chi: f64 = text.lines().next().unwrap().trim_start_matches("chi = ").parse().unwrap();
    assert!((chi - 0.862086).abs() < 1e-3, "{text}");

    let spike = dir.path().join("spike.csv");
    write_density(&spike, -1.0, 1.0, 20001, |t| (1e4 - 1e8 * t.abs()).max(0.0));
    assert_eq!(freeconv(&["entropy", spike.to_str().unwrap()]).status.code(), Some(3));

    let heavy = dir.path().join("heavy.csv");
    write_density(&heavy, -1.0, 1.0, 201, |_| 1.0);
    assert_eq!(freeconv(&["entropy", heavy.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(freeconv(&["entropy", "/does/not/exist.csv"]).status.code(), Some(2));
}

#[test]
fn experiment_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = freeconv(&["experiment", "fig1-sum", "--n", "200", "--lambda", "0.5", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("l1 = "));
    }
    for file in ["fig1-sum-hist.csv", "fig1-sum-theory.csv", "fig1-sum-summary.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(a.join("fig1-sum-summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["size"], 200);
}

#[test]
fn band_experiment_reads_kernel_files() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("k.csv");
    let f = dir.path().join("f.csv");
    std::fs::write(&kernel, "# two bands\n2,0.5\n0.5,1\n").unwrap();
    std::fs::write(&f, "0\n0\n").unwrap();
    let out = dir.path().join("out");
    let o = freeconv(&[
        "experiment",
        "band",
        "--kernel",
        kernel.to_str().unwrap(),
        "--f",
        f.to_str().unwrap(),
        "--n",
        "300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("band-theory.csv").exists());

    let missing = dir.path().join("missing.csv");
    let o = freeconv(&["experiment", "band", "--kernel", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&kernel, "1,2\n3,4\n").unwrap();
    let o = freeconv(&["experiment", "band", "--kernel", kernel.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn freeness_decay_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeconv(&[
        "experiment",
        "freeness-decay",
        "--sizes",
        "20,80",
        "--seeds",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("mean |defect|")).count(), 6);
}

#[test]
fn usage_errors() {
    assert_eq!(freeconv(&["experiment", "fig9"]).status.code(), Some(2));
    assert_eq!(freeconv(&["convolve", "add", "gaussian", "point:1"]).status.code(), Some(2));
    assert_eq!(freeconv(&["frobnicate"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_freeconv"))
        .args(["fock-check"])
        .env("FREECONV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fock_check_is_exact() {
    let o = freeconv(&["fock-check"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("exact")).count(), 5, "{text}");
}
