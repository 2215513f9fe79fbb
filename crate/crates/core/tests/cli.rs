use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn modheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modheat")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn header(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let first = text.lines().next().unwrap();
    serde_json::from_str(first.strip_prefix("# ").expect("comment header")).unwrap()
}

#[test]
fn list_suites_names_every_suite() {
    let o = modheat(&["list-suites", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"lemma41") && names.contains(&"duhamel"));
}

#[test]
fn unknown_suite_is_schema_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let o = modheat(&["verify", "--suite", "nope", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn unknown_param_is_schema_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"bogus": 1}"#);
    let o = modheat(&["propagate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_command_is_schema_error() {
    assert_eq!(code(&modheat(&["frobnicate"])), 2);
}

#[test]
fn large_data_does_not_converge() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "solve.json", r#"{"amplitude": 1000}"#);
    let out = dir.path().join("s");
    let o = modheat(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    // the contraction log is still written
    assert!(out.join("contraction.json").exists());
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = TempDir::new().unwrap();
    let blocker = write(dir.path(), "file", "");
    let out = format!("{blocker}/sub");
    assert_eq!(code(&modheat(&["propagate", "--out", &out])), 4);
}

#[test]
fn outputs_carry_metadata() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p");
    let o = modheat(&["propagate", "--out", out.to_str().unwrap(), "--beta", "0.5", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let h = header(&out.join("propagate.csv"));
    assert_eq!(h["command"], "propagate");
    assert_eq!(h["seed"], 9);
    assert_eq!(h["config_hash"].as_str().unwrap().len(), 64);
    assert!(h["grid"]["L"].is_number());
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("propagate.json")).unwrap()).unwrap();
    assert_eq!(j["meta"], h);
    assert_eq!(j["data"]["beta"], 0.5);
}

#[test]
fn config_hash_ignores_output_dir() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(code(&modheat(&["wigner", "--out", d.to_str().unwrap(), "--tau", "0.25"])), 0);
    }
    let (ha, hb) = (header(&a.join("wigner.csv")), header(&b.join("wigner.csv")));
    assert_eq!(ha["config_hash"], hb["config_hash"]);
    assert_eq!(std::fs::read(a.join("wigner.csv")).unwrap(), std::fs::read(b.join("wigner.csv")).unwrap());
}

#[test]
fn gabor_sweep_feeds_decay_fit() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    let o = modheat(&["gabor-matrix", "--out", g.to_str().unwrap(), "--tau", "0.25", "--rays", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = g.join("gabor_sweep.csv");
    let before: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(g.join("decay_fit.json")).unwrap()).unwrap();

    let cfg = write(
        dir.path(),
        "fit.json",
        &format!(r#"{{"input": {:?}, "tau": 0.25, "m": 0, "N": 1}}"#, sweep.to_str().unwrap()),
    );
    let d = dir.path().join("d");
    let o = modheat(&["decay-fit", "--config", &cfg, "--out", d.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let after: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (c0, c1) = (before["data"]["fit"]["C"].as_f64().unwrap(), after["C"].as_f64().unwrap());
    // the CSV keeps 18 significant digits
    assert!((c0 - c1).abs() <= 1e-14 * c0, "{c0} vs {c1}");
    assert!(after["slope"].as_f64().unwrap() < -2.0);
}

#[test]
fn verify_writes_report_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = modheat(&["verify", "--suite", "duhamel", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        reports.push(std::fs::read(out.join("verify_duhamel.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn failing_suite_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m");
    let o = modheat(&["verify", "--suite", "moyal-inversion", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(out.join("verify_moyal-inversion.json").exists());
}

#[test]
fn shipped_configs_parse() {
    use modheat::cli::{GaborParams, ModnormParams, RunConfig, SolveParams};
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let load = |name: &str| RunConfig::load(&dir.join(name), None).unwrap();
    load("solve_cubic.json").params_as::<SolveParams>().unwrap();
    load("gabor_quarter.json").params_as::<GaborParams>().unwrap();
    load("modnorm_chirp.json").params_as::<ModnormParams>().unwrap();
}
