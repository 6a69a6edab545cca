use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmt")).args(args).env_remove("GMT_SEED").output().expect("gmt runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn json_report_marks_holding_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = gmt(&["verify", &fixture("smoke.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"holds\": true"));
    assert!(text.starts_with("{\n  \"timestamp\""));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn csv_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    gmt(&["verify", &fixture("forced_failure.json"), "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("inequality_id,domain,function,h,lhs,rhs,ratio,holds"));
    assert!(text.contains("swap_test"));
    assert!(text.lines().any(|l| l.ends_with(",false")));
}

#[test]
fn overrides_reach_every_entry() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    gmt(&["verify", &fixture("smoke.json"), "--h", "0.03125", "--tol", "0.5", "--out", out.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["entries"][0]["h"], 0.03125);
    assert_eq!(v["entries"][0]["reports"][0]["tol"], 0.5);
}

#[test]
fn plot_directory_holds_ratio_series() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    gmt(&["verify", &fixture("smoke.json"), "--out", plots.to_str().unwrap()]);
    let text = std::fs::read_to_string(plots.join("ratios.tsv")).unwrap();
    assert!(text.starts_with("entry\treport\tratio\tholds\n"));
}

#[test]
fn missing_and_malformed_suites_fail() {
    let dir = tempfile::tempdir().unwrap();
    let missing = gmt(&["verify", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    let broken = write(dir.path(), "broken.json", "{\n  \"entries\": [\n    {\"domain\": }\n  ]\n}");
    let out = gmt(&["verify", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let typo = gmt(&["verify", &fixture("unknown_check.json")]);
    assert!(String::from_utf8_lossy(&typo.stderr).contains("bogus"));
}

#[test]
fn estimate_hm_reports_circle_length() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"ball","params":{"r":1},"h":0.00390625}"#);
    let v = stdout_json(&gmt(&["estimate-hm", &d, "--d", "1", "--delta", "0.1"]));
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2.0 * std::f64::consts::PI).abs() < 0.1, "{value}");
}

#[test]
fn partition_writes_valid_cells() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"box","params":{"lo":[0,0],"hi":[1,1]},"h":0.0078125}"#);
    let cells: PathBuf = dir.path().join("cells.json");
    let out = gmt(&["partition", &d, "--delta", "0.2", "--out", cells.to_str().unwrap()]);
    assert!(out.status.success());
    let p: gmtlab::Partition = serde_json::from_str(&std::fs::read_to_string(cells).unwrap()).unwrap();
    p.validate().unwrap();
    assert!(p.rd_max() <= 0.1);
}

#[test]
fn trace_writes_one_file_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"ball","params":{"r":1},"h":0.0078125}"#);
    let f = write(dir.path(), "f.json", r#"{"expr":"max(0, 1 - r^2)","lipschitz":2}"#);
    let plots = dir.path().join("trace");
    let v = stdout_json(&gmt(&["trace", &d, &f, "--eps", "0.2", "--s", "0.02", "--plots", plots.to_str().unwrap()]));
    assert_eq!(v["holds"], true);
    let mut names: Vec<String> = std::fs::read_dir(&plots).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["hm_sum_estimate.tsv", "main3.tsv", "main4.tsv", "main5.tsv", "main6.tsv", "prelim_est.tsv"]);
}

#[test]
fn trace_without_modulus_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"ball","params":{"r":1},"h":0.0078125}"#);
    let f = write(dir.path(), "f.json", r#"{"expr":"1 - r^2"}"#);
    assert_eq!(gmt(&["trace", &d, &f, "--eps", "0.2", "--s", "0.02"]).status.code(), Some(2));
}

#[test]
fn search_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"ball","params":{"r":1},"h":0.0625}"#);
    let f = write(dir.path(), "f.json", r#""indicator""#);
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_gmt"))
            .args(["search", &d, &f, "--iters", "10", "--step", "0.1"])
            .env("GMT_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b) = (run("7"), run("7"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["history"].as_array().unwrap().len(), 10);
    assert_eq!(run("x").status.code(), Some(2));
}

#[test]
fn steiner_lists_every_radius() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.json", r#"{"kind":"box","params":{"lo":[0,0],"hi":[1,1]},"h":0.00390625}"#);
    let plots = dir.path().join("p");
    let v = stdout_json(&gmt(&["steiner", &d, "--eps", "0.2,0.1,0.05", "--plots", plots.to_str().unwrap()]));
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert!((v["extrapolated"].as_f64().unwrap() - 4.0).abs() < 0.08);
    assert_eq!(std::fs::read_to_string(plots.join("steiner.tsv")).unwrap().lines().count(), 4);
    assert_eq!(gmt(&["steiner", &d, "--eps", "0.05,0.1"]).status.code(), Some(2));
}
