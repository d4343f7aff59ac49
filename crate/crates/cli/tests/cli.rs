use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const EXPO: &str = r#"{"family":"exponential","lambda":1}"#;
const PARETO2: &str = r#"{"family":"pareto1","a":1,"v":2}"#;
const UNIFORM: &str = r#"{"family":"uniform","lo":0,"hi":1}"#;

fn auctionlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_auctionlab")).args(args).output().expect("binary runs")
}

fn with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_auctionlab"))
        .env("AUCTIONLAB_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

/// Data rows of a CSV output, split on commas, header excluded.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("auctionlab-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn table_exponential_surplus_is_constant() {
    let out = stdout(&auctionlab(&["table", "--dist", EXPO, "--m-min", "2", "--m-max", "6"]));
    assert!(out.starts_with("# tool: auctionlab "));
    assert!(out.contains("# config: {\"subcommand\":\"table\""));
    assert!(out.contains("\nm,buyer_surplus,seller_revenue,per_bidder_surplus,marginal_revenue\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == "1"));
}

#[test]
fn table_pareto_ratio_is_one() {
    let rows = csv_rows(&stdout(&auctionlab(&["table", "--dist", PARETO2, "--m-max", "6"])));
    for r in rows {
        assert!((num(&r[2]) / num(&r[1]) - 1.0).abs() < 1e-11, "{r:?}");
    }
}

#[test]
fn table_rejects_infinite_mean() {
    let o = auctionlab(&["table", "--dist", r#"{"family":"pareto1","a":1,"v":0.9}"#]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infinite expected top order statistic"));
}

#[test]
fn table_json_and_empty_range() {
    let doc = json(&auctionlab(&["table", "--dist", EXPO, "--m-max", "3", "--format", "json"]));
    assert_eq!(doc["tool"], "auctionlab");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["m_max"], 3);
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 2);
    let o = auctionlab(&["table", "--dist", EXPO, "--m-min", "5", "--m-max", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_paired_exponential_delta_is_zero() {
    let doc = json(&auctionlab(&["simulate", "--dist", EXPO, "--bidders", "5", "--paired", "--reps", "200000", "--seed", "7"]));
    let est = &doc["result"][0];
    assert_eq!(est["quantity"], "surplus_delta");
    assert_eq!(est["seed"], 7);
    let (mean, se) = (est["mean"].as_f64().unwrap(), est["std_error"].as_f64().unwrap());
    assert!(mean.abs() <= 4.0 * se, "{mean} ± {se}");
    assert_eq!(doc["config"]["seed"], 7);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let args = ["simulate", "--dist", PARETO2, "--bidders", "3", "--reserve", "1.5", "--reps", "50000", "--seed", "3"];
    let a = stdout(&with_threads("1", &args));
    let b = stdout(&with_threads("1", &args));
    let c = stdout(&with_threads("6", &args));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn simulate_refuses_sample_mean_for_very_heavy_tails() {
    let o = auctionlab(&["simulate", "--dist", r#"{"family":"pareto1","a":1,"v":1.1}"#, "--bidders", "3", "--estimator", "mean"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--estimator mom"));
    let ok = auctionlab(&["simulate", "--dist", r#"{"family":"pareto1","a":1,"v":1.1}"#, "--bidders", "3", "--estimator", "mom", "--reps", "10000"]);
    assert!(ok.status.success());
}

#[test]
fn simulate_csv_records_seed() {
    let out = stdout(&auctionlab(&["simulate", "--dist", UNIFORM, "--bidders", "3", "--reps", "1000", "--seed", "99", "--format", "csv"]));
    assert!(out.contains("# seed: 99\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["buyer_surplus", "seller_revenue", "sold_rate"]);
}

#[test]
fn reserve_scan_equal_revenue_is_flat() {
    let out = stdout(&auctionlab(&[
        "reserve-scan", "--dist", r#"{"family":"pareto1","a":2,"v":1}"#, "--bidders", "3", "--r-min", "2", "--r-max", "40", "--r-steps", "9",
    ]));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r[1] == "6" && r[2] == "inf"));
}

#[test]
fn reserve_scan_exponential_derivative_crosses_zero_at_one() {
    let out = stdout(&auctionlab(&[
        "reserve-scan", "--dist", EXPO, "--bidders", "2", "--r-min", "0", "--r-max", "2", "--r-steps", "9",
    ]));
    assert!(out.contains("# note: revenue-optimal reserve 1\n"));
    for r in csv_rows(&out) {
        let (x, d) = (num(&r[0]), num(&r[3]));
        if x > 0.0 && x < 1.0 {
            assert!(d > 0.0);
        } else if x > 1.0 {
            assert!(d < 0.0);
        } else if x == 1.0 {
            assert!(d.abs() < 1e-12);
        }
    }
}

#[test]
fn reserve_scan_pareto_derivative_negative_and_notes() {
    let out = stdout(&auctionlab(&["reserve-scan", "--dist", PARETO2, "--bidders", "2"]));
    assert!(out.contains("a(n+1)^(1/v)"));
    assert!(out.contains("printed form"));
    for r in csv_rows(&out).into_iter().skip(1) {
        assert!(num(&r[3]) < 0.0, "{r:?}");
    }
}

fn write_round_robin(dir: &std::path::Path, m: usize, dist: &str) -> (PathBuf, PathBuf) {
    let mut old = String::new();
    for i in 0..m {
        let row: Vec<&str> = (0..m).map(|j| if i == j { "0" } else { "1" }).collect();
        old.push_str(&row.join(","));
        old.push('\n');
    }
    let new = vec![vec!["1"; m].join(","); m].join("\n") + "\n";
    let sidecar = format!(r#"{{"seller_mode":"single-seller","distribution":{dist}}}"#);
    fs::write(dir.join("old.csv"), old).unwrap();
    fs::write(dir.join("old.json"), &sidecar).unwrap();
    fs::write(dir.join("new.csv"), new).unwrap();
    fs::write(dir.join("new.json"), &sidecar).unwrap();
    (dir.join("old.csv"), dir.join("new.csv"))
}

fn verdict(old: &std::path::Path, new: &std::path::Path) -> Value {
    json(&auctionlab(&["participation", "--old", old.to_str().unwrap(), "--new", new.to_str().unwrap()]))
}

#[test]
fn participation_round_robin_files() {
    let dir = scratch("rr");
    let (old, new) = write_round_robin(&dir, 4, PARETO2);
    let doc = verdict(&old, &new);
    assert_eq!(doc["result"]["report"]["verdict"], true);
    assert_eq!(doc["result"]["report"]["strict_party"], "seller");
    assert_eq!(doc["result"]["old"]["bidder_surplus"].as_array().unwrap().len(), 4);

    let same = verdict(&old, &old);
    assert_eq!(same["result"]["report"]["verdict"], false);

    let (old, new) = write_round_robin(&dir, 4, UNIFORM);
    let doc = verdict(&old, &new);
    assert_eq!(doc["result"]["report"]["verdict"], false);
    assert_eq!(doc["result"]["report"]["worse_parties"].as_array().unwrap().len(), 4);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn participation_built_in_round_robin_matches_files() {
    let dir = scratch("builtin");
    let (old, new) = write_round_robin(&dir, 5, EXPO);
    let from_files = verdict(&old, &new);
    let built = json(&auctionlab(&["participation", "--round-robin", "5", "--dist", EXPO]));
    assert_eq!(from_files["result"], built["result"]);
    assert_eq!(built["result"]["report"]["strict_parties"], serde_json::json!(["seller"]));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn participation_mismatch_is_a_config_error() {
    let dir = scratch("mismatch");
    let (old, _) = write_round_robin(&dir, 3, EXPO);
    fs::write(dir.join("wide.csv"), "1,1,1,1\n1,1,1,1\n1,1,1,1\n").unwrap();
    fs::write(dir.join("wide.json"), format!(r#"{{"seller_mode":"single-seller","distribution":{EXPO}}}"#)).unwrap();
    let o = auctionlab(&["participation", "--old", old.to_str().unwrap(), "--new", dir.join("wide.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_flags_override_and_echo_reproduces() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    fs::write(&cfg, format!(r#"{{"subcommand":"simulate","dist":{UNIFORM},"bidders":3,"reps":5000,"seed":5}}"#)).unwrap();
    let first = json(&auctionlab(&["--config", cfg.to_str().unwrap(), "--format", "json"]));
    assert_eq!(first["config"]["seed"], 5);
    let overridden = json(&auctionlab(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "6"]));
    assert_eq!(overridden["config"]["seed"], 6);
    assert_eq!(overridden["config"]["reps"], 5000);
    assert_ne!(first["result"], overridden["result"]);

    let out = dir.join("out.json");
    let o = auctionlab(&["--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let written = fs::read_to_string(&out).unwrap();
    let echo: Value = serde_json::from_str(&written).unwrap();
    fs::write(dir.join("echo.json"), echo["config"].to_string()).unwrap();
    fs::remove_file(&out).unwrap();
    assert!(auctionlab(&["--config", dir.join("echo.json").to_str().unwrap()]).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), written);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_exit_with_two() {
    let dir = scratch("bad");
    fs::write(dir.join("typo.json"), r#"{"subcommand":"table","dsit":{}}"#).unwrap();
    assert_eq!(auctionlab(&["--config", dir.join("typo.json").to_str().unwrap()]).status.code(), Some(2));
    fs::write(dir.join("table.json"), format!(r#"{{"subcommand":"table","dist":{EXPO}}}"#)).unwrap();
    let o = auctionlab(&["simulate", "--config", dir.join("table.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(auctionlab(&["table", "--dist", "{not json"]).status.code(), Some(2));
    assert_eq!(auctionlab(&["table"]).status.code(), Some(2));
    assert_eq!(auctionlab(&[]).status.code(), Some(2));
    assert_eq!(with_threads("zero", &["table", "--dist", EXPO]).status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_parameters_exit_with_three() {
    let o = auctionlab(&["simulate", "--dist", r#"{"family":"exponential","lambda":-1}"#, "--bidders", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = auctionlab(&["reserve-scan", "--dist", EXPO, "--bidders", "2", "--r-min", "-1", "--r-max", "1"]);
    assert_eq!(o.status.code(), Some(3));
}
