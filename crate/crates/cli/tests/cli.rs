use std::process::{Command, Output};

use serde_json::Value;

fn cohstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohstat"))
        .args(args)
        .output()
        .expect("cohstat runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn binomial_family_rows() {
    let out = cohstat(&["family", "binomial", "--n", "2", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    for key in ["schema_version", "command", "config", "rows", "footer"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["command"], "family binomial");
    let probs: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["probability"].as_f64().unwrap())
        .collect();
    assert_eq!(probs.len(), 3);
    for (got, want) in probs.iter().zip([0.25, 0.5, 0.25]) {
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn poisson_family_zero_rate_is_single_row() {
    let out = cohstat(&["family", "poisson", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["outcome"], 0);
    assert_eq!(rows[0]["probability"].as_f64(), Some(1.0));
}

#[test]
fn poisson_family_lambda_one() {
    let out = cohstat(&["family", "poisson", "--lambda", "1"]);
    let doc = json(&out);
    let p1 = doc["rows"][1]["probability"].as_f64().unwrap();
    assert!((p1 - 0.367_879_441_171_442_3).abs() < 1e-12);
    assert!(doc["footer"]["max_abs_diff"].as_f64().unwrap() < 1e-12);
}

#[test]
fn invalid_parameters_exit_2() {
    for args in [
        &["infer", "binomial", "--n", "2", "--k", "3"][..],
        &["family", "binomial", "--n", "2", "--p", "1.5"],
        &["family", "poisson", "--lambda", "-1"],
        &["verify", "--check", "nonsense"],
        &["family", "poisson"],
    ] {
        let out = cohstat(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&out).is_empty(), "{args:?} printed no diagnostic");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "truncK = 10\n").unwrap();
    let out = cohstat(&["verify", "--check", "example12", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("truncK"), "{}", stderr(&out));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "trunc = 40\nseed = 5\n").unwrap();
    let cfg = path.to_str().unwrap();

    let doc = json(&cohstat(&["verify", "--check", "bch", "--config", cfg]));
    assert_eq!(doc["config"]["trunc"], 40);
    assert_eq!(doc["config"]["seed"], 5);

    let doc = json(&cohstat(&["verify", "--check", "bch", "--config", cfg, "--trunc", "80"]));
    assert_eq!(doc["config"]["trunc"], 80);
    assert_eq!(doc["rows"][0]["params"], "alpha=1 K=80");
}

#[test]
fn defaults_are_echoed() {
    let doc = json(&cohstat(&["verify", "--check", "example12"]));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["trunc"], Value::Null);
    assert_eq!(doc["config"]["format"], "json");
    assert_eq!(doc["config"]["tol"].as_f64(), Some(1e-12));
}

#[test]
fn verification_failure_exits_1() {
    let out = cohstat(&["verify", "--check", "bch", "--alpha", "3", "--trunc", "16"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["footer"]["all_pass"], false);
    assert_eq!(doc["rows"][0]["pass"], false);
}

#[test]
fn csv_output_has_fixed_header_and_full_precision() {
    let out = cohstat(&["infer", "binomial", "--n", "2", "--k", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("parameter,density_pov,density_analytic,abs_diff"));
    let row: Vec<&str> = lines.nth(300).unwrap().split(',').collect();
    let p: f64 = row[0].parse().unwrap();
    let analytic: f64 = row[2].parse().unwrap();
    assert_eq!(p, 0.3);
    assert!((analytic - 6.0 * p * (1.0 - p)).abs() < 1e-15);
    // d.dddddddddddddddde±x carries 17 significant digits
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17, "{}", row[1]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cohstat(&["family", "poisson", "--lambda", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "family poisson");
}

#[test]
fn infer_output_is_deterministic() {
    let args = ["infer", "poisson", "--observed", "3"];
    let a = cohstat(&args);
    let b = cohstat(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert!(doc["footer"]["sup_norm"].as_f64().unwrap() < 1e-8);
    assert!((doc["footer"]["total_mass_pov"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let intervals = doc["footer"]["credible_intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 3);
    for iv in intervals {
        let lo = iv["pov"][0].as_f64().unwrap();
        let hi = iv["pov"][1].as_f64().unwrap();
        assert!(lo < 4.0 && 4.0 < hi);
    }
}

#[test]
fn verify_single_spin_options() {
    let out = cohstat(&["verify", "--check", "identity", "--spin", "5/2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert!(doc["rows"][0]["params"].as_str().unwrap().starts_with("spin j=5/2"));
}
