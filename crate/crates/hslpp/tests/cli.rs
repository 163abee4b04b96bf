use std::process::{Command, Output};

fn hslpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hslpp")).args(args).env_remove("HSLPP_THREADS").output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn brownian_kernel_value() {
    let o = hslpp(&["kernel", "--which", "bm", "--s", "1", "--x", "0", "--t", "1", "--y", "5"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert!((v["k12"][0].as_f64().unwrap() - 0.398942).abs() < 1e-6);
}

#[test]
fn geo_kernel_is_skew() {
    let o = hslpp(&["kernel", "--which", "geo", "--N", "8", "--s", "5", "--x", "2", "--t", "5", "--y", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    let (k12, k21) = (v["k12"][0].as_f64().unwrap(), v["k21"][0].as_f64().unwrap());
    assert!((k12 + k21).abs() < 1e-10);
    assert!(v["k11"].is_array() && v["err_estimate"].is_number());
}

#[test]
fn unknown_flag_prints_usage_and_exits_one() {
    let o = hslpp(&["sample", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(hslpp(&[]).status.code(), Some(1));
}

#[test]
fn validation_error_exits_one() {
    let o = hslpp(&["sample", "--q", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q"));
}

#[test]
fn numerical_errors_map_to_exit_two() {
    let e = hslpp::Error::from(hslpp::core::Error::Truncation("tail".into()));
    assert_eq!(e.exit_code(), 2);
    let e = hslpp::Error::from(hslpp::core::Error::Domain("q".into()));
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn sample_csv_is_reproducible() {
    let args = ["sample", "--q", "0.5", "--c", "1.4", "--N", "20", "--seed", "7"];
    let a = hslpp(&args);
    let b = hslpp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema_version,m,i,lambda"));
    assert_eq!(lines.count(), 21 * 20);
}

#[test]
fn top_bm_reports_variance_target() {
    let o = hslpp(&["top-bm", "--q", "0.5", "--c", "1.4", "--N", "60", "--replicas", "20", "--t", "0.6"]);
    assert!(o.status.code().unwrap() <= 1);
    let v = json(&o);
    let stat = v["stats"].as_array().unwrap().iter().find(|s| s["stat"] == "var_u(0.6)").unwrap().clone();
    assert!((stat["target"].as_f64().unwrap() - 0.488889).abs() < 1e-6);
}

#[test]
fn config_file_and_flag_precedence() {
    let p = std::env::temp_dir().join(format!("hslpp-cli-{}.cfg", std::process::id()));
    std::fs::write(&p, "# test\nn = 12\nseed = 3\n").unwrap();
    let ps = p.to_str().unwrap();
    let from_file = hslpp(&["sample", "--config", ps]);
    let explicit = hslpp(&["sample", "--N", "12", "--seed", "3"]);
    assert_eq!(from_file.stdout, explicit.stdout);
    let overridden = hslpp(&["sample", "--config", ps, "--seed", "4"]);
    assert_eq!(overridden.stdout, hslpp(&["sample", "--N", "12", "--seed", "4"]).stdout);
    std::fs::write(&p, "n = 12\nwat = 1\n").unwrap();
    let bad = hslpp(&["sample", "--config", ps]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains(".cfg:2:"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["top-bm", "--N", "50", "--replicas", "16", "--format", "csv"];
    let mut a = vec!["--threads", "1"];
    a.extend(args);
    let mut b = vec!["--threads", "2"];
    b.extend(args);
    assert_eq!(hslpp(&a).stdout, hslpp(&b).stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_hslpp")).args(args).env("HSLPP_THREADS", "2").output().unwrap();
    assert_eq!(env.stdout, hslpp(&a).stdout);
}

#[test]
fn descent_report_passes_at_reference_parameters() {
    let o = hslpp(&["descent-report", "--q", "0.5", "--c", "1.4", "--kappa", "0.36"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["ok"], true);
    assert_eq!(v["samples"].as_u64().unwrap(), 2001);
}

#[test]
fn gibbs_check_output() {
    let o = hslpp(&["gibbs-check", "--N", "2", "--samples", "5000"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!(v["tv"].as_f64().unwrap() < 0.2);
}

#[test]
fn converge_writes_rows() {
    let o = hslpp(&["converge", "--frame", "edge", "--N", "50,100", "--points", "0.4,0,0.6,0.5", "--format", "json"]);
    assert!(o.status.code().unwrap() <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 2);
}
