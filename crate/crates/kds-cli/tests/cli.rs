use serde_json::Value;
use std::process::{Command, Output};

fn kds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kds")).args(args).env_remove("KDS_THREADS").output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Largest two roots of `r³ − (3/Λ)r + 6M/Λ` by the trigonometric formula.
fn oracle(lam: f64, m: f64) -> (f64, f64) {
    let p = -3.0 / lam;
    let q = 6.0 * m / lam;
    let k = 2.0 * (-p / 3.0).sqrt();
    let phi = (3.0 * q / (p * k)).acos() / 3.0;
    let mut r: Vec<f64> = (0..3).map(|j| k * (phi - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos()).collect();
    r.sort_by(f64::total_cmp);
    (r[1], r[2])
}

#[test]
fn horizons_match_the_cubic_oracle() {
    let o = kds(&["horizons", "--lambda", "3", "--mass", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "kds-spectra/1");
    assert_eq!(v["command"], "horizons");
    let (rm, rp) = oracle(3.0, 0.1);
    assert!((v["result"]["rMinus"].as_f64().unwrap() - rm).abs() < 1e-12);
    assert!((v["result"]["rPlus"].as_f64().unwrap() - rp).abs() < 1e-12);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let o = kds(&["horizons", "--lambda", "3", "--mass", "0.1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"rPlus\"")).unwrap();
    let num = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = num.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{num}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["nash-moser", "--problem", "quadratic", "--data-size", "0.1", "--seed", "3"];
    let a = kds(&args);
    let b = kds(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_kds")).args(args).env("KDS_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn unknown_flag_is_a_usage_error_without_output() {
    let o = kds(&["horizons", "--lambda", "3", "--mass", "0.1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn malformed_values_are_usage_errors() {
    for args in [
        &["metric", "--lambda", "3", "--mass", "0.1", "--at", "0,0.5,1"][..],
        &["ds-indicial", "--op", "nonsense"],
        &["ds-indicial", "--op", "boxCPmod", "--gamma1", "x/2", "--gamma2", "1"],
        &["verify"],
        &["verify", "--check", "c99-none"],
        &["horizons", "--lambda", "3"],
    ] {
        let o = kds(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_kds"))
        .args(["horizons", "--lambda", "3", "--mass", "0.1"])
        .env("KDS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn computation_failure_gives_structured_error() {
    let o = kds(&["horizons", "--lambda", "3", "--mass", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["schema"], "kds-spectra/1");
    assert_eq!(v["error"]["kind"], "invalid-params");
    assert!(v.get("result").is_none());
}

#[test]
fn diverged_error_carries_the_trace() {
    let o = kds(&["nash-moser", "--data-size", "2", "--smallness", "100"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["error"]["kind"], "diverged");
    assert!(!v["error"]["trace"].as_array().unwrap().is_empty());
}

#[test]
fn csv_has_a_header_and_crlf_rows() {
    let o = kds(&["subpr", "--where", "radial", "--gamma1", "0.5", "--gamma2", "1", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.split("\r\n").collect();
    assert_eq!(lines[0], "label,eigenvalue,expected");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[8], "");
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let a: f64 = rec[1].parse().unwrap();
        let b: f64 = rec[2].parse().unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn nash_moser_writes_the_residual_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = kds(&["nash-moser", "--problem", "toy-ode", "--data-size", "1e-3", "--trace-csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let iters = v["result"]["trace"]["iterations"].as_u64().unwrap();
    assert!(iters <= 12);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["iteration", "theta", "residual", "stepNorm"]);
    let res: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(res.len() as u64, iters + 1);
    assert!(*res.last().unwrap() < 1e-10);
}

#[test]
fn conformal_data_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("data");
    let o = kds(&["lich-solve", "--H", "0.03", "--lambda", "0", "--grid", "32", "--out", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-10);
    let header = prefix.with_extension("json");
    let h: Value = serde_json::from_str(&std::fs::read_to_string(&header).unwrap()).unwrap();
    assert_eq!(h["gridShape"], serde_json::json!([32, 32, 32]));
    assert_eq!(h["convention"]["hSign"], "positive");
    let bin = std::fs::metadata(prefix.with_extension("bin")).unwrap().len();
    assert_eq!(bin, 8 * 13 * 32 * 32 * 32);
    let c = kds(&["constraint-check", "--input", header.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stdout));
    let r = json(&c);
    assert!(r["result"]["sigmaHamiltonianMax"].as_f64().unwrap() < 1e-8);
    assert!(r["result"]["hamiltonianMax"].as_f64().unwrap() > 1e-6);
}

#[test]
fn failing_check_exits_one_with_report() {
    let o = kds(&["l1check", "--lambda", "3", "--mass", "0.1", "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["result"]["pass"], false);
}

#[test]
fn verify_single_checks_are_sorted_rows() {
    let o = kds(&["verify", "--check", "c08-l1-identity", "--check", "c02-horizons"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rows = v["result"]["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["checkName"].as_str().unwrap()).collect();
    assert_eq!(names, ["c02-horizons", "c08-l1-identity"]);
    for r in rows {
        for key in ["paperAnchor", "status", "measured", "expected", "tolerance"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn every_subcommand_answers() {
    let cases: &[&[&str]] = &[
        &["metric", "--lambda", "3", "--mass", "0.1", "--at", "0,0.5,1.2,0.3"],
        &["ricci-check", "--lambda", "3", "--mass", "0.1", "--a", "0.002", "--at", "0,0.5,1.2,0.3"],
        &["upsilon", "--lambda", "3", "--mass", "0.1", "--bg-mass", "0.11", "--at", "0,0.5,1.2,0.3"],
        &["flow", "--lambda", "3", "--mass", "0.1", "--start", "0,0.5,1.2,0", "--cov", "0,1,0,0", "--until", "1"],
        &["trap", "--lambda", "3", "--mass", "0.1"],
        &["radial-rates", "--lambda", "3", "--mass", "0.1", "--horizon", "minus"],
        &["subpr", "--where", "trapped", "--gamma1", "0.5", "--gamma2", "-0.3"],
        &["ds-indicial", "--op", "boxCPmod", "--n", "3", "--gamma1", "-3/2", "--gamma2", "1"],
        &["ds-verify-resonances"],
        &["ds-scp-scan", "--grid", "6"],
        &["cauchy-data", "--lambda", "3", "--mass", "0.1", "--node", "0.5,1,0", "--node", "0.3,2,1"],
    ];
    for args in cases {
        let o = kds(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
        let v = json(&o);
        assert_eq!(v["command"], args[0]);
        assert!(v["result"].is_object() || v["result"].is_array());
        let c = kds(&[args, &["--csv"][..]].concat());
        assert_eq!(c.status.code(), Some(0));
        assert!(c.stdout.windows(2).any(|w| w == b"\r\n"));
    }
}

#[test]
fn trap_reports_three_m() {
    let v = json(&kds(&["trap", "--lambda", "3", "--mass", "0.1"]));
    assert!((v["result"]["rP"].as_f64().unwrap() - 0.3).abs() < 1e-15);
    assert!(v["result"]["run"]["maxDeviation"].as_f64().unwrap() < 1e-8);
}
