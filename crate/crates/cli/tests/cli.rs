use std::process::Command as Process;

use clap::Parser;
use commfiber::caps::Caps;
use commfiber::montecarlo::MCEstimate;
use commfiber_cli::{execute, run, Cli, Report, Table};
use serde_json::Value;

fn args(line: &[&str]) -> Vec<String> {
    std::iter::once("commfiber").chain(line.iter().copied()).map(String::from).collect()
}

fn invoke(line: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args(line), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn report(line: &[&str]) -> Report {
    let cli = Cli::try_parse_from(args(line)).unwrap();
    execute(&cli.command, &Caps::default()).unwrap()
}

#[test]
fn finite_frobenius_of_s3() {
    let (code, out, _) = invoke(&["finite-frobenius", "--group", "S3"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    let pairs: Vec<(&str, &str, &str)> = rows.iter().map(|r| (r[1].as_str(), r[3].as_str(), r[4].as_str())).collect();
    assert_eq!(pairs, vec![("()", "18", "18"), ("(1 2)", "0", "0"), ("(0 1 2)", "9", "9")]);
}

#[test]
fn torus_sum_at_identity_is_one() {
    let (code, out, _) = invoke(&["torus-sum", "--theta", "0", "--depth", "10"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 11);
    for (n, r) in rows.iter().enumerate() {
        assert_eq!(r[0], n.to_string());
        assert_eq!(r[2].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn sun_sum_at_identity() {
    for line in [&["sun-sum", "--N", "2", "--angles", "0,0", "--depth", "9"][..], &["sun", "sum", "--N", "2", "--angles", "0,0", "--depth", "9"]] {
        let (code, out, _) = invoke(line);
        assert_eq!(code, 0);
        let rows = csv_rows(&out);
        let last = rows.last().unwrap();
        assert_eq!(last[0], "9");
        assert!((last[4].parse::<f64>().unwrap() - 0.01).abs() < 1e-15);
    }
}

#[test]
fn json_round_trips_field_for_field() {
    let table = report(&["fc-measure", "--group", r#"{"kind":"product","factors":["Q8","T1"]}"#, "--depth", "20", "--stride", "5"]);
    let Report::Table(t) = &table else { panic!() };
    let back: Table = serde_json::from_str(&table.to_json()).unwrap();
    assert_eq!(&back, t);
    assert_eq!(t.rows.last().unwrap()[2].as_f64().unwrap(), 0.625);

    let est = report(&["mc-commprob", "--group", "O2", "--samples", "5000", "--seed", "42"]);
    let Report::Estimate(e) = &est else { panic!() };
    let back: MCEstimate = serde_json::from_str(&est.to_json()).unwrap();
    assert_eq!(&back, e);
    let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, Value>>(&est.to_json()).unwrap().keys().cloned().collect();
    for k in ["estimate", "std_error", "samples", "hits", "seed", "epsilon", "metric", "group_digest", "chunk_size", "wall_time"] {
        assert!(keys.contains(&k.to_string()), "{k}");
    }
}

fn without_wall_time(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    if let Some(m) = v.as_object_mut() {
        m.remove("wall_time");
        if let (Some(cols), Some(rows)) = (m.get("columns").cloned(), m.get_mut("rows")) {
            if let Some(i) = cols.as_array().unwrap().iter().position(|c| c == "wall_time") {
                for r in rows.as_array_mut().unwrap() {
                    r.as_array_mut().unwrap()[i] = Value::Null;
                }
            }
        }
    }
    v
}

#[test]
fn binary_output_is_deterministic_apart_from_wall_time() {
    let bin = env!("CARGO_BIN_EXE_commfiber");
    let go = |extra: &[&str], threads: &str| {
        let out = Process::new(bin).args(extra).args(["--format", "json", "--threads", threads]).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let commprob = ["mc-commprob", "--group", "SU2", "--samples", "20000", "--seed", "7", "--epsilon", "0.3"];
    let ball = ["mc-ball", "--group", "S3", "--samples", "20000", "--seed", "3", "--epsilon", "0.5"];
    for cmd in [&commprob[..], &ball[..]] {
        let a = go(cmd, "1");
        let b = go(cmd, "1");
        let c = go(cmd, "3");
        assert_eq!(without_wall_time(&a), without_wall_time(&b));
        assert_eq!(without_wall_time(&a), without_wall_time(&c));
    }
    let sums = ["sun-sum", "--N", "3", "--angles", "0.4, -1.3, 0.9", "--depth", "12"];
    assert_eq!(go(&sums, "1"), go(&sums, "4"));
}

#[test]
fn exit_codes_separate_bad_input_from_failed_computation() {
    assert_eq!(invoke(&["finite-frobenius", "--group", "S9"]).0, 1);
    assert_eq!(invoke(&["sun-sum", "--N", "2", "--angles", "0.3,0.3", "--depth", "2"]).0, 1);
    assert_eq!(invoke(&["mc-commprob", "--group", "S3", "--samples", "0"]).0, 1);
    assert_eq!(invoke(&["validate", "--group", "S3", "--point", "(0 1"]).0, 1);
    assert_eq!(invoke(&["no-such-command"]).0, 1);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("COMMFIBER_PAIR_CAP"));

    let bin = env!("CARGO_BIN_EXE_commfiber");
    let out = Process::new(bin)
        .args(["finite-frobenius", "--group", "S4"])
        .env("COMMFIBER_PAIR_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn open_fc_measure_and_witness() {
    let (code, out, _) = invoke(&["openfc-measure", "--group", "O2", "--witness-for", "1/5 pi;()", "--trials", "10"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows[0][5], "1/4");
    assert_eq!(rows[0][9], rows[0][10]);
}

#[test]
fn validate_checks_finite_tables_and_points() {
    let Report::Table(t) = report(&["validate", "--group", "D4"]) else { panic!() };
    assert!(t.rows.iter().all(|r| r[1] == Value::Bool(true)));
    let Report::Table(t) = report(&["validate", "--group", "SU3", "--point", "1/3 pi, 1/3 pi, -2/3 pi", "--matrix-tol", "1e-12"]) else {
        panic!()
    };
    assert_eq!(t.rows.last().unwrap()[0], "point");
}
