//! End-to-end tests of the `qcat` binary.

use std::path::Path;
use std::process::Command;

use assert_cmd::prelude::*;
use predicates::prelude::*;
use serde_json::Value;

fn qcat() -> Command {
    let mut c = Command::cargo_bin("qcat").unwrap();
    for var in ["QCAT_Q", "QCAT_TOL", "QCAT_NMAX", "QCAT_FORMAT"] {
        c.env_remove(var);
    }
    c
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = qcat()
        .args(["--format", "json", "--no-timestamp"])
        .args(args)
        .output()
        .unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, out.status.code().unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// Same tokens, with numeric tokens equal to a relative 1e-12.
fn assert_same_table(a: &str, b: &str, name: &str) {
    let la: Vec<&str> = a.lines().collect();
    let lb: Vec<&str> = b.lines().collect();
    assert_eq!(la.len(), lb.len(), "{name}: line count");
    for (x, y) in la.iter().zip(&lb) {
        let tx: Vec<&str> = x.split([',', '=']).collect();
        let ty: Vec<&str> = y.split([',', '=']).collect();
        assert_eq!(tx.len(), ty.len(), "{name}: {x} vs {y}");
        for (p, q) in tx.iter().zip(&ty) {
            match (p.parse::<f64>(), q.parse::<f64>()) {
                (Ok(u), Ok(v)) => assert!(
                    (u - v).abs() <= 1e-12 * u.abs().max(v.abs()) || (u - v).abs() < 1e-300,
                    "{name}: {u} vs {v} in {x}"
                ),
                _ => assert_eq!(p, q, "{name}: {x} vs {y}"),
            }
        }
    }
}

#[test]
fn goldens_are_current() {
    let dir = tempfile::tempdir().unwrap();
    qcat().arg("--seed-goldens").arg(dir.path()).assert().success();
    let committed = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens");
    let mut n = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let fresh = std::fs::read_to_string(&path).unwrap();
        let old = std::fs::read_to_string(committed.join(&name)).unwrap_or_else(|_| panic!("missing golden {name}"));
        assert_same_table(&fresh, &old, &name);
        n += 1;
    }
    assert_eq!(n, std::fs::read_dir(&committed).unwrap().count());
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--format",
        "csv",
        "--no-timestamp",
        "table",
        "g",
        "--q",
        "0.6",
        "--charges",
        "-1,1",
    ];
    let a = qcat().args(args).output().unwrap();
    let b = qcat().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timestamp_line_is_optional() {
    let base = ["--format", "csv", "scan", "--q", "0.5", "--charge", "1"];
    qcat()
        .args(base)
        .assert()
        .success()
        .stdout(predicate::str::starts_with("# generated_at="));
    qcat()
        .args(base)
        .arg("--no-timestamp")
        .assert()
        .success()
        .stdout(predicate::str::contains("generated_at").not());
}

#[test]
fn normalized_state_dump() {
    let (v, code) = json(&[
        "state", "--q", "0.5", "--charge", "1", "--xi", "0.8", "--parity", "even",
    ]);
    assert_eq!(code, 0);
    assert!(f(&v["meta"]["norm_residual"]) < 1e-12);
    assert!(f(&v["meta"]["pair_lowering_residual"]) < 1e-8);
    let rows = v["rows"].as_array().unwrap();
    // even p only, charge 1 puts the extra quantum in mode 1
    for r in rows {
        let (m, n) = (r["m"].as_i64().unwrap(), r["n"].as_i64().unwrap());
        assert_eq!(m - n, 1);
        assert_eq!(n % 2, 0);
    }
    let norm: f64 = rows.iter().map(|r| f(&r["re"]).powi(2) + f(&r["im"]).powi(2)).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn odd_state_at_zero_is_an_input_error() {
    let out = qcat()
        .args(["state", "--q", "0.5", "--charge", "0", "--xi", "0", "--parity", "odd"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["error"]["kind"], "odd_at_zero");
    assert_eq!(rec["error"]["message"], "odd state undefined at xi=0");
}

#[test]
fn undeformed_state_matches_factorial_series() {
    let (v, code) = json(&[
        "state", "--q", "1.0", "--charge", "2", "--xi", "0.5", "--parity", "full",
    ]);
    assert_eq!(code, 0);
    let fact = |n: i64| (1..=n).map(|k| k as f64).product::<f64>();
    let x: f64 = 0.25;
    let weight = |p: i64| x.powi(p as i32) / (fact(p) * fact(p + 2));
    let norm = (0..60).map(weight).sum::<f64>().sqrt().recip();
    for r in v["rows"].as_array().unwrap() {
        let p = r["n"].as_i64().unwrap();
        assert_eq!(r["m"].as_i64().unwrap(), p + 2);
        let expect = norm * weight(p).sqrt();
        assert!((f(&r["re"]) - expect).abs() <= 1e-12 * expect.max(1e-300), "p={p}");
        assert_eq!(f(&r["im"]), 0.0);
    }
}

#[test]
fn verify_algebra_passes() {
    let (v, code) = json(&["verify", "--suite", "algebra", "--q", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["meta"]["failed"], 0);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_all_passes_without_deformation() {
    let (v, code) = json(&["verify", "--suite", "all", "--q", "1.0"]);
    assert_eq!(v["meta"]["failed"], 0, "{v}");
    assert_eq!(code, 0);
}

#[test]
fn verify_completeness_lists_every_moment() {
    let (v, code) = json(&["verify", "--suite", "completeness", "--q", "0.9"]);
    let rows = v["rows"].as_array().unwrap();
    let moments: Vec<&Value> = rows.iter().filter(|r| r["check"] == "radial_moment").collect();
    assert_eq!(moments.len(), 7 * 9);
    // n = 0, c = 0 is the one moment the q-lattice reproduces exactly
    let first = moments.iter().find(|r| r["case"] == "n=0 c=0").unwrap();
    assert!(f(&first["residual"]) < 1e-10);
    let failed = rows.iter().filter(|r| r["pass"] == false).count();
    assert_eq!(v["meta"]["failed"], failed);
    assert_eq!(code, if failed == 0 { 0 } else { 1 });
}

#[test]
fn reference_scan_reproduces_the_window() {
    let (v, code) = json(&[
        "scan",
        "--q",
        "0.2",
        "--charge",
        "0",
        "--predicate",
        "j-negative",
        "--paper-check",
    ]);
    assert_eq!(code, 0);
    let first = &v["intervals"][0];
    assert!((f(&first["lo"]) - 1.020).abs() < 0.01);
    assert!((f(&first["hi"]) - 5.208).abs() < 0.01);
    let refs = v["reference"].as_array().unwrap();
    assert_eq!(refs.len(), 3);
    assert!(refs
        .iter()
        .all(|r| r["matching"] == "scaled" && f(&r["scaled_deviation"]) <= 0.01));
}

#[test]
fn coth_scan_agrees_with_bessel_scan() {
    let (a, _) = json(&["scan", "--q", "0.5", "--charge", "1", "--predicate", "coth-lt-1"]);
    let (b, _) = json(&["scan", "--q", "0.5", "--charge", "1", "--predicate", "j-negative"]);
    let ia = a["intervals"].as_array().unwrap();
    let ib = b["intervals"].as_array().unwrap();
    assert_eq!(ia.len(), ib.len());
    for (x, y) in ia.iter().zip(ib) {
        assert!((f(&x["lo"]) - f(&y["lo"])).abs() < 1e-3);
        assert!((f(&x["hi"]) - f(&y["hi"])).abs() < 1e-3);
    }
}

#[test]
fn empty_scan_result_is_success() {
    let (v, code) = json(&[
        "scan",
        "--q",
        "0.9",
        "--charge",
        "5",
        "--predicate",
        "j-negative",
        "--hi",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["intervals"], Value::Array(vec![]));
}

#[test]
fn scan_rejects_reversed_range() {
    qcat()
        .args(["scan", "--q", "0.5", "--lo", "3", "--hi", "1"])
        .assert()
        .code(2);
}

#[test]
fn full_states_have_unit_g() {
    let (v, code) = json(&["table", "g", "--qs", "0.2,0.5,0.9", "--parities", "full"]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 5 * 4);
    for r in rows {
        assert!((f(&r["closed"]) - 1.0).abs() < 1e-9);
        assert!((f(&r["fock"]) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn even_state_squeezes_the_first_su11_quadrature() {
    let (v, _) = json(&[
        "table",
        "variances",
        "--q",
        "0.5",
        "--charges",
        "0",
        "--moduli",
        "0.5",
        "--thetas",
        "pi/2",
        "--parities",
        "even",
    ]);
    let rows = v["rows"].as_array().unwrap();
    let x = |i: i64| {
        rows.iter()
            .find(|r| r["family"] == "su11" && r["quadrature"] == i)
            .unwrap()
    };
    assert_eq!(x(1)["squeezed"], true);
    assert_eq!(x(2)["squeezed"], false);
    assert!(rows
        .iter()
        .filter(|r| r["family"] != "su11")
        .all(|r| r["squeezed"] == false));
}

#[test]
fn table_errors_stay_in_the_row() {
    let (v, code) = json(&[
        "table",
        "g",
        "--q",
        "0.5",
        "--charges",
        "0",
        "--moduli",
        "0",
        "--parities",
        "odd",
    ]);
    assert_eq!(code, 0);
    assert!(v["rows"][0]["error"].as_str().unwrap().starts_with("odd_at_zero"));
}

#[test]
fn empty_grid_gives_header_only() {
    qcat()
        .args([
            "--format",
            "csv",
            "--no-timestamp",
            "table",
            "g",
            "--q",
            "0.5",
            "--moduli",
            "",
        ])
        .assert()
        .success()
        .stdout(predicate::str::ends_with(
            "q,charge,xi,theta,parity,closed,fock,rel_diff,antibunched,error\n",
        ));
}

#[test]
fn missing_q_is_a_usage_error() {
    qcat()
        .args(["scan", "--charge", "1"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("\"kind\":\"usage\""));
}

#[test]
fn configuration_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qcat.toml");
    std::fs::write(&cfg, "q = 0.3\nformat = \"json\"\nnmax = 25\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let q_of = |cmd: &mut Command| -> Value {
        let out = cmd
            .args(["--no-timestamp", "--config", cfg, "scan", "--charge", "0"])
            .output()
            .unwrap();
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["meta"].clone()
    };
    let meta = q_of(&mut qcat());
    assert_eq!(meta["q"], 0.3);
    assert_eq!(meta["n_max"], 25);
    let meta = q_of(qcat().env("QCAT_Q", "0.4").env("QCAT_NMAX", "30"));
    assert_eq!(meta["q"], 0.4);
    assert_eq!(meta["n_max"], 30);
    let meta = q_of(qcat().env("QCAT_Q", "0.4").args(["--q", "0.6"]));
    assert_eq!(meta["q"], 0.6);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    qcat()
        .args(["--format", "csv", "--no-timestamp", "--out"])
        .arg(&path)
        .args(["scan", "--q", "0.5", "--charge", "1"])
        .assert()
        .success()
        .stdout("");
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("lo,hi\n1.80"));
}
