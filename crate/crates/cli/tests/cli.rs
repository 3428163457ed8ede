use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use tensor_spectra::field::Field;
use tensor_spectra::tensor::{build_matmul, build_w_tensor, SparseTensor};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tensor-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, t: &SparseTensor) -> PathBuf {
    let p = dir.path().join(name);
    t.save(&p).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gxi_on_w() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", &build_w_tensor(Field::Rational));
    let o = run(&["gxi", "--tensor", s(&w), "--xi", "1,1,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.88988).abs() < 1e-5);
    for key in ["log2_value", "witness", "gap"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let d = run(&["gxi", "--tensor", s(&w), "--xi", "1,1,1", "--route", "dual"]);
    let dv: Value = serde_json::from_str(&stdout(&d)).unwrap();
    assert!((dv["log2_value"].as_f64().unwrap() - v["log2_value"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn cover_on_mm225() {
    let dir = TempDir::new().unwrap();
    let mm = build_matmul(2, 2, 5, Field::Rational).unwrap();
    let p = write(&dir, "mm225.json", &mm);
    let o = run(&["cover", "--tensor", s(&p), "--xi", "0.5,1,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"].as_f64(), Some(9.0));
    assert_eq!(v["witness"]["entries"].as_array().unwrap().len(), mm.nnz());

    let f = run(&["cover", "--tensor", s(&p), "--xi", "1/2,1,1", "--format", "csv"]);
    let text = stdout(&f);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tensor,xi1,xi2,xi3,value,size1,size2,size3,general_ub"));
    assert!(lines.next().unwrap().contains(",0.5,1.0,1.0,9.0,"));
}

#[test]
fn nontight_support_exits_3_with_certificate() {
    let dir = TempDir::new().unwrap();
    let entries = [[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]]
        .into_iter()
        .map(|i| (i, Field::Rational.one()))
        .collect::<Vec<_>>();
    let t = SparseTensor::from_entries([2, 2, 2], Field::Rational, entries).unwrap();
    let p = write(&dir, "nontight.json", &t);
    let o = run(&["tight", "--tensor", s(&p)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("definitely not tight"));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "not_tight");
    assert_eq!(v["verdict"], "definitely not tight");
    for key in ["axis", "a", "b"] {
        assert!(v[key].as_u64().is_some());
    }
}

#[test]
fn tight_support_has_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "w.json", &build_w_tensor(Field::Rational));
    let o = run(&["tight", "--tensor", s(&p)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "tight");
    for key in ["u1", "u2", "u3"] {
        assert_eq!(v["witness"][key].as_array().unwrap().len(), 2);
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "mm222.json", &build_matmul(2, 2, 2, Field::Rational).unwrap());
    let args = ["zeta", "--tensor", s(&p), "--theta", "1/3,1/3,1/3", "--theta", "1/2,1/2,0"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let out = dir.path().join("z.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&out)]);
    let c = run(&with_out);
    assert!(c.status.success() && c.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);

    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    for item in v.as_array().unwrap() {
        assert!((item["result"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-5);
    }
}

#[test]
fn input_errors_exit_2_with_distinct_messages() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dims":[2,2],"field":"rational","entries":[]}"#).unwrap();
    let good = write(&dir, "w.json", &build_w_tensor(Field::Rational));

    let malformed = run(&["gxi", "--tensor", s(&bad), "--xi", "1,1,1"]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(stderr(&malformed).contains("malformed tensor file"));

    let weighting = run(&["gxi", "--tensor", s(&good), "--xi", "0.5,0.5,0.5"]);
    assert_eq!(weighting.status.code(), Some(2));
    assert!(stderr(&weighting).contains("largest entry must equal 1"));

    let theta = run(&["zeta", "--tensor", s(&good), "--theta", "1/2,1/2,1/2"]);
    assert_eq!(theta.status.code(), Some(2));
    assert!(stderr(&theta).contains("sum to 1"));

    let flag = run(&["gxi", "--tensor", s(&good), "--xi", "1,1,1", "--nope"]);
    assert_eq!(flag.status.code(), Some(2));
    assert!(stderr(&flag).contains("unexpected argument"));

    let sub = run(&["frobnicate"]);
    assert_eq!(sub.status.code(), Some(2));

    let tol = run(&["gxi", "--tensor", s(&good), "--xi", "1,1,1", "--tol", "0"]);
    assert_eq!(tol.status.code(), Some(2));

    let threads = bin().args(["examples"]).env("TENSOR_SPECTRA_THREADS", "0").output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn budget_and_infeasibility_exit_3() {
    let dir = TempDir::new().unwrap();
    let mm = write(&dir, "mm225.json", &build_matmul(2, 2, 5, Field::Rational).unwrap());
    let o = run(&["weights", "--tensor", s(&mm), "--k", "6", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("work budget exceeded"));

    let w = write(&dir, "w.json", &build_w_tensor(Field::Rational));
    let o = run(&["semistable", "--tensor", s(&w)]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "infeasible");

    let o = run(&["semistable", "--tensor", s(&mm)]);
    assert!(o.status.success());
}

#[test]
fn csv_outputs_have_headers() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", &build_w_tensor(Field::Rational));

    let weights = stdout(&run(&["weights", "--tensor", s(&w), "--k", "1,2,4"]));
    assert_eq!(weights.lines().next(), Some("k,log2M,log2M/k,polytope_log2"));
    assert_eq!(weights.lines().count(), 4);

    let rep = stdout(&run(&["repdims", "--k", "5"]));
    assert!(rep.starts_with("lambda,specht_dim,"));
    assert_eq!(rep.lines().count(), 1 + 7);

    let ex = stdout(&run(&["examples"]));
    assert!(ex.starts_with("tensor,quantity,parameter,value\n"));
    assert!(ex.contains("\"<2,2,5>\",cover,\"(0.5,1,1)\",9.000000"));
    assert!(ex.contains("W,gxi,\"(1,1,1)\",1.889882"));

    let info = stdout(&run(&["info", "--tensor", s(&w), "--format", "csv"]));
    assert!(info.starts_with("tensor,dims,field,nnz,"));
    assert!(info.contains(",2 2 2,rational,3,2,2,2,2,tight,false"));
}

#[test]
fn minentropy_and_field_on_w() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", &build_w_tensor(Field::Rational));
    let m: Value = serde_json::from_slice(&run(&["minentropy", "--tensor", s(&w), "--xi", "1,1,1"]).stdout).unwrap();
    assert!((m["value"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert_eq!(m["domain"], "torus analog");
    let f = run(&["field", "--tensor", s(&w), "--theta", "1/3,1/3,1/3", "--resolution", "8"]);
    assert!(f.status.success(), "{}", stderr(&f));
    let v: Value = serde_json::from_slice(&f.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.889882).abs() < 1e-5);
}

#[test]
fn dual_grid_round_trip() {
    let dir = TempDir::new().unwrap();
    let r = 4;
    let mut text = String::from("theta1,theta2,theta3,value\n");
    for a in 0..=r {
        for b in 0..=r - a {
            text.push_str(&format!("{a}/{r},{b}/{r},{}/{r},1.5\n", r - a - b));
        }
    }
    let f = dir.path().join("f.csv");
    std::fs::write(&f, text).unwrap();
    let g = dir.path().join("g.csv");
    let o = run(&["dual", "--grid", s(&f), "--to", "g", "--out", s(&g)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let gtext = std::fs::read_to_string(&g).unwrap();
    assert!(gtext.starts_with("xi1,xi2,xi3,value\n"));
    // a constant c on Θ becomes c / ⟨θ, ξ⟩ maximized, which is c at ξ = (1,1,1)
    let top = gtext.lines().find(|l| l.starts_with("1.0,1.0,1.0,")).unwrap();
    assert!((top.rsplit(',').next().unwrap().parse::<f64>().unwrap() - 1.5).abs() < 1e-9);

    let back = stdout(&run(&["dual", "--grid", s(&g), "--to", "f"]));
    let rows: Vec<&str> = back.lines().skip(1).collect();
    assert_eq!(rows.len(), 15);
    for row in rows {
        let v: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - 1.5).abs() < 1e-6, "{row}");
    }

    let wrong = run(&["dual", "--grid", s(&g), "--to", "g"]);
    assert_eq!(wrong.status.code(), Some(2));
}
