use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jbh::horo_v::BoundaryDatumV;
use jbh::json::to_json;
use jbh::metric_d::BoundaryDatumD;
use jbh::random::{gaussian_matrix, seeded_rng};
use jbh::triple::{Element, TripleSpace};
use num_complex::Complex64;
use serde_json::Value;

fn jbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jbh")).args(args).output().expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

struct Files(tempfile::TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn put<T: serde::Serialize>(&self, name: &str, v: &T) -> PathBuf {
        self.write(name, &to_json(v).unwrap())
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_diagonal() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"blocks":[{"re":[[0.9,0],[0,0.3]]}]}"#);
    let sp = f.write("s.json", r#"{"blocks":[{"p":2,"q":2}]}"#);
    let o = jbh(&["decompose", "--input", s(&x), "--space", s(&sp)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let c: Vec<f64> = v["entries"].as_array().unwrap().iter().map(|e| e["coeff"].as_f64().unwrap()).collect();
    assert_eq!(c, vec![0.9, 0.3]);
}

#[test]
fn decompose_zero() {
    let f = Files::new();
    let x = f.put("x.json", &Element::zeros(&TripleSpace::matrix(2, 3).unwrap()));
    let o = jbh(&["decompose", "--input", s(&x)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json_out(&o)["entries"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_matches_singular_values() {
    let f = Files::new();
    let mut rng = seeded_rng(5);
    let m = gaussian_matrix(&mut rng, 3, 3);
    let x = f.put("x.json", &Element::from_matrix(m.clone()));
    let o = jbh(&["decompose", "--input", s(&x)]);
    assert_eq!(o.status.code(), Some(0));
    let got: Vec<f64> =
        json_out(&o)["entries"].as_array().unwrap().iter().map(|e| e["coeff"].as_f64().unwrap()).collect();
    let mut want: Vec<f64> = nalgebra::DMatrix::<Complex64>::from(m).singular_values().iter().copied().collect();
    want.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn parse_errors_exit_two() {
    let f = Files::new();
    let bad = f.write("bad.json", "{not json");
    let shape = f.write("shape.json", r#"{"space":{"blocks":[{"p":2,"q":2}]},"blocks":[{"re":[[1.0]]}]}"#);
    let other = f.write("s.json", r#"{"blocks":[{"p":3,"q":3}]}"#);
    let ok = f.put("ok.json", &Element::zeros(&TripleSpace::matrix(2, 2).unwrap()));
    for args in [
        vec!["decompose", "--input", s(&bad)],
        vec!["decompose", "--input", s(&shape)],
        vec!["decompose", "--input", s(&ok), "--space", s(&other)],
        vec!["decompose", "--input", "/nonexistent/file.json"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
    ] {
        let o = jbh(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn dist_on_disc() {
    let f = Files::new();
    let a = f.put("a.json", &Element::scalar(Complex64::new(0.0, 0.0)));
    let b = f.put("b.json", &Element::scalar(Complex64::new(0.5, 0.0)));
    let o = jbh(&["dist", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json_out(&o)["rho"].as_f64().unwrap() - 0.5f64.atanh()).abs() < 1e-15);
    let out = f.put("c.json", &Element::scalar(Complex64::new(1.5, 0.0)));
    assert_eq!(jbh(&["dist", s(&a), s(&out)]).status.code(), Some(2));
}

fn disc_datum() -> BoundaryDatumD {
    BoundaryDatumD::new(vec![Element::scalar(Complex64::new(1.0, 0.0))], vec![1.0]).unwrap()
}

#[test]
fn horo_eval_d() {
    let f = Files::new();
    let d = f.put("d.json", &disc_datum());
    let zero = f.put("z0.json", &Element::scalar(Complex64::new(0.0, 0.0)));
    for m in ["induced_norm", "extrapolate"] {
        let o = jbh(&["horo", "eval-d", "--datum", s(&d), "--at", s(&zero), "--method", m]);
        assert_eq!(o.status.code(), Some(0));
        assert!(json_out(&o)["value"].as_f64().unwrap().abs() < 1e-12);
    }
    let z = Complex64::new(0.3, -0.4);
    let at = f.put("z.json", &Element::scalar(z));
    let exact = 0.5 * ((Complex64::new(1.0, 0.0) - z).norm_sqr() / (1.0 - z.norm_sqr())).ln();
    let o = jbh(&["horo", "eval-d", "--datum", s(&d), "--at", s(&at), "--method", "extrapolate"]);
    let v = json_out(&o);
    assert!((v["value"].as_f64().unwrap() - exact).abs() < 1e-8);
    assert!(v["extrapolation"]["converged"].as_bool().unwrap());
    assert!(!v["ladder"].as_array().unwrap().is_empty());
}

#[test]
fn nonconvergence_exits_three() {
    let f = Files::new();
    let d = f.put("d.json", &disc_datum());
    let at = f.put("z.json", &Element::scalar(Complex64::new(0.3, -0.4)));
    let o =
        jbh(&["horo", "eval-d", "--datum", s(&d), "--at", s(&at), "--method", "extrapolate", "--kmax", "64", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(json_out(&o)["value"].is_number());
    assert_eq!(jbh(&["horo", "eval-d", "--datum", s(&d), "--at", s(&at), "--kmax", "16"]).status.code(), Some(2));
}

fn frame22() -> Vec<Element> {
    let sp = TripleSpace::matrix(2, 2).unwrap();
    vec![Element::unit(&sp, 0, 0, 0), Element::unit(&sp, 0, 1, 1)]
}

#[test]
fn horo_eval_v() {
    let f = Files::new();
    let h = f.put("h.json", &BoundaryDatumV::new(frame22(), vec![0.0, 1.0]).unwrap());
    let x = f.write("x.json", r#"{"blocks":[{"re":[[2,0],[0,1]]}]}"#);
    let sp = f.write("s.json", r#"{"blocks":[{"p":2,"q":2}]}"#);
    let closed = json_out(&jbh(&["horo", "eval-v", "--datum", s(&h), "--at", s(&x), "--space", s(&sp)]));
    let lim = jbh(&["horo", "eval-v", "--datum", s(&h), "--at", s(&x), "--space", s(&sp), "--method", "extrapolate"]);
    assert_eq!(lim.status.code(), Some(0));
    let a = closed["value"].as_f64().unwrap();
    assert!((a + 2.0).abs() < 1e-12, "{a}");
    assert!((json_out(&lim)["value"].as_f64().unwrap() - a).abs() < 1e-4);
}

#[test]
fn exp_extend_weights() {
    let f = Files::new();
    let h = f.put("h.json", &BoundaryDatumV::new(frame22(), vec![0.0, 1.0]).unwrap());
    let o = jbh(&["exp-extend", "--datum", s(&h)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let l: Vec<f64> = v["lambda"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(l[0], 1.0);
    assert!((l[1] - 0.36787944117144233).abs() < 1e-16);
    let d = f.write("d.json", &serde_json::to_string(&v).unwrap());
    let back = json_out(&jbh(&["exp-extend", "--datum", s(&d)]));
    assert!((back["alpha"][1].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn detour_both_kinds() {
    let f = Files::new();
    let fr = frame22();
    let a = f.put("a.json", &BoundaryDatumV::new(fr.clone(), vec![0.0, 1.0]).unwrap());
    let b = f.put("b.json", &BoundaryDatumV::new(fr.clone(), vec![0.0, 2.0]).unwrap());
    let c = f.put("c.json", &BoundaryDatumV::new(vec![fr[0].clone()], vec![0.0]).unwrap());
    let v = json_out(&jbh(&["detour", s(&a), s(&b)]));
    assert_eq!(v["kind"], "v");
    assert!((v["distance"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let v = json_out(&jbh(&["detour", s(&a), s(&c)]));
    assert_eq!(v["distance"], "inf");
    assert_eq!(v["same_part"], false);
    let e = std::f64::consts::E;
    let da = f.put("da.json", &BoundaryDatumD::new(fr.clone(), vec![1.0, 1.0 / e]).unwrap());
    let db = f.put("db.json", &BoundaryDatumD::new(fr, vec![1.0, 1.0 / (e * e)]).unwrap());
    for m in ["closed", "limit"] {
        let v = json_out(&jbh(&["detour", s(&da), s(&db), "--method", m]));
        assert_eq!(v["kind"], "d");
        assert!((v["distance"].as_f64().unwrap() - 1.0).abs() < 1e-5, "{m}: {v}");
    }
    assert_eq!(jbh(&["detour", s(&a), s(&da)]).status.code(), Some(2));
}

#[test]
fn phi_commands() {
    let f = Files::new();
    let h = f.put("h.json", &BoundaryDatumV::new(frame22(), vec![0.0, 1.0]).unwrap());
    let v = json_out(&jbh(&["phi", "--datum", s(&h)]));
    assert_eq!(v["boundary"], true);
    assert!((v["dual_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let p = f.write("p.json", &serde_json::to_string(&v).unwrap());
    let back = json_out(&jbh(&["phi", "--input", s(&p), "--preimage"]));
    assert!((back["alpha"][1].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let x = f.write("x.json", r#"{"blocks":[{"re":[[0.8,0],[0,0]]}]}"#);
    let sp = f.write("s.json", r#"{"blocks":[{"p":2,"q":2}]}"#);
    let v = json_out(&jbh(&["phi", "--input", s(&x), "--space", s(&sp)]));
    assert_eq!(v["boundary"], false);
    assert!(v["dual_norm"].as_f64().unwrap() < 1.0);
}

#[test]
fn verify_axioms_report() {
    let o = jbh(&["verify", "--suite", "axioms", "--trials", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["schema"], "jbh-report/1");
    assert_eq!(v["passed"], true);
    assert!(v["runtime_seconds"].is_number());
    assert!(v["timestamp_unix"].is_number());
    let jordan = v["properties"].as_array().unwrap().iter().find(|p| p["name"] == "jordan_identity").unwrap();
    assert!(jordan["max_residual"].as_f64().unwrap() < 1e-11);
    assert!(jordan["p95_residual"].is_number());
}

#[test]
fn verify_horo_v_report() {
    let v = json_out(&jbh(&["verify", "--suite", "horo-v", "--trials", "20", "--seed", "1", "--no-timestamp"]));
    assert_eq!(v["passed"], true);
    assert!(v.get("runtime_seconds").is_none());
    let gap = v["properties"].as_array().unwrap().iter().find(|p| p["name"] == "closed_vs_extrapolated_v").unwrap();
    assert!(gap["max_residual"].as_f64().unwrap() < 1e-4);
}

#[test]
fn verify_failure_exits_one() {
    let o = jbh(&["verify", "--suite", "axioms", "--trials", "2", "--tol", "0", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_out(&o)["passed"], false);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "peirce", "--trials", "5", "--seed", "42", "--no-timestamp"];
    assert_eq!(jbh(&args).stdout, jbh(&args).stdout);
}
