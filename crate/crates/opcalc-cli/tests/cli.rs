use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use opcalc::bar::bar;
use opcalc::chaincore::Field;
use opcalc::koszul::koszul_dual_operad;
use opcalc::operad::{com_operad, free_bimodule, free_left_module, free_right_module, module_from_simplicial_set, smash_comodule, Action, LeftModule, RightModule, SimplicialSet};
use opcalc::random::{random_graded_seq, random_seq, rng};
use opcalc_cli::schema::*;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("opcalc-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn opcalc(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_opcalc")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn same_action(a: &Action, b: &Action) -> bool {
    a.shapes() == b.shapes() && a.shapes().iter().all(|(k, ns)| a.shape_matrix(*k, ns) == b.shape_matrix(*k, ns))
}

#[test]
fn sequences_round_trip() {
    for seed in 0..4 {
        let s = random_seq(&mut rng(seed), Field::Q, 4, 2, false);
        let v = symseq_json(&s, "A");
        let back = parse_symseq(&v).unwrap();
        assert_eq!(back, s);
        assert_eq!(render(&symseq_json(&back, "A")), render(&v));
    }
    let f7 = Field::fp(7).unwrap();
    let s = random_seq(&mut rng(9), f7, 3, 2, false);
    assert_eq!(parse_symseq(&symseq_json(&s, "A")).unwrap(), s);
}

#[test]
fn operads_and_modules_round_trip() {
    let p = Arc::new(com_operad(Field::Q, 4));
    let kp = koszul_dual_operad(&Arc::new(com_operad(Field::Q, 3))).unwrap();
    for o in [p.clone(), kp] {
        let v = operad_json(&o);
        let back = parse_operad(&v).unwrap();
        assert_eq!(back.seq, o.seq);
        assert!(same_action(&back.comp, &o.comp));
        assert_eq!(render(&operad_json(&back)), render(&v));
    }
    let a = random_graded_seq(&mut rng(3), Field::Q, 4, 2, false);
    let s1 = SimplicialSet::named("s1-minimal").unwrap();
    for r in [free_right_module(&a, &p).unwrap(), RightModule::unit(&p), module_from_simplicial_set(&s1, &p).unwrap()] {
        let v = right_module_json(&r);
        let back = parse_right_module(&v, &p).unwrap();
        assert!(back.seq == r.seq && same_action(&back.act, &r.act));
        assert_eq!(render(&right_module_json(&back)), render(&v));
    }
    for l in [free_left_module(&a, &p).unwrap(), LeftModule::from_operad(&p), smash_comodule(&s1, &p).unwrap()] {
        let v = left_module_json(&l);
        let back = parse_left_module(&v, &p).unwrap();
        assert!(back.seq == l.seq && same_action(&back.act, &l.act));
    }
    let b = free_bimodule(&random_graded_seq(&mut rng(4), Field::Q, 3, 1, false), &Arc::new(com_operad(Field::Q, 3))).unwrap();
    let v = bimodule_json(&b);
    let back = parse_bimodule(&v, &b.left.operad).unwrap();
    assert!(same_action(&back.left.act, &b.left.act) && same_action(&back.right.act, &b.right.act));
}

#[test]
fn bars_keep_basis_order_and_tiers() {
    let p = Arc::new(com_operad(Field::Q, 3));
    let b = bar(&RightModule::from_operad(&p), &p, &LeftModule::unit(&p)).unwrap();
    let v = bar_json(&b);
    assert_eq!(v["kind"], "bar");
    assert_eq!(parse_symseq(&v).unwrap(), b.seq);
    assert_eq!(v["tiers"]["3"].as_array().unwrap().len(), b.seq.dim(3));
}

#[test]
fn schema_errors_name_the_path() {
    let p = Arc::new(com_operad(Field::Q, 2));
    let good = operad_json(&p);
    let mut v = good.clone();
    v["components"]["2"]["differential"] = serde_json::json!([[0, 0, "x/2"]]);
    assert_eq!(parse_operad(&v).unwrap_err().path, "$.components.2.differential[0][2]");
    let mut v = good.clone();
    v["components"]["2"]["action"]["s3"] = serde_json::json!([]);
    assert_eq!(parse_operad(&v).unwrap_err().path, "$.components.2.action.s3");
    let mut v = good.clone();
    v.as_object_mut().unwrap().remove("arity_max");
    assert_eq!(parse_operad(&v).unwrap_err().msg, "missing key \"arity_max\"");
    let mut v = good.clone();
    v["kind"] = Value::from("bar");
    assert_eq!(parse_operad(&v).unwrap_err().path, "$.kind");
    let mut v = good;
    v["structure"]["2;1,1"] = serde_json::json!([[0, 1, "1/1"]]);
    assert_eq!(parse_operad(&v).unwrap_err().path, "$.structure.2;1,1[0]");
    assert!(parse_right_module(&operad_json(&p), &p).is_err());
}

#[test]
fn compose_reproduces_bell_numbers() {
    let com = fixture("com.json");
    let (code, out) = opcalc(&["compose", com.to_str().unwrap(), com.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let dims: Vec<usize> = (1..=4).map(|n| v["components"][n.to_string()]["basis"].as_array().unwrap().len()).collect();
    assert_eq!(dims, vec![1, 2, 5, 15]);
}

#[test]
fn bar_of_com_has_lie_homology() {
    let (code, out) = opcalc(&["bar", "--operad", fixture("com.json").to_str().unwrap(), "--homology"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    for (n, f) in [(2, 1), (3, 2), (4, 6)] {
        assert_eq!(v["homology"][n.to_string()][(n - 1).to_string()], f);
    }
    let (code, out) = opcalc(&["bar", "--operad", fixture("com.json").to_str().unwrap(), "--homology", "--degree-max", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["homology"]["4"], serde_json::json!({}));
}

#[test]
fn koszul_of_the_fixture_matches_the_shipped_dual() {
    let dir = scratch("koszul");
    let out = dir.join("k.json");
    let (code, _) = opcalc(&["koszul", fixture("com.json").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&std::fs::read_to_string(fixture("derivatives-of-identity.json")).unwrap()).unwrap();
    assert_eq!(a["components"], b["components"]);
    assert_eq!(a["structure"], b["structure"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["example", "mapping-space", "--space", "s1-minimal", "--arity-max", "3"];
    let (c1, a) = opcalc(&args);
    let (c2, b) = opcalc(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (_, c) = opcalc(&["--jobs", "1", "example", "mapping-space", "--space", "s1-minimal", "--arity-max", "3"]);
    assert_eq!(a, c);
}

#[test]
fn modules_through_files() {
    let dir = scratch("modules");
    let p = Arc::new(com_operad(Field::Q, 3));
    let pf = dir.join("p.json");
    let rf = dir.join("r.json");
    let nf = dir.join("n.json");
    std::fs::write(&pf, render(&operad_json(&p))).unwrap();
    std::fs::write(&rf, render(&right_module_json(&RightModule::from_operad(&p)))).unwrap();
    std::fs::write(&nf, render(&right_module_json(&RightModule::from_operad(&p)))).unwrap();
    let (code, out) = opcalc(&["ext-right", "--module", rf.to_str().unwrap(), "--operad", pf.to_str().unwrap(), "--target", nf.to_str().unwrap(), "--homology"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["homology"], serde_json::json!({"0": 1}));
    let (code, out) = opcalc(&["gamma", "--right", rf.to_str().unwrap(), "--operad", pf.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["passed"], true);
    let (code, out) = opcalc(&["koszul-module", "--module", rf.to_str().unwrap(), "--operad", pf.to_str().unwrap(), "--side", "right"]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["side"], "right");
    // a right module where a left one is expected
    let (code, _) = opcalc(&["koszul-module", "--module", rf.to_str().unwrap(), "--operad", pf.to_str().unwrap(), "--side", "left"]);
    assert_eq!(code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(opcalc(&["verify", "all"]).0, 0);
    assert_eq!(opcalc(&["verify", "no-such-suite"]).0, 2);
    assert_eq!(opcalc(&["compose", "/nonexistent.json", "/nonexistent.json"]).0, 2);
    assert_eq!(opcalc(&["example", "mapping-space", "--field", "F4"]).0, 2);
    assert_eq!(opcalc(&["bogus"]).0, 2);
    let (code, out) = opcalc(&["fa-di-bruno", fixture("com.json").to_str().unwrap(), fixture("com.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["passed"], true);
}
