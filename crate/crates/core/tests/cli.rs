mod common;

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use common::run_cli_suite;
use tvb_core::cli::{bundle_doc, c1_doc, fan_document, run, Document, Outcome};
use tvb_core::bundle_ops::tangent;
use tvb_core::complexity_one::from_projection;
use tvb_core::downgrade::ProjectionData;
use tvb_core::examples;

fn tvb(args: &str) -> Outcome {
    run(std::iter::once("tvb").chain(args.split_whitespace()))
}

fn json(args: &str) -> Value {
    let out = tvb(args);
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{}: {} in {:?}", args, e, out.stdout))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tvb-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn exit_codes() {
    assert_eq!(tvb("compat --fan p2").code, 0);
    assert_eq!(tvb("split --fan p1xp1").code, 0);
    assert_eq!(tvb("split --fan p2").code, 1);
    assert_eq!(tvb("obstructions --fan f2").code, 2);
    assert_eq!(tvb("frobnicate --fan p2").code, 2);
    assert_eq!(tvb("sections --fan nowhere").code, 2);
    assert_eq!(tvb("line-bundle --fan p2 --divisor 1,2").code, 2);
    assert_eq!(tvb("downgrade --fan p2 --mu 0,2").code, 2);
    assert_eq!(tvb("--help").code, 0);
    let e = tvb("obstructions --fan f2");
    assert!(e.stderr.contains("not Fano"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tvb");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["split", "--fan", "p1xp1"]), Some(0));
    assert_eq!(code(&["split", "--fan", "p2"]), Some(1));
    assert_eq!(code(&["obstructions", "--fan", "f2"]), Some(2));
    assert_eq!(code(&["bogus"]), Some(2));
    let out = Command::new(bin).args(["sections", "--fan", "p2", "--emit", "json"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["h0"]["total"], 8);
}

#[test]
fn bundle_documents_round_trip() {
    let out = tvb("ops tensor --fan bl1p2 --with canonical --emit json");
    assert_eq!(out.code, 0);
    let doc: Document = serde_json::from_str(&out.stdout).unwrap();
    let path = scratch("tensor.json", &out.stdout);
    let p = path.to_str().unwrap();
    let again: Document = serde_json::from_str(&tvb(&format!("tangent --fan {} --emit json", p)).stdout).unwrap();
    assert_eq!(again.rays, doc.rays);
    let name = doc.bundles.keys().next().unwrap().clone();
    let direct = json("sections --fan bl1p2 --bundle tangent --emit json");
    let via_file = json(&format!("sections --fan {} --bundle tangent --emit json", p));
    assert_eq!(direct["h0"], via_file["h0"]);
    let c = json(&format!("compat --fan {} --bundle {} --emit json", p, name));
    assert_eq!(c["compatible"], true);

    let f = examples::bl1p2();
    let mut d = fan_document(&f);
    d.bundles.insert("t".into(), bundle_doc(&tangent(&f).unwrap()).unwrap());
    let text = serde_json::to_string(&d).unwrap();
    let back: Document = serde_json::from_str(&text).unwrap();
    assert_eq!(back, d);
}

#[test]
fn c1_documents_round_trip() {
    let f = examples::bl1p2();
    let data = from_projection(&f, &ProjectionData::from_i64_rows(2, &[vec![0, 1]]).unwrap()).unwrap();
    let mut d = fan_document(&f);
    d.c1 = Some(c1_doc(&data).unwrap());
    let path = scratch("c1.json", &serde_json::to_string_pretty(&d).unwrap());
    let v = json(&format!("c1-sections --fan {} --emit json", path.to_str().unwrap()));
    assert_eq!(v["h0"]["total"], 6);
    let w = json("c1-sections --fan bl1p2 --mu 0,1 --emit json");
    assert_eq!(v, w);
}

#[test]
fn malformed_documents_exit_with_two() {
    let bad = scratch("bad.json", "{\"schema_version\": 1, \"rank\": 2}");
    assert_eq!(tvb(&format!("validate --fan {}", bad.to_str().unwrap())).code, 2);
    let wrong = scratch("v9.json", "{\"schema_version\": 9, \"rank\": 1, \"rays\": [[1],[-1]], \"cones\": [[0],[1]]}");
    assert_eq!(tvb(&format!("validate --fan {}", wrong.to_str().unwrap())).code, 2);
    let three_lines = scratch(
        "three_lines.json",
        r#"{"schema_version": 1, "rank": 2, "rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]],
            "bundles": {"e": {"rank": 2, "filtrations": {
              "0": [{"level": 0, "basis": [[[1,1],[0,1]],[[0,1],[1,1]]]}, {"level": 1, "basis": [[[1,1],[0,1]]]}],
              "1": [{"level": 0, "basis": [[[1,1],[0,1]],[[0,1],[1,1]]]}, {"level": 1, "basis": [[[0,1],[1,1]]]}],
              "2": [{"level": 0, "basis": [[[1,1],[0,1]],[[0,1],[1,1]]]}, {"level": 1, "basis": [[[1,1],[1,1]]]}]
            }}}}"#,
    );
    let p = three_lines.to_str().unwrap();
    assert_eq!(tvb(&format!("compat --fan {} --bundle e", p)).code, 0);
    assert_eq!(tvb(&format!("split --fan {} --bundle e", p)).code, 1);
}

#[test]
fn ext_axis_totals() {
    let v = json("ext --fan p1xp1 --i 1 --emit json");
    assert_eq!(v["axis_totals"], serde_json::json!([4, 4]));
    assert_eq!(v["ext"]["total"], 6);
    let v = json("ext --fan p2 --i 1 --emit json");
    assert_eq!(v["ext"]["total"], 0);
}

#[test]
fn downgrade_output() {
    let v = json("downgrade --fan bl1p2 --mu 0,1 --bundle tangent --emit json");
    assert_eq!(v["contracted"], serde_json::json!([[1, 0]]));
    let text = tvb("downgrade --fan bl1p2 --mu 0,1 --bundle tangent").stdout;
    assert!(text.contains("quotient ray"));
    let v = json("downgrade --fan p2alt --mu 0,1 --emit json");
    assert_eq!(v["contracted"], serde_json::json!([]));
}

#[test]
fn suite_is_deterministic() {
    let a = run_cli_suite();
    let b = run_cli_suite();
    assert_eq!(a, b);
    for (cmd, code, out) in &a {
        assert!(*code <= 2, "{}", cmd);
        if !cmd.ends_with("json") {
            assert!(!out.is_empty(), "{}", cmd);
            continue;
        }
        serde_json::from_str::<Value>(out).unwrap_or_else(|e| panic!("{}: {}", cmd, e));
    }
}
