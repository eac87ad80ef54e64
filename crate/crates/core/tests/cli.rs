use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use panache::cli::format::{ext_from_value, genext_from_value, load_ext, load_genext, load_object, typed, Ctx, ObjectFile};
use serde_json::{json, Value};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn panache(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panache")).args(args).current_dir(examples()).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = panache(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn stderr_diagnostic(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().next().expect("a diagnostic line")).expect("diagnostic is JSON")
}

fn schema_for(def: Option<&str>) -> JSONSchema {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema.json")).unwrap();
    let mut schema: Value = serde_json::from_str(&text).unwrap();
    if let Some(d) = def {
        schema["anyOf"] = json!([{ "$ref": format!("#/$defs/{d}") }]);
    }
    JSONSchema::options().with_draft(Draft::Draft202012).compile(&schema).expect("schema compiles")
}

#[test]
fn validate_accepts_a_valid_object() {
    let r = report(&["validate", "x.json"]);
    assert_eq!(r["command"], "validate");
    assert_eq!(r["result"]["valid"], true);
    assert_eq!(r["result"]["dim"], 3);
}

#[test]
fn mismatched_signatures_are_a_domain_error() {
    let out = panache(&["ext1", "--of", "a3.json", "--by", "unit_f3.json"]);
    assert_eq!(out.status.code(), Some(1));
    let d = stderr_diagnostic(&out);
    assert_eq!(d["kind"], "domain");
    assert_eq!(d["message"], "signature mismatch");
    assert!(out.stdout.is_empty());
}

#[test]
fn inhomogeneous_operators_are_rejected() {
    let out = panache(&["validate", "inhomogeneous.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_diagnostic(&out)["message"].as_str().unwrap().contains("not homogeneous"));
}

#[test]
fn malformed_input_reports_a_path() {
    let out = panache(&["validate", "malformed.json"]);
    assert_eq!(out.status.code(), Some(2));
    let d = stderr_diagnostic(&out);
    assert_eq!(d["kind"], "input");
    assert_eq!(d["path"], "$.support.-1");

    let out = panache(&["validate", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = scratch("bad_block.json");
    std::fs::write(&bad, r#"{"frame": ["a1.json"], "level": 1, "form": "blocks", "blocks": {"1;2": {}}}"#).unwrap();
    let out = panache(&["genext", "validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_commands_exit_with_usage_status() {
    assert_eq!(panache(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(panache(&["oracle", "--p", "2", "--k", "3", "--weights", "-2,-1,0", "--levels", "0..3"]).status.code(), Some(2));
}

#[test]
fn mt_demo_reports_galois_dimension_seven() {
    let out = scratch("mt_report.json");
    let r = panache(&["mt-demo", "--a", "3", "--c", "5", "--label", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["galois_dimension"], 7);
    assert_eq!(v["result"]["u_radical_dim"], 6);
    assert_eq!(v["result"]["level3_fiber_dim"], 1);
    assert_eq!(v["seed"], 0);
    assert!(schema_for(Some("mtDemoResult")).is_valid(&v["result"]));
}

#[test]
fn same_seed_gives_identical_bytes() {
    for args in [
        vec!["--seed", "7", "genext", "equiv", "chain2.json", "chain2.json", "--mode", "iso"],
        vec!["--seed", "7", "oracle", "--p", "2", "--k", "3", "--weights", "-2,-1,0", "--gens", "-1,-2", "--levels", "1..2"],
        vec!["--seed", "7", "mt-demo", "--a", "5", "--c", "3", "--label", "7"],
    ] {
        let a = panache(&args);
        let b = panache(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let r = report(&["--seed", "7", "genext", "equiv", "chain1.json", "chain1.json", "--mode", "iso"]);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["result"]["equivalent"], true);
}

#[test]
fn embedded_inputs_round_trip() {
    let ctx = Ctx::root(Path::new("<report>"));
    let r = report(&["validate", "x.json"]);
    let x = typed::<ObjectFile>(r["inputs"]["object"].clone(), &ctx).unwrap().to_rep(&ctx).unwrap();
    assert_eq!(x, load_object(&examples().join("x.json")).unwrap());

    let r = report(&["push", "--ext", "l.json", "--map", "scale2.json"]);
    let e = ext_from_value(r["inputs"]["ext"].clone(), &ctx).unwrap();
    assert_eq!(e, load_ext(&examples().join("l.json")).unwrap());
    assert_eq!(panache(&["baer", "l.json", "e13.json"]).status.code(), Some(1));

    let r = report(&["blend", "--L", "l.json", "--N", "n.json"]);
    for (key, file) in [("L", "l.json"), ("N", "n.json")] {
        let e = ext_from_value(r["inputs"][key].clone(), &ctx).unwrap();
        assert_eq!(e, load_ext(&examples().join(file)).unwrap());
    }

    let r = report(&["genext", "validate", "chain2.json"]);
    let g = genext_from_value(r["inputs"]["genext"].clone(), &ctx).unwrap();
    assert_eq!(g, load_genext(&examples().join("chain2.json")).unwrap());
}

#[test]
fn class_operations() {
    let r = report(&["is-split", "l.json"]);
    assert_eq!(r["result"]["is_split"], false);
    let r = report(&["baer", "l.json", "l.json"]);
    assert_eq!(r["result"]["coords"], json!(["2"]));
    let r = report(&["push", "--ext", "l.json", "--map", "scale2.json"]);
    assert_eq!(r["result"]["coords"], json!(["2"]));
    let r = report(&["ext1", "--of", "a3.json", "--by", "a1.json"]);
    assert_eq!(r["result"]["dim"], 1);
    let r = report(&["transfer", "l.json"]);
    assert_eq!(r["result"]["is_split"], false);
    let r = report(&["nonsplit", "n.json"]);
    assert_eq!(r["result"]["totally_nonsplit"], true);
}

#[test]
fn blend_translation_constructions_agree() {
    for c in ["row", "column"] {
        let r = report(&["blend", "--L", "l.json", "--N", "n.json", "--translate", "e13.json", "--construction", c]);
        assert_eq!(r["result"]["agrees_with_in_place"], true);
        assert_eq!(r["result"]["equivalent_to_input"], false);
    }
}

#[test]
fn motivic_commands() {
    let r = report(&["maximal", "gi.json"]);
    assert_eq!(r["result"]["maximal"], true);
    assert_eq!(r["result"]["agree"], true);
    let r = report(&["uradical", "gi.json"]);
    assert_eq!(r["result"]["dim"], 3);
    let r = report(&["graded-independent", "x.json"]);
    assert_eq!(r["result"]["graded_independent"], false);
    assert_eq!(panache(&["maximal", "x.json"]).status.code(), Some(1));
    let r = report(&["classify-star", "--frame", "frame_gi.json", "--level", "2", "--pick", "pick.json"]);
    assert_eq!(r["result"]["gamma_trivial"], true);
    assert_eq!(r["result"]["fiber_groups"][0]["dim"], 1);
}

#[test]
fn genext_commands() {
    let r = report(&["genext", "truncate", "chain2.json"]);
    assert_eq!(r["result"]["genext"]["level"], 1);

    let r = report(&["genext", "act", "chain2.json", "--sigma", "sigma.json"]);
    let acted = scratch("acted.json");
    std::fs::write(&acted, r["result"]["genext"].to_string()).unwrap();
    let strict = report(&["genext", "equiv", "chain2.json", acted.to_str().unwrap(), "--mode", "strict"]);
    let iso = report(&["genext", "equiv", "chain2.json", acted.to_str().unwrap(), "--mode", "iso"]);
    assert_eq!(strict["result"]["equivalent"], false);
    assert_eq!(iso["result"]["equivalent"], true);

    let r = report(&["genext", "fiber", "chain1.json", "--coords", "5"]);
    assert_eq!(r["result"]["group_dims"], json!([1]));
    let lift = scratch("lift.json");
    std::fs::write(&lift, r["result"]["lift"].to_string()).unwrap();
    let r = report(&["genext", "fiber", "chain1.json", "--member", lift.to_str().unwrap()]);
    assert_eq!(r["result"]["member_coords"], json!(["5"]));

    let r = report(&["genext", "crop", "chain2.json", "--from", "1", "--to", "3"]);
    assert_eq!(r["result"]["genext"]["frame"].as_array().unwrap().len(), 2);

    let family = scratch("family.json");
    let fam = json!({
        "0,1": [["3"]], "1,2": [["3"]], "2,3": [["3"]],
        "0,2": [["3", "0"], ["0", "3"]], "1,3": [["3", "0"], ["0", "3"]],
    });
    std::fs::write(&family, fam.to_string()).unwrap();
    let target = scratch("target.json");
    let t = report(&["genext", "truncate", "chain2.json"]);
    std::fs::write(&target, t["result"]["genext"].to_string()).unwrap();
    let r = report(&["genext", "transport", "chain2.json", "--family", family.to_str().unwrap(), "--target", target.to_str().unwrap()]);
    assert_eq!(r["result"]["genext"]["level"], 2);
}

#[test]
fn oracle_command_counts() {
    let r = report(&["oracle", "--p", "2", "--k", "3", "--weights", "-2,-1,0", "--gens", "-1,-2", "--levels", "1..2"]);
    let levels = r["result"]["levels"].as_array().unwrap();
    assert_eq!(levels[0]["strict_classes"], 4);
    assert_eq!(levels[1]["strict_classes"], 8);
    assert_eq!(r["result"]["ok"], true);
}

#[test]
fn files_and_reports_follow_the_schema() {
    let any = schema_for(None);
    let mut names: Vec<_> = std::fs::read_dir(examples()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for p in &names {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        let ok = any.is_valid(&v);
        let expect = !p.ends_with("malformed.json");
        assert_eq!(ok, expect, "{}", p.display());
    }
    let rep = schema_for(Some("report"));
    let diag = schema_for(Some("diagnostic"));
    assert!(rep.is_valid(&report(&["genext", "fiber", "chain1.json", "--coords", "2"])));
    let obj = schema_for(Some("object"));
    let r = report(&["validate", "gi.json"]);
    assert!(obj.is_valid(&r["inputs"]["object"]));
    let g = schema_for(Some("genext"));
    assert!(g.is_valid(&report(&["genext", "truncate", "chain2.json"])["result"]["genext"]));
    for args in [&["validate", "malformed.json"][..], &["ext1", "--of", "a3.json", "--by", "unit_f3.json"]] {
        assert!(diag.is_valid(&stderr_diagnostic(&panache(args))));
    }
}
