use std::path::PathBuf;
use std::process::{Command, Output};

use jrlocal::lfactor_symbolic::{LaurentJson, LaurentRational};
use serde_json::{json, Value};

fn jrw(args: &[&str], results: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jrw"));
    cmd.args(args);
    if let Some(dir) = results {
        cmd.env("JRW_RESULTS_DIR", dir);
    }
    cmd.output().unwrap()
}

fn run_ok(verb: &str, payload: &Value) -> Value {
    let out = jrw(&[verb, &payload.to_string()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> String {
    let out = jrw(args, None);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["error"]["code"].as_str().unwrap().to_string()
}

fn worked() -> Value {
    json!({"a": [[1, 0], [1, 2]], "v": [1, 0], "u": [1, 0]})
}

fn lattice(depth: i64) -> Value {
    json!({"ambient": {"space": "tilde_gl", "n": 1}, "terms": [{"center": ["0", "0", "0"], "depth": depth}]})
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn invariants_of_the_worked_element() {
    let v = run_ok("invariants", &json!({"x": worked()}));
    assert_eq!(v["delta_plus"], "1");
    assert_eq!(v["r"], 1);
    assert_eq!(v["quotient"], json!({"charpoly": ["2", "-3"], "moments": ["1", "1"]}));
}

#[test]
fn central_points_have_two_orbits() {
    let v = run_ok("orbits", &json!({"x": {"a": [[0]], "v": [0], "u": [1]}}));
    assert_eq!(v["count"], 2);
    assert_eq!(v["representatives"][0]["epsilon"], "+");
    assert_eq!(v["representatives"][1]["epsilon"], "-");
}

#[test]
fn lfactor_canonical_output() {
    let out = jrw(&["lfactor", r#"{"n":1,"sign":"+"}"#], None);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, json!({"num": [[1, "1"]], "den": [[1, "1"], [0, "1"]]}));
    let l = LaurentRational::from_json(&serde_json::from_value::<LaurentJson>(v).unwrap()).unwrap();
    assert_eq!(l, LaurentRational::t().div(&LaurentRational::t().add(&LaurentRational::one())).unwrap());
}

#[test]
fn integration_routes_agree() {
    let payload = json!({"x": {"a": [[0]], "v": [1], "u": [0]}, "phi": lattice(0)});
    let mut seen = Vec::new();
    for route in ["auto", "central", "gamma", "oracle"] {
        let out = jrw(&["integrate", &payload.to_string(), "--route", route], None);
        assert_eq!(out.status.code(), Some(0), "{route}");
        seen.push(serde_json::from_slice::<Value>(&out.stdout).unwrap()["value"].clone());
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]), "{seen:?}");
    assert_eq!(seen[0], json!({"num": [[1, "1"]], "den": [[1, "1"], [0, "1"]]}));
}

#[test]
fn outputs_parse_back() {
    let q = run_ok("quotient", &json!({"x": worked()}));
    let s = run_ok("stratify", &json!({"a": q}));
    assert_eq!(s["r"], 1);
    let d = run_ok("descend", &json!({"a": q}));
    assert_eq!(d["k"], 1);
    let orbits = run_ok("orbits", &json!({"a": q}));
    for rep in orbits["representatives"].as_array().unwrap() {
        let c = run_ok("classify", &json!({"x": rep["x"]}));
        assert_eq!(c["epsilon"], rep["epsilon"]);
        assert_eq!(run_ok("quotient", &json!({"x": rep["x"]})), q);
    }
    let f = run_ok("fourier", &json!({"phi": lattice(1)}));
    let back = run_ok("fourier", &json!({"phi": f}));
    assert_eq!(back, run_ok("fourier", &json!({"phi": run_ok("fourier", &json!({"phi": back}))})));
    assert_eq!(back["terms"][0]["depth"], 1);
}

#[test]
fn errors_are_structured() {
    assert_eq!(run_err(&["nonsense", "{}"]), "E_SCHEMA");
    assert_eq!(run_err(&["invariants", "{}"]), "E_SCHEMA");
    assert_eq!(run_err(&["lfactor", "not json"]), "E_SCHEMA");
    let dir = scratch("cli-config");
    std::fs::create_dir_all(&dir).unwrap();
    for (name, cfg, code) in [
        ("p2.json", json!({"p": 2}), "E_CONFIG"),
        ("ram.json", json!({"p": 3, "etale": "ramified"}), "E_CONFIG"),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, cfg.to_string()).unwrap();
        assert_eq!(run_err(&["lfactor", r#"{"n":1,"sign":"+"}"#, "--config", path.to_str().unwrap()]), code);
    }
    let big = json!({"x": {"a": [[0, 0, 0], [0, 0, 0], [0, 0, 0]], "v": [0, 0, 1], "u": [1, 0, 0]},
        "phi": {"ambient": {"space": "tilde_gl", "n": 3}, "terms": [{"center": vec!["0"; 15], "depth": 0}]}});
    assert_eq!(run_err(&["integrate-oracle", &big.to_string()]), "E_DESK_LIMIT");
}

#[test]
fn verify_reports_are_deterministic() {
    let dir = scratch("cli-verify");
    let first = jrw(&["verify", "unramified"], Some(&dir));
    assert_eq!(first.status.code(), Some(0));
    let files = |d: &PathBuf| {
        let mut v: Vec<PathBuf> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v
    };
    let written = files(&dir);
    let report = written.iter().find(|p| !p.to_string_lossy().ends_with(".timing.json")).unwrap().clone();
    let bytes = std::fs::read(&report).unwrap();
    assert_eq!(first.stdout.trim_ascii_end(), bytes.trim_ascii_end());
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["suite"], "unramified");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass"));

    let second = jrw(&["verify", "unramified"], Some(&dir));
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(second.stdout.trim_ascii_end(), bytes.trim_ascii_end());
    assert_eq!(std::fs::read(&report).unwrap(), bytes);
    assert_eq!(files(&dir), written);

    let mut tampered = v.clone();
    tampered["checks"][0]["verdict"] = json!("fail");
    std::fs::write(&report, serde_json::to_vec_pretty(&tampered).unwrap()).unwrap();
    let third = jrw(&["verify", "unramified"], Some(&dir));
    assert_eq!(third.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&third.stdout).unwrap();
    assert_eq!(e["error"]["code"], "E_INCONSISTENT");
}
