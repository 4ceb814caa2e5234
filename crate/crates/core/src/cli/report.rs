//! Verification reports: assembly, content addressing and persistence.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::verify::{criterion, suite_criteria, Check};
use crate::error::{Error, Result};

pub const RESULTS_ENV: &str = "JRW_RESULTS_DIR";

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub digest: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Byte-deterministic body; runtimes live in the timing sidecar.
    pub json: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn canonical(v: &Value) -> String {
    serde_json::to_string(v).unwrap()
}

pub fn build_report(suite: &str, seed: u64) -> Result<Report> {
    let ids = suite_criteria(suite)
        .ok_or_else(|| Error::Schema(format!("unknown suite '{suite}'; use unramified, oracle, transfer-n1, properties or all")))?;
    let checks: Vec<Check> = std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|&id| s.spawn(move || criterion(id, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let inputs = json!({"suite": suite, "seed": seed, "criteria": ids});
    let digest = sha256_hex(canonical(&inputs).as_bytes());
    let pass = checks.iter().all(|c| c.pass);
    let body: Vec<Value> = checks
        .iter()
        .map(|c| {
            let mut j = c.to_json();
            j["inputs_digest"] = json!(sha256_hex(canonical(&json!([suite, seed, c.criterion])).as_bytes()));
            j["outputs_digest"] = json!(sha256_hex(canonical(&j["ledger"]).as_bytes()));
            j
        })
        .collect();
    let json = json!({
        "suite": suite,
        "seed": seed,
        "digest": digest,
        "verdict": if pass { "pass" } else { "fail" },
        "checks": body,
    });
    Ok(Report { suite: suite.to_string(), seed, digest, pass, checks, json })
}

pub fn timing_json(r: &Report) -> Value {
    json!({
        "digest": r.digest,
        "runtime_ms": r.checks.iter().map(|c| json!({"criterion": c.criterion, "ms": c.millis as u64})).collect::<Vec<_>>(),
    })
}

pub fn results_dir() -> PathBuf {
    std::env::var_os(RESULTS_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}

/// Writes `<suite>-<digest>.json` once; a rerun must reproduce the same bytes.
pub fn persist(r: &Report, dir: &Path) -> Result<PathBuf> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write results to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let stem = format!("{}-{}", r.suite, &r.digest[..16]);
    let path = dir.join(format!("{stem}.json"));
    let bytes = serde_json::to_vec_pretty(&r.json).unwrap();
    match fs::read(&path) {
        Ok(old) if old != bytes => {
            return Err(Error::Inconsistent(format!("{} exists with different content for identical inputs", path.display())))
        }
        Ok(_) => {}
        Err(_) => fs::write(&path, &bytes).map_err(io)?,
    }
    let timing = serde_json::to_vec_pretty(&timing_json(r)).unwrap();
    fs::write(dir.join(format!("{stem}.timing.json")), timing).map_err(io)?;
    Ok(path)
}
