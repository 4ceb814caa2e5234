use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use jrlocal::cli::report::{build_report, persist, results_dir};
use jrlocal::cli::{error_json, run, RunOptions, WorkbenchConfig, VERBS};
use jrlocal::{Error, Result};

/// Exact local orbital integrals and transfer checks, JSON in and out.
#[derive(Parser, Debug)]
#[command(name = "jrw", version)]
struct Args {
    /// One of: invariants, quotient, stratify, descend, orbits, classify, cayley, lfactor,
    /// integrate, integrate-oracle, fourier, match, orbits-unitary, constants, transfer-check, verify.
    verb: String,
    /// JSON payload, a path to a JSON file, or "-" for stdin. For `verify`, the suite name.
    payload: Option<String>,
    /// Workbench configuration (JSON file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Route for `integrate`: auto (alias descent), central (alias tate), gamma, rs, oracle, group, unitary.
    #[arg(long, global = true)]
    route: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn read_json_arg(s: &str) -> Result<Value> {
    let text = if s == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Error::Schema(format!("cannot read stdin: {e}")))?;
        buf
    } else if s.trim_start().starts_with(['{', '[']) {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| Error::Schema(format!("cannot read payload file {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("payload is not valid JSON: {e}")))
}

fn load_config(path: &Option<PathBuf>) -> Result<WorkbenchConfig> {
    match path {
        None => Ok(WorkbenchConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
            WorkbenchConfig::from_json(&v)
        }
    }
}

fn emit(v: &Value, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(v).unwrap();
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut w = std::io::stdout().lock();
            match writeln!(w, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Config(format!("cannot write output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn execute(args: &Args) -> Result<bool> {
    let cfg = load_config(&args.config)?;
    if !VERBS.contains(&args.verb.as_str()) {
        return Err(Error::Schema(format!("unknown verb '{}'; expected one of {}", args.verb, VERBS.join(", "))));
    }
    if args.verb == "verify" {
        let suite = args.payload.as_deref().unwrap_or("all");
        let report = build_report(suite, args.seed.unwrap_or(cfg.seed))?;
        let path = persist(&report, &results_dir())?;
        eprintln!("report written to {}", path.display());
        emit(&report.json, &args.out)?;
        return Ok(report.pass);
    }
    let payload = match &args.payload {
        Some(s) => read_json_arg(s)?,
        None => return Err(Error::Schema(format!("verb '{}' needs a JSON payload", args.verb))),
    };
    let opts = RunOptions { route: args.route.clone(), seed: args.seed };
    emit(&run(&args.verb, &payload, &cfg, &opts)?, &args.out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&error_json(&e)).unwrap());
            ExitCode::from(2)
        }
    }
}
