//! Scenario runner behind the `crossmetric` binary.
//!
//! A scenario file names a group, a length function, a base triple, an
//! action and a list of checks. `run` validates it completely, executes the
//! checks in parallel and writes one JSON report per check, CSV tables and
//! SVG plots into the output directory.

pub mod checks;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use crossmetric::group::DEFAULT_BALL_CAP;
use crossmetric::Error;
use rayon::prelude::*;
use serde_json::json;

use crate::checks::CheckOutput;
use crate::scenario::CheckName;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CROSSMETRIC_OUT";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Schema(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Schema(_) => 2,
            RunError::Cap(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub max_ball: Option<usize>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub results: Vec<(CheckName, bool)>,
}

impl RunSummary {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.1)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

/// `(name, statement)` for every check.
pub fn list_checks() -> Vec<(&'static str, &'static str)> {
    CheckName::ALL.iter().map(|c| (c.as_str(), c.reference())).collect()
}

fn output_dir(opts: &RunOptions, scenario: &scenario::Scenario) -> PathBuf {
    if let Some(p) = &opts.out {
        return p.clone();
    }
    if let Some(p) = &scenario.output {
        return p.clone();
    }
    match std::env::var_os(OUT_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p).join(&scenario.name),
        _ => PathBuf::from("crossmetric-out").join(&scenario.name),
    }
}

pub fn run(config: &Path, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let text = std::fs::read_to_string(config).map_err(|e| RunError::Schema(format!("{}: {e}", config.display())))?;
    run_str(&text, opts)
}

pub fn run_str(text: &str, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let parsed = scenario::parse(text)?;
    let out_dir = output_dir(opts, &parsed);
    let ctx = scenario::build(parsed, opts.seed, opts.max_ball.unwrap_or(DEFAULT_BALL_CAP))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| RunError::Schema(format!("jobs: {e}")))?;
    let names = ctx.scenario.checks.clone();
    let results: Vec<Result<CheckOutput, Error>> = pool.install(|| names.par_iter().map(|&n| checks::run(&ctx, n)).collect());

    let mut outputs = Vec::with_capacity(results.len());
    for (name, res) in names.iter().zip(results) {
        match res {
            Ok(o) => outputs.push(o),
            Err(e @ Error::BallCap { .. }) => return Err(RunError::Cap(format!("{}: {e}", name.as_str()))),
            Err(e) => outputs.push(CheckOutput {
                name: *name,
                pass: false,
                body: json!({ "error": e.to_string() }),
                tables: Vec::new(),
                plots: Vec::new(),
            }),
        }
    }

    std::fs::create_dir_all(&out_dir)?;
    for o in &outputs {
        output::write_atomic(&out_dir, &format!("{}.json", o.name.as_str()), &output::json_bytes(&o.report()))?;
        for t in &o.tables {
            output::write_atomic(&out_dir, &t.file, &output::csv_bytes(t)?)?;
        }
        if ctx.scenario.plots {
            for p in &o.plots {
                let svg = output::svg_string(p).map_err(|e| RunError::Io(std::io::Error::other(e)))?;
                output::write_atomic(&out_dir, &p.file, svg.as_bytes())?;
            }
        }
    }
    let summary = RunSummary { out_dir: out_dir.clone(), results: outputs.iter().map(|o| (o.name, o.pass)).collect() };
    let checks: Vec<_> = outputs
        .iter()
        .map(|o| json!({ "check": o.name.as_str(), "pass": o.pass, "report": format!("{}.json", o.name.as_str()) }))
        .collect();
    let doc = json!({ "scenario": ctx.scenario.name, "seed": ctx.seed, "pass": summary.pass(), "checks": checks });
    output::write_atomic(&out_dir, "summary.json", &output::json_bytes(&doc))?;
    Ok(summary)
}
