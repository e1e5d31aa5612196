//! Batch front end: job files in, summaries and JSON reports out.
//!
//! Exit codes: 0 success, 1 input error, 2 mathematical failure or a
//! certificate that does not re-verify, 3 resource exhaustion.

pub mod certs;
mod commands;
pub mod job;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::groebner::GroebnerError;
use crate::homotopy::HomotopyError;
use crate::ring::TermOrder;
use crate::semitrans::SemitransError;
use crate::solver::SolverError;

pub use certs::{Certificate, RingSpec};
pub use commands::sample_values;
pub use job::{Command, Effective, Job, JobOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Math(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    fn math(e: impl std::fmt::Display) -> Self {
        CliError::Math(e.to_string())
    }

    fn from_groebner(e: GroebnerError) -> Self {
        match e {
            GroebnerError::Resource(m) => CliError::Resource(m),
            other => CliError::Math(other.to_string()),
        }
    }

    fn from_geometry(e: GeometryError) -> Self {
        match e {
            GeometryError::Groebner(g) => Self::from_groebner(g),
            GeometryError::Shape(_) | GeometryError::IndexOutOfRange { .. } | GeometryError::SubsetTooSmall { .. } => {
                Self::input(e)
            }
            other => Self::math(other),
        }
    }

    fn from_semitrans(e: SemitransError) -> Self {
        match e {
            SemitransError::Groebner(g) => Self::from_groebner(g),
            SemitransError::Geometry(g) => Self::from_geometry(g),
            SemitransError::Indeterminate(_) => CliError::Resource(e.to_string()),
            other => Self::math(other),
        }
    }

    fn from_solver(e: SolverError) -> Self {
        match e {
            SolverError::Groebner(g) => Self::from_groebner(g),
            SolverError::Geometry(g) => Self::from_geometry(g),
            SolverError::Precondition(_) => Self::input(e),
            other => Self::math(other),
        }
    }
}

impl From<HomotopyError> for CliError {
    fn from(e: HomotopyError) -> Self {
        match e {
            HomotopyError::Groebner(g) => Self::from_groebner(g),
            other => Self::math(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reverification {
    pub name: String,
    pub kind: String,
    pub passed: bool,
}

/// Everything a run produces. Contains no timestamps, so equal jobs give equal reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub job: Job,
    pub options: Effective,
    pub ring: RingSpec,
    pub status: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub summary: Vec<String>,
    pub results: Value,
    pub certificates: Vec<Certificate>,
    pub reverification: Vec<Reverification>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Command-line overrides of job options.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "degree-bound")]
    pub degree_bound: Option<u32>,
    #[arg(long = "max-retries")]
    pub max_retries: Option<usize>,
    #[arg(long = "max-rounds")]
    pub max_rounds: Option<usize>,
    /// `center,radius,samples` applied to every axis.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_parser = parse_order)]
    pub order: Option<TermOrder>,
}

fn parse_order(s: &str) -> Result<TermOrder, String> {
    match s {
        "grevlex" => Ok(TermOrder::Grevlex),
        "lex" => Ok(TermOrder::Lex),
        _ => Err(format!("unknown order `{s}`, expected grevlex or lex")),
    }
}

impl Overrides {
    pub fn apply(&self, o: &mut JobOptions) {
        o.seed = self.seed.or(o.seed);
        o.degree_bound = self.degree_bound.or(o.degree_bound);
        o.max_retries = self.max_retries.or(o.max_retries);
        o.max_rounds = self.max_rounds.or(o.max_rounds);
        o.grid = self.grid.clone().or(o.grid.take());
        o.order = self.order.or(o.order);
    }
}

#[derive(Debug, Parser)]
#[command(name = "holcert", version, about = "Certified computations for tuples of polynomial 1-forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run a job file and write a report.
    Run {
        #[arg(long)]
        job: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Report destination; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check every certificate of a report.
    Verify { report: PathBuf },
}

/// Runs a parsed job; errors before any computation are input errors.
pub fn run_job(job: &Job) -> Report {
    let options = job.options.resolve();
    let mut report = Report {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: job.command,
        job: job.clone(),
        options: options.clone(),
        ring: RingSpec { variables: Vec::new(), order: options.order },
        status: "ok".into(),
        exit_code: 0,
        message: None,
        summary: Vec::new(),
        results: Value::Null,
        certificates: Vec::new(),
        reverification: Vec::new(),
    };
    let outcome = job::Inputs::new(job, options.order).and_then(|inp| {
        report.ring = RingSpec::of(&inp.ring);
        let run = match job.command {
            Command::RankLocus => commands::rank_locus,
            Command::RankCheck => commands::rank_check,
            Command::TangencyOrder => commands::tangency_order,
            Command::Certificate => commands::certificate,
            Command::Solve => commands::solve,
            Command::SolveParametric => commands::solve_parametric,
            Command::Stability => commands::stability,
            Command::HomotopyStep => commands::homotopy_step,
            Command::Pipeline => commands::pipeline,
        };
        run(&inp, &options)
    });
    match outcome {
        Ok(out) => {
            report.results = out.results;
            report.summary = out.summary;
            report.reverification = out
                .certificates
                .iter()
                .map(|c| Reverification { name: c.name().into(), kind: c.kind().into(), passed: c.verify() })
                .collect();
            report.certificates = out.certificates;
            if let Some((code, msg)) = out.failure {
                report.exit_code = code;
                report.message = Some(msg);
            } else if report.reverification.iter().any(|r| !r.passed) {
                report.exit_code = 2;
                report.message = Some("a certificate failed re-verification".into());
            }
        }
        Err(e) => {
            report.exit_code = e.exit_code();
            report.message = Some(e.to_string());
        }
    }
    report.status = match report.exit_code {
        0 => "ok",
        1 => "input-error",
        2 => "failure",
        _ => "resource-exhausted",
    }
    .into();
    report
}

/// Reads a job file, applying command-line overrides.
pub fn load_job(path: &Path, overrides: &Overrides) -> Result<Job, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut job: Job = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    overrides.apply(&mut job.options);
    Ok(job)
}

/// Per-certificate verdicts of a report.
pub fn verify_report(report: &Report) -> Vec<Reverification> {
    report
        .certificates
        .iter()
        .map(|c| Reverification { name: c.name().into(), kind: c.kind().into(), passed: c.verify() })
        .collect()
}

fn print_summary(report: &Report) {
    eprintln!("{}: {}", serde_json::to_value(report.command).unwrap_or_default(), report.status);
    for line in &report.summary {
        eprintln!("  {line}");
    }
    if let Some(m) = &report.message {
        eprintln!("  {m}");
    }
    let passed = report.reverification.iter().filter(|r| r.passed).count();
    eprintln!("  certificates re-verified: {passed}/{}", report.reverification.len());
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        CliCommand::Run { job, overrides, out } => {
            let job = match load_job(&job, &overrides) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("{e}");
                    return e.exit_code();
                }
            };
            let report = run_job(&job);
            print_summary(&report);
            let text = report.to_json();
            match out {
                Some(p) => {
                    if let Err(e) = fs::write(&p, text + "\n") {
                        eprintln!("{}: {e}", p.display());
                        return 1;
                    }
                }
                None => println!("{text}"),
            }
            report.exit_code
        }
        CliCommand::Verify { report } => {
            let parsed = fs::read_to_string(&report)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<Report>(&t).map_err(|e| e.to_string()));
            let report = match parsed {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{}: {e}", report.display());
                    return 1;
                }
            };
            let verdicts = verify_report(&report);
            for v in &verdicts {
                println!("{} [{}] {}", if v.passed { "ok  " } else { "FAIL" }, v.kind, v.name);
            }
            if verdicts.iter().all(|v| v.passed) {
                0
            } else {
                2
            }
        }
    }
}
