//! JSON-configured runs and report writers.
//!
//! ```text
//!     staticflow <command> --config <path> [--out <path>]
//! ```
//!
//! Exit codes: 0 success, 2 invalid configuration or unwritable output,
//! 3 early flow termination, 4 internal oracle mismatch.

mod config;
mod output;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{
    Chart, Command, ExpansionConfig, Format, GridConfig, InitialConfig, InitialKind, OutputConfig,
    RunConfig,
};
pub use output::{
    emit_expansion_json, emit_flow_csv, expansion_json, flow_csv, read_expansion_json,
    write_atomic, ExpansionRecord, FLOW_CSV_HEADER,
};

use crate::expansion::{self, EinsteinBoundary, ExpansionResult};
use crate::flow::{evolve, FlowReport, Termination};
use crate::geometry::{lift_block_check, sectional_defect, static_residual, StaticTriple};

/// Largest tolerated discrepancy between the warped-product operators and the
/// chart oracle in `verify`.
pub const LIFT_TOLERANCE: f64 = 1e-4;

/// Coefficient tolerance against the exact AdS series in `expand`.
pub const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error("cannot write output: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Invalid,
    EarlyTermination,
    OracleMismatch,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Invalid => 2,
            ExitStatus::EarlyTermination => 3,
            ExitStatus::OracleMismatch => 4,
        }
    }
}

/// What a command produced: files (or stdout text) plus the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub messages: Vec<String>,
}

/// Loads a config file and runs `command`; diagnostics go to stderr.
pub fn run_from_path(command: Command, config: &Path, out: Option<&Path>) -> ExitStatus {
    let result = RunConfig::load(config).and_then(|c| run(&c, command, out));
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                eprintln!("{m}");
            }
            outcome.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::Invalid
        }
    }
}

pub fn run(config: &RunConfig, command: Command, out: Option<&Path>) -> Result<Outcome, CliError> {
    config.validate(command)?;
    let target = out.map(Path::to_path_buf).or_else(|| config.output.path.clone());
    match command {
        Command::Flow => run_flow(config, target),
        Command::Expand => run_expand(config, target),
        Command::Residual => run_residual(config, target),
        Command::Verify => run_verify(config, target),
    }
}

fn deliver(target: Option<&Path>, text: &str) -> Result<(), CliError> {
    match target {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `out.csv` becomes `out-<index>.csv` in a sweep.
fn sweep_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{index}"),
    };
    base.with_file_name(name)
}

fn run_flow(config: &RunConfig, target: Option<PathBuf>) -> Result<Outcome, CliError> {
    let grid = config.grid()?;
    let initial = config.initial()?;
    let controls = config.flow.expect("validated");
    let masses = initial.masses();
    let fixtures = masses
        .iter()
        .map(|&m| initial.build(config.n, grid, m))
        .collect::<Result<Vec<StaticTriple>, _>>()?;
    let reports: Vec<FlowReport> = fixtures.par_iter().map(|t| evolve(t, &controls)).collect();

    let format = config.output.format.unwrap_or(Format::Csv);
    let sweep = reports.len() > 1;
    let mut messages = vec![];
    let mut status = ExitStatus::Success;
    for (i, (report, mass)) in reports.iter().zip(&masses).enumerate() {
        let text = match format {
            Format::Csv => flow_csv(report, config.output.every),
            Format::Json => output::to_json(report),
        };
        let path = target.as_deref().map(|p| if sweep { sweep_path(p, i) } else { p.to_path_buf() });
        deliver(path.as_deref(), &text)?;
        if report.terminated != Termination::Completed {
            status = ExitStatus::EarlyTermination;
            messages.push(format!(
                "mass {mass}: flow stopped early ({:?}){}",
                report.terminated,
                report.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
            ));
        }
    }
    Ok(Outcome { status, messages })
}

fn expansion_mismatches(res: &ExpansionResult) -> Vec<String> {
    let mut problems = vec![];
    if !expansion::parity_check(res) {
        problems.push("odd coefficients do not vanish".to_string());
    }
    let b = res.boundary();
    let sphere = EinsteinBoundary::sphere(res.n).expect("validated dimension");
    if b.scal == sphere.scal && res.order() >= 2 {
        if let Ok((c, u)) = expansion::special_gauge_of_ads(res.n, res.order()) {
            for k in 0..=res.order() {
                if (c.coeff(k) - res.c.coeff(k)).abs() > SERIES_TOLERANCE
                    || (u.coeff(k) - res.u.coeff(k)).abs() > SERIES_TOLERANCE
                {
                    problems.push(format!("coefficient {k} differs from the exact AdS series"));
                }
            }
        }
    }
    for (i, d) in res.determinants.iter().enumerate() {
        let m = i + 1;
        let predicted = expansion::solvability_determinant(res.n, m);
        if (predicted.abs() < SERIES_TOLERANCE) != (d.abs() < SERIES_TOLERANCE) {
            problems.push(format!("solvability at order {m} disagrees with the predicted determinant"));
        }
    }
    problems
}

fn run_expand(config: &RunConfig, target: Option<PathBuf>) -> Result<Outcome, CliError> {
    let e = config.expansion.expect("validated");
    let boundary = EinsteinBoundary::new(config.n, e.scal)?;
    let res = expansion::expand(&boundary, e.order)?;
    let text = match config.output.format.unwrap_or(Format::Json) {
        Format::Json => expansion_json(&res),
        Format::Csv => {
            let mut s = String::from("k,c,u\n");
            for k in 0..=res.order() {
                s.push_str(&format!("{k},{},{}\n", res.c.coeff(k), res.u.coeff(k)));
            }
            s
        }
    };
    deliver(target.as_deref(), &text)?;
    let problems = expansion_mismatches(&res);
    let status = if problems.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::OracleMismatch
    };
    Ok(Outcome { status, messages: problems })
}

#[derive(Debug, Serialize)]
struct ResidualSummary {
    mass: f64,
    tensor_sup: f64,
    scalar_sup: f64,
    sup: f64,
}

fn fixtures(config: &RunConfig) -> Result<Vec<(f64, StaticTriple)>, CliError> {
    let grid = config.grid()?;
    let initial = config.initial()?;
    initial
        .masses()
        .into_iter()
        .map(|m| Ok((m, initial.build(config.n, grid, m)?)))
        .collect()
}

fn run_residual(config: &RunConfig, target: Option<PathBuf>) -> Result<Outcome, CliError> {
    let fixtures = fixtures(config)?;
    let text = match config.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let rows: Vec<ResidualSummary> = fixtures
                .iter()
                .map(|(mass, t)| {
                    let r = static_residual(t);
                    ResidualSummary {
                        mass: *mass,
                        tensor_sup: r.tensor_sup(),
                        scalar_sup: r.scalar_sup(),
                        sup: r.sup(),
                    }
                })
                .collect();
            output::to_json(&rows)
        }
        Format::Csv => {
            let mut s = String::from("mass,r,tensor_norm,scalar\n");
            for (mass, t) in &fixtures {
                let r = static_residual(t);
                for (i, x) in t.grid().nodes().enumerate() {
                    s.push_str(&format!("{mass},{x},{},{}\n", r.tensor_norm[i], r.scalar[i]));
                }
            }
            s
        }
    };
    deliver(target.as_deref(), &text)?;
    Ok(Outcome {
        status: ExitStatus::Success,
        messages: vec![],
    })
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    mass: f64,
    static_residual: f64,
    sectional_defect: f64,
    lift_block_check: f64,
    lift_tolerance: f64,
    ok: bool,
}

fn run_verify(config: &RunConfig, target: Option<PathBuf>) -> Result<Outcome, CliError> {
    let fixtures = fixtures(config)?;
    let rows: Vec<VerifyReport> = fixtures
        .par_iter()
        .map(|(mass, t)| {
            let lift = lift_block_check(t).sup();
            VerifyReport {
                mass: *mass,
                static_residual: static_residual(t).sup(),
                sectional_defect: sectional_defect(t.metric()).sup_abs(),
                lift_block_check: lift,
                lift_tolerance: LIFT_TOLERANCE,
                ok: lift <= LIFT_TOLERANCE,
            }
        })
        .collect();
    let text = match config.output.format.unwrap_or(Format::Json) {
        Format::Json => output::to_json(&rows),
        Format::Csv => {
            let mut s = String::from("mass,static_residual,sectional_defect,lift_block_check\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.mass, r.static_residual, r.sectional_defect, r.lift_block_check
                ));
            }
            s
        }
    };
    deliver(target.as_deref(), &text)?;
    let messages: Vec<String> = rows
        .iter()
        .filter(|r| !r.ok)
        .map(|r| {
            format!(
                "mass {}: block identity residual {:e} exceeds {:e}",
                r.mass, r.lift_block_check, LIFT_TOLERANCE
            )
        })
        .collect();
    let status = if messages.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::OracleMismatch
    };
    Ok(Outcome { status, messages })
}
