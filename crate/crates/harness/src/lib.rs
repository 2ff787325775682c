//! Experiment harness: Monte Carlo estimators, exact and asymptotic evaluation,
//! threshold sweeps and implication audits, driven by a JSON config.

pub mod analytic;
pub mod config;
pub mod error;
pub mod instance;
pub mod montecarlo;
pub mod output;
pub mod stats;

use std::io::Write;

use config::{ExperimentConfig, Mode};
use error::Result;
use instance::{GeneratedRecord, Instance};
use output::EstimateRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Exact,
    Asympt,
    Montecarlo,
    Audit,
    Sweep,
    Generate,
}

impl Command {
    fn mode(&self) -> Option<Mode> {
        match self {
            Command::Exact => Some(Mode::Exact),
            Command::Asympt => Some(Mode::Asymptotic),
            Command::Montecarlo => Some(Mode::Montecarlo),
            Command::Audit => Some(Mode::Audit),
            Command::Sweep => Some(Mode::Sweep),
            Command::Generate => None,
        }
    }
}

/// Rows produced by a tabular command; audit breaches become an error after the
/// rows are handed to `emit`.
pub fn run_command(
    command: Command,
    config: &ExperimentConfig,
    emit: impl FnOnce(&[EstimateRow]) -> Result<()>,
) -> Result<()> {
    if let Some(mode) = command.mode() {
        config.check_mode(mode)?;
    }
    let rows = match command {
        Command::Exact => analytic::run_exact(config)?,
        Command::Asympt => analytic::run_asymptotic(config)?,
        Command::Sweep => analytic::sweep_threshold(config)?,
        Command::Montecarlo => montecarlo::run_montecarlo(config)?,
        Command::Audit => {
            let report = montecarlo::audit_implications(config)?;
            emit(&report.rows)?;
            return match report.failure(config.seed) {
                Some(e) => Err(e),
                None => Ok(()),
            };
        }
        Command::Generate => unreachable!("generate has no tabular output"),
    };
    emit(&rows)
}

/// One JSON line per `n`: the generated string and its declared spans.
pub fn generate<W: Write>(config: &ExperimentConfig, mut out: W) -> Result<()> {
    for n in config.n_values()? {
        let inst = Instance::build(&config.string, n)?;
        let line = serde_json::to_string(&GeneratedRecord::from(&inst)).expect("record serializes");
        writeln!(out, "{line}")?;
    }
    Ok(())
}
