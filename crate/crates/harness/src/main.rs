use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tracerec_harness::config::ExperimentConfig;
use tracerec_harness::error::Result;
use tracerec_harness::{generate, output, run_command, Command};

#[derive(Parser)]
#[command(name = "tracerec", version, about = "Trace reconstruction experiments over the deletion channel")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact complement-event probabilities.
    Exact(Common),
    /// Asymptotic forms under an exponential trace schedule.
    Asympt(Common),
    /// Monte Carlo estimates of difficulty, event and Maximal Runs error rates.
    Montecarlo(Common),
    /// Monte Carlo with per-sample implication checks; exits 4 on a breach.
    Audit(Common),
    /// Exact and asymptotic values over a (c, n) grid.
    Sweep(Common),
    /// Emit the generated string and its declared spans as JSON lines.
    Generate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(out) = &common.out {
        config.output = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let (command, common) = match cli.command {
        Sub::Exact(c) => (Command::Exact, c),
        Sub::Asympt(c) => (Command::Asympt, c),
        Sub::Montecarlo(c) => (Command::Montecarlo, c),
        Sub::Audit(c) => (Command::Audit, c),
        Sub::Sweep(c) => (Command::Sweep, c),
        Sub::Generate(c) => (Command::Generate, c),
    };
    let config = load(&common)?;
    if command == Command::Generate {
        return match &config.output {
            Some(path) => generate(&config, std::fs::File::create(path)?),
            None => generate(&config, std::io::stdout().lock()),
        };
    }
    let canonical = config.canonical_json();
    run_command(command, &config, |rows| match &config.output {
        Some(path) => output::write_outputs(path, rows, &canonical, config.seed),
        None => output::write_csv(std::io::stdout().lock(), rows),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
