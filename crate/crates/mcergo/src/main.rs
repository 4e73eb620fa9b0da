use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcergo::config::Experiment;
use mcergo::{execute, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "mcergo", version, about = "Drift-and-hitting certification experiments for Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hitting and mixing times of grid discretizations as the step shrinks.
    Scaling(RunArgs),
    /// Drift certificate, contraction rate, and the explicit bound.
    Certify(RunArgs),
    /// Hitting time, mixing times, and the 12 t_m bound for one chain.
    Hitmix(RunArgs),
    /// Coupled escape frequency against the drift escape bound.
    Couple(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to `output_path` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn run(experiment: Experiment, args: RunArgs) -> Result<bool, HarnessError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != experiment {
        return Err(HarnessError::config(format!(
            "config is for {:?}, not {:?}",
            cfg.experiment, experiment
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .or_else(|| cfg.output_path.clone())
        .ok_or_else(|| HarnessError::config("no output directory: pass --out or set output_path"))?;
    let output = execute(&cfg, &out)?;
    if !args.quiet {
        for line in &output.summary {
            eprintln!("{line}");
        }
        for (name, _) in &output.files {
            eprintln!("wrote {}", out.join(name).display());
        }
    }
    Ok(!output.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scaling(a) => run(Experiment::Scaling, a),
        Command::Certify(a) => run(Experiment::Certify, a),
        Command::Hitmix(a) => run(Experiment::Hitmix, a),
        Command::Couple(a) => run(Experiment::Couple, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
