use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinal::cli::{self, CommandSpec, OutputFormat, Overrides, RunSpec};

#[derive(Parser)]
#[command(
    name = "spinal",
    about = "Spinal-code BLER bounds over fading channels: closed-form curves, \
             exact-ML Monte Carlo validation, and transmission-pattern optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
    /// Reproducibility seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Theta-grid resolution override for the refined bound.
    #[arg(long)]
    theta_n: Option<usize>,
    /// Monte Carlo trials per SNR point override.
    #[arg(long)]
    trials: Option<u64>,
    /// Bound kind(s) override: gallager | refined | both.
    #[arg(long, value_parser = parse_kind)]
    bound: Option<cli::KindSelect>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format `{other}` (expected csv|json)")),
    }
}

fn parse_kind(s: &str) -> Result<cli::KindSelect, String> {
    match s {
        "gallager" => Ok(cli::KindSelect::Gallager),
        "refined" => Ok(cli::KindSelect::Refined),
        "both" => Ok(cli::KindSelect::Both),
        other => Err(format!("unknown bound kind `{other}` (expected gallager|refined|both)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate BLER upper-bound curves over the configured channel grid.
    Bound(Common),
    /// Monte Carlo BLER estimation with paired bounds and dominance summary.
    Simulate(Common),
    /// Greedy transmission-pattern optimization plus TTP and brute-force oracle.
    Optimize(Common),
    /// Run the numerical property suite (quadrature oracles, reductions,
    /// monotonicities, limits, Riemann domination, collision rates).
    Verify {
        #[command(flatten)]
        common: Common,
        /// Inject a known defect as a negative control: rician-sign.
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn main() -> ExitCode {
    let parsed = Cli::parse();
    let (command, common) = match parsed.command {
        Command::Bound(c) => (CommandSpec::Bound, c),
        Command::Simulate(c) => (CommandSpec::Simulate, c),
        Command::Optimize(c) => (CommandSpec::Optimize, c),
        Command::Verify { common, inject_fault } => {
            (CommandSpec::Verify { inject_fault }, common)
        }
    };
    let spec = RunSpec {
        command,
        config: common.config,
        out: common.out,
        format: common.format,
        overrides: Overrides {
            seed: common.seed,
            theta_n: common.theta_n,
            trials: common.trials,
            bound: common.bound,
        },
    };
    match cli::run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
