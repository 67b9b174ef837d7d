//! `wzbc`: compute, compare and cross-check WZBC tradeoff curves.

mod compare;
mod point;
mod schemes;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use wzbc::validation::{run_suite, Suite};
use wzbc::{Kappa, Problem};

/// Exit status for a failed validation check.
const EXIT_VALIDATION: u8 = 1;
/// Exit status for bad input, unknown names and per-scheme errors.
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "wzbc", version, about = "Distortion tradeoffs for Wyner-Ziv coding over broadcast channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one CSV per scheme plus a gnuplot script.
    Compare(CompareArgs),
    /// Run a named cross-check suite.
    Validate(ValidateArgs),
    /// Evaluate one scheme at explicit parameters and print JSON.
    Point(PointArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    /// Replace the problem's bandwidth ratio, e.g. `2` or `1/2`.
    #[arg(long)]
    kappa_override: Option<String>,
}

impl ProblemArgs {
    fn load(&self) -> anyhow::Result<Problem> {
        let text = std::fs::read_to_string(&self.problem)
            .with_context(|| format!("reading {}", self.problem.display()))?;
        let mut problem = Problem::from_json(&text).with_context(|| format!("loading {}", self.problem.display()))?;
        if let Some(k) = &self.kappa_override {
            let kappa: Kappa = k.parse()?;
            problem.set_kappa(kappa);
        }
        Ok(problem)
    }
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated scheme names.
    #[arg(long, default_value = "converse,uncoded,cds,lds,separate,scheme3")]
    schemes: String,
    /// Grid points per parameter axis (default 201 Gaussian, 41 binary).
    #[arg(long)]
    resolution: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Recorded in the run manifest; the sweeps themselves are deterministic.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Continue the closed-form LDS curve flat up to `D_c = N_c`.
    #[arg(long)]
    extend_flat: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Suite name, or `all`.
    suite: String,
    /// Override the suite's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Scheme name.
    #[arg(long)]
    scheme: String,
    /// Parameter assignment `name=value`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    extend_flat: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compare(args) => compare::run(&args),
        Command::Validate(args) => validate(&args),
        Command::Point(args) => point::run(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("WZBC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("WZBC_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn validate(args: &ValidateArgs) -> anyhow::Result<ExitCode> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>().map_err(anyhow::Error::msg)?]
    };
    if let Some(t) = args.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            bail!("tolerance must be positive, got {t}");
        }
    }
    let mut ok = true;
    for suite in suites {
        let report = run_suite(suite, args.tolerance, args.seed)?;
        println!("suite {}", suite.name());
        for check in &report.checks {
            println!("  {check}");
        }
        ok &= report.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
}
