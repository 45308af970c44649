use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lensaoa::harness::tables::subcommand_table;
use lensaoa::harness::{validate, ArrayChoice, SimConfig};

#[derive(Parser)]
#[command(name = "lensaoa", version, about = "Wideband lens-array AoA estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration; built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path. Writes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct WithArray {
    #[command(flatten)]
    common: Common,
    /// Layout to describe; defaults to the first configured kind.
    #[arg(long, value_enum)]
    array: Option<ArrayArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrayArg {
    Uniform,
    Raa,
}

impl From<ArrayArg> for ArrayChoice {
    fn from(a: ArrayArg) -> Self {
        match a {
            ArrayArg::Uniform => ArrayChoice::Uniform,
            ArrayArg::Raa => ArrayChoice::Raa,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// MSE against SNR for every configured array and estimator.
    SimulateMse(Common),
    /// Probability of missing the accuracy requirement against SNR.
    SimulateOutage(Common),
    /// MSE and outage at fixed cluster angles.
    AngleProfile(Common),
    /// Normalized average received power against cluster angle.
    PowerProfile(Common),
    /// Element positions and per-element squint coverage.
    Placement(WithArray),
    /// Focused sine-angle offsets per carrier and angle.
    SquintMap(WithArray),
    /// Multiplication counts and RF power against array size.
    PowerReport(Common),
    /// Simulated MSE next to its lower bound and the outage integral.
    Bounds(Common),
    /// Built-in self-checks; exits non-zero when any fails.
    Validate(Common),
}

fn load(common: &Common) -> Result<SimConfig> {
    let mut cfg = match &common.config {
        Some(path) => SimConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
        None => SimConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    cfg.validate().context("invalid configuration")?;
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn table(name: &str, common: &Common, array: Option<ArrayArg>) -> Result<()> {
    let cfg = load(common)?;
    let array = array.map(ArrayChoice::from).unwrap_or(cfg.array.kinds[0]);
    let t = subcommand_table(name, &cfg, array).with_context(|| format!("running {name}"))?;
    emit(common, &t.render())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::SimulateMse(c) => table("simulate-mse", &c, None)?,
        Command::SimulateOutage(c) => table("simulate-outage", &c, None)?,
        Command::AngleProfile(c) => table("angle-profile", &c, None)?,
        Command::PowerProfile(c) => table("power-profile", &c, None)?,
        Command::Placement(a) => table("placement", &a.common, a.array)?,
        Command::SquintMap(a) => table("squint-map", &a.common, a.array)?,
        Command::PowerReport(c) => table("power-report", &c, None)?,
        Command::Bounds(c) => table("bounds", &c, None)?,
        Command::Validate(c) => {
            let cfg = load(&c)?;
            let report = validate(&cfg).context("running validate")?;
            emit(&c, &report.to_string())?;
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
