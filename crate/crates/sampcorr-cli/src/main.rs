//! `sampcorr`: generate, corrupt, correct, evaluate and test distributions on
//! `{1..n}` from the command line.
//!
//! Exact mode reads a pmf JSON and writes pmfs where the method has a closed
//! form; sample mode reads a CSV stream and writes a CSV stream. Exit codes:
//! 0 success, 1 contract failure, 2 usage or capability error.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sampcorr", version, about = "Sampling correctors and improvers on {1..n}")]
pub struct Cli {
    /// Seed for simulated draws and private coins.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// `exact` reads a pmf JSON, `sample` reads a CSV stream.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Output artifact path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Where to write the JSON run report.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sample,
}

impl ModeArg {
    pub fn name(self) -> &'static str {
        match self {
            ModeArg::Exact => "exact",
            ModeArg::Sample => "sample",
        }
    }

    pub fn lib(self) -> sampcorr::Mode {
        match self {
            ModeArg::Exact => sampcorr::Mode::Exact,
            ModeArg::Sample => sampcorr::Mode::Sample,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a pmf from a named family, or a stream of draws from it in
    /// sample mode.
    Gen(GenArgs),
    /// Apply an error model.
    Corrupt {
        #[command(subcommand)]
        what: CorruptCmd,
    },
    /// Run a corrector or improver.
    Correct(CorrectArgs),
    /// Distances and partitions.
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
    /// Property testers.
    Test {
        #[command(subcommand)]
        what: TestCmd,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Uniform,
    ZipfMonotone,
    GeometricMonotone,
    Staircase,
    IntervalUniform,
    PerturbedMonotone,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    /// Distance to uniform for `interval-uniform`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Target distance to monotone for `perturbed-monotone`.
    #[arg(long)]
    pub dist: Option<f64>,
    /// Exponent `s` of `1/x^s` for `zipf-monotone`.
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
    /// Ratio for `geometric-monotone`.
    #[arg(long, default_value_t = 0.9)]
    pub ratio: f64,
    /// Number of pieces for `staircase`.
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    /// Stream length emitted in sample mode.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
}

#[derive(Subcommand, Debug)]
pub enum CorruptCmd {
    /// Delete the mass of `[from, to]` and renormalize; in sample mode,
    /// drop stream entries that land there.
    Missing {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Domain size of a sample stream.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Learned,
    Oblivious,
    Waterfill,
    MissingData,
    Vn,
    Convolution,
    Hybrid,
    Bootstrap,
    Subgroup,
    MonoExtract,
}

#[derive(Args, Debug)]
pub struct CorrectArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    /// Pmf JSON in exact mode, CSV stream in sample mode.
    #[arg(long)]
    pub input: PathBuf,
    /// Domain size of a sample stream.
    #[arg(long)]
    pub n: Option<usize>,
    /// Distance of the input to the property.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Target distance of the output to the input (oblivious: `ε′`).
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Target distance of the output to the property.
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Outputs to emit when the output is a stream.
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    /// Samples per query batch for `waterfill`.
    #[arg(long, default_value_t = 32)]
    pub m: usize,
    /// Partition constant for `learned` (`α = cε/3`).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Tabulated cdf (JSON array) granting cdf queries in sample mode.
    #[arg(long)]
    pub ceval_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum EvalCmd {
    /// Exact total variation distance to the non-increasing pmfs.
    DistToMonotone {
        #[arg(long)]
        input: PathBuf,
    },
    /// Total variation distance between two pmfs.
    Tv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Cdf of a pmf as a JSON array, usable as `--ceval-file`.
    Cdf {
        #[arg(long)]
        input: PathBuf,
    },
    /// Right endpoints of the geometric partition.
    Partition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum TestCmd {
    /// ACCEPT when within `eps-lo` of monotone, REJECT when beyond `eps-hi`.
    TolerantMonotone {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps_lo: f64,
        #[arg(long)]
        eps_hi: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
