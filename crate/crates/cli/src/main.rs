//! `divnet`: analyses of the divisibility network from the command line.

mod commands;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divnet::powerlaw::AlphaEstimator;
use serde::{Serialize, Serializer};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "divnet", version, about = "Divisibility network analyses")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Directory for data files and manifest.json.
    #[arg(long, global = true, default_value = "divnet-out")]
    pub output_dir: PathBuf,
    /// Encoding of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads, or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: Threads,
    /// Directory for cached sieve tables.
    #[arg(long, global = true, env = "DIVNET_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct Threads(Option<usize>);

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Threads(None));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive integer or `auto`, got `{s}`")),
            Ok(n) => Ok(Threads(Some(n))),
        }
    }
}

impl Serialize for Threads {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(n) => s.serialize_u64(n as u64),
            None => s.serialize_str("auto"),
        }
    }
}

/// Accepts `2^k` or a plain integer.
pub fn parse_size(s: &str) -> Result<u32, String> {
    let s = s.trim();
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base.trim().parse().map_err(|_| format!("bad base in `{s}`"))?;
            let exp: u32 = exp.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
            base.checked_pow(exp).ok_or_else(|| format!("`{s}` overflows"))?
        }
        None => s.parse::<u64>().map_err(|_| format!("expected an integer or 2^k, got `{s}`"))?,
    };
    if value == 0 {
        return Err("size must be at least 1".into());
    }
    u32::try_from(value).map_err(|_| format!("`{s}` exceeds the largest supported size {}", u32::MAX))
}

#[derive(Debug, Args, Serialize)]
pub struct NetArgs {
    /// Network size N, as an integer or `2^k`.
    #[arg(long, value_parser = parse_size)]
    pub size: u32,
    /// Labels to remove, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub removed: Vec<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Exact,
    Approximate,
    Literal,
}

impl From<Estimator> for AlphaEstimator {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Exact => AlphaEstimator::Exact,
            Estimator::Approximate => AlphaEstimator::Approximate,
            Estimator::Literal => AlphaEstimator::Literal,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitOptions {
    /// Synthetic datasets for the goodness-of-fit p-value; 0 skips the test.
    #[arg(long, default_value_t = 0)]
    pub n_synthetic: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Estimator for alpha during the k_min scan.
    #[arg(long, value_enum, default_value_t = Estimator::Exact)]
    pub estimator: Estimator,
    /// Smallest tail allowed when scanning k_min.
    #[arg(long, default_value_t = 2)]
    pub min_tail: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub fit: FitOptions,
    /// Also report alpha at this fixed k_min.
    #[arg(long)]
    pub k_min: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_size, default_value = "2^8")]
    pub min_size: u32,
    #[arg(long, value_parser = parse_size)]
    pub max_size: u32,
    #[arg(long, value_delimiter = ',')]
    pub removed: Vec<u32>,
    /// Only edge counts and average degree, which need no sieve.
    #[arg(long)]
    pub degree_only: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct HubArgs {
    #[arg(long, value_parser = parse_size)]
    pub size: u32,
    #[command(flatten)]
    pub fit: FitOptions,
}

#[derive(Debug, Args, Serialize)]
pub struct SizeArgs {
    #[arg(long, value_parser = parse_size)]
    pub size: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct OverlayArgs {
    #[arg(long, value_parser = parse_size)]
    pub size: u32,
    /// Second network size; defaults to twice `--size`.
    #[arg(long, value_parser = parse_size)]
    pub size_b: Option<u32>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Log-binned degree distribution.
    DegreeDist(NetArgs),
    /// Power-law fit with optional bootstrap p-value.
    Fit(FitArgs),
    /// Global metrics at one size.
    Metrics(NetArgs),
    /// Global metrics over doubling sizes.
    Sweep(SweepArgs),
    /// Per-node clustering and its degree dependence.
    Profile(NetArgs),
    /// Successive clustering differences, density grid and symmetry statistic.
    DiffSymmetry(NetArgs),
    /// Degree distributions and fits with hubs 1..4 removed cumulatively.
    HubRemoval(HubArgs),
    /// Checks the c = 1 and c = 0 bands.
    BandCheck(SizeArgs),
    /// Rescaled clustering profiles of two sizes with shared-value report.
    Overlay(OverlayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DegreeDist(_) => "degree-dist",
            Command::Fit(_) => "fit",
            Command::Metrics(_) => "metrics",
            Command::Sweep(_) => "sweep",
            Command::Profile(_) => "profile",
            Command::DiffSymmetry(_) => "diff-symmetry",
            Command::HubRemoval(_) => "hub-removal",
            Command::BandCheck(_) => "band-check",
            Command::Overlay(_) => "overlay",
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_DATA: u8 = 4;

fn exit_code(e: &commands::Failure) -> u8 {
    use divnet::Error;
    match e {
        commands::Failure::Lib(err) => match err {
            Error::Capacity { .. } => EXIT_CAPACITY,
            Error::OutOfRange { .. } | Error::RemovedNode(_) | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Undefined(_) | Error::Domain(_) | Error::InsufficientData(_) | Error::Degenerate(_) => {
                EXIT_DATA
            }
            Error::Io(_) => EXIT_FAILURE,
        },
        commands::Failure::Check(_) => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads.0 {
        pool = pool.num_threads(n);
    }
    if let Err(e) = pool.build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    match commands::run(&cli.common, &cli.command) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            // A closed pipe on stdout is not a failure; the files are already written.
            let _ = writeln!(io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
