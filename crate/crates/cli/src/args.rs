//! Command-line argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "mbound",
    version,
    about = "Sharp constants for moment-constrained Hardy averages of monotone functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the sharp constant for a shape pair or a moment triple
    Bound(BoundArgs),
    /// Check every inequality against a step function read from a file
    Verify(VerifyArgs),
    /// Tabulate the bound over a grid of shapes (deterministic CSV)
    Sweep(SweepArgs),
    /// Construct the equality-case power function
    Extremal(ExtremalArgs),
    /// Seeded randomized search for near-extremal step functions
    Search(SearchArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args)]
pub struct CommonArgs {
    /// Larger exponent (1 < q < p)
    #[arg(short = 'p', long = "p")]
    pub p: f64,

    /// Smaller exponent
    #[arg(short = 'q', long = "q")]
    pub q: f64,

    /// Absolute residual tolerance for root searches
    #[arg(long, default_value_t = 1e-12)]
    pub root_tol: f64,

    /// Relative tolerance for quadrature
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Write the report to a file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl CommonArgs {
    pub fn validate(&self) -> Result<(), super::Failure> {
        for (name, v) in [("--root-tol", self.root_tol), ("--quad-tol", self.quad_tol)] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(super::Failure::usage(format!(
                    "{name} must be positive and at most 1e-4 (got {v})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Shape parameter s1 in (0, 1]
    #[arg(long)]
    pub s1: Option<f64>,

    /// Shape parameter s2 in (0, 1]
    #[arg(long)]
    pub s2: Option<f64>,

    /// First moment (requires --y, --z, --kappa)
    #[arg(long)]
    pub x: Option<f64>,

    /// q-th moment
    #[arg(long)]
    pub y: Option<f64>,

    /// p-th moment
    #[arg(long)]
    pub z: Option<f64>,

    /// Domain length in (0, 1]
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Step function record {kappa, breakpoints, values}
    pub file: PathBuf,

    /// Check the base inequality at this single parameter instead of a grid
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// s1 axis: a value or LO:HI:N
    #[arg(long)]
    pub s1: Option<Axis>,

    /// s2 axis: a value or LO:HI:N
    #[arg(long)]
    pub s2: Option<Axis>,

    /// eps axis sweeping the equality family: a value or LO:HI:N
    #[arg(long)]
    pub eps: Option<Axis>,
}

#[derive(Args)]
pub struct ExtremalArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Exponent parameter in (1, p/(p-1))
    #[arg(long)]
    pub eps: Option<f64>,

    /// Domain length kappa0 in (0, 1]
    #[arg(long)]
    pub kappa: Option<f64>,

    /// First moment of the constructed function
    #[arg(long)]
    pub f: Option<f64>,

    /// Solve the compatibility equation for kappa0 and eps0 from (f, A, F)
    #[arg(long)]
    pub from_moments: bool,

    /// q-th moment (with --from-moments)
    #[arg(long = "A")]
    pub big_a: Option<f64>,

    /// p-th moment (with --from-moments)
    #[arg(long = "F")]
    pub big_f: Option<f64>,
}

#[derive(Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Shape parameter s1
    #[arg(long)]
    pub s1: f64,

    /// Shape parameter s2
    #[arg(long)]
    pub s2: f64,

    /// Number of steps of the candidate functions
    #[arg(long, default_value_t = 64)]
    pub n_steps: usize,

    /// Number of search iterations
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,

    /// RNG seed (the search is deterministic given the seed)
    #[arg(long)]
    pub seed: u64,

    /// Where to write the best step function record
    #[arg(long = "function-file", default_value = "best_step.json")]
    pub function_file: PathBuf,
}

/// A sweep axis: either a single value or an inclusive range with a count.
#[derive(Copy, Clone, Debug)]
pub enum Axis {
    Single(f64),
    Range { lo: f64, hi: f64, n: usize },
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((lo, rest)) = s.split_once(':') {
            let (hi, n) = rest
                .split_once(':')
                .ok_or_else(|| format!("axis '{s}' must be VALUE or LO:HI:N"))?;
            let lo: f64 = lo.parse().map_err(|_| format!("bad axis start '{lo}'"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad axis end '{hi}'"))?;
            let n: usize = n.parse().map_err(|_| format!("bad axis count '{n}'"))?;
            if n == 0 {
                return Err("axis count must be at least 1".into());
            }
            Ok(Axis::Range { lo, hi, n })
        } else {
            let v: f64 = s.parse().map_err(|_| format!("bad axis value '{s}'"))?;
            Ok(Axis::Single(v))
        }
    }
}
