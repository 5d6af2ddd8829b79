use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcdist::density::Family;
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 2013;

#[derive(Debug, Parser)]
#[command(name = "fcdist", version, about = "Fuss-Catalan and Raney densities, moments and cross-checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the random parts (mc, selftest, verify-all).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Fuss-Catalan or Raney numbers.
    Seq(SeqArgs),
    /// Density values on a grid or at given points.
    Density(DensityArgs),
    /// Quadrature moments against the exact sequence.
    Moments(MomentsArgs),
    /// Mellin-convolution reconstruction against the series evaluation.
    Oracle(OracleArgs),
    /// Squared singular values of Ginibre products against P_s.
    Mc(McArgs),
    /// Curve data of one of the six density plots.
    Figure(FigureArgs),
    /// Special-function and integer identity checks.
    Selftest,
    /// Every check, with a short Monte-Carlo run.
    VerifyAll(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Seq(_) => "seq",
            Command::Density(_) => "density",
            Command::Moments(_) => "moments",
            Command::Oracle(_) => "oracle",
            Command::Mc(_) => "mc",
            Command::Figure(_) => "figure",
            Command::Selftest => "selftest",
            Command::VerifyAll(_) => "verify-all",
        }
    }

    pub fn uses_seed(&self) -> bool {
        matches!(self, Command::Mc(_) | Command::Selftest | Command::VerifyAll(_))
    }
}

/// `--s S` selects `P_s`, `--p P --r R` selects `W_{p,r}`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

impl FamilyArgs {
    /// Checks which flags were given; the ranges are checked by the library.
    pub fn family(&self, problems: &mut Vec<String>) -> Option<Family> {
        match (self.s, self.p, self.r) {
            (Some(s), None, None) => {
                if s < 1 {
                    problems.push("--s must be >= 1".into());
                    return None;
                }
                Some(Family::FussCatalan { s })
            }
            (None, Some(p), Some(r)) => {
                if p < 1 || r < 1 {
                    problems.push(format!("--p {p} and --r {r} must both be >= 1"));
                    return None;
                }
                Some(Family::Raney { p, r })
            }
            _ => {
                problems.push("give either --s, or both --p and --r".into());
                None
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SeqArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Number of equally spaced points on (0, K].
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Evaluate at these points instead of a grid (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
    /// Relative tolerance; 1e-8 for P_s and 1e-7 for W_{p,r} by default.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McTable {
    Histogram,
    Moments,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Matrix size.
    #[arg(long = "n", default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value = "complex")]
    pub ensemble: String,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Which table to write in CSV mode.
    #[arg(long, value_enum, default_value_t = McTable::Histogram)]
    pub table: McTable,
}

#[derive(Debug, Args, Serialize)]
pub struct FigureArgs {
    /// fig1 .. fig6
    pub id: String,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Skip the Monte-Carlo checks.
    #[arg(long)]
    pub no_mc: bool,
    #[arg(long, default_value_t = 1024)]
    pub oracle_grid: usize,
}
