use std::path::PathBuf;

use arf_core::{FunctionKind, Ladder, GOLDEN};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::system::SystemSpec;

#[derive(Debug, Parser)]
#[command(name = "arf", version, about = "Sieves, exponential sums, correlations and cubic averages")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Run-environment options. They never change results and are left out of
/// the configuration embedded in output files.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file. CSV outputs get a JSON sidecar with the same stem.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Table cache directory; ARF_CACHE_DIR takes precedence.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Also write a gnuplot script next to a CSV output.
    #[arg(long, global = true)]
    pub plot: bool,

    /// Cross-check fast paths against direct evaluation; mismatches exit with 4.
    #[arg(long, global = true)]
    pub check: bool,

    /// Largest sieve limit in entries.
    #[arg(long, global = true, default_value_t = arf_core::sieve::DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Sieve a function table and store it in the cache.
    Sieve(SieveArgs),
    /// Weighted exponential sum at one frequency, or |S|/N along a ladder.
    Expsum(ExpsumArgs),
    /// Grid supremum of |(1/N) Σ ν(n) e(nt)| along a ladder.
    Supnorm(SupnormArgs),
    /// Self-correlation coefficients c_{n,N} for lags 0..=maxlag.
    Corr(CorrArgs),
    /// Cesàro mean of |c_{n,N}| along a ladder.
    Cesaro(WeightLadderArgs),
    /// Order-3 correlation quantity along a ladder.
    Order3(WeightLadderArgs),
    /// Geometric-level Cesàro means and their partial sums.
    Geom(GeomArgs),
    /// Moving-window sum (1/HX) Σ_h |Σ_x ν(x)ν(x+h)|.
    Mrt(MrtArgs),
    /// Cube sums over [1,N]^k.
    Cube(CubeArgs),
    /// Gowers box norm of a table prefix.
    Gowers(GowersArgs),
    /// Local von Mangoldt factor β_p.
    Localfactor(LocalFactorArgs),
    /// Mangoldt box sum next to the partial local product.
    #[command(name = "mangoldt-box")]
    MangoldtBox(MangoldtBoxArgs),
    /// W-tricked prime-only von Mangoldt values.
    Wtrick(WtrickArgs),
    /// Gap between prime averages and Λ'-weighted averages of e(nφ).
    Primeavg(PrimeavgArgs),
    /// Weighted cubic averages along rotation or polynomial orbits.
    Cubicavg(CubicavgArgs),
    /// Both sides of the prime-pair correlation criterion.
    Kbsz(KbszArgs),
    /// Twisted grid supremum sup_t |(1/N) Σ ν(n) f(T^n x) e(nt)|.
    Wws(WwsArgs),
    /// Fit decay models to an `n,value` CSV file.
    Fit(FitArgs),
    /// Re-run the configuration embedded in an earlier output file.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SieveArgs {
    #[arg(long)]
    pub kind: FunctionKind,
    #[arg(long)]
    pub limit: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long, conflicts_with = "ladder")]
    pub n: Option<u64>,
    #[arg(long)]
    pub ladder: Option<Ladder>,
    #[arg(long, default_value_t = GOLDEN, conflicts_with = "coeffs")]
    pub t: f64,
    /// Polynomial phase coefficients a0,a1,…; replaces --t.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SupnormArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub ladder: Ladder,
    /// Grid size K = grid_mult·N; at least 8.
    #[arg(long, default_value_t = 8)]
    pub grid_mult: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CorrArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub maxlag: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WeightLadderArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub ladder: Ladder,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GeomArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub levels: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MrtArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub h: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CubeArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long, conflicts_with = "ladder")]
    pub n: Option<u64>,
    #[arg(long)]
    pub ladder: Option<Ladder>,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Add a base point to every cube.
    #[arg(long)]
    pub base: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GowersArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LocalFactorArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: u32,
    /// Print the exact rational instead of the decimal value.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MangoldtBoxArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Primes up to this cutoff enter the local product.
    #[arg(long, default_value_t = 100)]
    pub cutoff: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WtrickArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub w: u64,
    #[arg(long)]
    pub b: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PrimeavgArgs {
    #[arg(long)]
    pub ladder: Ladder,
    /// Frequency φ of a_n = e(nφ).
    #[arg(long, default_value_t = GOLDEN)]
    pub phi: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CubicavgArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long)]
    pub ladder: Ladder,
    /// One system per cube face: `rot:ALPHA:K`, `poly:a0,a1,…` or `one`.
    /// A single system is repeated on every face.
    #[arg(long = "system", default_value = "rot:golden:1")]
    pub systems: Vec<SystemSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial points sampled per ladder entry.
    #[arg(long, default_value_t = arf_core::dynamics::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Mangoldt weight only: report the average with Λ − 1 at every face.
    #[arg(long)]
    pub centered: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KbszArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long, default_value = "rot:golden:1")]
    pub system: SystemSpec,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WwsArgs {
    #[arg(long)]
    pub weight: FunctionKind,
    #[arg(long, default_value = "rot:golden:1")]
    pub system: SystemSpec,
    #[arg(long)]
    pub ladder: Ladder,
    #[arg(long, default_value_t = 8)]
    pub grid_mult: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV file with `n,value` rows; `#` lines are skipped.
    pub points: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A CSV or JSON file written by an earlier run.
    pub file: PathBuf,
}
