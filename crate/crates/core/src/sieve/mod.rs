//! Segmented sieving of arithmetic functions on integer windows.
//!
//! All kinds are produced by one factor-counting sieve: for each integer in a
//! segment we divide out every prime power `p^k` with `p ≤ √limit`, tracking
//! the total number of prime factors Ω, the number of distinct primes, a
//! square-free flag and the last small prime seen. Whatever remains after the
//! small primes is 1 or a single large prime.

mod cache;

pub use cache::{load_table, save_table, TableCache, FORMAT_VERSION, MAGIC};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};

/// Default cap on the number of entries in one table.
pub const DEFAULT_BUDGET: u64 = 1 << 27;
/// Default segment length used by the sieve.
pub const DEFAULT_SEGMENT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Mobius,
    Liouville,
    Mangoldt,
    Omega,
    /// The constant function 1.
    Unit,
    SquarefreeIndicator,
    /// Anything not produced by the sieve (derived or user-supplied values).
    Custom,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 7] = [
        FunctionKind::Mobius,
        FunctionKind::Liouville,
        FunctionKind::Mangoldt,
        FunctionKind::Omega,
        FunctionKind::Unit,
        FunctionKind::SquarefreeIndicator,
        FunctionKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Mobius => "mobius",
            FunctionKind::Liouville => "liouville",
            FunctionKind::Mangoldt => "mangoldt",
            FunctionKind::Omega => "omega",
            FunctionKind::Unit => "unit",
            FunctionKind::SquarefreeIndicator => "squarefree-indicator",
            FunctionKind::Custom => "custom",
        }
    }

    /// Whether every value is an integer, so that correlation numerators
    /// are integers too.
    pub fn is_integer_valued(self) -> bool {
        !matches!(self, FunctionKind::Mangoldt | FunctionKind::Custom)
    }

    /// Whether every value lies in [-1, 1].
    pub fn is_bounded_by_one(self) -> bool {
        matches!(
            self,
            FunctionKind::Mobius
                | FunctionKind::Liouville
                | FunctionKind::Unit
                | FunctionKind::SquarefreeIndicator
        )
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = ArfError;

    fn from_str(s: &str) -> Result<Self> {
        let k = match s {
            "mobius" | "mu" => FunctionKind::Mobius,
            "liouville" | "lambda" => FunctionKind::Liouville,
            "mangoldt" | "vonmangoldt" => FunctionKind::Mangoldt,
            "omega" => FunctionKind::Omega,
            "unit" | "one" => FunctionKind::Unit,
            "squarefree-indicator" | "squarefree" => FunctionKind::SquarefreeIndicator,
            "custom" => FunctionKind::Custom,
            other => return Err(ArfError::usage(format!("unknown function kind `{other}`"))),
        };
        Ok(k)
    }
}

/// Values of an arithmetic function on `[offset, offset + len)`.
///
/// Indices are the integers themselves; there is no index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    kind: FunctionKind,
    offset: u64,
    values: Vec<f64>,
}

impl FunctionTable {
    pub fn new(kind: FunctionKind, offset: u64, values: Vec<f64>) -> Result<Self> {
        if offset == 0 {
            return Err(ArfError::usage("tables start at n = 1 or later"));
        }
        if values.is_empty() {
            return Err(ArfError::usage("tables must hold at least one value"));
        }
        Ok(FunctionTable { kind, offset, values })
    }

    /// A custom table on `[1, len]` filled from `f(n)`.
    pub fn from_fn(len: u64, f: impl Fn(u64) -> f64) -> Result<Self> {
        Self::new(FunctionKind::Custom, 1, (1..=len).map(f).collect())
    }

    /// Constant-one table on `[1, len]`.
    pub fn unit(len: u64) -> Self {
        FunctionTable {
            kind: FunctionKind::Unit,
            offset: 1,
            values: vec![1.0; len.max(1) as usize],
        }
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last integer covered (inclusive).
    pub fn last(&self) -> u64 {
        self.offset + self.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<f64> {
        n.checked_sub(self.offset)
            .and_then(|i| self.values.get(i as usize).copied())
    }

    /// Checks that `[lo, hi]` is covered.
    pub fn require(&self, lo: u64, hi: u64) -> Result<()> {
        if lo < self.offset || hi > self.last() {
            return Err(ArfError::Coverage {
                need_lo: lo,
                need_hi: hi,
                have_lo: self.offset,
                have_hi: self.last(),
            });
        }
        Ok(())
    }

    /// Values on `[lo, hi]`; `require` must have succeeded for that range.
    pub fn range(&self, lo: u64, hi: u64) -> &[f64] {
        let a = (lo - self.offset) as usize;
        let b = (hi - self.offset) as usize;
        &self.values[a..=b]
    }

    /// Copy with every value mapped through `f`, tagged custom.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> FunctionTable {
        FunctionTable {
            kind: FunctionKind::Custom,
            offset: self.offset,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Memory budget and segment length for the sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub budget: u64,
    pub segment: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            budget: DEFAULT_BUDGET,
            segment: DEFAULT_SEGMENT,
        }
    }
}

impl SieveConfig {
    pub fn check_budget(&self, what: &str, requested: u64) -> Result<()> {
        if requested > self.budget {
            return Err(ArfError::Resource {
                what: what.to_string(),
                requested,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// Sieves `kind` on `[1, limit]` with the default configuration.
pub fn sieve_table(kind: FunctionKind, limit: u64) -> Result<FunctionTable> {
    sieve_window(kind, 1, limit, &SieveConfig::default())
}

/// Sieves `kind` on `[offset, offset + length)`.
pub fn sieve_window(
    kind: FunctionKind,
    offset: u64,
    length: u64,
    config: &SieveConfig,
) -> Result<FunctionTable> {
    let target = match kind {
        FunctionKind::Custom => {
            return Err(ArfError::usage("custom tables cannot be sieved"));
        }
        FunctionKind::Unit => None,
        k => Some(Target::Kind(k)),
    };
    sieve_target(kind, target, offset, length, config)
}

/// Λ restricted to primes: `log p` at primes, 0 everywhere else (including
/// higher prime powers). Returned as a custom table on `[1, limit]`.
pub fn sieve_prime_logs(limit: u64, config: &SieveConfig) -> Result<FunctionTable> {
    sieve_target(
        FunctionKind::Custom,
        Some(Target::PrimeLog),
        1,
        limit,
        config,
    )
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Kind(FunctionKind),
    PrimeLog,
}

fn sieve_target(
    tag: FunctionKind,
    target: Option<Target>,
    offset: u64,
    length: u64,
    config: &SieveConfig,
) -> Result<FunctionTable> {
    if offset == 0 || length == 0 {
        return Err(ArfError::usage("sieve window must be non-empty and start at n >= 1"));
    }
    if config.segment == 0 {
        return Err(ArfError::usage("segment length must be positive"));
    }
    config.check_budget(&format!("{tag} table"), length)?;
    let last = offset
        .checked_add(length - 1)
        .ok_or_else(|| ArfError::usage("sieve window overflows u64"))?;
    let Some(target) = target else {
        return FunctionTable::new(tag, offset, vec![1.0; length as usize]);
    };

    let primes = small_primes(isqrt(last));
    let starts: Vec<u64> = (0..length.div_ceil(config.segment))
        .map(|i| offset + i * config.segment)
        .collect();
    let chunks: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + config.segment - 1).min(last);
            sieve_segment(target, lo, hi, &primes)
        })
        .collect();
    let mut values = Vec::with_capacity(length as usize);
    for c in chunks {
        values.extend(c);
    }
    FunctionTable::new(tag, offset, values)
}

fn sieve_segment(target: Target, lo: u64, hi: u64, primes: &[u64]) -> Vec<f64> {
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut big_omega = vec![0u8; len];
    let mut distinct = vec![0u8; len];
    let mut squarefree = vec![true; len];
    let mut last_small = vec![0u64; len];

    for &p in primes {
        if p > hi {
            break;
        }
        let mut pk = p;
        let mut k = 1;
        loop {
            let first = lo.div_ceil(pk) * pk;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                rem[i] /= p;
                big_omega[i] += 1;
                if k == 1 {
                    distinct[i] += 1;
                    last_small[i] = p;
                } else if k == 2 {
                    squarefree[i] = false;
                }
                m += pk;
            }
            match pk.checked_mul(p) {
                Some(next) if next <= hi => {
                    pk = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }

    (0..len)
        .map(|i| {
            let n = lo + i as u64;
            let (omega, dist, prime_base) = if rem[i] > 1 {
                (big_omega[i] + 1, distinct[i] + 1, rem[i])
            } else {
                (big_omega[i], distinct[i], last_small[i])
            };
            let parity = if omega % 2 == 0 { 1.0 } else { -1.0 };
            match target {
                Target::Kind(FunctionKind::Mobius) => {
                    if squarefree[i] {
                        parity
                    } else {
                        0.0
                    }
                }
                Target::Kind(FunctionKind::Liouville) => parity,
                Target::Kind(FunctionKind::Mangoldt) => {
                    if dist == 1 {
                        (prime_base as f64).ln()
                    } else {
                        0.0
                    }
                }
                Target::Kind(FunctionKind::Omega) => f64::from(omega),
                Target::Kind(FunctionKind::SquarefreeIndicator) => {
                    if squarefree[i] {
                        1.0
                    } else {
                        0.0
                    }
                }
                Target::Kind(FunctionKind::Unit | FunctionKind::Custom) => 1.0,
                Target::PrimeLog => {
                    if omega == 1 {
                        (n as f64).ln()
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect()
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes up to and including `limit` by a plain Eratosthenes sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
