//! Self-correlations `c_{n,N} = (1/N) Σ_{m≤N} A(m)A(m+n)` and the averages
//! built from them.
//!
//! Every lag is produced by one FFT cross-correlation. For integer-valued
//! weights the numerators are rounded to integers; any lag whose rounding
//! residual reaches [`ROUNDING_GUARD`] is recomputed by direct summation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};
use crate::fft::FftPlan;
use crate::numeric::{pairwise_sum, NeumaierSum};
use crate::oracle;
use crate::sieve::{sieve_window, FunctionKind, FunctionTable, SieveConfig};

/// Largest rounding residual accepted before falling back to direct sums.
pub const ROUNDING_GUARD: f64 = 0.25;
/// Above this many terms FFT numerators are no longer guaranteed exact.
pub const EXACT_THRESHOLD: u64 = 1 << 26;
const EXACT_MODE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AutocorrOptions {
    /// Cross-check a fixed sample of lags against direct sums and fail with
    /// a consistency error on any mismatch.
    pub exact_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub kind: FunctionKind,
    pub n_terms: u64,
    pub max_lag: u64,
    /// `values[n] = c_{n,N}` for `n = 0..=max_lag`.
    pub values: Vec<f64>,
    /// Integer numerators `N·c_{n,N}` when the weight is integer valued.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerators: Option<Vec<i64>>,
    /// Lags recomputed directly because the FFT rounding residual was too large.
    pub fallback_lags: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_warning: Option<String>,
}

impl CorrelationProfile {
    pub fn lag(&self, n: u64) -> Option<f64> {
        self.values.get(n as usize).copied()
    }

    /// `(1/(H·N)) Σ_{h=1}^{H} |N·c_{h,N}|`, exact when numerators are known.
    fn mean_abs_lags(&self, upto: u64) -> f64 {
        let denom = upto as f64 * self.n_terms as f64;
        match &self.numerators {
            Some(nums) => {
                let s: u128 = nums[1..=upto as usize]
                    .iter()
                    .map(|x| x.unsigned_abs() as u128)
                    .sum();
                s as f64 / denom
            }
            None => {
                let abs: Vec<f64> = self.values[1..=upto as usize]
                    .iter()
                    .map(|c| c.abs() * self.n_terms as f64)
                    .collect();
                pairwise_sum(&abs) / denom
            }
        }
    }
}

/// Round FFT output to integers, recomputing suspicious lags directly.
fn integerise(raw: &[f64], data: &[f64], n_terms: usize) -> (Vec<i64>, u64) {
    let mut fallbacks = 0;
    let nums = raw
        .iter()
        .enumerate()
        .map(|(lag, &r)| {
            let rounded = r.round();
            if (r - rounded).abs() < ROUNDING_GUARD {
                rounded as i64
            } else {
                fallbacks += 1;
                oracle::lag_product_sum_int(data, n_terms, lag)
            }
        })
        .collect();
    (nums, fallbacks)
}

pub fn autocorrelation(table: &FunctionTable, n_terms: u64, max_lag: u64) -> Result<CorrelationProfile> {
    autocorrelation_with(table, n_terms, max_lag, AutocorrOptions::default())
}

pub fn autocorrelation_with(
    table: &FunctionTable,
    n_terms: u64,
    max_lag: u64,
    options: AutocorrOptions,
) -> Result<CorrelationProfile> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    table.require(1, n_terms + max_lag)?;
    let data = table.range(1, n_terms + max_lag);
    let n = n_terms as usize;
    let plan = FftPlan::at_least(n + max_lag as usize);
    let raw = plan.cross_correlate(&data[..n], data, max_lag as usize);

    let integer = table.kind().is_integer_valued();
    let (values, numerators, fallback_lags) = if integer {
        let (nums, fb) = integerise(&raw, data, n);
        let vals: Vec<f64> = nums.iter().map(|&x| x as f64 / n_terms as f64).collect();
        (vals, Some(nums), fb)
    } else {
        (raw.iter().map(|&x| x / n_terms as f64).collect(), None, 0)
    };

    if options.exact_mode {
        let step = (max_lag as usize / EXACT_MODE_SAMPLES).max(1);
        for lag in (0..=max_lag as usize).step_by(step) {
            let direct = oracle::lag_product_sum(data, n, lag);
            let got = match &numerators {
                Some(nums) => nums[lag] as f64,
                None => values[lag] * n_terms as f64,
            };
            let tol = if integer { 0.0 } else { 1e-9 * direct.abs().max(1.0) };
            if (got - direct).abs() > tol {
                return Err(ArfError::Consistency(format!(
                    "lag {lag}: FFT numerator {got} but direct sum {direct}"
                )));
            }
        }
    }

    let precision_warning = (integer && n_terms > EXACT_THRESHOLD && !options.exact_mode).then(|| {
        format!("N = {n_terms} exceeds the exactness threshold {EXACT_THRESHOLD}; rerun in exact mode")
    });

    Ok(CorrelationProfile {
        kind: table.kind(),
        n_terms,
        max_lag,
        values,
        numerators,
        fallback_lags,
        precision_warning,
    })
}

/// `(1/N) Σ_{n=1}^{N} |c_{n,N}|`. Lag 0 is excluded.
pub fn cesaro_abs(profile: &CorrelationProfile) -> Result<f64> {
    if profile.max_lag < profile.n_terms {
        return Err(ArfError::usage(format!(
            "Cesàro mean needs lags up to N = {}, profile stops at {}",
            profile.n_terms, profile.max_lag
        )));
    }
    Ok(profile.mean_abs_lags(profile.n_terms))
}

/// `(1/(H·X)) Σ_{h=1}^{H} |Σ_{n=1}^{X} ν(n)ν(n+h)|`.
pub fn mrt_window_sum(table: &FunctionTable, x_terms: u64, window: u64) -> Result<f64> {
    if window == 0 || window > x_terms {
        return Err(ArfError::usage(format!(
            "window H = {window} must satisfy 1 <= H <= X = {x_terms}"
        )));
    }
    let profile = autocorrelation(table, x_terms, window)?;
    Ok(profile.mean_abs_lags(window))
}

/// `(1/N) Σ_{m=1}^{N} ν(m)²ν(m+p)²`.
pub fn squared_correlation(table: &FunctionTable, n_terms: u64, lag: u64) -> Result<f64> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    table.require(1, n_terms + lag)?;
    let v = table.range(1, n_terms + lag);
    let n = n_terms as usize;
    let l = lag as usize;
    let s: NeumaierSum = (0..n).map(|i| (v[i] * v[i + l]).powi(2)).collect();
    Ok(s.value() / n_terms as f64)
}

/// `(1/N²) Σ_{n,p=1}^{N} |(1/N) Σ_{m=1}^{N} ν(m)ν(n+m)ν(m+p)ν(n+m+p)|`.
///
/// For each `p` the inner sums over `n` are the autocorrelation of
/// `b_m = ν(m)ν(m+p)`, one FFT per `p`; `p` values run in parallel and
/// are reduced in a fixed order.
pub fn order3_quantity(table: &FunctionTable, n_terms: u64) -> Result<f64> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    table.require(1, 3 * n_terms)?;
    let nu = table.range(1, 3 * n_terms);
    let n = n_terms as usize;
    let plan = FftPlan::at_least(2 * n);
    let integer = table.kind().is_integer_valued();

    let per_p: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|p| {
            let b: Vec<f64> = (0..2 * n).map(|i| nu[i] * nu[i + p]).collect();
            let raw = plan.cross_correlate(&b[..n], &b, n);
            if integer {
                let (nums, _) = integerise(&raw, &b, n);
                nums[1..].iter().map(|x| x.unsigned_abs()).sum::<u64>() as f64
            } else {
                let abs: Vec<f64> = raw[1..].iter().map(|x| x.abs()).collect();
                pairwise_sum(&abs)
            }
        })
        .collect();

    let total = if integer {
        // integers below 2^53: exact in any order
        per_p.iter().map(|&x| x as u128).sum::<u128>() as f64
    } else {
        pairwise_sum(&per_p)
    };
    Ok(total / (n_terms as f64).powi(3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricLevel {
    pub m: u32,
    /// `⌊ρ^m⌋`
    pub n: u64,
    pub mean_abs: f64,
    pub partial_sum: f64,
    pub witness_lag: u64,
    pub witness_value: f64,
}

/// Partial sums of `Σ_m (1/⌊ρ^m⌋) Σ_{n≤⌊ρ^m⌋} |c_{n,⌊ρ^m⌋}|` together with
/// the lag of smallest `|c|` at each level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummabilitySeries {
    pub rho: f64,
    pub levels: Vec<GeometricLevel>,
}

impl GeometricSummabilitySeries {
    pub fn partial_sums(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.partial_sum).collect()
    }

    pub fn witness_pairs(&self) -> Vec<(u32, u64, f64)> {
        self.levels
            .iter()
            .map(|l| (l.m, l.witness_lag, l.witness_value))
            .collect()
    }
}

fn geometric_sizes(rho: f64, levels: u32) -> Result<Vec<u64>> {
    if rho.is_nan() || rho <= 1.0 || !rho.is_finite() {
        return Err(ArfError::usage(format!("rho must exceed 1, got {rho}")));
    }
    if levels == 0 {
        return Err(ArfError::usage("need at least one level"));
    }
    Ok((1..=levels)
        .map(|m| rho.powi(m as i32).floor() as u64)
        .collect())
}

pub fn geometric_summability_with(
    table: &FunctionTable,
    rho: f64,
    levels: u32,
) -> Result<GeometricSummabilitySeries> {
    let sizes = geometric_sizes(rho, levels)?;
    let largest = *sizes.last().unwrap();
    table.require(1, 2 * largest)?;
    let per_level = sizes
        .par_iter()
        .map(|&n| {
            let prof = autocorrelation(table, n, n)?;
            let mean = cesaro_abs(&prof)?;
            let (lag, val) = (1..=n)
                .map(|h| (h, prof.values[h as usize]))
                .fold((1, f64::INFINITY), |best, cur| {
                    if cur.1.abs() < best.1.abs() {
                        cur
                    } else {
                        best
                    }
                });
            Ok((n, mean, lag, val))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut running = 0.0;
    let levels = per_level
        .into_iter()
        .enumerate()
        .map(|(i, (n, mean_abs, witness_lag, witness_value))| {
            running += mean_abs;
            GeometricLevel {
                m: i as u32 + 1,
                n,
                mean_abs,
                partial_sum: running,
                witness_lag,
                witness_value,
            }
        })
        .collect();
    Ok(GeometricSummabilitySeries { rho, levels })
}

pub fn geometric_summability(kind: FunctionKind, rho: f64, levels: u32) -> Result<GeometricSummabilitySeries> {
    let sizes = geometric_sizes(rho, levels)?;
    let limit = 2 * sizes.last().unwrap();
    let table = sieve_window(kind, 1, limit, &SieveConfig::default())?;
    geometric_summability_with(&table, rho, levels)
}
