//! Weighted exponential sums `Σ ν(n) e^{2πi·φ(n)}` and their suprema over
//! frequency grids.

mod fit;

pub use fit::{fit_best, fit_decay, DecayFit, DecayModel, DecayPoint, FitFlag, NO_DECAY_TOLERANCE};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};
use crate::fft::FftPlan;
use crate::ladder::Ladder;
use crate::numeric::{poly_phase, ComplexSum, Phase};
use crate::sieve::{sieve_window, FunctionKind, FunctionTable, SieveConfig};

/// Smallest allowed ratio of grid size to number of terms.
pub const MIN_GRID_MULTIPLIER: u64 = 8;
/// Largest polynomial degree accepted by [`poly_exp_sum`].
pub const MAX_POLY_DEGREE: usize = 6;
/// Golden ratio conjugate `(√5 − 1)/2`, the default irrational.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

const CHUNK: u64 = 1 << 16;

/// Supremum of `|S(t)|/N` over the grid `t = j/K`.
///
/// A degree-`N` trigonometric polynomial sampled at `K > 2N` equidistant
/// points satisfies `sup_t |S(t)| ≤ max_j |S(j/K)| / cos(πN/K)`, which is the
/// `error_factor` carried here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSupremum {
    pub n_terms: u64,
    pub grid_size: u64,
    pub sup_value: f64,
    pub argmax_t: f64,
    pub error_factor: f64,
}

impl GridSupremum {
    /// Certified upper bound on the continuous supremum.
    pub fn upper_bound(&self) -> f64 {
        self.sup_value * self.error_factor
    }
}

/// `Σ_{n=lo}^{hi} w(n)·e^{2πi·phase(n)}` in fixed chunks, each compensated,
/// then combined in chunk order. The result does not depend on the thread
/// count.
pub(crate) fn compensated_sum<W, P>(lo: u64, hi: u64, weight: W, phase: P) -> Complex64
where
    W: Fn(u64) -> Complex64 + Sync,
    P: Fn(u64) -> Phase + Sync,
{
    if hi < lo {
        return Complex64::new(0.0, 0.0);
    }
    let chunks: Vec<u64> = (0..=(hi - lo) / CHUNK).map(|i| lo + i * CHUNK).collect();
    let partials: Vec<Complex64> = chunks
        .par_iter()
        .map(|&a| {
            let b = (a + CHUNK - 1).min(hi);
            let mut s = ComplexSum::new();
            for n in a..=b {
                let w = weight(n);
                if w.re != 0.0 || w.im != 0.0 {
                    s.add(w * phase(n).cis());
                }
            }
            s.value()
        })
        .collect();
    partials.into_iter().collect::<ComplexSum>().value()
}

/// Unnormalised `Σ_{n=1}^{N} ν(n)·e^{2πint}`.
pub fn exp_sum(table: &FunctionTable, n_terms: u64, t: f64) -> Result<Complex64> {
    table.require(1, n_terms)?;
    let vals = table.range(1, n_terms);
    let freq = Phase::new(t);
    Ok(compensated_sum(
        1,
        n_terms,
        |n| Complex64::new(vals[(n - 1) as usize], 0.0),
        |n| freq.times(n),
    ))
}

/// Unnormalised `Σ_{n=1}^{N} ν(n)·e^{2πi·p(n)}` with `p(n) = Σ_j coeffs[j]·n^j`.
pub fn poly_exp_sum(table: &FunctionTable, n_terms: u64, coeffs: &[f64]) -> Result<Complex64> {
    if coeffs.len() > MAX_POLY_DEGREE + 1 {
        return Err(ArfError::usage(format!(
            "polynomial degree {} exceeds the maximum {MAX_POLY_DEGREE}",
            coeffs.len() - 1
        )));
    }
    table.require(1, n_terms)?;
    let vals = table.range(1, n_terms);
    Ok(compensated_sum(
        1,
        n_terms,
        |n| Complex64::new(vals[(n - 1) as usize], 0.0),
        |n| poly_phase(coeffs, n),
    ))
}

/// Grid supremum of `|(1/N) Σ_{n=1}^{N} c_n e^{2πint}|` for complex
/// coefficients `c_1..c_N` (slice index 0 holds `c_1`).
///
/// The grid is evaluated by one length-`K` FFT; the winning grid point is
/// then re-evaluated by a compensated direct sum with exact rational phases.
pub fn grid_supremum(coeffs: &[Complex64], grid_size: u64) -> Result<GridSupremum> {
    let n_terms = coeffs.len() as u64;
    if n_terms == 0 {
        return Err(ArfError::usage("grid supremum needs at least one term"));
    }
    if grid_size < MIN_GRID_MULTIPLIER * n_terms {
        return Err(ArfError::usage(format!(
            "grid size {grid_size} is below the 8N rule (N = {n_terms}, need K >= {})",
            MIN_GRID_MULTIPLIER * n_terms
        )));
    }
    let k = grid_size as usize;
    let plan = FftPlan::new(k);
    let grid = plan.evaluate_grid(coeffs, 1);
    let mut best = 0usize;
    let mut best_norm = f64::NEG_INFINITY;
    for (j, z) in grid.iter().enumerate() {
        let v = z.norm_sqr();
        if v > best_norm {
            best_norm = v;
            best = j;
        }
    }
    let j = best as u64;
    let refined = compensated_sum(
        1,
        n_terms,
        |n| coeffs[(n - 1) as usize],
        |n| Phase::new(((n as u128 * j as u128) % grid_size as u128) as f64 / grid_size as f64),
    );
    Ok(GridSupremum {
        n_terms,
        grid_size,
        sup_value: refined.norm() / n_terms as f64,
        argmax_t: j as f64 / grid_size as f64,
        error_factor: 1.0 / (PI * n_terms as f64 / grid_size as f64).cos(),
    })
}

/// Supremum over the `K`-point grid of `|(1/N) Σ ν(n) e^{2πint}|`.
pub fn sup_exp_sum(table: &FunctionTable, n_terms: u64, grid_size: u64) -> Result<GridSupremum> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    table.require(1, n_terms)?;
    let coeffs: Vec<Complex64> = table
        .range(1, n_terms)
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    grid_supremum(&coeffs, grid_size)
}

fn check_grid_rule(grid_rule: u64) -> Result<()> {
    if grid_rule < MIN_GRID_MULTIPLIER {
        return Err(ArfError::usage(format!(
            "grid multiplier {grid_rule} is below the 8N rule"
        )));
    }
    Ok(())
}

/// Grid suprema along a ladder, with `K = grid_rule·N` at each point.
pub fn dd_suprema(
    table: &FunctionTable,
    ladder: &Ladder,
    grid_rule: u64,
) -> Result<Vec<GridSupremum>> {
    ladder.require_increasing(1)?;
    check_grid_rule(grid_rule)?;
    table.require(1, ladder.max().unwrap_or(1))?;
    ladder
        .points()
        .par_iter()
        .map(|&n| sup_exp_sum(table, n, grid_rule * n))
        .collect()
}

/// Empirical Daboussi–Delange profile of an already sieved table: grid
/// suprema along the ladder, fitted with the log-power model.
pub fn dd_profile_with(table: &FunctionTable, ladder: &Ladder, grid_rule: u64) -> Result<DecayFit> {
    ladder.require_increasing(4)?;
    let sups = dd_suprema(table, ladder, grid_rule)?;
    let points: Vec<DecayPoint> = sups
        .iter()
        .map(|s| DecayPoint {
            n: s.n_terms,
            value: s.sup_value,
        })
        .collect();
    fit_decay(&points, DecayModel::LogPower)
}

pub fn dd_profile(kind: FunctionKind, ladder: &Ladder, grid_rule: u64) -> Result<DecayFit> {
    ladder.require_increasing(4)?;
    check_grid_rule(grid_rule)?;
    let table = sieve_window(kind, 1, ladder.max().unwrap_or(1), &SieveConfig::default())?;
    dd_profile_with(&table, ladder, grid_rule)
}

/// `|(1/N) Σ Λ(n) e^{2πint}|` along the ladder with a power-model fit.
/// A one-point ladder yields a fit flagged degenerate.
pub fn mangoldt_exp_sum_profile_with(
    mangoldt: &FunctionTable,
    ladder: &Ladder,
    t: f64,
) -> Result<DecayFit> {
    if ladder.is_empty() {
        return Err(ArfError::usage("empty ladder"));
    }
    ladder.require_increasing(1)?;
    let points = ladder
        .points()
        .iter()
        .map(|&n| {
            let s = exp_sum(mangoldt, n, t)?;
            Ok(DecayPoint {
                n,
                value: s.norm() / n as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fit_decay(&points, DecayModel::Power)
}

pub fn mangoldt_exp_sum_profile(ladder: &Ladder, t: f64) -> Result<DecayFit> {
    let max = ladder
        .max()
        .ok_or_else(|| ArfError::usage("empty ladder"))?;
    let table = sieve_window(FunctionKind::Mangoldt, 1, max, &SieveConfig::default())?;
    mangoldt_exp_sum_profile_with(&table, ladder, t)
}
