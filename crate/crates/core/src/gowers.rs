//! Cube sums over `[1,N]^k`, Gowers box averages of finitely supported
//! sequences, and the local von Mangoldt factors.
//!
//! Two cube conventions live here. The default (`include_base = false`)
//! multiplies `ν(n·e)` over `e ∈ {0,1}^k ∖ {0}`, so there is no base point.
//! With `include_base = true` a base point `x ∈ [1,N]` is added and the
//! product runs over the whole cube `x + n·e`, as in the usual Gowers
//! averages.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};
use crate::expsum::compensated_sum;
use crate::fft::FftPlan;
use crate::numeric::{pairwise_sum, NeumaierSum, Phase};
use crate::oracle;
use crate::sieve::{is_prime, sieve_prime_logs, small_primes, FunctionKind, FunctionTable, SieveConfig};

/// Largest `N` for the enumeration-only dimensions 4 and 5.
pub const NAIVE_CUBE_LIMIT: u64 = 64;
/// Largest `N` accepted for degree-3 box norms.
pub const BOX3_LIMIT: u64 = 1 << 16;
/// Brute-force budget for local factors: `p^d` points.
pub const LOCAL_FACTOR_BUDGET: u64 = 10_000_000;
pub const LOCAL_FACTOR_MAX_PRIME: u64 = 1000;
pub const LOCAL_FACTOR_MAX_DIM: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSpec {
    pub dimension: u32,
    pub include_base: bool,
}

impl CubeSpec {
    /// The `C*` convention without a base point.
    pub fn c_star(dimension: u32) -> Self {
        CubeSpec {
            dimension,
            include_base: false,
        }
    }

    pub fn with_base(dimension: u32) -> Self {
        CubeSpec {
            dimension,
            include_base: true,
        }
    }

    fn validate(&self, n_terms: u64) -> Result<()> {
        match self.dimension {
            1..=3 => Ok(()),
            4 | 5 if n_terms <= NAIVE_CUBE_LIMIT => Ok(()),
            4 | 5 => Err(ArfError::usage(format!(
                "dimension {} is enumerated directly and needs N <= {NAIVE_CUBE_LIMIT}",
                self.dimension
            ))),
            k => Err(ArfError::usage(format!("unsupported cube dimension {k}"))),
        }
    }

    /// Largest argument the cube product touches.
    pub fn reach(&self, n_terms: u64) -> u64 {
        let k = u64::from(self.dimension) + u64::from(self.include_base);
        k * n_terms
    }
}

fn round_checked(raw: f64, direct: impl FnOnce() -> f64) -> f64 {
    let r = raw.round();
    if (raw - r).abs() < 0.25 {
        r
    } else {
        direct()
    }
}

/// `Σ_{a,b ∈ [1,N]} g(a)·g(b)·c(a+b)` where `g` holds values at `1..=N` and
/// `c` holds values at `1..=2N`.
fn pair_sum(plan: &FftPlan, g: &[f64], c: &[f64], integer: bool) -> f64 {
    let n = g.len();
    let cg: Vec<Complex64> = g.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let conv = plan.convolve(&cg, &cg);
    // conv[i] pairs a + b = i + 2
    let terms: Vec<f64> = conv
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let s = i + 2;
            let weight = c[s - 1];
            if weight == 0.0 {
                return 0.0;
            }
            let val = if integer {
                round_checked(z.re, || {
                    (1..=n)
                        .filter(|&a| s > a && s - a <= n)
                        .map(|a| g[a - 1] * g[s - a - 1])
                        .sum()
                })
            } else {
                z.re
            };
            weight * val
        })
        .collect();
    if integer {
        terms.iter().sum()
    } else {
        pairwise_sum(&terms)
    }
}

/// `Σ_{x,h ∈ [1,N]} g(x)·g(x+h)` with `g` on `1..=2N`.
fn shift_sum(plan: &FftPlan, g: &[f64], n: usize, integer: bool) -> f64 {
    let raw = plan.cross_correlate(&g[..n], g, n);
    let terms: Vec<f64> = raw[1..]
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if integer {
                round_checked(r, || oracle::lag_product_sum(g, n, i + 1))
            } else {
                r
            }
        })
        .collect();
    if integer {
        terms.iter().sum()
    } else {
        pairwise_sum(&terms)
    }
}

pub fn cube_sum(table: &FunctionTable, n_terms: u64, spec: CubeSpec) -> Result<f64> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    spec.validate(n_terms)?;
    let reach = spec.reach(n_terms);
    table.require(1, reach)?;
    let nu = table.range(1, reach);
    let n = n_terms as usize;
    let nf = n_terms as f64;
    let integer = table.kind().is_integer_valued();
    let k = spec.dimension;

    if k >= 4 {
        return Ok(oracle::cube_sum_direct(nu, n, k as usize, spec.include_base));
    }

    if !spec.include_base {
        return Ok(match k {
            1 => nu[..n].iter().copied().collect::<NeumaierSum>().value() / nf,
            2 => {
                let plan = FftPlan::at_least(2 * n);
                pair_sum(&plan, &nu[..n], &nu[..2 * n], integer) / (nf * nf)
            }
            _ => {
                let plan = FftPlan::at_least(2 * n);
                let per_p: Vec<f64> = (1..=n)
                    .into_par_iter()
                    .map(|p| {
                        let head = nu[p - 1];
                        if head == 0.0 {
                            return 0.0;
                        }
                        let g: Vec<f64> = (0..n).map(|i| nu[i] * nu[i + p]).collect();
                        let c: Vec<f64> = (0..2 * n).map(|i| nu[i] * nu[i + p]).collect();
                        head * pair_sum(&plan, &g, &c, integer)
                    })
                    .collect();
                pairwise_sum(&per_p) / (nf * nf * nf)
            }
        });
    }

    // Base point: fold k-1 shifts into multiplicative derivatives, then the
    // last shift and the base point form one autocorrelation.
    let plan = FftPlan::at_least(2 * n);
    let derived = |shifts: &[usize]| -> Vec<f64> {
        (1..=2 * n)
            .map(|x| {
                let mut prod = 1.0;
                for mask in 0..(1usize << shifts.len()) {
                    let s: usize = x + (0..shifts.len())
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| shifts[b])
                        .sum::<usize>();
                    prod *= nu[s - 1];
                }
                prod
            })
            .collect()
    };
    let total = match k {
        1 => shift_sum(&plan, &derived(&[]), n, integer),
        2 => {
            let per: Vec<f64> = (1..=n)
                .into_par_iter()
                .map(|h| shift_sum(&plan, &derived(&[h]), n, integer))
                .collect();
            pairwise_sum(&per)
        }
        _ => {
            let per: Vec<f64> = (0..n * n)
                .into_par_iter()
                .map(|i| shift_sum(&plan, &derived(&[i / n + 1, i % n + 1]), n, integer))
                .collect();
            pairwise_sum(&per)
        }
    };
    Ok(total / nf.powi(k as i32 + 1))
}

/// `Σ_{x,h1,h2 ∈ Z} g(x)g(x+h1)g(x+h2)g(x+h1+h2)` for `g` supported on
/// the slice, via `Σ_h r(h)² = (1/M) Σ_k |ĝ_k|⁴`.
fn u2_sum(plan: &FftPlan, g: &[f64]) -> f64 {
    let cg: Vec<Complex64> = g.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let spec = plan.evaluate_grid(&cg, 0);
    let fourth: Vec<f64> = spec.iter().map(|z| z.norm_sqr().powi(2)).collect();
    pairwise_sum(&fourth) / plan.len() as f64
}

/// Box average `(1/N^{s+2}) Σ Π_{e∈{0,1}^{s+1}} f(n + n·e)` for `f`
/// supported on `[1, N]` (slice index 0 is `f(1)`), summed over every
/// shift that keeps the cube inside the support.
pub fn gowers_box_average(values: &[f64], degree: u32) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(ArfError::usage("box norm needs a non-empty sequence"));
    }
    let nf = n as f64;
    match degree {
        2 => {
            let plan = FftPlan::at_least(2 * n);
            Ok(u2_sum(&plan, values) / nf.powi(3))
        }
        3 => {
            if n as u64 > BOX3_LIMIT {
                return Err(ArfError::usage(format!(
                    "degree-3 box norms need N <= {BOX3_LIMIT}"
                )));
            }
            let plan = FftPlan::at_least(2 * n);
            // g_{-h} is a translate of g_h, so negative shifts double up.
            let per_h: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|h| {
                    let g: Vec<f64> = (0..n - h).map(|i| values[i] * values[i + h]).collect();
                    let s = u2_sum(&plan, &g);
                    if h == 0 {
                        s
                    } else {
                        2.0 * s
                    }
                })
                .collect();
            Ok(pairwise_sum(&per_h) / nf.powi(4))
        }
        d => Err(ArfError::usage(format!(
            "box norms are implemented for degree 2 and 3, not {d}"
        ))),
    }
}

/// `|box average|^{1/2^{degree}}`.
pub fn gowers_box_norm(values: &[f64], degree: u32) -> Result<f64> {
    let avg = gowers_box_average(values, degree)?;
    Ok(avg.abs().powf(1.0 / f64::from(1u32 << degree)))
}

/// `β_p = (1/p^d) Σ_{n∈(Z/pZ)^d} Π_{e∈C*} Λ_{Z/pZ}(n·e)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalFactor {
    pub p: u64,
    #[serde(rename = "d")]
    pub dimension: u32,
    #[serde(rename = "beta")]
    pub value: f64,
    #[serde(skip)]
    pub exact: BigRational,
}

impl LocalFactor {
    pub fn exact_string(&self) -> String {
        format!("{}/{}", self.exact.numer(), self.exact.denom())
    }
}

/// Number of `n ∈ (Z/pZ)^d` whose nonempty subset sums are all nonzero mod p.
fn admissible_count(p: u64, d: u32) -> u64 {
    fn go(p: u64, left: u32, sums: &mut Vec<u64>) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for v in 1..p {
            if sums.iter().any(|&s| (s + v) % p == 0) {
                continue;
            }
            let len = sums.len();
            for i in 0..len {
                sums.push((sums[i] + v) % p);
            }
            sums.push(v);
            total += go(p, left - 1, sums);
            sums.truncate(len);
        }
        total
    }
    go(p, d, &mut Vec::new())
}

pub fn local_factor(p: u64, dimension: u32) -> Result<LocalFactor> {
    if !is_prime(p) {
        return Err(ArfError::usage(format!("{p} is not prime")));
    }
    if dimension == 0 {
        return Err(ArfError::usage("dimension must be at least 1"));
    }
    let points = p.checked_pow(dimension).unwrap_or(u64::MAX);
    if p > LOCAL_FACTOR_MAX_PRIME || dimension > LOCAL_FACTOR_MAX_DIM || points > LOCAL_FACTOR_BUDGET {
        return Err(ArfError::Resource {
            what: format!("local factor p = {p}, d = {dimension} (p <= {LOCAL_FACTOR_MAX_PRIME}, d <= {LOCAL_FACTOR_MAX_DIM})"),
            requested: points,
            budget: LOCAL_FACTOR_BUDGET,
        });
    }
    let count = admissible_count(p, dimension);
    let faces = (1u32 << dimension) - 1;
    let pb = BigInt::from(p);
    let numer = BigInt::from(count) * num_traits::pow(pb.clone(), faces as usize);
    let denom = num_traits::pow(BigInt::from(p - 1), faces as usize)
        * num_traits::pow(pb, dimension as usize);
    let exact = BigRational::new(numer, denom);
    Ok(LocalFactor {
        p,
        dimension,
        value: exact.to_f64().unwrap_or(f64::NAN),
        exact,
    })
}

/// `Π_{p ≤ cutoff} β_p` as an exact rational.
pub fn local_product_exact(dimension: u32, cutoff: u64) -> Result<BigRational> {
    if cutoff > LOCAL_FACTOR_MAX_PRIME {
        return Err(ArfError::usage(format!(
            "prime cutoff {cutoff} exceeds {LOCAL_FACTOR_MAX_PRIME}"
        )));
    }
    let mut prod = BigRational::one();
    for p in small_primes(cutoff) {
        let f = local_factor(p, dimension)?;
        prod *= f.exact;
        if prod.is_zero() {
            break;
        }
    }
    Ok(prod)
}

pub fn local_product(dimension: u32, cutoff: u64) -> Result<f64> {
    let r = local_product_exact(dimension, cutoff)?;
    Ok(r.to_f64().unwrap_or(f64::NAN))
}

/// `(1/N^d) Σ_{n∈[1,N]^d} Π_{e∈C*} Λ(n·e)` for `d ∈ {1, 2}`.
pub fn mangoldt_box_sum(mangoldt: &FunctionTable, n_terms: u64, dimension: u32) -> Result<f64> {
    if !matches!(dimension, 1 | 2) {
        return Err(ArfError::usage(format!(
            "Mangoldt box sums are implemented for d = 1, 2, not {dimension}"
        )));
    }
    cube_sum(mangoldt, n_terms, CubeSpec::c_star(dimension))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MangoldtBoxReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: u32,
    pub box_sum: f64,
    pub local_product: f64,
    pub cutoff: u64,
}

pub fn mangoldt_box_report(
    mangoldt: &FunctionTable,
    n_terms: u64,
    dimension: u32,
    cutoff: u64,
) -> Result<MangoldtBoxReport> {
    Ok(MangoldtBoxReport {
        n: n_terms,
        d: dimension,
        box_sum: mangoldt_box_sum(mangoldt, n_terms, dimension)?,
        local_product: local_product(dimension, cutoff)?,
        cutoff,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `W = Π_{p ≤ w} p`, or `None` on overflow.
pub fn primorial(w: u64) -> Option<u64> {
    small_primes(w).into_iter().try_fold(1u64, |acc, p| acc.checked_mul(p))
}

/// `Λ'_{b,W}(n) = (φ(W)/W)·Λ'(W·n + b)` on `[1, N]` with `Λ'` the prime-only
/// von Mangoldt function.
pub fn w_trick_table(n_terms: u64, w: u64, b: u64, config: &SieveConfig) -> Result<FunctionTable> {
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    let big_w = primorial(w).ok_or_else(|| ArfError::usage(format!("primorial of {w} overflows")))?;
    if gcd(b, big_w) != 1 {
        return Err(ArfError::usage(format!("b = {b} is not coprime to W = {big_w}")));
    }
    let reach = big_w
        .checked_mul(n_terms)
        .and_then(|x| x.checked_add(b))
        .ok_or_else(|| ArfError::usage("W·N + b overflows"))?;
    config.check_budget("W-trick sieve", reach)?;
    let primes = sieve_prime_logs(reach, config)?;
    let density: f64 = small_primes(w)
        .iter()
        .map(|&p| (p - 1) as f64 / p as f64)
        .product();
    let values = (1..=n_terms)
        .map(|n| density * primes.get(big_w * n + b).unwrap_or(0.0))
        .collect();
    FunctionTable::new(FunctionKind::Custom, 1, values)
}

/// `|(1/π(N)) Σ_{p≤N} a_p − (1/N) Σ_{n≤N} Λ'(n)·a_n|`, with `prime_logs`
/// the prime-only von Mangoldt table covering `[1, N]`.
pub fn prime_average_gap<A>(weight: A, n_terms: u64, prime_logs: &FunctionTable) -> Result<f64>
where
    A: Fn(u64) -> Complex64 + Sync,
{
    prime_logs.require(1, n_terms)?;
    let logs = prime_logs.range(1, n_terms);
    let pi = logs.iter().filter(|&&v| v > 0.0).count();
    if pi == 0 {
        return Err(ArfError::usage(format!("no primes up to N = {n_terms}")));
    }
    let zero = |_| Phase::ZERO;
    let prime_sum = compensated_sum(
        1,
        n_terms,
        |n| {
            if logs[(n - 1) as usize] > 0.0 {
                weight(n)
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        zero,
    );
    let weighted = compensated_sum(1, n_terms, |n| logs[(n - 1) as usize] * weight(n), zero);
    Ok((prime_sum / pi as f64 - weighted / n_terms as f64).norm())
}
