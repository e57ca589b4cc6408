//! Weighted cubic averages along orbits of exactly computable systems:
//! circle rotations and polynomial phase sequences.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};
use crate::expsum::{grid_supremum, sup_exp_sum, GridSupremum};
use crate::fft::FftPlan;
use crate::gowers::{cube_sum, CubeSpec};
use crate::numeric::{poly_phase, ComplexSum, Phase};
use crate::sieve::{is_prime, sieve_window, FunctionKind, FunctionTable, SieveConfig};

/// Number of initial points drawn when probing "almost every x".
pub const DEFAULT_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum SystemVariant {
    /// `T x = x + α mod 1` observed through `f(x) = e^{2πi·k·x}`.
    Rotation { alpha: f64, character: i64 },
    /// `n ↦ e^{2πi·(x0 + Σ_j coeffs[j]·n^j)}`.
    Polyphase { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySystem {
    pub variant: SystemVariant,
    pub x0: f64,
}

impl ToySystem {
    pub fn rotation(alpha: f64, character: i64) -> Self {
        ToySystem {
            variant: SystemVariant::Rotation { alpha, character },
            x0: 0.0,
        }
    }

    pub fn polyphase(coeffs: Vec<f64>) -> Self {
        ToySystem {
            variant: SystemVariant::Polyphase { coeffs },
            x0: 0.0,
        }
    }

    /// The observable `≡ 1`.
    pub fn trivial() -> Self {
        Self::rotation(0.0, 0)
    }

    pub fn at(&self, x0: f64) -> Self {
        ToySystem {
            variant: self.variant.clone(),
            x0,
        }
    }

    pub fn is_polyphase(&self) -> bool {
        matches!(self.variant, SystemVariant::Polyphase { .. })
    }

    /// True when the observable is identically 1 along the orbit.
    pub fn is_trivial(&self) -> bool {
        match &self.variant {
            SystemVariant::Rotation { character, .. } => *character == 0,
            SystemVariant::Polyphase { coeffs } => {
                self.x0 == 0.0 && coeffs.iter().all(|&c| c == 0.0)
            }
        }
    }

    /// `f(T^n x0)`.
    pub fn observe(&self, n: u64) -> Complex64 {
        match &self.variant {
            SystemVariant::Rotation { alpha, character } => {
                if *character == 0 {
                    return Complex64::new(1.0, 0.0);
                }
                let point = Phase::new(*alpha).times(n).plus(Phase::new(self.x0));
                let z = point.times(character.unsigned_abs()).cis();
                if *character < 0 {
                    z.conj()
                } else {
                    z
                }
            }
            SystemVariant::Polyphase { coeffs } => {
                if self.is_trivial() {
                    return Complex64::new(1.0, 0.0);
                }
                poly_phase(coeffs, n).plus(Phase::new(self.x0)).cis()
            }
        }
    }

    /// Eigenvalue `e^{2πi·k·α}` of a rotation observable.
    pub fn eigenvalue(&self) -> Option<Complex64> {
        match &self.variant {
            SystemVariant::Rotation { alpha, character } => {
                let z = Phase::new(*alpha).times(character.unsigned_abs()).cis();
                Some(if *character < 0 { z.conj() } else { z })
            }
            SystemVariant::Polyphase { .. } => None,
        }
    }

    fn orbit(&self, len: usize) -> Vec<Complex64> {
        (1..=len as u64).into_par_iter().map(|n| self.observe(n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicAverageResult {
    pub order: u32,
    pub n_terms: u64,
    pub value: Complex64,
    pub weight_kind: FunctionKind,
}

fn check_order(order: u32, systems: &[ToySystem]) -> Result<()> {
    if !matches!(order, 2 | 3) {
        return Err(ArfError::usage(format!(
            "cubic averages are implemented for order 2 and 3, not {order}"
        )));
    }
    let need = (1usize << order) - 1;
    if systems.len() != need {
        return Err(ArfError::usage(format!(
            "order {order} needs {need} systems, got {}",
            systems.len()
        )));
    }
    Ok(())
}

/// `Σ_{a,b∈[1,N]} g(a)·h(b)·c(a+b)` with `g`, `h` on `1..=N` and `c` on `1..=2N`.
fn pair_sum(plan: &FftPlan, g: &[Complex64], h: &[Complex64], c: &[Complex64]) -> Complex64 {
    let conv = plan.convolve(g, h);
    let mut acc = ComplexSum::new();
    for (i, z) in conv.iter().enumerate() {
        acc.add(c[i + 1] * z);
    }
    acc.value()
}

/// The order-`k` weighted cubic average
/// `(1/N^k) Σ_{n∈[1,N]^k} Π_{e∈C*} ν(n·e)·f_e(T_e^{n·e} x)`.
///
/// Systems are indexed by the nonzero `e ∈ {0,1}^k` in binary order, bit 0
/// being the first coordinate. For `k = 2` that is `f1(n)·f2(m)·f3(n+m)`.
pub fn cubic_weighted_average(
    order: u32,
    weight: &FunctionTable,
    systems: &[ToySystem],
    n_terms: u64,
) -> Result<CubicAverageResult> {
    check_order(order, systems)?;
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    let reach = u64::from(order) * n_terms;
    weight.require(1, reach)?;
    let result = |value| CubicAverageResult {
        order,
        n_terms,
        value,
        weight_kind: weight.kind(),
    };
    if systems.iter().all(ToySystem::is_trivial) {
        let v = cube_sum(weight, n_terms, CubeSpec::c_star(order))?;
        return Ok(result(Complex64::new(v, 0.0)));
    }

    let w = weight.range(1, reach);
    let n = n_terms as usize;
    let nf = n_terms as f64;
    // weighted orbit of each system on [1, kN]
    let orbits: Vec<Vec<Complex64>> = systems
        .iter()
        .map(|s| {
            s.orbit(reach as usize)
                .into_iter()
                .zip(w)
                .map(|(z, &v)| z * v)
                .collect()
        })
        .collect();
    let plan = FftPlan::at_least(2 * n);

    let value = if order == 2 {
        pair_sum(&plan, &orbits[0][..n], &orbits[1][..n], &orbits[2][..2 * n]) / (nf * nf)
    } else {
        let per_p: Vec<Complex64> = (1..=n)
            .into_par_iter()
            .map(|p| {
                let head = orbits[3][p - 1];
                if head == Complex64::new(0.0, 0.0) {
                    return head;
                }
                let joined = |lo: &[Complex64], hi: &[Complex64], len: usize| -> Vec<Complex64> {
                    (0..len).map(|i| lo[i] * hi[i + p]).collect()
                };
                let g = joined(&orbits[0], &orbits[4], n);
                let h = joined(&orbits[1], &orbits[5], n);
                let c = joined(&orbits[2], &orbits[6], 2 * n);
                head * pair_sum(&plan, &g, &h, &c)
            })
            .collect();
        per_p.into_iter().collect::<ComplexSum>().value() / (nf * nf * nf)
    };
    Ok(result(value))
}

/// Direct enumeration of [`cubic_weighted_average`], kept as its oracle.
pub fn cubic_weighted_average_direct(
    order: u32,
    weight: &FunctionTable,
    systems: &[ToySystem],
    n_terms: u64,
) -> Result<CubicAverageResult> {
    check_order(order, systems)?;
    let reach = u64::from(order) * n_terms;
    weight.require(1, reach)?;
    let w = weight.range(1, reach);
    let n = n_terms as usize;
    let orbits: Vec<Vec<Complex64>> = systems.iter().map(|s| s.orbit(reach as usize)).collect();
    let value = if order == 2 {
        crate::oracle::cubic2_direct(w, &orbits[0], &orbits[1], &orbits[2], n)
    } else {
        let f: [Vec<Complex64>; 7] = std::array::from_fn(|i| orbits[i].clone());
        crate::oracle::cubic3_direct(w, &f, n)
    };
    Ok(CubicAverageResult {
        order,
        n_terms,
        value,
        weight_kind: weight.kind(),
    })
}

/// Initial points used for sampling, reproducible from the seed.
pub fn sample_points(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random::<f64>()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCubicAverage {
    pub seed: u64,
    pub points: Vec<f64>,
    pub values: Vec<CubicAverageResult>,
    pub max_abs: f64,
}

/// Evaluates the cubic average with every system started at each sampled
/// point and reports the largest modulus.
pub fn sampled_cubic_average(
    order: u32,
    weight: &FunctionTable,
    systems: &[ToySystem],
    n_terms: u64,
    seed: u64,
    samples: usize,
) -> Result<SampledCubicAverage> {
    if samples == 0 {
        return Err(ArfError::usage("need at least one sample point"));
    }
    let points = sample_points(seed, samples);
    let values = points
        .iter()
        .map(|&x| {
            let moved: Vec<ToySystem> = systems.iter().map(|s| s.at(x)).collect();
            cubic_weighted_average(order, weight, &moved, n_terms)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs = values.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    Ok(SampledCubicAverage {
        seed,
        points,
        values,
        max_abs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KbszVerdict {
    /// The correlation hypothesis fails, so the bound says nothing.
    Inapplicable,
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KbszReport {
    pub p: u64,
    pub q: u64,
    pub n_terms: u64,
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs_bound: f64,
    pub weighted_avg: f64,
    pub hypothesis_met: bool,
    pub conclusion_met: bool,
    pub verdict: KbszVerdict,
}

/// `2·√(ε·log(1/ε))`.
pub fn kbsz_bound(epsilon: f64) -> f64 {
    2.0 * (epsilon * (1.0 / epsilon).ln()).sqrt()
}

/// Compares `|(1/N) Σ f(T^{pn}x)·conj f(T^{qn}x)|` with `ε` and
/// `|(1/N) Σ ν(n) f(T^n x)|` with `2√(ε log(1/ε))`.
pub fn kbsz_probe(
    weight: &FunctionTable,
    system: &ToySystem,
    primes: (u64, u64),
    n_terms: u64,
    epsilon: f64,
) -> Result<KbszReport> {
    let (p, q) = primes;
    if p == q {
        return Err(ArfError::usage("p and q must differ"));
    }
    for r in [p, q] {
        if !is_prime(r) {
            return Err(ArfError::usage(format!("{r} is not prime")));
        }
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ArfError::usage(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    let cap = (1.0 / epsilon).exp();
    if p.max(q) as f64 > cap {
        return Err(ArfError::usage(format!(
            "primes must not exceed exp(1/epsilon) = {cap}"
        )));
    }
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    weight.require(1, n_terms)?;
    let nf = n_terms as f64;
    let w = weight.range(1, n_terms);
    let (corr, avg) = rayon::join(
        || {
            (1..=n_terms)
                .map(|n| system.observe(p * n) * system.observe(q * n).conj())
                .collect::<ComplexSum>()
                .value()
        },
        || {
            (1..=n_terms)
                .map(|n| system.observe(n) * w[(n - 1) as usize])
                .collect::<ComplexSum>()
                .value()
        },
    );
    let lhs = corr.norm() / nf;
    let weighted_avg = avg.norm() / nf;
    let rhs_bound = kbsz_bound(epsilon);
    let hypothesis_met = lhs < epsilon;
    let conclusion_met = weighted_avg < rhs_bound;
    let verdict = match (hypothesis_met, conclusion_met) {
        (false, _) => KbszVerdict::Inapplicable,
        (true, true) => KbszVerdict::Consistent,
        (true, false) => KbszVerdict::Violated,
    };
    Ok(KbszReport {
        p,
        q,
        n_terms,
        epsilon,
        lhs,
        rhs_bound,
        weighted_avg,
        hypothesis_met,
        conclusion_met,
        verdict,
    })
}

/// Grid supremum over `t` of `|(1/N) Σ ν(n)·f(T^n x)·e^{2πint}|`.
pub fn wiener_wintner_probe(
    weight: &FunctionTable,
    system: &ToySystem,
    n_terms: u64,
    grid_size: u64,
) -> Result<GridSupremum> {
    if system.is_trivial() {
        return sup_exp_sum(weight, n_terms, grid_size);
    }
    if n_terms == 0 {
        return Err(ArfError::usage("n_terms must be positive"));
    }
    weight.require(1, n_terms)?;
    let coeffs: Vec<Complex64> = system
        .orbit(n_terms as usize)
        .into_iter()
        .zip(weight.range(1, n_terms))
        .map(|(z, &v)| z * v)
        .collect();
    grid_supremum(&coeffs, grid_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MangoldtCubicAverage {
    pub raw: CubicAverageResult,
    pub centered: CubicAverageResult,
}

/// Raw `Λ`-weighted cubic average and the variant with `Λ − 1` at every
/// cube position, for polynomial-phase observables.
pub fn mangoldt_cubic_average_with(
    mangoldt: &FunctionTable,
    order: u32,
    systems: &[ToySystem],
    n_terms: u64,
) -> Result<MangoldtCubicAverage> {
    if let Some(bad) = systems.iter().position(|s| !s.is_polyphase()) {
        return Err(ArfError::usage(format!(
            "system {bad} is not a polynomial phase"
        )));
    }
    let raw = cubic_weighted_average(order, mangoldt, systems, n_terms)?;
    let shifted = mangoldt.map(|v| v - 1.0);
    let centered = cubic_weighted_average(order, &shifted, systems, n_terms)?;
    Ok(MangoldtCubicAverage { raw, centered })
}

pub fn mangoldt_cubic_average(
    order: u32,
    systems: &[ToySystem],
    n_terms: u64,
    config: &SieveConfig,
) -> Result<MangoldtCubicAverage> {
    check_order(order, systems)?;
    let reach = u64::from(order).saturating_mul(n_terms).max(1);
    let table = sieve_window(FunctionKind::Mangoldt, 1, reach, config)?;
    mangoldt_cubic_average_with(&table, order, systems, n_terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::GOLDEN;
    use crate::sieve::sieve_table;
    use proptest::prelude::*;

    fn rotations(count: usize, chars: &[i64]) -> Vec<ToySystem> {
        (0..count).map(|i| ToySystem::rotation(GOLDEN, chars[i % chars.len()])).collect()
    }

    #[test]
    fn unit_weight_trivial_observables() {
        let unit = FunctionTable::unit(300);
        for order in [2, 3] {
            let systems = vec![ToySystem::trivial(); (1 << order) - 1];
            for n in [1, 7, 100] {
                let r = cubic_weighted_average(order, &unit, &systems, n).unwrap();
                assert_eq!(r.value, Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn liouville_trivial_matches_cube_sum() {
        let t = sieve_table(FunctionKind::Liouville, 10).unwrap();
        let r = cubic_weighted_average(2, &t, &vec![ToySystem::trivial(); 3], 2).unwrap();
        assert_eq!(r.value.re, 0.5);
        assert_eq!(r.weight_kind, FunctionKind::Liouville);
    }

    #[test]
    fn system_count_checked() {
        let t = FunctionTable::unit(100);
        assert!(matches!(
            cubic_weighted_average(2, &t, &rotations(2, &[1]), 10),
            Err(ArfError::Usage(_))
        ));
        assert!(matches!(
            cubic_weighted_average(4, &t, &rotations(15, &[1]), 10),
            Err(ArfError::Usage(_))
        ));
        assert!(matches!(
            cubic_weighted_average(2, &t, &rotations(3, &[1]), 60),
            Err(ArfError::Coverage { .. })
        ));
    }

    #[test]
    fn rotation_eigenfunction_identity() {
        let s = ToySystem { variant: SystemVariant::Rotation { alpha: GOLDEN, character: 3 }, x0: 0.2 };
        let f0 = s.observe(0);
        let lambda = s.eigenvalue().unwrap();
        for n in [1u64, 10, 1000, 123_457] {
            let z = s.observe(n);
            assert!((z.norm() - 1.0).abs() < 1e-15);
            let predicted = lambda.powu(n as u32) * f0;
            assert!((z - predicted).norm() < 1e-9, "n = {n}");
        }
        let z = s.observe(7);
        let expect = Complex64::from_polar(1.0, std::f64::consts::TAU * 3.0 * (0.2 + 7.0 * GOLDEN));
        assert!((z - expect).norm() < 1e-12);
    }

    #[test]
    fn negative_character_is_conjugate() {
        let a = ToySystem::rotation(GOLDEN, 2);
        let b = ToySystem::rotation(GOLDEN, -2);
        for n in [1u64, 5, 99] {
            assert_eq!(a.observe(n).conj(), b.observe(n));
        }
    }

    #[test]
    fn fft_matches_direct_order2() {
        let mu = sieve_table(FunctionKind::Mobius, 2 * 500).unwrap();
        let mut systems = rotations(3, &[1, -1, 2]);
        systems[1] = ToySystem::polyphase(vec![0.1, GOLDEN, 0.5 * GOLDEN]);
        for n in [1u64, 2, 37, 500] {
            let fast = cubic_weighted_average(2, &mu, &systems, n).unwrap().value;
            let slow = cubic_weighted_average_direct(2, &mu, &systems, n).unwrap().value;
            assert!((fast - slow).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn fft_matches_direct_order3() {
        let lam = sieve_table(FunctionKind::Liouville, 3 * 40).unwrap();
        let systems: Vec<ToySystem> = (1..=7).map(|k| ToySystem::rotation(GOLDEN, k as i64 - 4)).collect();
        for n in [1u64, 9, 40] {
            let fast = cubic_weighted_average(3, &lam, &systems, n).unwrap().value;
            let slow = cubic_weighted_average_direct(3, &lam, &systems, n).unwrap().value;
            assert!((fast - slow).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_points(7, 8), sample_points(7, 8));
        assert_ne!(sample_points(7, 8), sample_points(8, 8));
        assert!(sample_points(1, 100).iter().all(|x| (0.0..1.0).contains(x)));
        let mu = sieve_table(FunctionKind::Mobius, 200).unwrap();
        let a = sampled_cubic_average(2, &mu, &rotations(3, &[1]), 100, 3, 8).unwrap();
        assert_eq!(a.values.len(), 8);
        let max = a.values.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
        assert_eq!(a.max_abs, max);
    }

    #[test]
    fn kbsz_trivial_observable_inapplicable() {
        let mu = sieve_table(FunctionKind::Mobius, 100).unwrap();
        let r = kbsz_probe(&mu, &ToySystem::trivial(), (2, 3), 100, 0.5).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(!r.hypothesis_met);
        assert_eq!(r.verdict, KbszVerdict::Inapplicable);
    }

    #[test]
    fn kbsz_bound_closed_form() {
        assert!((kbsz_bound(0.01) - 0.429_193_205_257_869_5).abs() < 1e-12);
        for eps in [0.5, 0.1, 1e-3, 1e-6] {
            assert_eq!(kbsz_bound(eps), 2.0 * (eps * (1.0 / eps).ln()).sqrt());
        }
    }

    #[test]
    fn kbsz_rejects_bad_primes() {
        let t = FunctionTable::unit(10);
        let s = ToySystem::rotation(GOLDEN, 1);
        assert!(matches!(kbsz_probe(&t, &s, (3, 3), 10, 0.1), Err(ArfError::Usage(_))));
        assert!(matches!(kbsz_probe(&t, &s, (2, 4), 10, 0.1), Err(ArfError::Usage(_))));
        assert!(matches!(kbsz_probe(&t, &s, (2, 3), 10, 1.5), Err(ArfError::Usage(_))));
        // exp(1/0.5) ≈ 7.39 < 11
        assert!(matches!(kbsz_probe(&t, &s, (2, 11), 10, 0.5), Err(ArfError::Usage(_))));
    }

    #[test]
    fn wws_trivial_is_sup_exp_sum() {
        let mu = sieve_table(FunctionKind::Mobius, 1000).unwrap();
        let a = wiener_wintner_probe(&mu, &ToySystem::trivial(), 1000, 8000).unwrap();
        let b = sup_exp_sum(&mu, 1000, 8000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wws_unit_weight_rotation_peaks_near_one() {
        let unit = FunctionTable::unit(512);
        let s = ToySystem::rotation(GOLDEN, 1);
        let g = wiener_wintner_probe(&unit, &s, 512, 8 * 512).unwrap();
        assert!(g.sup_value <= 1.0 + 1e-12);
        assert!(g.upper_bound() >= 1.0);
        assert!(g.sup_value > 0.9);
        let target = (1.0 - GOLDEN).rem_euclid(1.0);
        assert!((g.argmax_t - target).abs() < 1.0 / 4096.0 + 1e-12);
    }

    #[test]
    fn mangoldt_average_requires_polyphase() {
        let err = mangoldt_cubic_average(2, &rotations(3, &[1]), 10, &SieveConfig::default());
        assert!(matches!(err, Err(ArfError::Usage(_))));
    }

    #[test]
    fn mangoldt_raw_matches_cube_sum() {
        let lam = sieve_table(FunctionKind::Mangoldt, 2000).unwrap();
        let systems = vec![ToySystem::polyphase(vec![0.0]); 3];
        let r = mangoldt_cubic_average_with(&lam, 2, &systems, 1000).unwrap();
        assert_eq!(r.raw.value.re, cube_sum(&lam, 1000, CubeSpec::c_star(2)).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bounded_by_one(n in 1u64..80, c1 in -3i64..4, c2 in -3i64..4, c3 in -3i64..4, x in 0.0f64..1.0) {
            let mu = sieve_table(FunctionKind::Mobius, 3 * 80).unwrap();
            let s: Vec<ToySystem> = [c1, c2, c3].iter().map(|&c| ToySystem::rotation(GOLDEN, c).at(x)).collect();
            let r = cubic_weighted_average(2, &mu, &s, n).unwrap();
            prop_assert!(r.value.norm() <= 1.0 + 1e-12);
        }
    }
}
