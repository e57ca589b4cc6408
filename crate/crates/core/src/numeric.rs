//! Summation and phase-reduction kernels shared by the sum evaluators.
//!
//! Every long sum in the crate goes through [`NeumaierSum`] (or its complex
//! twin), and every phase `x·n` is reduced modulo one with an error-free
//! product so that large `n` does not eat the fractional digits.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Fixed-shape pairwise reduction. The tree depends only on `xs.len()`, so
/// the result is identical however the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().copied().collect::<NeumaierSum>().value();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A number in [0, 1) carried as an unevaluated pair `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    hi: f64,
    lo: f64,
}

impl Phase {
    pub const ZERO: Phase = Phase { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self::normalize(x, 0.0)
    }

    fn normalize(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let bb = s - hi;
        let err = (hi - (s - bb)) + (lo - bb);
        let mut hi = s - s.floor();
        if hi + err < 0.0 {
            hi += 1.0;
        } else if hi + err >= 1.0 {
            hi -= 1.0;
        }
        Phase { hi, lo: err }
    }

    /// `frac(self · n)` for an integer multiplier.
    pub fn times(self, n: u64) -> Phase {
        let nf = n as f64;
        let p = self.hi * nf;
        let err = self.hi.mul_add(nf, -p);
        let hi_int = p.floor();
        Self::normalize(p - hi_int, err + self.lo * nf)
    }

    pub fn plus(self, other: Phase) -> Phase {
        Self::normalize(self.hi + other.hi, self.lo + other.lo)
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// `e^{2πi·self}`.
    pub fn cis(self) -> Complex64 {
        let (s, c) = (TAU * self.value()).sin_cos();
        Complex64::new(c, s)
    }
}

/// `frac(Σ_j coeffs[j]·n^j)` using `frac(a n^j) = frac(frac(a n^{j-1})·n)`.
pub fn poly_phase(coeffs: &[f64], n: u64) -> Phase {
    let mut total = Phase::ZERO;
    for (j, &a) in coeffs.iter().enumerate() {
        let mut term = Phase::new(a);
        for _ in 0..j {
            term = term.times(n);
        }
        total = total.plus(term);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn phase_times_matches_exact_rational() {
        // 0.375 is exact in binary, so frac(0.375 * n) is exact too.
        let p = Phase::new(0.375);
        for n in [1u64, 3, 7, 1 << 40, (1 << 52) + 3] {
            let expect = ((n % 8) * 3 % 8) as f64 / 8.0;
            assert_eq!(p.times(n).value(), expect, "n = {n}");
        }
    }

    #[test]
    fn phase_large_multiplier_keeps_digits() {
        // frac(t * n) for t = 1/3 rounded, n = 3 * 2^30: must be close to 0 or 1
        // up to n * ulp(t), not lose all digits.
        let t = 1.0 / 3.0;
        let n = 3u64 << 30;
        let v = Phase::new(t).times(n).value();
        let d = v.min(1.0 - v);
        assert!(d < 1e-6, "v = {v}");
    }

    #[test]
    fn poly_phase_quadratic() {
        let coeffs = [0.25, 0.5, 0.125];
        for n in 0..50u64 {
            let exact = (0.25 + 0.5 * n as f64 + 0.125 * (n * n) as f64).rem_euclid(1.0);
            assert_eq!(poly_phase(&coeffs, n).value(), exact);
        }
    }

    #[test]
    fn pairwise_is_length_determined() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs.clone());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
