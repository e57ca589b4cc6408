//! FFT-backed correlation, convolution and grid evaluation.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plans for one transform length, shareable across threads.
#[derive(Clone)]
pub struct FftPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    /// Plan whose length is the next power of two at or above `min_len`.
    pub fn at_least(min_len: usize) -> Self {
        Self::new(min_len.max(1).next_power_of_two())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `r[n] = Σ_m x[m]·y[m+n]` for `n = 0..=max_lag`, with `x` zero past
    /// its end and `y` read only on `[0, x.len() + max_lag)`.
    pub fn cross_correlate(&self, x: &[f64], y: &[f64], max_lag: usize) -> Vec<f64> {
        let y_len = (x.len() + max_lag).min(y.len());
        assert!(
            y_len <= self.len && x.len() <= self.len,
            "transform of length {} too short for correlation",
            self.len
        );
        // Pack both real inputs into one complex transform.
        let mut z = vec![Complex64::new(0.0, 0.0); self.len];
        for (zi, &xi) in z.iter_mut().zip(x) {
            zi.re = xi;
        }
        for (zi, &yi) in z.iter_mut().zip(&y[..y_len]) {
            zi.im = yi;
        }
        self.forward.process(&mut z);
        let n = self.len;
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let zk = z[k];
            let zm = z[(n - k) % n].conj();
            let xk = (zk + zm) * 0.5;
            let yk = (zk - zm) * Complex64::new(0.0, -0.5);
            spec[k] = xk.conj() * yk;
        }
        self.inverse.process(&mut spec);
        let scale = 1.0 / n as f64;
        spec[..=max_lag.min(n - 1)]
            .iter()
            .map(|c| c.re * scale)
            .collect()
    }

    /// Full linear convolution `(a ∗ b)[s] = Σ_i a[i]·b[s-i]`, length
    /// `a.len() + b.len() - 1`.
    pub fn convolve(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let out_len = a.len() + b.len() - 1;
        assert!(out_len <= self.len, "transform too short for convolution");
        let mut fa = vec![Complex64::new(0.0, 0.0); self.len];
        fa[..a.len()].copy_from_slice(a);
        let mut fb = vec![Complex64::new(0.0, 0.0); self.len];
        fb[..b.len()].copy_from_slice(b);
        self.forward.process(&mut fa);
        self.forward.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
        self.inverse.process(&mut fa);
        let scale = 1.0 / self.len as f64;
        fa.truncate(out_len);
        for x in &mut fa {
            *x *= scale;
        }
        fa
    }

    /// `S_j = Σ_i coeffs[i]·e^{2πi·(i + first)·j/len}` for every grid index `j`.
    pub fn evaluate_grid(&self, coeffs: &[Complex64], first: u64) -> Vec<Complex64> {
        let n = self.len;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in coeffs.iter().enumerate() {
            let slot = ((i as u64 + first) % n as u64) as usize;
            buf[slot] += c;
        }
        self.inverse.process(&mut buf);
        buf
    }
}

/// Real convolution of two real sequences.
pub fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let plan = FftPlan::at_least(a.len() + b.len() - 1);
    let ca: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let cb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.convolve(&ca, &cb).into_iter().map(|c| c.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_xcorr(x: &[f64], y: &[f64], max_lag: usize) -> Vec<f64> {
        (0..=max_lag)
            .map(|n| {
                x.iter()
                    .enumerate()
                    .map(|(m, &xm)| xm * y.get(m + n).copied().unwrap_or(0.0))
                    .sum()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn xcorr_matches_naive(
            x in prop::collection::vec(-3i32..=3, 1..60),
            extra in prop::collection::vec(-3i32..=3, 0..40),
        ) {
            let xs: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let mut ys = xs.clone();
            ys.extend(extra.iter().map(|&v| v as f64));
            let max_lag = extra.len();
            let plan = FftPlan::at_least(xs.len() + max_lag);
            let got = plan.cross_correlate(&xs, &ys, max_lag);
            let want = naive_xcorr(&xs, &ys, max_lag);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-9);
            }
        }

        #[test]
        fn convolution_matches_naive(
            a in prop::collection::vec(-5.0f64..5.0, 1..40),
            b in prop::collection::vec(-5.0f64..5.0, 1..40),
        ) {
            let got = convolve_real(&a, &b);
            for s in 0..a.len() + b.len() - 1 {
                let want: f64 = (0..a.len())
                    .filter(|&i| s >= i && s - i < b.len())
                    .map(|i| a[i] * b[s - i])
                    .sum();
                prop_assert!((got[s] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_matches_direct() {
        let coeffs: Vec<Complex64> = (0..10)
            .map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.3).sin()))
            .collect();
        let plan = FftPlan::new(37);
        let grid = plan.evaluate_grid(&coeffs, 1);
        for (j, g) in grid.iter().enumerate() {
            let t = j as f64 / 37.0;
            let direct: Complex64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * Complex64::from_polar(1.0, std::f64::consts::TAU * (i + 1) as f64 * t))
                .sum();
            assert!((g - direct).norm() < 1e-12);
        }
    }
}
