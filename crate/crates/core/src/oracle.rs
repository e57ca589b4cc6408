//! Direct-summation reference implementations.
//!
//! These are the slow paths the FFT routines are checked against, both by
//! the CLI's `--check` mode and by the fallbacks inside the fast paths.

use num_complex::Complex64;

use crate::numeric::NeumaierSum;

/// `Σ_{m=0}^{n_terms-1} a[m]·a[m+lag]` on a 0-based slice.
pub fn lag_product_sum(a: &[f64], n_terms: usize, lag: usize) -> f64 {
    a[..n_terms]
        .iter()
        .zip(&a[lag..lag + n_terms])
        .map(|(x, y)| x * y)
        .collect::<NeumaierSum>()
        .value()
}

/// Integer version of [`lag_product_sum`] for integer-valued weights.
pub fn lag_product_sum_int(a: &[f64], n_terms: usize, lag: usize) -> i64 {
    a[..n_terms]
        .iter()
        .zip(&a[lag..lag + n_terms])
        .map(|(x, y)| (*x as i64) * (*y as i64))
        .sum()
}

/// `(1/N²) Σ_{p,n=1}^{N} |(1/N) Σ_{m=1}^{N} ν(m)ν(m+n)ν(m+p)ν(m+n+p)|` by a
/// triple loop. `nu[i]` holds `ν(i+1)` and must cover `[1, 3N]`.
pub fn order3_direct(nu: &[f64], n: usize) -> f64 {
    let at = |k: usize| nu[k - 1];
    let mut outer = NeumaierSum::new();
    for p in 1..=n {
        for h in 1..=n {
            let mut inner = NeumaierSum::new();
            for m in 1..=n {
                inner.add(at(m) * at(m + h) * at(m + p) * at(m + h + p));
            }
            outer.add(inner.value().abs() / n as f64);
        }
    }
    outer.value() / (n * n) as f64
}

/// `(1/N^k) Σ_{n∈[1,N]^k} Π_{e∈{0,1}^k∖0} ν(n·e)` by enumeration, or with a
/// base point `x` when `include_base` (normalised by `N^{k+1}`).
pub fn cube_sum_direct(nu: &[f64], n: usize, k: usize, include_base: bool) -> f64 {
    let at = |i: usize| nu[i - 1];
    let dims = if include_base { k + 1 } else { k };
    let mut idx = vec![1usize; dims];
    let mut total = NeumaierSum::new();
    loop {
        let (base, shifts) = if include_base {
            (idx[0], &idx[1..])
        } else {
            (0, &idx[..])
        };
        let mut prod = 1.0;
        let first_mask = if include_base { 0 } else { 1 };
        for mask in first_mask..(1usize << k) {
            let s: usize = base
                + (0..k)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| shifts[b])
                    .sum::<usize>();
            prod *= at(s);
            if prod == 0.0 {
                break;
            }
        }
        total.add(prod);
        // odometer
        let mut d = 0;
        loop {
            if d == dims {
                return total.value() / (n as f64).powi(dims as i32);
            }
            idx[d] += 1;
            if idx[d] <= n {
                break;
            }
            idx[d] = 1;
            d += 1;
        }
    }
}

/// `(1/N²) Σ_{n,m=1}^{N} w(n)w(m)w(n+m)·f1(n)·f2(m)·f3(n+m)` by a double loop,
/// with `w`, `f1`, `f2`, `f3` as 0-based slices holding values at 1, 2, ….
pub fn cubic2_direct(
    w: &[f64],
    f1: &[Complex64],
    f2: &[Complex64],
    f3: &[Complex64],
    n: usize,
) -> Complex64 {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for a in 1..=n {
        let left = w[a - 1] * f1[a - 1];
        if left == Complex64::new(0.0, 0.0) {
            continue;
        }
        for b in 1..=n {
            let z = left * (w[b - 1] * w[a + b - 1]) * f2[b - 1] * f3[a + b - 1];
            re.add(z.re);
            im.add(z.im);
        }
    }
    Complex64::new(re.value(), im.value()) / (n * n) as f64
}

/// Order-3 analogue of [`cubic2_direct`]: seven factors indexed by the
/// nonzero `e ∈ {0,1}^3` in binary order (bit 0 ↔ n, bit 1 ↔ m, bit 2 ↔ p).
pub fn cubic3_direct(w: &[f64], f: &[Vec<Complex64>; 7], n: usize) -> Complex64 {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for a in 1..=n {
        for b in 1..=n {
            for c in 1..=n {
                let mut z = Complex64::new(1.0, 0.0);
                for mask in 1..8usize {
                    let s = (mask & 1) * a + (mask >> 1 & 1) * b + (mask >> 2 & 1) * c;
                    z *= w[s - 1] * f[mask - 1][s - 1];
                }
                re.add(z.re);
                im.add(z.im);
            }
        }
    }
    Complex64::new(re.value(), im.value()) / (n * n * n) as f64
}
