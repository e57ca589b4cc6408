//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails. Oracles are written out here
//! rather than borrowed from the library.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use arf_core::dynamics::cubic_weighted_average_direct;
use arf_core::numeric::Phase;
use arf_core::*;
use num_complex::Complex64;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn naive_lag_sum(a: &[f64], n: usize, lag: usize) -> i64 {
    (0..n).map(|m| (a[m] * a[m + lag]) as i64).sum()
}

fn criterion_1() -> Outcome {
    let n = 4096usize;
    let mut notes = Vec::new();
    let mut pass = true;
    for kind in [FunctionKind::Mobius, FunctionKind::Liouville] {
        let table = sieve_table(kind, 2 * n as u64).unwrap();
        let start = Instant::now();
        let profile = autocorrelation(&table, n as u64, n as u64).unwrap();
        let elapsed = start.elapsed();
        let nums = profile.numerators.clone().expect("integer weights carry numerators");
        let v = table.values();
        let mismatches = (0..=n).filter(|&lag| nums[lag] != naive_lag_sum(v, n, lag)).count();
        pass &= mismatches == 0 && elapsed < Duration::from_secs(2);
        notes.push(format!("{kind}: {mismatches} mismatched lags, {elapsed:.2?}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let n = 256usize;
    let table = sieve_table(FunctionKind::Liouville, 3 * n as u64).unwrap();
    let start = Instant::now();
    let fast = order3_quantity(&table, n as u64).unwrap();
    let elapsed = start.elapsed();
    let v = table.values();
    let mut outer = 0.0;
    for nn in 1..=n {
        for p in 1..=n {
            let mut inner = 0i64;
            for m in 1..=n {
                inner += (v[m - 1] * v[nn + m - 1] * v[m + p - 1] * v[nn + m + p - 1]) as i64;
            }
            outer += (inner as f64 / n as f64).abs();
        }
    }
    let brute = outer / (n * n) as f64;
    let pass = (fast - brute).abs() < 1e-9 && elapsed < Duration::from_secs(10);
    outcome(pass, format!("fft {fast:.12} brute {brute:.12} in {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let n = 1_000_000u64;
    let mu = sieve_table(FunctionKind::Mobius, n).unwrap();
    let c0 = autocorrelation(&mu, n, 0).unwrap().values[0];
    let target = 6.0 / (PI * PI);
    outcome((c0 - target).abs() <= 0.002, format!("c_0 = {c0:.6} vs 6/pi^2 = {target:.6}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let ladder = [1u64 << 12, 1 << 14, 1 << 16, 1 << 18, 1 << 20];
    let table = sieve_table(FunctionKind::Liouville, 2 << 20).unwrap();
    let points: Vec<DecayPoint> = ladder
        .iter()
        .map(|&n| {
            let p = autocorrelation(&table, n, n).unwrap();
            DecayPoint {
                n,
                value: cesaro_abs(&p).unwrap(),
            }
        })
        .collect();
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let fit = fit_best(&points).unwrap();
    let elapsed = start.elapsed();
    let pass = strictly_decreasing(&values)
        && *values.last().unwrap() < 0.05
        && fit.exponent > 0.0
        && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{} fit {:?} exponent {:.4} in {elapsed:.2?}",
            fmt_list(&values),
            fit.model,
            fit.exponent
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let ladder = [1u64 << 8, 1 << 10, 1 << 12, 1 << 13];
    let table = sieve_table(FunctionKind::Liouville, 3 << 13).unwrap();
    let values: Vec<f64> = ladder.iter().map(|&n| order3_quantity(&table, n).unwrap()).collect();
    let elapsed = start.elapsed();
    let pass = strictly_decreasing(&values) && elapsed < Duration::from_secs(600);
    outcome(pass, format!("{} in {elapsed:.2?}", fmt_list(&values)))
}

fn criterion_6() -> Outcome {
    let mu = sieve_table(FunctionKind::Mobius, 1 << 20).unwrap();
    let small = sup_exp_sum(&mu, 1 << 10, 8 << 10).unwrap().sup_value;
    let large = sup_exp_sum(&mu, 1 << 20, 8 << 20).unwrap().sup_value;
    let unit = FunctionTable::unit(1 << 20);
    let unit_sups: Vec<f64> = [1u64 << 10, 1 << 15, 1 << 20]
        .iter()
        .map(|&n| sup_exp_sum(&unit, n, 8 * n).unwrap().sup_value)
        .collect();
    let pass = large < 0.5 * small && large < 0.05 && unit_sups.iter().all(|&s| s == 1.0);
    outcome(
        pass,
        format!("mobius sup 2^10 {small:.6} 2^20 {large:.6}; unit sups {unit_sups:?}"),
    )
}

fn criterion_7() -> Outcome {
    let unit = FunctionTable::unit(4 << 12);
    let mut unit_ok = true;
    for k in 1..=3u32 {
        for n in [1u64, 2, 3, 100, 1 << 12] {
            for base in [false, true] {
                if base && k == 3 && n > 100 {
                    continue;
                }
                let spec = CubeSpec { dimension: k, include_base: base };
                unit_ok &= cube_sum(&unit, n, spec).unwrap() == 1.0;
            }
        }
    }
    for k in [4u32, 5] {
        for n in [1u64, 7, 20] {
            unit_ok &= cube_sum(&unit, n, CubeSpec::c_star(k)).unwrap() == 1.0;
        }
    }
    let lam = sieve_table(FunctionKind::Liouville, 2 << 18).unwrap();
    let half = cube_sum(&lam, 2, CubeSpec::c_star(2)).unwrap();
    let values: Vec<f64> = (10..=18)
        .map(|e| cube_sum(&lam, 1 << e, CubeSpec::c_star(2)).unwrap().abs())
        .collect();
    let at_17 = values[7];
    let pass = unit_ok && half == 0.5 && at_17 < 0.02 && strictly_decreasing(&values);
    outcome(
        pass,
        format!(
            "unit exact {unit_ok}; N=2 {half}; |value| at 2^17 {at_17:.3e}; |value| on 2^10..2^18 {}",
            fmt_list(&values)
        ),
    )
}

fn criterion_8() -> Outcome {
    use num_traits::{One, Zero};
    let d1 = sieve::small_primes(50)
        .into_iter()
        .all(|p| gowers::local_factor(p, 1).unwrap().exact.is_one());
    let b2 = gowers::local_factor(2, 2).unwrap();
    let b3 = gowers::local_factor(3, 2).unwrap();
    let three_quarters = num_rational::BigRational::new(3.into(), 4.into());
    let pass = d1 && b2.exact.is_zero() && b3.exact == three_quarters;
    outcome(
        pass,
        format!(
            "beta_p(d=1) = 1 for p <= 50: {d1}; beta_2(2) = {}; beta_3(2) = {}",
            b2.exact_string(),
            b3.exact_string()
        ),
    )
}

fn criterion_9() -> Outcome {
    let logs = sieve_prime_logs(1_000_000, &SieveConfig::default()).unwrap();
    let phase = Phase::new(GOLDEN);
    let gaps: Vec<f64> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&n| prime_average_gap(|k| phase.times(k).cis(), n, &logs).unwrap())
        .collect();
    outcome(strictly_decreasing(&gaps), fmt_list(&gaps))
}

fn criterion_10() -> Outcome {
    let mu = sieve_table(FunctionKind::Mobius, 2 << 16).unwrap();
    let systems = vec![ToySystem::rotation(GOLDEN, 1); 3];
    let maxima: Vec<f64> = [1u64 << 10, 1 << 13, 1 << 16]
        .iter()
        .map(|&n| sampled_cubic_average(2, &mu, &systems, n, 0, 8).unwrap().max_abs)
        .collect();
    let moved: Vec<ToySystem> = systems.iter().map(|s| s.at(0.37)).collect();
    let fast = cubic_weighted_average(2, &mu, &moved, 1 << 12).unwrap().value;
    let direct = {
        let n = 1usize << 12;
        let w = mu.values();
        let f: Vec<Complex64> = (1..=2 * n as u64).map(|k| moved[0].observe(k)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..=n {
            for b in 1..=n {
                acc += w[a - 1] * w[b - 1] * w[a + b - 1] * f[a - 1] * f[b - 1] * f[a + b - 1];
            }
        }
        acc / (n * n) as f64
    };
    let library_direct = cubic_weighted_average_direct(2, &mu, &moved, 1 << 12).unwrap().value;
    let diff = (fast - direct).norm().max((fast - library_direct).norm());
    let pass = strictly_decreasing(&maxima) && maxima[2] < 0.05 && diff < 1e-9;
    outcome(pass, format!("max |value| {}; fft vs direct at 2^12 {diff:.2e}", fmt_list(&maxima)))
}

fn criterion_11() -> Outcome {
    let lam = sieve_table(FunctionKind::Mangoldt, 2_000_000).unwrap();
    let systems = vec![ToySystem::polyphase(vec![0.0]); 3];
    let centered: Vec<f64> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&n| {
            dynamics::mangoldt_cubic_average_with(&lam, 2, &systems, n)
                .unwrap()
                .centered
                .value
                .re
        })
        .collect();
    let abs: Vec<f64> = centered.iter().map(|v| v.abs()).collect();
    outcome(strictly_decreasing(&abs), format!("centered values {}", fmt_list(&centered)))
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut round_trip = true;
    for kind in FunctionKind::ALL {
        if kind == FunctionKind::Custom {
            continue;
        }
        let t = sieve_table(kind, 100_000).unwrap();
        let path = dir.path().join(format!("{kind}.arf"));
        save_table(&t, &path).unwrap();
        let back = load_table(&path).unwrap();
        round_trip &= back == t
            && back
                .values()
                .iter()
                .zip(t.values())
                .all(|(a, b)| a.to_bits() == b.to_bits());
    }
    let cache = dir.path().join("cache");
    let run = |threads: &str, name: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let code = arf_cli::run([
            "arf",
            "cesaro",
            "--weight",
            "liouville",
            "--ladder",
            "4096:262144:x4",
            "--threads",
            threads,
            "--cache-dir",
            cache.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        fs::read(out).unwrap()
    };
    let one = run("1", "one.csv");
    let four = run("4", "four.csv");
    let pass = round_trip && one == four && !one.is_empty();
    outcome(
        pass,
        format!("cache round trip {round_trip}; CSV bytes identical across 1 and 4 threads: {}", one == four),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("FFT autocorrelation equals the double loop", criterion_1),
        ("order-3 quantity equals the triple loop", criterion_2),
        ("lag-0 Mobius correlation near 6/pi^2", criterion_3),
        ("Cesaro means of |c| decay for Liouville", criterion_4),
        ("order-3 quantity decays for Liouville", criterion_5),
        ("Mobius exponential-sum suprema decay", criterion_6),
        ("cube sums: exact unit values and Liouville decay", criterion_7),
        ("local factors", criterion_8),
        ("prime average versus prime-log weighted average", criterion_9),
        ("weighted cubic averages along rotations", criterion_10),
        ("centered Mangoldt cubic average", criterion_11),
        ("cache round trip and thread-count determinism", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag}: {name} ({:.1?}) {}",
            i + 1,
            start.elapsed(),
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
