use std::fs;

use arf_core::correlation::AutocorrOptions;
use arf_core::dynamics::{cubic_weighted_average_direct, mangoldt_cubic_average_with};
use arf_core::expsum::{dd_suprema, DecayModel};
use arf_core::gowers::{local_factor, mangoldt_box_report, primorial};
use arf_core::numeric::Phase;
use arf_core::oracle::order3_direct;
use arf_core::sieve::save_table;
use arf_core::*;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{g17, Csv, ExperimentConfig, Sink};
use crate::Context;

/// Largest `N` for which `--check` runs the cubic direct double loop.
const CHECK_CUBIC_LIMIT: u64 = 4096;
/// Largest `N` for which `--check` runs the order-3 triple loop.
const CHECK_ORDER3_LIMIT: u64 = 256;

pub(crate) fn dispatch(ctx: &Context, command: Command) -> Result<()> {
    if let Command::Replay(r) = &command {
        return replay(ctx, r);
    }
    let sink = Sink {
        config: ExperimentConfig::new(&command),
        out: ctx.global.out.clone(),
        plot: ctx.global.plot,
    };
    match &command {
        Command::Sieve(a) => sieve(ctx, a),
        Command::Expsum(a) => expsum(ctx, &sink, a),
        Command::Supnorm(a) => supnorm(ctx, &sink, a),
        Command::Corr(a) => corr(ctx, &sink, a),
        Command::Cesaro(a) => cesaro(ctx, &sink, a),
        Command::Order3(a) => order3(ctx, &sink, a),
        Command::Geom(a) => geom(&sink, a),
        Command::Mrt(a) => mrt(ctx, &sink, a),
        Command::Cube(a) => cube(ctx, &sink, a),
        Command::Gowers(a) => gowers(ctx, &sink, a),
        Command::Localfactor(a) => localfactor(&sink, a),
        Command::MangoldtBox(a) => mangoldt_box(ctx, &sink, a),
        Command::Wtrick(a) => wtrick(ctx, &sink, a),
        Command::Primeavg(a) => primeavg(ctx, &sink, a),
        Command::Cubicavg(a) => cubicavg(ctx, &sink, a),
        Command::Kbsz(a) => kbsz(ctx, &sink, a),
        Command::Wws(a) => wws(ctx, &sink, a),
        Command::Fit(a) => fit(&sink, a),
        Command::Replay(_) => unreachable!("handled above"),
    }
}

fn usage(msg: impl Into<String>) -> ArfError {
    ArfError::Usage(msg.into())
}

fn ladder_max(ladder: &Ladder) -> Result<u64> {
    if !ladder.is_strictly_increasing() {
        return Err(usage(format!("ladder {ladder} must be strictly increasing")));
    }
    ladder.max().ok_or_else(|| usage("empty ladder"))
}

fn span(factor: u64, n: u64) -> Result<u64> {
    factor
        .checked_mul(n)
        .ok_or_else(|| usage(format!("{factor}·{n} overflows")))
}

fn write(r: std::io::Result<()>) -> Result<()> {
    r.map_err(ArfError::Io)
}

fn points_csv(points: &[DecayPoint]) -> Csv {
    let mut csv = Csv::new("n,value");
    for p in points {
        csv.push(p.n, p.value);
    }
    csv
}

/// The fitted model, or the reason no fit was possible.
fn fit_json(points: &[DecayPoint], model: Option<DecayModel>) -> Value {
    let fit = match model {
        Some(m) => fit_decay(points, m),
        None => fit_best(points),
    };
    match fit {
        Ok(f) => json!(f),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn sieve(ctx: &Context, a: &SieveArgs) -> Result<()> {
    let path = match &ctx.global.out {
        Some(out) => {
            let t = sieve_window(a.kind, 1, a.limit, ctx.sieve_config())?;
            save_table(&t, out)?;
            out.clone()
        }
        None => {
            ctx.cache.table(a.kind, a.limit)?;
            ctx.cache.dir().join(format!("{}-{}.arf", a.kind, a.limit))
        }
    };
    println!("{}", path.display());
    Ok(())
}

fn expsum(ctx: &Context, sink: &Sink, a: &ExpsumArgs) -> Result<()> {
    let eval = |table: &FunctionTable, n: u64| match &a.coeffs {
        Some(c) => poly_exp_sum(table, n, c),
        None => exp_sum(table, n, a.t),
    };
    match (&a.ladder, a.n) {
        (Some(ladder), _) => {
            let table = ctx.table(a.weight, ladder_max(ladder)?)?;
            let points = ladder
                .points()
                .par_iter()
                .map(|&n| {
                    Ok(DecayPoint {
                        n,
                        value: eval(&table, n)?.norm() / n as f64,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let side = json!({ "fit": fit_json(&points, Some(DecayModel::Power)) });
            write(sink.table(&points_csv(&points), Some(side)))
        }
        (None, Some(n)) => {
            let table = ctx.table(a.weight, n)?;
            let s = eval(&table, n)?;
            write(sink.record(json!({
                "n": n,
                "re": s.re,
                "im": s.im,
                "normalized_abs": s.norm() / n as f64,
            })))
        }
        (None, None) => Err(usage("expsum needs --n or --ladder")),
    }
}

fn supnorm(ctx: &Context, sink: &Sink, a: &SupnormArgs) -> Result<()> {
    let table = ctx.table(a.weight, ladder_max(&a.ladder)?)?;
    let sups = dd_suprema(&table, &a.ladder, a.grid_mult)?;
    let points: Vec<DecayPoint> = sups
        .iter()
        .map(|s| DecayPoint {
            n: s.n_terms,
            value: s.sup_value,
        })
        .collect();
    let side = json!({
        "suprema": sups,
        "fit": fit_json(&points, Some(DecayModel::LogPower)),
    });
    write(sink.table(&points_csv(&points), Some(side)))
}

fn corr(ctx: &Context, sink: &Sink, a: &CorrArgs) -> Result<()> {
    let table = ctx.table(a.weight, span(1, a.n)? + a.maxlag)?;
    let options = AutocorrOptions {
        exact_mode: ctx.global.check,
    };
    let profile = autocorrelation_with(&table, a.n, a.maxlag, options)?;
    if let Some(w) = &profile.precision_warning {
        eprintln!("arf: warning: {w}");
    }
    let mut csv = Csv::new("lag,value");
    for (lag, &v) in profile.values.iter().enumerate() {
        csv.push(lag, v);
    }
    let side = json!({
        "n_terms": profile.n_terms,
        "max_lag": profile.max_lag,
        "weight": profile.kind,
        "fallback_lags": profile.fallback_lags,
        "precision_warning": profile.precision_warning,
    });
    write(sink.table(&csv, Some(side)))
}

fn cesaro(ctx: &Context, sink: &Sink, a: &WeightLadderArgs) -> Result<()> {
    let table = ctx.table(a.weight, span(2, ladder_max(&a.ladder)?)?)?;
    let options = AutocorrOptions {
        exact_mode: ctx.global.check,
    };
    let points = a
        .ladder
        .points()
        .par_iter()
        .map(|&n| {
            let p = autocorrelation_with(&table, n, n, options)?;
            Ok(DecayPoint {
                n,
                value: cesaro_abs(&p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let side = json!({ "fit": fit_json(&points, None) });
    write(sink.table(&points_csv(&points), Some(side)))
}

fn order3(ctx: &Context, sink: &Sink, a: &WeightLadderArgs) -> Result<()> {
    let table = ctx.table(a.weight, span(3, ladder_max(&a.ladder)?)?)?;
    let mut points = Vec::new();
    for &n in a.ladder.points() {
        let value = order3_quantity(&table, n)?;
        if ctx.global.check && n <= CHECK_ORDER3_LIMIT {
            let direct = order3_direct(table.range(1, 3 * n), n as usize);
            if (value - direct).abs() > 1e-9 {
                return Err(ArfError::Consistency(format!(
                    "order-3 quantity at N = {n}: FFT {value} but direct {direct}"
                )));
            }
        }
        points.push(DecayPoint { n, value });
    }
    let side = json!({ "fit": fit_json(&points, None) });
    write(sink.table(&points_csv(&points), Some(side)))
}

fn geom(sink: &Sink, a: &GeomArgs) -> Result<()> {
    let series = geometric_summability(a.weight, a.rho, a.levels)?;
    let mut csv = Csv::new("n,value");
    for l in &series.levels {
        csv.push(l.n, l.mean_abs);
    }
    write(sink.table(&csv, Some(json!(series))))
}

fn mrt(ctx: &Context, sink: &Sink, a: &MrtArgs) -> Result<()> {
    let table = ctx.table(a.weight, a.x.saturating_add(a.h))?;
    let v = mrt_window_sum(&table, a.x, a.h)?;
    write(sink.scalar(g17(v), json!({ "x": a.x, "h": a.h, "value": v })))
}

fn cube(ctx: &Context, sink: &Sink, a: &CubeArgs) -> Result<()> {
    let spec = CubeSpec {
        dimension: a.k,
        include_base: a.base,
    };
    let ladder = match (&a.ladder, a.n) {
        (Some(l), _) => l.clone(),
        (None, Some(n)) => Ladder::new(vec![n]),
        (None, None) => return Err(usage("cube needs --n or --ladder")),
    };
    let table = ctx.table(a.weight, spec.reach(ladder_max(&ladder)?))?;
    let points = ladder
        .points()
        .iter()
        .map(|&n| {
            Ok(DecayPoint {
                n,
                value: cube_sum(&table, n, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if a.ladder.is_none() {
        let v = points[0].value;
        return write(sink.scalar(g17(v), json!({ "n": points[0].n, "k": a.k, "value": v })));
    }
    write(sink.table(&points_csv(&points), None))
}

fn gowers(ctx: &Context, sink: &Sink, a: &GowersArgs) -> Result<()> {
    let table = ctx.table(a.weight, a.n)?;
    let v = gowers_box_norm(table.range(1, a.n), a.degree)?;
    write(sink.scalar(g17(v), json!({ "n": a.n, "degree": a.degree, "norm": v })))
}

fn localfactor(sink: &Sink, a: &LocalFactorArgs) -> Result<()> {
    let f = local_factor(a.p, a.d)?;
    let shown = if a.exact { f.exact_string() } else { g17(f.value) };
    write(sink.scalar(shown, &f))
}

fn mangoldt_box(ctx: &Context, sink: &Sink, a: &MangoldtBoxArgs) -> Result<()> {
    let reach = CubeSpec::c_star(a.d).reach(a.n);
    let table = ctx.table(FunctionKind::Mangoldt, reach)?;
    let report = mangoldt_box_report(&table, a.n, a.d, a.cutoff)?;
    write(sink.record(report))
}

fn wtrick(ctx: &Context, sink: &Sink, a: &WtrickArgs) -> Result<()> {
    let table = w_trick_table(a.n, a.w, a.b, ctx.sieve_config())?;
    let mut csv = Csv::new("n,value");
    for (i, &v) in table.values().iter().enumerate() {
        csv.push(i + 1, v);
    }
    let mean = arf_core::numeric::pairwise_sum(table.values()) / a.n as f64;
    let side = json!({ "W": primorial(a.w), "b": a.b, "mean": mean });
    write(sink.table(&csv, Some(side)))
}

fn primeavg(ctx: &Context, sink: &Sink, a: &PrimeavgArgs) -> Result<()> {
    let logs = sieve_prime_logs(ladder_max(&a.ladder)?, ctx.sieve_config())?;
    let phase = Phase::new(a.phi);
    let points = a
        .ladder
        .points()
        .iter()
        .map(|&n| {
            Ok(DecayPoint {
                n,
                value: prime_average_gap(|k| phase.times(k).cis(), n, &logs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let side = json!({ "fit": fit_json(&points, Some(DecayModel::Power)) });
    write(sink.table(&points_csv(&points), Some(side)))
}

fn expand_systems(specs: &[crate::system::SystemSpec], order: u32) -> Result<Vec<ToySystem>> {
    let need = (1usize << order.min(6)) - 1;
    match specs.len() {
        1 => Ok(vec![specs[0].system().clone(); need]),
        n if n == need => Ok(specs.iter().map(|s| s.system().clone()).collect()),
        n => Err(usage(format!("order {order} needs 1 or {need} systems, got {n}"))),
    }
}

fn cubicavg(ctx: &Context, sink: &Sink, a: &CubicavgArgs) -> Result<()> {
    let systems = expand_systems(&a.systems, a.order)?;
    let table = ctx.table(a.weight, span(u64::from(a.order), ladder_max(&a.ladder)?)?)?;
    let mut points = Vec::new();
    let mut details = Vec::new();
    for &n in a.ladder.points() {
        if a.centered {
            if a.weight != FunctionKind::Mangoldt {
                return Err(usage("--centered needs --weight mangoldt"));
            }
            let r = mangoldt_cubic_average_with(&table, a.order, &systems, n)?;
            points.push(DecayPoint {
                n,
                value: r.centered.value.norm(),
            });
            details.push(json!(r));
            continue;
        }
        let s = sampled_cubic_average(a.order, &table, &systems, n, a.seed, a.samples)?;
        if ctx.global.check {
            check_cubic(&table, a.order, &systems, n, &s)?;
        }
        points.push(DecayPoint { n, value: s.max_abs });
        details.push(json!(s));
    }
    let side = json!({ "averages": details });
    write(sink.table(&points_csv(&points), Some(side)))
}

fn check_cubic(
    table: &FunctionTable,
    order: u32,
    systems: &[ToySystem],
    n: u64,
    sampled: &dynamics::SampledCubicAverage,
) -> Result<()> {
    let limit = if order == 2 { CHECK_CUBIC_LIMIT } else { 128 };
    if n > limit {
        return Ok(());
    }
    let x = sampled.points[0];
    let moved: Vec<ToySystem> = systems.iter().map(|s| s.at(x)).collect();
    let direct = cubic_weighted_average_direct(order, table, &moved, n)?.value;
    let fast: Complex64 = sampled.values[0].value;
    if (fast - direct).norm() > 1e-9 {
        return Err(ArfError::Consistency(format!(
            "cubic average at N = {n}: fast {fast} but direct {direct}"
        )));
    }
    Ok(())
}

fn kbsz(ctx: &Context, sink: &Sink, a: &KbszArgs) -> Result<()> {
    let table = ctx.table(a.weight, a.n)?;
    let report = kbsz_probe(&table, a.system.system(), (a.p, a.q), a.n, a.eps)?;
    write(sink.record(report))
}

fn wws(ctx: &Context, sink: &Sink, a: &WwsArgs) -> Result<()> {
    let table = ctx.table(a.weight, ladder_max(&a.ladder)?)?;
    let sups = a
        .ladder
        .points()
        .par_iter()
        .map(|&n| wiener_wintner_probe(&table, a.system.system(), n, span(a.grid_mult, n)?))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<DecayPoint> = sups
        .iter()
        .map(|s| DecayPoint {
            n: s.n_terms,
            value: s.sup_value,
        })
        .collect();
    write(sink.table(&points_csv(&points), Some(json!({ "suprema": sups }))))
}

/// Reads `n,value` rows, skipping `#` comments and a header line.
pub(crate) fn read_points(text: &str) -> Result<Vec<DecayPoint>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((n, v)) = line.split_once(',') else {
            return Err(usage(format!("line {}: expected `n,value`", i + 1)));
        };
        match (n.trim().parse::<u64>(), v.trim().parse::<f64>()) {
            (Ok(n), Ok(value)) => points.push(DecayPoint { n, value }),
            _ if points.is_empty() => continue, // header
            _ => return Err(usage(format!("line {}: cannot parse `{line}`", i + 1))),
        }
    }
    Ok(points)
}

fn fit(sink: &Sink, a: &FitArgs) -> Result<()> {
    let text = fs::read_to_string(&a.points)?;
    let points = read_points(&text)?;
    if points.len() < 4 {
        return Err(usage(format!(
            "fit needs at least 4 points, {} found",
            points.len()
        )));
    }
    let best = fit_best(&points)?;
    let record = json!({
        "best": best,
        "log_power": fit_decay(&points, DecayModel::LogPower)?,
        "power": fit_decay(&points, DecayModel::Power)?,
    });
    write(sink.record(record))
}

/// Pulls the embedded configuration out of an earlier output and runs it.
fn replay(ctx: &Context, a: &ReplayArgs) -> Result<()> {
    let text = fs::read_to_string(&a.file)?;
    let config: Value = match text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        Some(line) => serde_json::from_str(line).map_err(|e| usage(e.to_string()))?,
        None => {
            let v: Value = serde_json::from_str(&text)
                .map_err(|_| usage(format!("{} holds no embedded configuration", a.file.display())))?;
            v.get("config")
                .cloned()
                .ok_or_else(|| usage("JSON output without a `config` field"))?
        }
    };
    let command: Command = serde_json::from_value(config).map_err(|e| usage(e.to_string()))?;
    if matches!(command, Command::Replay(_)) {
        return Err(usage("refusing to replay a replay"));
    }
    dispatch(ctx, command)
}
