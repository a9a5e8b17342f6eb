use anyhow::Result;
use median_hardy::continuous::{
    decreasing_rearrangement_fn, lemma1_check, lower_median_fn, substitution_identity_check, theorem1_chain,
    verify_hardy_continuous, verify_theorem1, PiecewiseAverage, StepFunction,
};
use median_hardy::discrete::discrete_suite;
use median_hardy::io::{read_sequence, read_step_function};
use median_hardy::sampling::{case_rng, mixture_sequence, random_points, random_step_function};
use median_hardy::sharpness::{
    check_curve, continuous_point, discrete_curve_fast, extrapolate_limit, ConvergencePoint, Family,
};
use median_hardy::streaming::prefix_stats;
use median_hardy::{sharp_constant, CheckKind, Exponent, Rational, Scalar, Tolerance, VerificationReport};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Backend, CommandKind, RunConfig};
use crate::report::{kind_name, merge_tallies, plain, CheckRecord, KindTally, Report, Table};

/// Random sample points per step function in `verify-continuous`.
const SAMPLES_PER_FUNCTION: usize = 100;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    use Backend::*;
    use CommandKind::*;
    match (cfg.command, cfg.backend) {
        (VerifyDiscrete, Exact) => verify_discrete::<Rational>(cfg),
        (VerifyDiscrete, Float) => verify_discrete::<f64>(cfg),
        (VerifyContinuous, Exact) => verify_continuous::<Rational>(cfg),
        (VerifyContinuous, Float) => verify_continuous::<f64>(cfg),
        (Sharpness, _) => sharpness(cfg),
        (Eval, Exact) => eval::<Rational>(cfg),
        (Eval, Float) => eval::<f64>(cfg),
    }
}

fn cap(p: Exponent) -> Result<f64> {
    Ok(sharp_constant::<f64>(p)?.into_inner())
}

fn tallies<S: Scalar>(index: usize, reports: impl IntoIterator<Item = VerificationReport<S>>) -> Vec<KindTally<S>> {
    reports.into_iter().map(|r| KindTally::of(index, r)).collect()
}

fn push_tallies<S: Scalar>(report: &mut Report, tallies: &[KindTally<S>]) {
    report.checks.extend(tallies.iter().filter_map(KindTally::record));
}

pub fn verify_discrete<S: Scalar>(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.p;
    let tol = Tolerance {
        rel: cfg.tol,
        abs: Tolerance::DEFAULT.abs,
    };
    let mut report = Report::new(cfg.echo(), cap(p)?);
    report.headline = Some(kind_name(CheckKind::MedianHardyDiscrete));
    if let Some(path) = &cfg.input {
        let seq = read_sequence::<S>(path)?;
        for r in discrete_suite(&seq, p, tol)? {
            report.checks.push(CheckRecord::single("input", &r));
        }
    }
    if cfg.trials > 0 {
        let merged = (0..cfg.trials)
            .into_par_iter()
            .map(|i| -> Result<Vec<KindTally<S>>> {
                let mut rng = case_rng(cfg.seed, i as u64);
                let seq = mixture_sequence::<S, _>(&mut rng, cfg.max_n);
                Ok(tallies(i, discrete_suite(&seq, p, tol)?))
            })
            .try_reduce(Vec::new, |a, b| Ok(merge_tallies(a, b)))?;
        push_tallies(&mut report, &merged);
    }
    Ok(report)
}

type ContinuousReports<S> = (Vec<VerificationReport<S>>, Vec<VerificationReport<f64>>);
type ContinuousTallies<S> = (Vec<KindTally<S>>, Vec<KindTally<f64>>);

fn continuous_reports<S: Scalar>(
    f: &StepFunction<S>,
    samples: &[S],
    p: Exponent,
    tol: f64,
) -> Result<ContinuousReports<S>> {
    let lemma = lemma1_check(f, samples, Tolerance::DEFAULT)?;
    let mut floats = vec![verify_theorem1(f, p, tol)?];
    floats.extend(theorem1_chain(f, p, tol)?);
    floats.push(verify_hardy_continuous(f, p, tol)?);
    floats.push(substitution_identity_check(f, p, tol)?);
    Ok((vec![lemma], floats))
}

pub fn verify_continuous<S: Scalar>(cfg: &RunConfig) -> Result<Report> {
    let (p, tol) = (cfg.p, cfg.tol);
    let mut report = Report::new(cfg.echo(), cap(p)?);
    report.headline = Some(kind_name(CheckKind::Theorem1));
    if let Some(path) = &cfg.input {
        let f = read_step_function::<S>(path)?;
        let (exact, floats) = continuous_reports(&f, &[], p, tol)?;
        report
            .checks
            .extend(exact.iter().map(|r| CheckRecord::single("input", r)));
        report
            .checks
            .extend(floats.iter().map(|r| CheckRecord::single("input", r)));
    }
    if cfg.trials > 0 {
        let (exact, floats) = (0..cfg.trials)
            .into_par_iter()
            .map(|i| -> Result<ContinuousTallies<S>> {
                let mut rng = case_rng(cfg.seed, i as u64);
                let f = random_step_function::<S, _>(&mut rng, cfg.max_n);
                let horizon = (2.0 * f.support_end().to_f64()).ceil() as u64 + 2;
                let samples = random_points::<S, _>(&mut rng, SAMPLES_PER_FUNCTION, horizon);
                let (exact, floats) = continuous_reports(&f, &samples, p, tol)?;
                Ok((tallies(i, exact), tallies(i, floats)))
            })
            .try_reduce(
                || (Vec::new(), Vec::new()),
                |a, b| Ok((merge_tallies(a.0, b.0), merge_tallies(a.1, b.1))),
            )?;
        push_tallies(&mut report, &exact);
        push_tallies(&mut report, &floats);
    }
    Ok(report)
}

/// Builds a table for text output and the matching JSON rows.
fn table(name: &str, header: &[&str], rows: Vec<Vec<Value>>) -> (Table, Value) {
    let mut t = Table::new(name, header);
    let mut data = Vec::with_capacity(rows.len());
    for row in rows {
        t.push(row.iter().map(plain).collect());
        let obj: Map<String, Value> = header.iter().map(|h| h.to_string()).zip(row).collect();
        data.push(Value::Object(obj));
    }
    (t, Value::Array(data))
}

pub fn sharpness(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.p;
    let cap = cap(p)?;
    let curve: Vec<ConvergencePoint> = match cfg.family {
        Family::Discrete => discrete_curve_fast(&cfg.n_grid, p)?,
        Family::Continuous => cfg
            .n_grid
            .par_iter()
            .map(|&n| continuous_point(n, p, cfg.tol))
            .collect::<Result<_, _>>()?,
    };
    let mut report = Report::new(cfg.echo(), cap);
    let shape = check_curve(&curve, cap);
    let max = curve.iter().map(|c| c.ratio).fold(0.0, f64::max);
    report.checks.push(CheckRecord::named(
        "curve",
        "ratio_below_cap",
        max,
        cap,
        shape.below_cap,
    ));
    let steps = curve.len().saturating_sub(1) as f64;
    let rising = curve.windows(2).filter(|w| w[0].ratio < w[1].ratio).count() as f64;
    report.checks.push(CheckRecord::named(
        "curve",
        "strictly_increasing",
        rising,
        steps,
        shape.strictly_increasing,
    ));
    report.max_ratio = Some(max);

    let rows = curve
        .iter()
        .map(|c| vec![json!(c.n), c.lhs.to_json(), c.rhs.to_json(), c.ratio.to_json()])
        .collect();
    let (t, points) = table("curve", &["N", "lhs", "rhs", "ratio"], rows);
    report.tables.push(t);
    let fit = if curve.len() >= 3 && curve[0].n >= 2 {
        Some(extrapolate_limit(&curve)?)
    } else {
        None
    };
    if let Some(fit) = &fit {
        let (t, _) = table(
            "extrapolation",
            &["limit", "slope", "residual", "points_used", "limit/C_p"],
            vec![vec![
                fit.limit.to_json(),
                fit.slope.to_json(),
                fit.residual.to_json(),
                json!(fit.points_used),
                (fit.limit / cap).to_json(),
            ]],
        );
        report.tables.push(t);
    }
    report.data = Some(json!({ "curve": points, "extrapolation": fit }));
    Ok(report)
}

pub fn eval<S: Scalar>(cfg: &RunConfig) -> Result<Report> {
    let path = cfg.input.as_ref().expect("eval config has an input");
    let mut report = Report::new(cfg.echo(), cap(cfg.p)?);
    match cfg.family {
        Family::Discrete => {
            let seq = read_sequence::<S>(path)?;
            let rows = prefix_stats(seq.values())?
                .iter()
                .map(|s| {
                    vec![
                        json!(s.i),
                        s.mean.to_json(),
                        s.lower_median.to_json(),
                        s.top_half_sum.to_json(),
                    ]
                })
                .collect();
            let (t, data) = table(
                "prefix statistics",
                &["i", "mean", "lower_median", "top_half_sum"],
                rows,
            );
            report.tables.push(t);
            report.data = Some(json!({ "prefix_stats": data }));
        }
        Family::Continuous => {
            let f = read_step_function::<S>(path)?;
            let end = |b: Option<&S>| b.map_or(json!("inf"), Scalar::to_json);

            let median = lower_median_fn(&f);
            let rows = median
                .pieces()
                .enumerate()
                .map(|(k, (a, b, v))| {
                    let at_start = if k == 0 {
                        Value::Null
                    } else {
                        median.point_values[k].to_json()
                    };
                    vec![a.to_json(), end(b), v.to_json(), at_start]
                })
                .collect();
            let (tm, m) = table("median M(t)", &["from", "to", "value", "value_at_from"], rows);

            let avg = PiecewiseAverage::of(&f);
            let rows = (0..avg.starts.len())
                .map(|k| {
                    vec![
                        avg.starts[k].to_json(),
                        end(avg.starts.get(k + 1)),
                        avg.alpha[k].to_json(),
                        avg.beta[k].to_json(),
                    ]
                })
                .collect();
            let (ta, a) = table("average A(t) = alpha/t + beta", &["from", "to", "alpha", "beta"], rows);

            let star = decreasing_rearrangement_fn(&f);
            let mut x = S::zero();
            let rows = star
                .segments()
                .iter()
                .map(|s| {
                    let from = x.clone();
                    x = x.clone() + s.len.clone();
                    vec![from.to_json(), x.to_json(), s.val.to_json()]
                })
                .collect();
            let (ts, r) = table("rearrangement f*", &["from", "to", "value"], rows);

            report.tables.extend([tm, ta, ts]);
            report.data = Some(json!({ "median": m, "average": a, "rearrangement": r }));
        }
    }
    Ok(report)
}
