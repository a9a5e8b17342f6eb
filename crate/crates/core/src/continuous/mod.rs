//! Step-function calculus on `(0, inf)` and the continuous inequalities:
//! the pointwise median/rearrangement estimate, the median Hardy
//! inequality and the classical Hardy inequality.
//!
//! Quantities defined pointwise (`A`, `M`, `f*`, `int_0^r f*`) are exact on
//! the exact backend. Integrals over `(0, inf)` are computed in `f64`: each
//! piece between breakpoints has an integrand of the form `|g + d/t|^p`,
//! which is integrated by adaptive Gauss–Legendre after splitting at its
//! zero, and the unbounded tail `|d|^p int_T^inf t^-p dt` is closed-form.

pub mod median;
pub mod quadrature;
pub mod step;

pub use median::{lower_median_fn, median_at_oracle, PiecewiseConstant};
pub use step::{
    average_at, decreasing_rearrangement_fn, rearranged_prefix_integral, PiecewiseAverage, Segment, StepFunction,
};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exponent::{hardy_constant, sharp_constant, Exponent};
use crate::report::{CheckKind, PointwiseScan, VerificationReport, Witness};
use crate::scalar::{CompensatedSum, Scalar, Tolerance};

/// Integrand `|gamma + delta / t|^p` on `[a, b]`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    gamma: f64,
    delta: f64,
}

fn integrate_pieces(pieces: &[Piece], p: f64, tol: f64) -> f64 {
    let span: f64 = pieces.iter().map(|pc| pc.b - pc.a).sum();
    let mut acc = CompensatedSum::new();
    for pc in pieces {
        let Piece { a, b, gamma, delta } = *pc;
        if delta == 0.0 && gamma == 0.0 {
            continue;
        }
        let integrand = |t: f64| (gamma + delta / t).abs().powf(p);
        let mut cuts = vec![a];
        if gamma != 0.0 {
            let zero = -delta / gamma;
            if zero > a && zero < b {
                cuts.push(zero);
            }
        }
        cuts.push(b);
        for w in cuts.windows(2) {
            let budget = tol * (w[1] - w[0]) / span;
            acc.add(quadrature::integrate(&integrand, w[0], w[1], budget).value);
        }
    }
    acc.value()
}

/// `|delta|^p int_from^inf t^-p dt`.
fn power_tail(delta: f64, from: f64, p: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    delta.abs().powf(p) * from.powf(1.0 - p) / (p - 1.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {tol}"
        )))
    }
}

fn sorted_union<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut all: Vec<S> = a.iter().chain(b).cloned().collect();
    all.sort_by(|x, y| x.total_cmp(y));
    all.dedup_by(|x, y| x.total_cmp(y) == Ordering::Equal);
    all
}

/// `int_0^inf |M(t) - A(t)|^p dt` with absolute error at most `tol`.
pub fn deviation_integral<S: Scalar>(f: &StepFunction<S>, p: Exponent, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let median = lower_median_fn(f);
    let avg = PiecewiseAverage::of(f);
    let knots = sorted_union(&median.breakpoints, &avg.starts);
    debug_assert!(median.final_value().is_zero());

    let pieces: Vec<Piece> = knots
        .windows(2)
        .map(|w| {
            let k = avg.piece(&w[0]);
            let c = median.right_limit(&w[0]);
            Piece {
                a: w[0].to_f64(),
                b: w[1].to_f64(),
                gamma: (c - avg.beta[k].clone()).to_f64(),
                delta: -avg.alpha[k].to_f64(),
            }
        })
        .collect();
    let end = knots.last().map_or(0.0, Scalar::to_f64);
    let tail = if end > 0.0 {
        power_tail(avg.total().to_f64(), end, p.value())
    } else {
        0.0
    };
    Ok(integrate_pieces(&pieces, p.value(), tol) + tail)
}

/// `int_0^inf A(t)^p dt`, the left side of the classical Hardy inequality.
pub fn average_power_integral<S: Scalar>(g: &StepFunction<S>, p: Exponent, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let avg = PiecewiseAverage::of(g);
    let pieces: Vec<Piece> = avg
        .starts
        .windows(2)
        .enumerate()
        .map(|(k, w)| Piece {
            a: w[0].to_f64(),
            b: w[1].to_f64(),
            gamma: avg.beta[k].to_f64(),
            delta: avg.alpha[k].to_f64(),
        })
        .collect();
    let end = avg.starts.last().map_or(0.0, Scalar::to_f64);
    let tail = if end > 0.0 {
        power_tail(avg.total().to_f64(), end, p.value())
    } else {
        0.0
    };
    Ok(integrate_pieces(&pieces, p.value(), tol) + tail)
}

/// `int_0^inf ((1/t) int_0^{t/2} f*)^p dt`, integrated in the variable `t`.
pub fn rearranged_half_integral<S: Scalar>(f: &StepFunction<S>, p: Exponent, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let star = PiecewiseAverage::of(&decreasing_rearrangement_fn(f));
    // On t in [2y_k, 2y_{k+1}]: (1/t) Phi(t/2) = alpha_k / t + beta_k / 2.
    let pieces: Vec<Piece> = star
        .starts
        .windows(2)
        .enumerate()
        .map(|(k, w)| Piece {
            a: 2.0 * w[0].to_f64(),
            b: 2.0 * w[1].to_f64(),
            gamma: 0.5 * star.beta[k].to_f64(),
            delta: star.alpha[k].to_f64(),
        })
        .collect();
    let end = 2.0 * star.starts.last().map_or(0.0, Scalar::to_f64);
    let tail = if end > 0.0 {
        power_tail(star.total().to_f64(), end, p.value())
    } else {
        0.0
    };
    Ok(integrate_pieces(&pieces, p.value(), tol) + tail)
}

fn norm_pow<S: Scalar>(f: &StepFunction<S>, p: Exponent) -> Result<f64> {
    f.to_f64().integral_pow(p)
}

/// `int |M - A|^p <= C_p int f^p`, with `tol` added to the comparison slack.
pub fn verify_theorem1<S: Scalar>(f: &StepFunction<S>, p: Exponent, tol: f64) -> Result<VerificationReport<f64>> {
    let lhs = deviation_integral(f, p, tol)?;
    let rhs = sharp_constant::<f64>(p)?.into_inner() * norm_pow(f, p)?;
    Ok(VerificationReport::compare(
        CheckKind::Theorem1,
        lhs,
        rhs,
        &Tolerance::DEFAULT.widened(tol),
    ))
}

/// The two links behind [`verify_theorem1`]:
/// `int |M - A|^p <= int ((1/t) int_0^{t/2} f*)^p <= C_p int f^p`.
pub fn theorem1_chain<S: Scalar>(f: &StepFunction<S>, p: Exponent, tol: f64) -> Result<[VerificationReport<f64>; 2]> {
    let dev = deviation_integral(f, p, tol)?;
    let mid = rearranged_half_integral(f, p, tol)?;
    let cap = sharp_constant::<f64>(p)?.into_inner() * norm_pow(f, p)?;
    let slack = Tolerance::DEFAULT.widened(2.0 * tol);
    Ok([
        VerificationReport::compare(CheckKind::Theorem1Rearranged, dev, mid, &slack),
        VerificationReport::compare(CheckKind::Theorem1Hardy, mid, cap, &slack),
    ])
}

/// `int A_g^p <= (p/(p-1))^p int g^p`.
pub fn verify_hardy_continuous<S: Scalar>(
    g: &StepFunction<S>,
    p: Exponent,
    tol: f64,
) -> Result<VerificationReport<f64>> {
    let lhs = average_power_integral(g, p, tol)?;
    let rhs = hardy_constant::<f64>(p)? * norm_pow(g, p)?;
    Ok(VerificationReport::compare(
        CheckKind::HardyContinuous,
        lhs,
        rhs,
        &Tolerance::DEFAULT.widened(tol),
    ))
}

/// Checks `int ((1/t) int_0^{t/2} f*)^p dt = 2^(1-p) int ((1/u) int_0^u f*)^p du`
/// by two independent quadratures; holds when they agree within `2 tol`.
pub fn substitution_identity_check<S: Scalar>(
    f: &StepFunction<S>,
    p: Exponent,
    tol: f64,
) -> Result<VerificationReport<f64>> {
    let lhs = rearranged_half_integral(f, p, tol)?;
    let star = decreasing_rearrangement_fn(f);
    let rhs = 2f64.powf(1.0 - p.value()) * average_power_integral(&star, p, tol)?;
    let holds = (lhs - rhs).abs() <= 2.0 * tol;
    Ok(VerificationReport::from_parts(
        CheckKind::SubstitutionIdentity,
        lhs,
        rhs,
        holds,
        None,
    ))
}

/// Sample points used by [`lemma1_check`] beyond the caller's own: every
/// breakpoint of `M` and `F`, midpoints between consecutive breakpoints,
/// `2 meas{f > 0}` and one point past the last breakpoint.
pub fn lemma1_points<S: Scalar>(f: &StepFunction<S>, median: &PiecewiseConstant<S>, samples: &[S]) -> Vec<S> {
    let knots = sorted_union(&median.breakpoints, &f.breakpoints());
    let mut points: Vec<S> = samples.to_vec();
    points.extend(knots.iter().skip(1).cloned());
    for w in knots.windows(2) {
        points.push((w[0].clone() + w[1].clone()).half());
    }
    let pos = f.positive_measure();
    if !pos.is_zero() {
        points.push(pos.clone() + pos);
    }
    if let Some(last) = knots.last() {
        points.push(last.clone() + S::one());
    }
    sorted_union(&points, &[])
}

/// Checks `|M(t) - A(t)| <= (1/t) int_0^{t/2} f*` at the given samples and
/// at the points of [`lemma1_points`]. At breakpoints of `M` both one-sided
/// limits and the point value are checked.
pub fn lemma1_check<S: Scalar>(f: &StepFunction<S>, samples: &[S], tol: Tolerance) -> Result<VerificationReport<S>> {
    if let Some(bad) = samples.iter().find(|t| **t <= S::zero()) {
        return Err(Error::Domain(format!("sample points must be positive, got {bad}")));
    }
    let median = lower_median_fn(f);
    let avg = PiecewiseAverage::of(f);
    let star = PiecewiseAverage::of(&decreasing_rearrangement_fn(f));
    let mut scan = PointwiseScan::new(CheckKind::Lemma1, tol);
    for t in lemma1_points(f, &median, samples) {
        let a = avg.at(&t);
        let rhs = star.cumulative(&t.half()) / t.clone();
        let mut ms = vec![median.eval(&t), median.left_limit(&t), median.right_limit(&t)];
        ms.dedup();
        for m in ms {
            scan.observe((m - a.clone()).abs(), rhs.clone(), Witness::Point(t.clone()));
        }
    }
    Ok(scan.finish())
}
