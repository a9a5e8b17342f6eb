//! Extremal families showing that `C_p` cannot be lowered, and the
//! convergence experiments built on them.
//!
//! Both families interleave zero blocks with blocks of height `k^(-1/p)`.
//! Half of every prefix is zero, so the lower median vanishes and the
//! deviation is the mean alone, while `sum x^p` is the harmonic number.

use serde::{Deserialize, Serialize};

use crate::continuous::{average_power_integral, StepFunction};
use crate::discrete::Sequence;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::scalar::{CompensatedSum, Scalar};
use crate::streaming::StreamState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub family: Family,
    pub n: u64,
    pub p: Exponent,
}

/// One point of a ratio curve. `rhs` is `sum x^p` (or `int f^p`), so
/// `ratio` approaches `C_p` from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl ConvergencePoint {
    fn new(n: u64, lhs: f64, rhs: f64) -> Self {
        ConvergencePoint {
            n,
            lhs,
            rhs,
            ratio: lhs / rhs,
        }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("extremal family needs N >= 1".into()))
    } else {
        Ok(())
    }
}

fn block_height(k: u64, p: Exponent) -> f64 {
    (k as f64).powf(-1.0 / p.value())
}

/// `[0, 1, 0, 2^(-1/p), ..., 0, N^(-1/p)]`, length `2N`.
pub fn gen_discrete_extremal(n: u64, p: Exponent) -> Result<Sequence<f64>> {
    check_n(n)?;
    let values = (1..=n).flat_map(|k| [0.0, block_height(k, p)]).collect();
    Sequence::new(values)
}

/// `f_N`: `0` on `[2k-2, 2k-1)` and `k^(-1/p)` on `[2k-1, 2k)` for `k <= N`.
pub fn gen_continuous_extremal(n: u64, p: Exponent) -> Result<StepFunction<f64>> {
    check_n(n)?;
    StepFunction::from_pairs((1..=n).flat_map(|k| [(1.0, 0.0), (1.0, block_height(k, p))]))
}

/// `S_k = sum_{j <= k} j^(-1/p)` with compensated summation.
pub fn partial_sum_s(k: u64, p: Exponent) -> f64 {
    (1..=k).map(|j| block_height(j, p)).collect::<CompensatedSum>().value()
}

/// Harmonic number `H_n`, compensated.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).collect::<CompensatedSum>().value()
}

/// Discrete-family curve in a single pass up to the largest `N`: with
/// medians identically zero, `a_{2k-1} = S_{k-1}/(2k-1)` and
/// `a_{2k} = S_k/(2k)`.
pub fn discrete_curve_fast(ns: &[u64], p: Exponent) -> Result<Vec<ConvergencePoint>> {
    check_grid(ns)?;
    let e = p.value();
    let mut s = CompensatedSum::new();
    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    let mut out = Vec::with_capacity(ns.len());
    let mut next = ns.iter().peekable();
    let last = *ns.last().expect("nonempty grid");
    for k in 1..=last {
        let prev = s.value();
        let x = block_height(k, p);
        s.add(x);
        lhs.add((prev / (2 * k - 1) as f64).powf(e));
        lhs.add((s.value() / (2 * k) as f64).powf(e));
        rhs.add(x.powf(e));
        if next.peek() == Some(&&k) {
            next.next();
            out.push(ConvergencePoint::new(k, lhs.value(), rhs.value()));
        }
    }
    Ok(out)
}

/// Discrete-family point computed through the streaming statistics, with no
/// knowledge of the family's structure.
pub fn discrete_point_general(n: u64, p: Exponent) -> Result<ConvergencePoint> {
    let seq = gen_discrete_extremal(n, p)?;
    let mut state = StreamState::new();
    let mut lhs = CompensatedSum::new();
    for x in seq.values() {
        let st = state.push(*x)?;
        lhs.add(st.deviation().pow_p(p)?);
    }
    let rhs: CompensatedSum = seq.values().iter().map(|x| x.powf(p.value())).collect();
    Ok(ConvergencePoint::new(n, lhs.value(), rhs.value()))
}

/// Continuous-family point: `int A_N^p` integrated piece by piece (the
/// median is identically zero) over `int f_N^p`.
pub fn continuous_point(n: u64, p: Exponent, tol: f64) -> Result<ConvergencePoint> {
    let f = gen_continuous_extremal(n, p)?;
    let lhs = average_power_integral(&f, p, tol)?;
    let rhs = f.integral_pow(p)?;
    Ok(ConvergencePoint::new(n, lhs, rhs))
}

/// The block-wise lower bound
/// `sum_{k=2}^N (S_{k-1}/(2k))^p + sum_{k=1}^{N-1} (S_k/(2k+1))^p`
/// for `int |M_N - A_N|^p`.
pub fn continuous_lower_bound(n: u64, p: Exponent) -> Result<f64> {
    check_n(n)?;
    let e = p.value();
    let mut s = CompensatedSum::new();
    let mut acc = CompensatedSum::new();
    for k in 1..=n {
        let prev = s.value();
        s.add(block_height(k, p));
        if k >= 2 {
            acc.add((prev / (2 * k) as f64).powf(e));
        }
        if k < n {
            acc.add((s.value() / (2 * k + 1) as f64).powf(e));
        }
    }
    Ok(acc.value())
}

fn check_grid(ns: &[u64]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::Domain("empty N grid".into()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("N grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Ratio of the median Hardy inequality on the extremal input for each `N`.
/// `tol` is the quadrature budget of the continuous family.
pub fn ratio_curve(family: Family, ns: &[u64], p: Exponent, tol: f64) -> Result<Vec<ConvergencePoint>> {
    check_grid(ns)?;
    match family {
        Family::Discrete => discrete_curve_fast(ns, p),
        Family::Continuous => ns.iter().map(|&n| continuous_point(n, p, tol)).collect(),
    }
}

/// Geometric grid `10^lo, ..., 10^hi`.
pub fn decade_grid(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|e| 10u64.pow(e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Estimated `lim ratio(N)`.
    pub limit: f64,
    /// `c_1` in `ratio(N) ~ limit - c_1 / ln N`.
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points_used: usize,
}

/// Least-squares fit of `ratio(N) ~ c_inf - c_1 / ln N` over the larger half
/// of the curve (at least three points).
pub fn extrapolate_limit(curve: &[ConvergencePoint]) -> Result<Extrapolation> {
    if curve.len() < 3 {
        return Err(Error::Domain(format!(
            "extrapolation needs at least 3 points, got {}",
            curve.len()
        )));
    }
    if curve.windows(2).any(|w| w[0].n >= w[1].n) {
        return Err(Error::Domain("curve must have increasing N".into()));
    }
    let used = curve.len().div_ceil(2).max(3);
    let tail = &curve[curve.len() - used..];
    if tail[0].n < 2 {
        return Err(Error::Domain("fit needs N >= 2 (ln N > 0)".into()));
    }
    let xs: Vec<f64> = tail.iter().map(|c| 1.0 / (c.n as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|c| c.ratio).collect();
    let m = used as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let limit = mean_y - b * mean_x;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (limit + b * x)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(Extrapolation {
        limit,
        slope: -b,
        residual,
        points_used: used,
    })
}

/// Shape checks on a curve: every ratio at most `cap`, and ratios strictly
/// increasing along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveChecks {
    pub below_cap: bool,
    pub strictly_increasing: bool,
}

pub fn check_curve(curve: &[ConvergencePoint], cap: f64) -> CurveChecks {
    CurveChecks {
        below_cap: curve.iter().all(|c| c.ratio <= cap),
        strictly_increasing: curve.windows(2).all(|w| w[0].ratio < w[1].ratio),
    }
}
