//! Sequence-level checks of the discrete median Hardy inequality and the
//! chain of bounds behind it, plus brute-force oracles.

use crate::error::{Error, Result};
use crate::exponent::{hardy_constant, sharp_constant, Exponent};
use crate::report::{CheckKind, PointwiseScan, VerificationReport, Witness};
use crate::scalar::{sum, Scalar, Tolerance};
use crate::streaming::{prefix_stats, PrefixStats};

/// Largest `n` accepted by exhaustive subset enumeration.
pub const MAX_EXHAUSTIVE_LEN: usize = 15;
/// Largest `n` accepted by the quadratic prefix oracle.
pub const MAX_BRUTE_FORCE_LEN: usize = 2000;

/// A finite nonempty sequence of nonnegative values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence<S>(Vec<S>);

impl<S: Scalar> Sequence<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sequence must have at least one element".into()));
        }
        if let Some(bad) = values.iter().find(|x| x.is_negative()) {
            return Err(Error::Negative(bad.to_string()));
        }
        Ok(Sequence(values))
    }

    pub fn values(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }

    /// Multiplies every entry by `lambda >= 0`.
    pub fn scaled(&self, lambda: &S) -> Self {
        Sequence(self.0.iter().map(|x| x.clone() * lambda.clone()).collect())
    }
}

/// The values sorted nonincreasing.
pub fn decreasing_rearrangement<S: Scalar>(seq: &Sequence<S>) -> Sequence<S> {
    let mut v = seq.0.clone();
    v.sort_by(|a, b| b.total_cmp(a));
    Sequence(v)
}

/// Running sums of the rearrangement: entry `r` is `x*_1 + ... + x*_r`.
fn top_sums<S: Scalar>(sorted_desc: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(sorted_desc.len() + 1);
    out.push(S::zero());
    for x in sorted_desc {
        let next = out.last().cloned().unwrap_or_else(S::zero) + x.clone();
        out.push(next);
    }
    out
}

fn all_subset_sums<S: Scalar>(values: &[S]) -> Result<Vec<S>> {
    let n = values.len();
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::Capability {
            what: "exhaustive subset enumeration",
            size: n,
            limit: MAX_EXHAUSTIVE_LEN,
        });
    }
    let mut sums = Vec::with_capacity(1 << n);
    sums.push(S::zero());
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let s = sums[mask & (mask - 1)].clone() + values[low].clone();
        sums.push(s);
    }
    Ok(sums)
}

fn dominance_report<S: Scalar>(sums: &[S], top: &S, r: usize) -> VerificationReport<S> {
    let mut best: Option<&S> = None;
    for (mask, s) in sums.iter().enumerate() {
        if mask.count_ones() as usize != r {
            continue;
        }
        if s > top {
            return VerificationReport::from_parts(
                CheckKind::TopRDominance,
                s.clone(),
                top.clone(),
                false,
                Some(Witness::Index(mask)),
            );
        }
        if best.is_none_or(|b| s > b) {
            best = Some(s);
        }
    }
    let lhs = best.cloned().unwrap_or_else(S::zero);
    VerificationReport::from_parts(CheckKind::TopRDominance, lhs, top.clone(), true, None)
}

/// Checks by enumeration that no `r`-element subset outweighs the `r`
/// largest values. `lhs` is the largest subset sum found.
pub fn verify_top_r_dominance<S: Scalar>(seq: &Sequence<S>, r: usize) -> Result<VerificationReport<S>> {
    if r == 0 || r > seq.len() {
        return Err(Error::Domain(format!("subset size {r} outside 1..={}", seq.len())));
    }
    let sums = all_subset_sums(seq.values())?;
    let top = top_sums(decreasing_rearrangement(seq).values());
    Ok(dominance_report(&sums, &top[r], r))
}

/// [`verify_top_r_dominance`] for every `r` in `1..=n`, sharing one
/// enumeration.
pub fn verify_top_r_dominance_all<S: Scalar>(seq: &Sequence<S>) -> Result<Vec<VerificationReport<S>>> {
    let sums = all_subset_sums(seq.values())?;
    let top = top_sums(decreasing_rearrangement(seq).values());
    Ok((1..=seq.len()).map(|r| dominance_report(&sums, &top[r], r)).collect())
}

/// Recomputes every prefix's statistics from a sorted copy of the prefix,
/// summing from scratch each time.
pub fn brute_force_prefix_stats<S: Scalar>(seq: &Sequence<S>) -> Result<Vec<PrefixStats<S>>> {
    if seq.len() > MAX_BRUTE_FORCE_LEN {
        return Err(Error::Capability {
            what: "brute-force prefix statistics",
            size: seq.len(),
            limit: MAX_BRUTE_FORCE_LEN,
        });
    }
    let values = seq.values();
    let mut sorted: Vec<S> = Vec::with_capacity(values.len());
    let mut out = Vec::with_capacity(values.len());
    for (k, x) in values.iter().enumerate() {
        let i = k + 1;
        let at = sorted.partition_point(|y| y.total_cmp(x).is_le());
        sorted.insert(at, x.clone());
        out.push(PrefixStats {
            i,
            mean: S::sum_all(sorted.iter().cloned()) / S::from_u64(i as u64),
            lower_median: sorted[i.div_ceil(2) - 1].clone(),
            top_half_sum: S::sum_all(sorted[i - i / 2..].iter().cloned()),
        });
    }
    Ok(out)
}

/// Per-prefix quantities shared by the discrete checks.
struct Analysis<S> {
    /// `|m_i - a_i|`.
    deviations: Vec<S>,
    /// `T_i / i`.
    prefix_bounds: Vec<S>,
    /// `G_i / i` where `G_i` sums the `floor(i/2)` largest values overall.
    global_bounds: Vec<S>,
    rearranged: Vec<S>,
}

impl<S: Scalar> Analysis<S> {
    fn new(seq: &Sequence<S>) -> Result<Self> {
        let stats = prefix_stats(seq.values())?;
        let rearranged = decreasing_rearrangement(seq).into_inner();
        let top = top_sums(&rearranged);
        let global_bounds = (1..=seq.len())
            .map(|i| top[i / 2].clone() / S::from_u64(i as u64))
            .collect();
        Ok(Analysis {
            deviations: stats.iter().map(PrefixStats::deviation).collect(),
            prefix_bounds: stats.iter().map(PrefixStats::prefix_bound).collect(),
            global_bounds,
            rearranged,
        })
    }

    fn prefix_bound_report(&self, tol: Tolerance) -> VerificationReport<S> {
        let mut scan = PointwiseScan::new(CheckKind::PrefixBound, tol);
        for (i, (d, b)) in self.deviations.iter().zip(&self.prefix_bounds).enumerate() {
            scan.observe(d.clone(), b.clone(), Witness::Prefix(i + 1));
        }
        scan.finish()
    }

    fn global_bound_reports(&self, tol: Tolerance) -> [VerificationReport<S>; 2] {
        let mut bound = PointwiseScan::new(CheckKind::GlobalBound, tol);
        let mut chain = PointwiseScan::new(CheckKind::GlobalDominatesPrefix, tol);
        let rows = self.deviations.iter().zip(&self.prefix_bounds).zip(&self.global_bounds);
        for (i, ((d, b), g)) in rows.enumerate() {
            bound.observe(d.clone(), g.clone(), Witness::Prefix(i + 1));
            chain.observe(b.clone(), g.clone(), Witness::Prefix(i + 1));
        }
        [bound.finish(), chain.finish()]
    }
}

fn power_sum<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I, p: Exponent) -> Result<S> {
    let powers = items.into_iter().map(|x| x.pow_p(p)).collect::<Result<Vec<_>>>()?;
    Ok(sum(powers))
}

/// Power sums used by the `p`-dependent checks.
struct PowerSums<S> {
    deviation: S,
    prefix: S,
    global: S,
    rearranged: S,
    original: S,
    cap: S,
}

impl<S: Scalar> PowerSums<S> {
    fn new(analysis: &Analysis<S>, seq: &Sequence<S>, p: Exponent) -> Result<Self> {
        let original = power_sum(seq.values(), p)?;
        Ok(PowerSums {
            deviation: power_sum(&analysis.deviations, p)?,
            prefix: power_sum(&analysis.prefix_bounds, p)?,
            global: power_sum(&analysis.global_bounds, p)?,
            rearranged: power_sum(&analysis.rearranged, p)?,
            cap: sharp_constant::<S>(p)?.into_inner() * original.clone(),
            original,
        })
    }

    fn median_hardy(&self, tol: Tolerance) -> VerificationReport<S> {
        VerificationReport::compare(
            CheckKind::MedianHardyDiscrete,
            self.deviation.clone(),
            self.cap.clone(),
            &tol,
        )
    }

    fn chain(&self, p: Exponent, tol: Tolerance) -> Result<Vec<VerificationReport<S>>> {
        let cap = sharp_constant::<S>(p)?.into_inner() * self.rearranged.clone();
        let norm_holds = if S::EXACT {
            self.rearranged == self.original
        } else {
            self.rearranged.le_with_slack(&self.original, &tol) && self.original.le_with_slack(&self.rearranged, &tol)
        };
        Ok(vec![
            VerificationReport::compare(
                CheckKind::ChainPrefixSum,
                self.deviation.clone(),
                self.prefix.clone(),
                &tol,
            ),
            VerificationReport::compare(
                CheckKind::ChainGlobalSum,
                self.prefix.clone(),
                self.global.clone(),
                &tol,
            ),
            VerificationReport::compare(CheckKind::ChainHardyBound, self.global.clone(), cap, &tol),
            VerificationReport::from_parts(
                CheckKind::NormPreservation,
                self.rearranged.clone(),
                self.original.clone(),
                norm_holds,
                None,
            ),
        ])
    }
}

/// Checks `|m_i - a_i| <= T_i / i` for every prefix.
pub fn verify_pointwise_prefix_bound<S: Scalar>(seq: &Sequence<S>, tol: Tolerance) -> Result<VerificationReport<S>> {
    Ok(Analysis::new(seq)?.prefix_bound_report(tol))
}

/// Checks `|m_i - a_i| <= G_i / i` for every prefix, where `G_i` sums the
/// `floor(i/2)` largest values of the whole sequence, and that `G_i >= T_i`.
///
/// Returns the [`CheckKind::GlobalBound`] report followed by the
/// [`CheckKind::GlobalDominatesPrefix`] report.
pub fn verify_pointwise_global_bound<S: Scalar>(
    seq: &Sequence<S>,
    tol: Tolerance,
) -> Result<[VerificationReport<S>; 2]> {
    Ok(Analysis::new(seq)?.global_bound_reports(tol))
}

/// `sum |m_i - a_i|^p <= C_p sum x_i^p`.
pub fn median_hardy_discrete<S: Scalar>(
    seq: &Sequence<S>,
    p: Exponent,
    tol: Tolerance,
) -> Result<VerificationReport<S>> {
    let analysis = Analysis::new(seq)?;
    let lhs = power_sum(&analysis.deviations, p)?;
    let rhs = sharp_constant::<S>(p)?.into_inner() * power_sum(seq.values(), p)?;
    Ok(VerificationReport::compare(
        CheckKind::MedianHardyDiscrete,
        lhs,
        rhs,
        &tol,
    ))
}

/// Classical discrete Hardy inequality
/// `sum_r ((b_1 + ... + b_r) / r)^p <= (p/(p-1))^p sum b_r^p`.
pub fn hardy_discrete<S: Scalar>(b: &Sequence<S>, p: Exponent, tol: Tolerance) -> Result<VerificationReport<S>> {
    let mut running = S::zero();
    let mut means = Vec::with_capacity(b.len());
    for (r, x) in b.values().iter().enumerate() {
        running = running + x.clone();
        means.push(running.clone() / S::from_u64(r as u64 + 1));
    }
    let lhs = power_sum(&means, p)?;
    let rhs = hardy_constant::<S>(p)? * power_sum(b.values(), p)?;
    Ok(VerificationReport::compare(CheckKind::HardyDiscrete, lhs, rhs, &tol))
}

/// Coefficient form of the even/odd grouping step:
/// `(2r)^-p + (2r+1)^-p <= 2^(1-p) r^-p`. The inequality is strict for
/// every finite `r`.
pub fn grouping_step_check<S: Scalar>(r: u64, p: Exponent, tol: Tolerance) -> Result<VerificationReport<S>> {
    if r == 0 {
        return Err(Error::Domain("grouping step needs r >= 1".into()));
    }
    let recip_pow = |d: u64| S::from_ratio(1, d).pow_p(p);
    let lhs = recip_pow(2 * r)? + recip_pow(2 * r + 1)?;
    let rhs = S::from_u64(2) * recip_pow(2)? * recip_pow(r)?;
    Ok(VerificationReport::compare(CheckKind::GroupingStep, lhs, rhs, &tol))
}

/// Links of the proof chain, each checked on its own:
///
/// `sum |m_i - a_i|^p <= sum (T_i/i)^p <= sum (G_i/i)^p <= C_p sum (x*_r)^p`,
/// followed by `sum (x*_r)^p = sum x_r^p`.
pub fn discrete_chain<S: Scalar>(seq: &Sequence<S>, p: Exponent, tol: Tolerance) -> Result<Vec<VerificationReport<S>>> {
    let analysis = Analysis::new(seq)?;
    PowerSums::new(&analysis, seq, p)?.chain(p, tol)
}

/// Every discrete check on one sequence, sharing a single streaming pass:
/// prefix bound, global bound (two reports), median Hardy, classical Hardy
/// on the sequence, then the four chain links.
pub fn discrete_suite<S: Scalar>(seq: &Sequence<S>, p: Exponent, tol: Tolerance) -> Result<Vec<VerificationReport<S>>> {
    let analysis = Analysis::new(seq)?;
    let sums = PowerSums::new(&analysis, seq, p)?;
    let mut out = vec![analysis.prefix_bound_report(tol)];
    out.extend(analysis.global_bound_reports(tol));
    out.push(sums.median_hardy(tol));
    out.push(hardy_discrete(seq, p, tol)?);
    out.extend(sums.chain(p, tol)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn p(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    fn seq<S: Scalar>(v: Vec<S>) -> Sequence<S> {
        Sequence::new(v).unwrap()
    }

    const TOL: Tolerance = Tolerance::DEFAULT;

    #[test]
    fn sequence_validation() {
        assert!(Sequence::<f64>::new(vec![]).is_err());
        assert!(Sequence::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(
            decreasing_rearrangement(&seq(vec![1.0, 3.0, 2.0])).values(),
            &[3.0, 2.0, 1.0]
        );
        assert_eq!(decreasing_rearrangement(&seq(vec![0.0; 3])).values(), &[0.0; 3]);
        let h = 2f64.powf(-0.5);
        assert_eq!(
            decreasing_rearrangement(&seq(vec![0.0, 1.0, 0.0, h])).values(),
            &[1.0, h, 0.0, 0.0]
        );
    }

    #[test]
    fn dominance_examples() {
        let r = verify_top_r_dominance(&seq(vec![1.0, 2.0, 3.0]), 2).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (5.0, 5.0));
        let c = q(5, 2);
        let r = verify_top_r_dominance(&seq(vec![c.clone(); 4]), 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, r.rhs);
        assert!(matches!(
            verify_top_r_dominance(&seq(vec![1.0; 16]), 3),
            Err(Error::Capability { .. })
        ));
        assert!(verify_top_r_dominance(&seq(vec![1.0; 3]), 0).is_err());
    }

    #[test]
    fn brute_force_limits() {
        let one = brute_force_prefix_stats(&seq(vec![q(3, 2)])).unwrap();
        assert_eq!(one[0].mean, q(3, 2));
        assert_eq!(one[0].lower_median, q(3, 2));
        assert_eq!(one[0].top_half_sum, q(0, 1));
        assert!(brute_force_prefix_stats(&seq(vec![1.0; 2001])).is_err());
    }

    #[test]
    fn two_term_bounds_tight() {
        let s = seq(vec![q(0, 1), q(1, 1)]);
        let r = verify_pointwise_prefix_bound(&s, TOL).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(1, 2), q(1, 2)));
        let [g, chain] = verify_pointwise_global_bound(&s, TOL).unwrap();
        assert!(g.holds && chain.holds);
        assert_eq!((g.lhs, g.rhs), (q(1, 2), q(1, 2)));
    }

    #[test]
    fn constant_sequence_has_no_deviation() {
        let s = seq(vec![q(4, 3); 17]);
        let r = verify_pointwise_prefix_bound(&s, TOL).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, q(0, 1));
    }

    #[test]
    fn sorted_input_global_equals_prefix() {
        let s = seq(vec![q(9, 1), q(7, 1), q(7, 2), q(1, 1), q(0, 1)]);
        let a = Analysis::new(&s).unwrap();
        assert_eq!(a.prefix_bounds, a.global_bounds);
    }

    #[test]
    fn median_hardy_extremal_prefix() {
        // a = (0, 1/2, 1/3, S_2/4) with S_2 = 1 + 2^-1/2, medians all zero.
        let h = 2f64.powf(-0.5);
        let r = median_hardy_discrete(&seq(vec![0.0, 1.0, 0.0, h]), p(2.0), TOL).unwrap();
        let s2 = 1.0 + h;
        let oracle = 0.25 + 1.0 / 9.0 + (s2 / 4.0).powi(2);
        assert!((r.lhs - oracle).abs() < 1e-15);
        assert!((r.lhs - 0.543_249_458_759_429_6).abs() < 1e-15);
        assert!((r.rhs - 3.0).abs() < 1e-15);
        assert!((r.ratio.unwrap() - 0.181_083_152_919_809_9).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn median_hardy_degenerate_inputs() {
        let r = median_hardy_discrete(&seq(vec![q(0, 1); 5]), p(2.0), TOL).unwrap();
        assert!(r.holds);
        assert_eq!(r.ratio, Some(q(0, 1)));
        let r = median_hardy_discrete(&seq(vec![q(1, 1)]), p(2.0), TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (q(0, 1), q(2, 1)));
    }

    #[test]
    fn hardy_discrete_examples() {
        let mut b = vec![0.0; 100];
        b[0] = 1.0;
        let r = hardy_discrete(&seq(b), p(2.0), TOL).unwrap();
        let zeta_partial: f64 = (1..=100).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        assert!((r.lhs - zeta_partial).abs() < 1e-14);
        assert!((r.lhs - 1.634_983_900_184_893).abs() < 1e-14);
        assert_eq!(r.rhs, 4.0);
        let r = hardy_discrete(&seq(vec![q(1, 1), q(1, 1)]), p(2.0), TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (q(2, 1), q(8, 1)));
        let r = hardy_discrete(&seq(vec![q(0, 1); 3]), p(3.0), TOL).unwrap();
        assert!(r.holds && r.lhs == r.rhs);
    }

    #[test]
    fn grouping_step_examples() {
        let r = grouping_step_check::<Rational>(1, p(2.0), TOL).unwrap();
        assert_eq!(r.lhs, q(13, 36));
        assert_eq!(r.rhs, q(1, 2));
        assert!(r.lhs < r.rhs);
        let r = grouping_step_check::<f64>(1_000_000, p(2.0), TOL).unwrap();
        assert!(r.holds && r.lhs < r.rhs);
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-5);
        assert!(grouping_step_check::<f64>(0, p(2.0), TOL).is_err());
    }

    #[test]
    fn scale_equivariance_exact() {
        let s = seq(vec![q(0, 1), q(3, 1), q(1, 2), q(0, 1), q(5, 3), q(2, 1)]);
        let lam = q(7, 3);
        let a = median_hardy_discrete(&s, p(3.0), TOL).unwrap();
        let b = median_hardy_discrete(&s.scaled(&lam), p(3.0), TOL).unwrap();
        let l3 = lam.pow_p(p(3.0)).unwrap();
        assert_eq!(b.lhs, a.lhs * l3.clone());
        assert_eq!(b.rhs, a.rhs * l3);
        assert_eq!(a.ratio, b.ratio);
    }

    #[test]
    fn suite_layout() {
        let reports = discrete_suite(&seq(vec![q(0, 1), q(1, 1), q(2, 1)]), p(2.0), TOL).unwrap();
        let kinds: Vec<_> = reports.iter().map(|r| r.kind).collect();
        assert_eq!(
            kinds,
            vec![
                CheckKind::PrefixBound,
                CheckKind::GlobalBound,
                CheckKind::GlobalDominatesPrefix,
                CheckKind::MedianHardyDiscrete,
                CheckKind::HardyDiscrete,
                CheckKind::ChainPrefixSum,
                CheckKind::ChainGlobalSum,
                CheckKind::ChainHardyBound,
                CheckKind::NormPreservation,
            ]
        );
        assert!(reports.iter().all(|r| r.holds));
    }
}
