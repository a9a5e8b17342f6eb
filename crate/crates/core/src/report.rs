use serde::Serialize;
use serde_json::json;

use crate::scalar::{ratio, Scalar, Tolerance};

/// Which inequality a [`VerificationReport`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Subset sums never exceed the sum of the `r` largest values.
    TopRDominance,
    /// `|m_i - a_i| <= T_i / i` with the prefix's own top half.
    PrefixBound,
    /// `|m_i - a_i| <= (x*_1 + ... + x*_{i/2}) / i` with the global rearrangement.
    GlobalBound,
    /// Global top-half sums dominate prefix top-half sums.
    GlobalDominatesPrefix,
    /// `sum |m_i - a_i|^p <= C_p sum x_i^p`.
    MedianHardyDiscrete,
    /// Classical discrete Hardy inequality.
    HardyDiscrete,
    /// `(2r)^-p + (2r+1)^-p <= 2^(1-p) r^-p`.
    GroupingStep,
    /// `sum |m_i - a_i|^p <= sum (T_i / i)^p`.
    ChainPrefixSum,
    /// `sum (T_i / i)^p <= sum (G_i / i)^p`.
    ChainGlobalSum,
    /// `sum (G_i / i)^p <= C_p sum (x*_r)^p`.
    ChainHardyBound,
    /// `sum (x*_r)^p == sum x_r^p`.
    NormPreservation,
    /// `|M(t) - A(t)| <= (1/t) int_0^{t/2} f*`.
    Lemma1,
    /// `int |M - A|^p <= C_p int f^p`.
    Theorem1,
    /// `int |M - A|^p <= int ((1/t) int_0^{t/2} f*)^p`.
    Theorem1Rearranged,
    /// `int ((1/t) int_0^{t/2} f*)^p <= C_p int f^p`.
    Theorem1Hardy,
    /// Classical continuous Hardy inequality.
    HardyContinuous,
    /// `u = t/2` change of variables, compared as an equality.
    SubstitutionIdentity,
}

/// Where a check first failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness<S> {
    /// 1-based prefix length.
    Prefix(usize),
    /// Point `t` of a continuous check.
    Point(S),
    /// Index of the offending block or subset size.
    Index(usize),
}

impl<S: Scalar> Witness<S> {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Witness::Prefix(i) => json!({ "prefix": i }),
            Witness::Index(i) => json!({ "index": i }),
            Witness::Point(t) => json!({ "point": t.to_json() }),
        }
    }
}

/// Outcome of checking one inequality `lhs <= rhs`.
///
/// For checks over many prefixes or points, `lhs`/`rhs` are taken at the
/// first violation, or otherwise at the tightest location (largest ratio).
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<S> {
    pub kind: CheckKind,
    pub lhs: S,
    pub rhs: S,
    /// `lhs / rhs`; `0` for `0/0`; `None` only when `rhs = 0 < lhs`.
    pub ratio: Option<S>,
    pub holds: bool,
    /// First violation; present iff `!holds`.
    pub witness: Option<Witness<S>>,
    /// Where `lhs`/`rhs` were taken, for checks over many locations.
    pub location: Option<Witness<S>>,
}

impl<S: Scalar> VerificationReport<S> {
    /// Single comparison under `tol`.
    pub fn compare(kind: CheckKind, lhs: S, rhs: S, tol: &Tolerance) -> Self {
        let holds = lhs.le_with_slack(&rhs, tol);
        Self::from_parts(kind, lhs, rhs, holds, None)
    }

    pub(crate) fn from_parts(kind: CheckKind, lhs: S, rhs: S, holds: bool, witness: Option<Witness<S>>) -> Self {
        let ratio = ratio(&lhs, &rhs);
        VerificationReport {
            kind,
            lhs,
            rhs,
            ratio,
            holds,
            location: witness.clone(),
            witness,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "ratio": self.ratio.as_ref().map(Scalar::to_json),
            "holds": self.holds,
            "witness": self.witness.as_ref().map(Witness::to_json),
            "location": self.location.as_ref().map(Witness::to_json),
        })
    }
}

/// Folds pointwise comparisons into one report: the first failure wins,
/// otherwise the pair with the largest ratio is kept.
pub(crate) struct PointwiseScan<S> {
    kind: CheckKind,
    tol: Tolerance,
    worst: Option<(S, S, Witness<S>)>,
    worst_ratio: f64,
    violation: Option<(S, S, Witness<S>)>,
}

impl<S: Scalar> PointwiseScan<S> {
    pub fn new(kind: CheckKind, tol: Tolerance) -> Self {
        PointwiseScan {
            kind,
            tol,
            worst: None,
            worst_ratio: f64::NEG_INFINITY,
            violation: None,
        }
    }

    pub fn observe(&mut self, lhs: S, rhs: S, at: Witness<S>) {
        if self.violation.is_some() {
            return;
        }
        if !lhs.le_with_slack(&rhs, &self.tol) {
            self.violation = Some((lhs, rhs, at));
            return;
        }
        // Float ratio only picks the location; the report's ratio is exact.
        let (l, r) = (lhs.to_f64(), rhs.to_f64());
        let r = if r > 0.0 {
            l / r
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if r > self.worst_ratio || self.worst.is_none() {
            self.worst_ratio = r;
            self.worst = Some((lhs, rhs, at));
        }
    }

    pub fn finish(self) -> VerificationReport<S> {
        match (self.violation, self.worst) {
            (Some((l, r, w)), _) => VerificationReport::from_parts(self.kind, l, r, false, Some(w)),
            (None, Some((l, r, at))) => {
                let mut report = VerificationReport::from_parts(self.kind, l, r, true, None);
                report.location = Some(at);
                report
            }
            (None, None) => VerificationReport::from_parts(self.kind, S::zero(), S::zero(), true, None),
        }
    }
}
