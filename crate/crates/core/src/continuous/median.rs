//! The lower median `M(t) = inf{a : meas{s in (0,t) : f(s) <= a} >= t/2}`
//! of a step function, as an exact piecewise-constant function of `t`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::step::StepFunction;

/// Piecewise-constant function on `(0, inf)`.
///
/// `values[k]` holds on the open interval `(breakpoints[k], breakpoints[k+1])`
/// and the last value extends to infinity. The value taken exactly at a
/// breakpoint is stored separately in `point_values`, since the lower
/// median can differ from both one-sided limits at an isolated `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant<S> {
    pub breakpoints: Vec<S>,
    pub values: Vec<S>,
    pub point_values: Vec<S>,
}

impl<S: Scalar> PiecewiseConstant<S> {
    fn locate(&self, t: &S) -> (usize, bool) {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(t)) {
            Ok(k) => (k, true),
            Err(k) => (k - 1, false),
        }
    }

    /// Value at `t > 0`.
    pub fn eval(&self, t: &S) -> S {
        match self.locate(t) {
            (k, true) => self.point_values[k].clone(),
            (k, false) => self.values[k].clone(),
        }
    }

    /// `lim_{s -> t+}`.
    pub fn right_limit(&self, t: &S) -> S {
        self.values[self.locate(t).0].clone()
    }

    /// `lim_{s -> t-}` for `t > 0`.
    pub fn left_limit(&self, t: &S) -> S {
        match self.locate(t) {
            (k, true) => self.values[k.saturating_sub(1)].clone(),
            (k, false) => self.values[k].clone(),
        }
    }

    /// Interior breakpoints, excluding the origin.
    pub fn jumps(&self) -> &[S] {
        &self.breakpoints[1..]
    }

    /// The value on the final unbounded piece.
    pub fn final_value(&self) -> &S {
        self.values.last().expect("at least one piece")
    }

    /// Open pieces `(a, b, value)`, the last with `b = None`.
    pub fn pieces(&self) -> impl Iterator<Item = (&S, Option<&S>, &S)> {
        self.breakpoints
            .iter()
            .enumerate()
            .map(move |(k, a)| (a, self.breakpoints.get(k + 1), &self.values[k]))
    }
}

/// Evaluates `M(t)` directly from the definition: clip `f` to `(0, t)`,
/// sort the pieces by value and accumulate measure until it reaches `t/2`.
pub fn median_at_oracle<S: Scalar>(f: &StepFunction<S>, t: &S) -> Result<S> {
    if *t <= S::zero() {
        return Err(Error::Domain(format!("median needs t > 0, got {t}")));
    }
    let mut pieces: Vec<(S, S)> = Vec::new();
    let mut x = S::zero();
    for seg in f.segments() {
        if x >= *t {
            break;
        }
        let end = x.clone() + seg.len.clone();
        let clipped = if end < *t { end.clone() } else { t.clone() } - x.clone();
        pieces.push((seg.val.clone(), clipped));
        x = end;
    }
    if x < *t {
        pieces.push((S::zero(), t.clone() - x));
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = t.half();
    let mut acc = S::zero();
    for (val, len) in &pieces {
        acc = acc + len.clone();
        if acc >= half {
            return Ok(val.clone());
        }
    }
    Err(Error::Domain("measure did not reach t/2".into()))
}

/// Per-segment sweep state: `cum[j] = meas{s < x : f(s) <= level_j}`.
struct Sweep<'a, S> {
    levels: &'a [S],
    cum: Vec<S>,
    start: S,
    level: usize,
}

impl<S: Scalar> Sweep<'_, S> {
    /// Mass at or below `level_j` on `(0, t)` for `t` in the current segment.
    fn mass(&self, j: usize, t: &S) -> S {
        if self.level <= j {
            self.cum[j].clone() + (t.clone() - self.start.clone())
        } else {
            self.cum[j].clone()
        }
    }

    /// `M(t)`: the first level whose mass reaches `t/2`. Mass is
    /// nondecreasing in the level, so a binary search suffices.
    fn median(&self, t: &S) -> S {
        let half = t.half();
        let (mut lo, mut hi) = (0, self.levels.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.mass(mid, t) < half {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        self.levels[lo].clone()
    }

    /// Points in `(start, end)` where some level's mass crosses `t/2`.
    fn crossings(&self, end: Option<&S>) -> Vec<S> {
        let two = S::from_u64(2);
        let mut out = Vec::new();
        for (j, cum) in self.cum.iter().enumerate() {
            // mass - t/2 is linear with slope +1/2 or -1/2.
            let root = if self.level <= j {
                two.clone() * (self.start.clone() - cum.clone())
            } else {
                two.clone() * cum.clone()
            };
            if root > self.start && end.is_none_or(|e| root < *e) {
                out.push(root);
            }
        }
        out
    }
}

/// Computes `t -> M(t)` exactly by sweeping the segments of `f` (plus the
/// zero tail) and solving for the points where `meas{f <= a}` crosses `t/2`.
pub fn lower_median_fn<S: Scalar>(f: &StepFunction<S>) -> PiecewiseConstant<S> {
    let mut levels: Vec<S> = f.segments().iter().map(|s| s.val.clone()).collect();
    levels.push(S::zero());
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);

    let level_of = |v: &S| {
        levels
            .binary_search_by(|l| l.total_cmp(v))
            .expect("segment value is a level")
    };

    let mut sweep = Sweep {
        levels: &levels,
        cum: vec![S::zero(); levels.len()],
        start: S::zero(),
        level: 0,
    };

    let mut breakpoints = vec![S::zero()];
    let mut values: Vec<S> = Vec::new();
    let mut point_values: Vec<S> = Vec::new();

    let tail = (None, S::zero());
    let segs = f
        .segments()
        .iter()
        .map(|s| (Some(s.len.clone()), s.val.clone()))
        .chain(std::iter::once(tail));
    for (len, val) in segs {
        sweep.level = level_of(&val);
        let end = len.as_ref().map(|l| sweep.start.clone() + l.clone());

        let mut events = sweep.crossings(end.as_ref());
        if sweep.start > S::zero() {
            events.push(sweep.start.clone());
        }
        events.sort_by(|a, b| a.total_cmp(b));
        events.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);

        // The piece that ends at the first event of this segment began
        // earlier, so its value is already recorded unless this is (0, ..).
        let mut lo = sweep.start.clone();
        for ev in events {
            if values.len() < breakpoints.len() {
                values.push(sweep.median(&midpoint(&lo, &ev)));
            }
            if ev > S::zero() && ev != *breakpoints.last().expect("nonempty") {
                breakpoints.push(ev.clone());
                point_values.push(sweep.median(&ev));
            }
            lo = ev;
        }
        if values.len() < breakpoints.len() {
            let probe = match &end {
                Some(e) => midpoint(&lo, e),
                None => lo.clone() + S::one(),
            };
            values.push(sweep.median(&probe));
        }

        if let Some(len) = len {
            for j in sweep.level..levels.len() {
                sweep.cum[j] = sweep.cum[j].clone() + len.clone();
            }
            sweep.start = sweep.start.clone() + len;
        }
    }

    // point_values[0] stands for t -> 0+; the origin is not in the domain.
    point_values.insert(0, values[0].clone());
    simplify(PiecewiseConstant {
        breakpoints,
        values,
        point_values,
    })
}

fn midpoint<S: Scalar>(a: &S, b: &S) -> S {
    (a.clone() + b.clone()).half()
}

/// Drops breakpoints where the function does not change.
fn simplify<S: Scalar>(pc: PiecewiseConstant<S>) -> PiecewiseConstant<S> {
    let mut breakpoints = vec![pc.breakpoints[0].clone()];
    let mut values = vec![pc.values[0].clone()];
    let mut point_values = vec![pc.point_values[0].clone()];
    for k in 1..pc.breakpoints.len() {
        let left = values.last().expect("nonempty");
        if pc.values[k] == *left && pc.point_values[k] == *left {
            continue;
        }
        breakpoints.push(pc.breakpoints[k].clone());
        values.push(pc.values[k].clone());
        point_values.push(pc.point_values[k].clone());
    }
    PiecewiseConstant {
        breakpoints,
        values,
        point_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn sf(pairs: &[(u64, u64, u64, u64)]) -> StepFunction<Rational> {
        StepFunction::from_pairs(pairs.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d)))).unwrap()
    }

    #[test]
    fn f1_median_is_zero() {
        let f = sf(&[(1, 1, 0, 1), (1, 1, 1, 1)]);
        let m = lower_median_fn(&f);
        assert_eq!(m.breakpoints, vec![q(0, 1)]);
        assert_eq!(m.values, vec![q(0, 1)]);
        assert_eq!(median_at_oracle(&f, &q(3, 2)).unwrap(), q(0, 1));
    }

    #[test]
    fn constant_block_median() {
        // f = c on (0, L): M = c on (0, 2L), 0 from 2L on.
        let f = sf(&[(3, 1, 5, 2)]);
        let m = lower_median_fn(&f);
        assert_eq!(m.breakpoints, vec![q(0, 1), q(6, 1)]);
        assert_eq!(m.values, vec![q(5, 2), q(0, 1)]);
        assert_eq!(m.eval(&q(6, 1)), q(0, 1));
        assert_eq!(m.left_limit(&q(6, 1)), q(5, 2));
        for t in [q(1, 2), q(3, 1), q(59, 10), q(6, 1), q(61, 10), q(100, 1)] {
            assert_eq!(m.eval(&t), median_at_oracle(&f, &t).unwrap(), "t={t}");
        }
        let unit = sf(&[(1, 1, 1, 1)]);
        assert_eq!(median_at_oracle(&unit, &q(1, 1)).unwrap(), q(1, 1));
    }

    #[test]
    fn zero_function() {
        let m = lower_median_fn(&StepFunction::<Rational>::zero());
        assert_eq!(m.values, vec![q(0, 1)]);
        assert!(median_at_oracle(&StepFunction::<Rational>::zero(), &q(0, 1)).is_err());
    }

    #[test]
    fn isolated_point_value() {
        // meas{f <= 0} touches t/2 at t = 2 only.
        let f = sf(&[(1, 1, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)]);
        let m = lower_median_fn(&f);
        let two = q(2, 1);
        assert_eq!(median_at_oracle(&f, &two).unwrap(), q(0, 1));
        assert_eq!(m.eval(&two), q(0, 1));
        assert_eq!(m.left_limit(&two), q(1, 1));
        assert_eq!(m.right_limit(&two), q(1, 1));
    }

    fn arb_step() -> impl Strategy<Value = StepFunction<Rational>> {
        prop::collection::vec((1u64..9, 0u64..6), 1..9)
            .prop_map(|segs| StepFunction::from_pairs(segs.into_iter().map(|(l, v)| (q(l, 4), q(v, 2)))).unwrap())
    }

    proptest! {
        #[test]
        fn sweep_matches_oracle(f in arb_step(), ts in prop::collection::vec(1u64..400, 10)) {
            let m = lower_median_fn(&f);
            let mut points: Vec<Rational> = ts.into_iter().map(|t| q(t, 16)).collect();
            for w in m.breakpoints.windows(2) {
                points.push(w[1].clone());
                points.push((w[0].clone() + w[1].clone()).half());
            }
            points.extend(f.breakpoints().into_iter().skip(1));
            for t in points {
                prop_assert_eq!(m.eval(&t), median_at_oracle(&f, &t).unwrap(), "t = {}", t);
            }
            prop_assert_eq!(m.final_value(), &q(0, 1));
        }
    }
}
