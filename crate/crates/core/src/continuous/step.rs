use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::scalar::{sum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub len: S,
    pub val: S,
}

/// Finitely supported nonnegative step function on `(0, inf)`.
///
/// Segments are laid out left to right from `0`; the function is `0` past
/// the last one. Construction canonicalizes: adjacent equal values are
/// merged and trailing zero segments are folded into the zero tail.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<S> {
    segments: Vec<Segment<S>>,
}

impl<S: Scalar> StepFunction<S> {
    pub fn new(segments: Vec<Segment<S>>) -> Result<Self> {
        for seg in &segments {
            if seg.len <= S::zero() {
                return Err(Error::Domain(format!(
                    "segment length must be positive, got {}",
                    seg.len
                )));
            }
            if seg.val.is_negative() {
                return Err(Error::Negative(seg.val.to_string()));
            }
        }
        Ok(Self::canonical(segments))
    }

    /// Builds from `(length, value)` pairs.
    pub fn from_pairs<I: IntoIterator<Item = (S, S)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(len, val)| Segment { len, val }).collect())
    }

    pub fn zero() -> Self {
        StepFunction { segments: Vec::new() }
    }

    fn canonical(segments: Vec<Segment<S>>) -> Self {
        let mut out: Vec<Segment<S>> = Vec::with_capacity(segments.len());
        for seg in segments {
            match out.last_mut() {
                Some(last) if last.val == seg.val => last.len = last.len.clone() + seg.len,
                _ => out.push(seg),
            }
        }
        while out.last().is_some_and(|s| s.val.is_zero()) {
            out.pop();
        }
        StepFunction { segments: out }
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty()
    }

    /// Right end `L` of the last segment.
    pub fn support_end(&self) -> S {
        sum(self.segments.iter().map(|s| s.len.clone()))
    }

    /// `meas{f > 0}`.
    pub fn positive_measure(&self) -> S {
        sum(self.segments.iter().filter(|s| !s.val.is_zero()).map(|s| s.len.clone()))
    }

    /// Segment boundaries `0 = x_0 < x_1 < ... < x_m = L`.
    pub fn breakpoints(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut x = S::zero();
        out.push(x.clone());
        for seg in &self.segments {
            x = x + seg.len.clone();
            out.push(x.clone());
        }
        out
    }

    /// `int_0^inf f`.
    pub fn integral(&self) -> S {
        sum(self.segments.iter().map(|s| s.len.clone() * s.val.clone()))
    }

    /// `int_0^inf f^p`, summed segment by segment.
    pub fn integral_pow(&self, p: Exponent) -> Result<S> {
        let terms = self
            .segments
            .iter()
            .map(|s| Ok(s.val.pow_p(p)? * s.len.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(sum(terms))
    }

    pub fn to_f64(&self) -> StepFunction<f64> {
        StepFunction::canonical(
            self.segments
                .iter()
                .map(|s| Segment {
                    len: s.len.to_f64(),
                    val: s.val.to_f64(),
                })
                .collect(),
        )
    }

    /// Value at `t`, taking the right-continuous value at boundaries.
    pub fn value_at(&self, t: &S) -> S {
        let mut x = S::zero();
        for seg in &self.segments {
            x = x + seg.len.clone();
            if *t < x {
                return seg.val.clone();
            }
        }
        S::zero()
    }
}

/// `A(t) = F(t)/t` where `F(t) = int_0^t f` is written as `alpha_k + beta_k t`
/// on `[x_k, x_{k+1})`. The last piece starts at `L` and has `beta = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAverage<S> {
    pub starts: Vec<S>,
    pub alpha: Vec<S>,
    pub beta: Vec<S>,
}

impl<S: Scalar> PiecewiseAverage<S> {
    pub fn of(f: &StepFunction<S>) -> Self {
        let n = f.segments.len() + 1;
        let mut starts = Vec::with_capacity(n);
        let mut alpha = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        let mut x = S::zero();
        let mut cum = S::zero();
        for seg in &f.segments {
            starts.push(x.clone());
            alpha.push(cum.clone() - seg.val.clone() * x.clone());
            beta.push(seg.val.clone());
            x = x + seg.len.clone();
            cum = cum + seg.val.clone() * seg.len.clone();
        }
        starts.push(x);
        alpha.push(cum);
        beta.push(S::zero());
        PiecewiseAverage { starts, alpha, beta }
    }

    /// Index of the piece containing `t >= 0`.
    pub fn piece(&self, t: &S) -> usize {
        self.starts.partition_point(|s| s <= t).saturating_sub(1)
    }

    /// `F(t)`.
    pub fn cumulative(&self, t: &S) -> S {
        let k = self.piece(t);
        self.alpha[k].clone() + self.beta[k].clone() * t.clone()
    }

    /// `A(t)` for `t > 0`.
    pub fn at(&self, t: &S) -> S {
        self.cumulative(t) / t.clone()
    }

    /// `F(inf)`.
    pub fn total(&self) -> S {
        self.alpha.last().cloned().unwrap_or_else(S::zero)
    }
}

/// `A(t) = (1/t) int_0^t f`, exact on the exact backend.
pub fn average_at<S: Scalar>(f: &StepFunction<S>, t: &S) -> Result<S> {
    if *t <= S::zero() {
        return Err(Error::Domain(format!("average needs t > 0, got {t}")));
    }
    Ok(PiecewiseAverage::of(f).at(t))
}

/// `f*`: segments sorted by value, largest first, lengths preserved.
pub fn decreasing_rearrangement_fn<S: Scalar>(f: &StepFunction<S>) -> StepFunction<S> {
    let mut segs = f.segments.clone();
    segs.sort_by(|a, b| b.val.total_cmp(&a.val));
    StepFunction::canonical(segs)
}

/// `int_0^r f*`.
pub fn rearranged_prefix_integral<S: Scalar>(f: &StepFunction<S>, r: &S) -> Result<S> {
    if r.is_negative() {
        return Err(Error::Domain(format!("prefix length must be nonnegative, got {r}")));
    }
    Ok(PiecewiseAverage::of(&decreasing_rearrangement_fn(f)).cumulative(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn f1() -> StepFunction<Rational> {
        StepFunction::from_pairs([(q(1, 1), q(0, 1)), (q(1, 1), q(1, 1))]).unwrap()
    }

    #[test]
    fn canonical_form() {
        let f =
            StepFunction::from_pairs([(1.0, 2.0), (0.5, 2.0), (1.0, 0.0), (2.0, 3.0), (1.0, 0.0), (4.0, 0.0)]).unwrap();
        assert_eq!(f.segments().len(), 3);
        assert_eq!(f.segments()[0], Segment { len: 1.5, val: 2.0 });
        assert_eq!(f.support_end(), 4.5);
        assert!(StepFunction::from_pairs([(0.0, 1.0)]).is_err());
        assert!(StepFunction::from_pairs([(1.0, -1.0)]).is_err());
        assert!(StepFunction::from_pairs([(3.0, 0.0)]).unwrap().is_zero());
    }

    #[test]
    fn averages() {
        let unit = StepFunction::from_pairs([(q(1, 1), q(1, 1))]).unwrap();
        assert_eq!(average_at(&unit, &q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(average_at(&unit, &q(2, 1)).unwrap(), q(1, 2));
        assert_eq!(average_at(&f1(), &q(3, 1)).unwrap(), q(1, 3));
        assert_eq!(average_at(&f1(), &q(3, 2)).unwrap(), q(1, 3));
        let zero = StepFunction::<Rational>::zero();
        assert_eq!(average_at(&zero, &q(5, 1)).unwrap(), q(0, 1));
        assert!(average_at(&unit, &q(0, 1)).is_err());
    }

    #[test]
    fn rearrangement() {
        let star = decreasing_rearrangement_fn(&f1());
        assert_eq!(star, StepFunction::from_pairs([(q(1, 1), q(1, 1))]).unwrap());
        assert_eq!(decreasing_rearrangement_fn(&star), star);
        assert_eq!(rearranged_prefix_integral(&f1(), &q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(rearranged_prefix_integral(&f1(), &q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(rearranged_prefix_integral(&f1(), &q(9, 1)).unwrap(), f1().integral());
        let p3 = Exponent::new(3.0).unwrap();
        let g = StepFunction::from_pairs([
            (q(1, 2), q(1, 1)),
            (q(2, 1), q(5, 3)),
            (q(1, 1), q(0, 1)),
            (q(1, 3), q(4, 1)),
        ])
        .unwrap();
        assert_eq!(
            decreasing_rearrangement_fn(&g).integral_pow(p3).unwrap(),
            g.integral_pow(p3).unwrap()
        );
    }
}
