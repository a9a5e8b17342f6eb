//! Seeded random inputs for the randomized suites.
//!
//! Each case draws from its own generator seeded with `seed ^ index`, so
//! results do not depend on how cases are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::continuous::StepFunction;
use crate::discrete::Sequence;
use crate::scalar::Scalar;

/// Exact inputs are quantized to multiples of `1 / QUANTUM`.
pub const QUANTUM: u64 = 64;

pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// Mixture: 40% exact zeros, 30% uniform on `[0, 1)` and 30% heavy tail
/// `u^(-1/4) - 1`.
pub fn mixture_value<R: Rng>(rng: &mut R) -> f64 {
    let pick: f64 = rng.gen();
    if pick < 0.4 {
        0.0
    } else if pick < 0.7 {
        rng.gen()
    } else {
        let u: f64 = 1.0 - rng.gen::<f64>();
        u.powf(-0.25) - 1.0
    }
}

/// A mixture draw on the given backend; exact values are rounded to the
/// nearest multiple of `1 / QUANTUM`.
pub fn mixture_scalar<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let x = mixture_value(rng);
    if S::EXACT {
        S::from_ratio((x * QUANTUM as f64).round() as u64, QUANTUM)
    } else {
        S::from_f64(x).unwrap_or_else(|_| S::zero())
    }
}

/// Length uniform on `1..=max_n`, entries from [`mixture_scalar`].
pub fn mixture_sequence<S: Scalar, R: Rng>(rng: &mut R, max_n: usize) -> Sequence<S> {
    let n = rng.gen_range(1..=max_n.max(1));
    let values = (0..n).map(|_| mixture_scalar(rng)).collect();
    Sequence::new(values).expect("mixture values are nonnegative")
}

/// Rational `k/d` uniform-ish on `[0, 10]` with `d` in `1..=12`.
pub fn uniform_rational<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let d = rng.gen_range(1..=12u64);
    let k = rng.gen_range(0..=10 * d);
    S::from_ratio(k, d)
}

pub fn uniform_rational_sequence<S: Scalar, R: Rng>(rng: &mut R, max_n: usize) -> Sequence<S> {
    let n = rng.gen_range(1..=max_n.max(1));
    Sequence::new((0..n).map(|_| uniform_rational(rng)).collect()).expect("nonnegative")
}

/// Up to `max_segments` segments with lengths in `{1/4, ..., 2}` and
/// mixture values rounded to multiples of `1/16`, so the data is exact on
/// both backends.
pub fn random_step_function<S: Scalar, R: Rng>(rng: &mut R, max_segments: usize) -> StepFunction<S> {
    let m = rng.gen_range(1..=max_segments.max(1));
    let pairs = (0..m).map(|_| {
        let len = S::from_ratio(rng.gen_range(1..=8), 4);
        let val = S::from_ratio((mixture_value(rng) * 16.0).round() as u64, 16);
        (len, val)
    });
    StepFunction::from_pairs(pairs.collect::<Vec<_>>()).expect("valid segments")
}

/// `count` distinct-ish positive sample points in `(0, horizon)`, as
/// multiples of `1/1024`.
pub fn random_points<S: Scalar, R: Rng>(rng: &mut R, count: usize, horizon: u64) -> Vec<S> {
    (0..count)
        .map(|_| S::from_ratio(rng.gen_range(1..horizon.max(1) * 1024), 1024))
        .collect()
}
