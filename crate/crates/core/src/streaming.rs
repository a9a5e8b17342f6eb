//! Incremental prefix statistics: mean, lower median and top-half sum.
//!
//! The stream is split into two heaps. `low` keeps the `ceil(i/2)` smallest
//! values and `high` the `floor(i/2)` largest, so the lower median is
//! `max(low)` and the top-half sum is the running total of `high`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Statistics of the prefix `x_1..x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixStats<S> {
    /// Prefix length, starting at 1.
    pub i: usize,
    pub mean: S,
    /// The `ceil(i/2)`-th smallest prefix value.
    pub lower_median: S,
    /// Sum of the `floor(i/2)` largest prefix values.
    pub top_half_sum: S,
}

impl<S: Scalar> PrefixStats<S> {
    /// `|m_i - a_i|`.
    pub fn deviation(&self) -> S {
        (self.lower_median.clone() - self.mean.clone()).abs()
    }

    /// `T_i / i`.
    pub fn prefix_bound(&self) -> S {
        self.top_half_sum.clone() / S::from_u64(self.i as u64)
    }
}

/// Heap key ordered by the backend's total order.
#[derive(Debug, Clone)]
struct Key<S>(S);

impl<S: Scalar> PartialEq for Key<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Key<S> {}

impl<S: Scalar> PartialOrd for Key<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Key<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone)]
pub struct StreamState<S: Scalar> {
    low: BinaryHeap<Key<S>>,
    high: BinaryHeap<Reverse<Key<S>>>,
    low_sum: S,
    high_sum: S,
    history: Vec<PrefixStats<S>>,
}

impl<S: Scalar> Default for StreamState<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> StreamState<S> {
    pub fn new() -> Self {
        StreamState {
            low: BinaryHeap::new(),
            high: BinaryHeap::new(),
            low_sum: S::zero(),
            high_sum: S::zero(),
            history: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.low.len() + self.high.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }

    pub fn total(&self) -> S {
        self.low_sum.clone() + self.high_sum.clone()
    }

    /// Appends `x` and returns the statistics of the extended prefix.
    pub fn push(&mut self, x: S) -> Result<PrefixStats<S>> {
        if x.is_negative() {
            return Err(Error::Negative(x.to_string()));
        }
        let goes_low = match self.low.peek() {
            Some(Key(top)) => x.total_cmp(top) != Ordering::Greater,
            None => true,
        };
        if goes_low {
            self.low_sum = self.low_sum.clone() + x.clone();
            self.low.push(Key(x));
        } else {
            self.high_sum = self.high_sum.clone() + x.clone();
            self.high.push(Reverse(Key(x)));
        }
        self.rebalance();

        let i = self.len();
        let stats = PrefixStats {
            i,
            mean: self.total() / S::from_u64(i as u64),
            lower_median: self.low.peek().map(|k| k.0.clone()).unwrap_or_else(S::zero),
            top_half_sum: self.high_sum.clone(),
        };
        self.history.push(stats.clone());
        Ok(stats)
    }

    fn rebalance(&mut self) {
        let target = self.len().div_ceil(2);
        while self.low.len() > target {
            let Key(v) = self.low.pop().expect("low is nonempty");
            self.low_sum = self.low_sum.clone() - v.clone();
            self.high_sum = self.high_sum.clone() + v.clone();
            self.high.push(Reverse(Key(v)));
        }
        while self.low.len() < target {
            let Reverse(Key(v)) = self.high.pop().expect("high is nonempty");
            self.high_sum = self.high_sum.clone() - v.clone();
            self.low_sum = self.low_sum.clone() + v.clone();
            self.low.push(Key(v));
        }
    }

    /// Per-prefix history in push order.
    pub fn history(&self) -> &[PrefixStats<S>] {
        &self.history
    }

    pub fn finish(self) -> Vec<PrefixStats<S>> {
        self.history
    }

    #[cfg(test)]
    fn check_invariants(&self) {
        if let (Some(Key(lo)), Some(Reverse(Key(hi)))) = (self.low.peek(), self.high.peek()) {
            assert!(lo <= hi);
        }
        let diff = self.low.len() - self.high.len();
        assert!(diff <= 1);
        let low: S = crate::scalar::sum(self.low.iter().map(|k| k.0.clone()));
        let high: S = crate::scalar::sum(self.high.iter().map(|k| k.0 .0.clone()));
        if S::EXACT {
            assert_eq!(low, self.low_sum);
            assert_eq!(high, self.high_sum);
        }
    }
}

/// Runs a whole sequence through a fresh [`StreamState`].
pub fn prefix_stats<S: Scalar>(values: &[S]) -> Result<Vec<PrefixStats<S>>> {
    let mut state = StreamState::new();
    for x in values {
        state.push(x.clone())?;
    }
    Ok(state.finish())
}
