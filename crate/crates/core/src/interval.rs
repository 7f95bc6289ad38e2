//! Continuous Steiner symmetrization of finite unions of open intervals.
//!
//! An interval `(a, b)` flows by contracting its center towards the origin,
//! `center(t) = e^{-t} (a + b) / 2`, while keeping its length. A finite union
//! flows the same way until two intervals touch; they are then replaced by a
//! single interval of the summed length and the flow restarts from that
//! configuration. Collision times are solved in closed form, never by
//! stepping, so the evolution is exact up to floating-point rounding.
//!
//! `t = f64::INFINITY` is accepted everywhere and yields the Steiner
//! symmetral `(-|M|/2, |M|/2)` directly.

use crate::error::{LabError, Result};

/// Open interval `(a, b)` with finite endpoints and `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(LabError::InvalidInterval { a, b })
        }
    }

    fn from_center(center: f64, len: f64) -> Self {
        let half = 0.5 * len;
        Self { a: center - half, b: center + half }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }
}

/// Sorted union of pairwise disjoint open intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

/// First collision of two neighbouring intervals under the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    /// Flow time, measured from the current configuration.
    pub time: f64,
    pub left_index: usize,
    pub right_index: usize,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from intervals in any order. Overlapping intervals are
    /// rejected; intervals sharing an endpoint are joined.
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            Interval::new(iv.a, iv.b)?;
        }
        intervals.sort_by(|p, q| p.a.total_cmp(&q.a));
        for w in intervals.windows(2) {
            if w[1].a < w[0].b {
                return Err(LabError::OverlappingIntervals(w[0].a, w[0].b, w[1].a, w[1].b));
            }
        }
        Ok(Self::from_sorted(intervals))
    }

    /// Caller guarantees sorted, non-overlapping input with `a < b`.
    pub(crate) fn from_sorted(intervals: Vec<Interval>) -> Self {
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                Some(last) if iv.a <= last.b => last.b = last.b.max(iv.b),
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    pub fn single(iv: Interval) -> Self {
        Self { intervals: vec![iv] }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure `|M|`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.interval_containing(x).is_some()
    }

    /// Index of the interval containing `x`, if any.
    pub fn interval_containing(&self, x: f64) -> Option<usize> {
        // first interval whose right endpoint exceeds x
        let k = self.intervals.partition_point(|iv| iv.b <= x);
        match self.intervals.get(k) {
            Some(iv) if iv.a < x => Some(k),
            _ => None,
        }
    }

    /// Interval-wise containment: every interval of `self` lies inside some
    /// interval of `other` enlarged by `tol` on both sides.
    pub fn is_subset_of(&self, other: &IntervalSet, tol: f64) -> bool {
        self.intervals.iter().all(|iv| other.intervals.iter().any(|ov| ov.a - tol <= iv.a && iv.b <= ov.b + tol))
    }
}

/// Flows a single interval for time `t`.
///
/// The length is preserved and the center becomes `e^{-t} (a + b) / 2`.
pub fn symmetrize_interval(iv: Interval, t: f64) -> Interval {
    assert!(t >= 0.0, "flow time must be nonnegative, got {t}");
    if t == 0.0 {
        return iv;
    }
    if t.is_infinite() {
        return Interval::from_center(0.0, iv.len());
    }
    Interval::from_center((-t).exp() * iv.center(), iv.len())
}

/// Time until two neighbouring `(center, len)` intervals touch.
#[inline]
fn collision_time(left: (f64, f64), right: (f64, f64)) -> f64 {
    let spread = 2.0 * (right.0 - left.0);
    let lens = left.1 + right.1;
    if spread <= lens {
        0.0
    } else {
        (spread / lens).ln()
    }
}

/// Earliest collision among neighbouring intervals, or `None` if the set has
/// fewer than two intervals.
pub fn next_merge_time(set: &IntervalSet) -> Option<MergeEvent> {
    let state: Vec<(f64, f64)> = set.intervals.iter().map(|iv| (iv.center(), iv.len())).collect();
    state.windows(2).enumerate().map(|(k, w)| (k, collision_time(w[0], w[1]))).min_by(|p, q| p.1.total_cmp(&q.1)).map(|(k, time)| MergeEvent {
        time,
        left_index: k,
        right_index: k + 1,
    })
}

/// Relative window inside which two collision times count as simultaneous.
const TIE_WINDOW: f64 = 1e-12;

/// Event-driven flow of a finite union of intervals for time `t`.
pub fn flow_set(set: &IntervalSet, t: f64) -> IntervalSet {
    assert!(t >= 0.0, "flow time must be nonnegative, got {t}");
    if t == 0.0 || set.is_empty() {
        return set.clone();
    }
    if t.is_infinite() {
        return IntervalSet::single(Interval::from_center(0.0, set.measure()));
    }

    let mut state: Vec<(f64, f64)> = set.intervals.iter().map(|iv| (iv.center(), iv.len())).collect();
    let mut remaining = t;
    let mut times: Vec<f64> = Vec::with_capacity(state.len());
    loop {
        times.clear();
        times.extend(state.windows(2).map(|w| collision_time(w[0], w[1])));
        let first = times.iter().copied().fold(f64::INFINITY, f64::min);
        if first > remaining {
            let decay = (-remaining).exp();
            for s in &mut state {
                s.0 *= decay;
            }
            break;
        }

        let decay = (-first).exp();
        for s in &mut state {
            s.0 *= decay;
        }
        remaining -= first;

        // Merge every chain of neighbours colliding at this instant.
        let window = TIE_WINDOW * first.max(1.0);
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(state.len());
        let mut k = 0;
        while k < state.len() {
            let mut j = k;
            while j < times.len() && times[j] - first <= window {
                j += 1;
            }
            if j == k {
                merged.push(state[k]);
            } else {
                let len: f64 = state[k..=j].iter().map(|s| s.1).sum();
                let left = state[k].0 - 0.5 * state[k].1;
                let right = state[j].0 + 0.5 * state[j].1;
                merged.push((0.5 * (left + right), len));
            }
            k = j + 1;
        }
        state = merged;
    }

    IntervalSet { intervals: state.into_iter().map(|(c, l)| Interval::from_center(c, l)).collect() }
}

/// Membership of `x` in the open set `M`.
pub fn set_contains(set: &IntervalSet, x: f64) -> bool {
    set.contains(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(pairs.iter().map(|&(a, b)| Interval::new(a, b).unwrap()).collect()).unwrap()
    }

    #[test]
    fn interval_at_zero_infinity_and_ln2() {
        let iv = Interval::new(1.0, 3.0).unwrap();
        assert_eq!(symmetrize_interval(iv, 0.0), iv);
        assert_eq!(symmetrize_interval(iv, f64::INFINITY), Interval::new(-1.0, 1.0).unwrap());
        let half = symmetrize_interval(iv, 2f64.ln());
        assert!((half.a - 0.0).abs() < 1e-15 && (half.b - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_and_overlapping() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        let a = Interval::new(0.0, 2.0).unwrap();
        let b = Interval::new(1.0, 3.0).unwrap();
        assert!(matches!(IntervalSet::new(vec![a, b]), Err(LabError::OverlappingIntervals(..))));
    }

    #[test]
    fn touching_intervals_are_joined() {
        let s = set(&[(1.0, 2.0), (0.0, 1.0)]);
        assert_eq!(s.intervals(), &[Interval::new(0.0, 2.0).unwrap()]);
    }

    #[test]
    fn merge_times_closed_form() {
        let ev = next_merge_time(&set(&[(-3.0, -1.0), (1.0, 3.0)])).unwrap();
        assert!((ev.time - 2f64.ln()).abs() < 1e-15);
        assert_eq!((ev.left_index, ev.right_index), (0, 1));

        assert!(next_merge_time(&set(&[(1.0, 3.0)])).is_none());

        let ev = next_merge_time(&set(&[(-1.0, 1.0), (2.0, 3.0)])).unwrap();
        assert!((ev.time - (5.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn flow_through_merge() {
        let m = set(&[(-3.0, -1.0), (1.0, 3.0)]);
        for t in [2f64.ln(), f64::INFINITY] {
            let out = flow_set(&m, t);
            assert_eq!(out.len(), 1);
            let iv = out.intervals()[0];
            assert!((iv.a + 2.0).abs() < 1e-12 && (iv.b - 2.0).abs() < 1e-12, "{iv:?}");
        }
        assert_eq!(flow_set(&m, 0.0), m);
    }

    #[test]
    fn simultaneous_triple_collision_merges_once() {
        // symmetric spacing: both gaps close at the same instant
        let m = set(&[(-5.0, -3.0), (-1.0, 1.0), (3.0, 5.0)]);
        let out = flow_set(&m, 2.0);
        assert_eq!(out.len(), 1);
        assert!((out.measure() - 6.0).abs() < 1e-12);
        assert!(out.intervals()[0].center().abs() < 1e-12);
    }

    #[test]
    fn contains_is_open() {
        let s = set(&[(0.0, 2.0)]);
        assert!(s.contains(1.0));
        assert!(!s.contains(2.0));
        assert!(!s.contains(0.0));
        let s = set(&[(-2.0, 2.0)]);
        assert!(!set_contains(&s, -2.0000001));
        assert_eq!(s.interval_containing(1.5), Some(0));
    }

    #[test]
    fn centered_interval_is_fixed() {
        let m = set(&[(-1.5, 1.5)]);
        assert_eq!(flow_set(&m, 0.7), m);
        assert_eq!(flow_set(&m, f64::INFINITY), m);
    }
}
