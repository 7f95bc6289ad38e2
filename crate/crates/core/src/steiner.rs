//! Continuous Steiner symmetrization of grid functions.
//!
//! Along a row the function is treated as the piecewise-linear interpolant of
//! its samples. Its superlevel sets `{u > c}` are finite unions of open
//! intervals; each is flowed with [`flow_set`] and the symmetrized row is
//! rebuilt as `u^t(x) = sup { c : x in {u > c}^t }`.
//!
//! Every row uses the global uniform levels plus its own sample values. The
//! interpolant is linear between consecutive levels of that list, so the
//! interval endpoints move linearly in `c` inside a band and the rebuilt row
//! is exact wherever no merge happens inside a band.
//!
//! Values at or below the floor level (just above the largest value on the
//! grid boundary) do not take part; see [`SymmetrizationResult::floor_level`].

use std::collections::BTreeSet;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::field::{rotate_resample, GridField};
use crate::interval::{flow_set, Interval, IntervalSet};

/// Smallest admissible number of uniform levels.
pub const MIN_LEVELS: usize = 64;

/// Relative gap above the boundary maximum at which the floor level sits.
const FLOOR_OFFSET: f64 = 1e-9;

/// Levels closer than this fraction of the value range are identified.
const LEVEL_DEDUP: f64 = 1e-12;

/// Superlevel data of one grid row (fixed `x2`, varying `x1`).
#[derive(Debug, Clone, PartialEq)]
pub struct RowStack {
    /// Increasing levels strictly below `row_max`; empty if the row never
    /// rises above the floor.
    pub levels: Vec<f64>,
    /// `{u > levels[k]}` restricted to the row, nested decreasing in `k`.
    pub sets: Vec<IntervalSet>,
    pub row_max: f64,
    /// Row samples along `x1`.
    pub samples: Vec<f64>,
}

/// Per-row superlevel sets of a grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStack {
    /// Uniform levels `c_0 < ... < c_{K-1}`, with `c_0` the floor.
    pub levels: Vec<f64>,
    pub rows: Vec<RowStack>,
    /// Flow time the sets have been advanced by.
    pub t: f64,
    half_width: f64,
    h: f64,
}

/// Symmetrized field together with the discretisation it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizationResult {
    pub field: GridField,
    pub t: f64,
    /// Unit vector along which the field was symmetrized.
    pub direction: [f64; 2],
    pub levels_used: usize,
    /// Largest distance between consecutive levels used in any row,
    /// including the step from the top level to the row maximum.
    pub max_level_gap: f64,
    /// Lowest level; values at or below it are not rearranged.
    pub floor_level: f64,
}

/// `G_m(u) = max(u - m, 0)` and `H_m(u) = min(u, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPair {
    pub m: f64,
    pub g_part: GridField,
    pub h_part: GridField,
}

/// Row `j` of the grid: samples along `x1` at fixed `x2 = coord(j)`.
fn row(u: &GridField, j: usize) -> Vec<f64> {
    u.values().column(j).to_vec()
}

/// Position of the level `c` crossing between samples `i` (at or below `c`)
/// and `i + 1` (above `c`), or the reverse.
#[inline]
fn crossing(x0: f64, h: f64, v: &[f64], i: usize, c: f64) -> f64 {
    let (p, q) = (v[i], v[i + 1]);
    x0 + h * (i as f64 + (c - p) / (q - p))
}

/// `{x1 : row(x1) > c}` by a direct scan of the samples.
fn row_superlevel(x0: f64, h: f64, v: &[f64], c: f64) -> IntervalSet {
    let n = v.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if v[i] <= c {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && v[i + 1] > c {
            i += 1;
        }
        let a = if start == 0 { x0 } else { crossing(x0, h, v, start - 1, c) };
        let b = if i == n - 1 { x0 + h * (n - 1) as f64 } else { crossing(x0, h, v, i, c) };
        out.push(Interval { a, b });
        i += 1;
    }
    IntervalSet::from_sorted(out)
}

/// Superlevel sets `{u > c}` of every row, found by linear interpolation
/// between neighbouring samples.
pub fn superlevel_rows(u: &GridField, c: f64) -> Vec<IntervalSet> {
    let (x0, h) = (u.coord(0), u.h());
    (0..u.n()).map(|j| row_superlevel(x0, h, &row(u, j), c)).collect()
}

/// Area of `{u > c}`: row measures combined by the trapezoid rule in `x2`.
pub fn superlevel_area(u: &GridField, c: f64) -> f64 {
    let rows = superlevel_rows(u, c);
    let last = rows.len() - 1;
    let sum: f64 = rows.iter().enumerate().map(|(j, s)| if j == 0 || j == last { 0.5 * s.measure() } else { s.measure() }).sum();
    sum * u.h()
}

/// Superlevel sets of one row at every level of `levels` (increasing), built
/// with a single descending sweep that activates samples one by one.
fn sweep_row(x0: f64, h: f64, v: &[f64], levels: &[f64]) -> Vec<IntervalSet> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| v[q].total_cmp(&v[p]));

    let mut active = vec![false; n];
    // run ends indexed by run start, and run starts indexed by run end
    let mut end_of = vec![0usize; n];
    let mut start_of = vec![0usize; n];
    let mut starts = BTreeSet::new();
    let mut next = 0;
    let x_last = x0 + h * (n - 1) as f64;

    let mut sets = vec![IntervalSet::empty(); levels.len()];
    for (k, &c) in levels.iter().enumerate().rev() {
        while next < n && v[order[next]] > c {
            let i = order[next];
            next += 1;
            active[i] = true;
            let start = if i > 0 && active[i - 1] { start_of[i - 1] } else { i };
            let end = if i + 1 < n && active[i + 1] {
                starts.remove(&(i + 1));
                end_of[i + 1]
            } else {
                i
            };
            starts.insert(start);
            end_of[start] = end;
            start_of[end] = start;
        }
        let intervals = starts
            .iter()
            .map(|&s| {
                let e = end_of[s];
                let a = if s == 0 { x0 } else { crossing(x0, h, v, s - 1, c) };
                let b = if e == n - 1 { x_last } else { crossing(x0, h, v, e, c) };
                Interval { a, b }
            })
            .collect();
        sets[k] = IntervalSet::from_sorted(intervals);
    }
    sets
}

/// Uniform levels plus the row's own samples inside `(floor, row_max)`.
fn row_levels(uniform: &[f64], v: &[f64], row_max: f64, range: f64) -> Vec<f64> {
    let floor = uniform[0];
    let mut levels: Vec<f64> = uniform.iter().copied().chain(v.iter().copied().filter(|&s| s > floor)).filter(|&c| c < row_max).collect();
    levels.sort_by(f64::total_cmp);
    let tol = LEVEL_DEDUP * range;
    levels.dedup_by(|b, a| *b - *a <= tol);
    levels
}

impl LevelStack {
    /// Superlevel sets of every row of `u` along `x1`, using `k` uniform
    /// levels from the floor to `max u`.
    pub fn build(u: &GridField, k: usize) -> Result<Self> {
        if k < MIN_LEVELS {
            return Err(LabError::InvalidParameter(format!("need at least {MIN_LEVELS} levels, got {k}")));
        }
        let (top, ring) = (u.max(), u.ring_max());
        if top <= ring {
            return Err(LabError::UnboundedSuperlevel { level: ring });
        }
        let floor = ring + FLOOR_OFFSET * (top - ring);
        let gap = (top - floor) / k as f64;
        let levels: Vec<f64> = (0..k).map(|m| floor + m as f64 * gap).collect();
        let range = top - u.min();
        let (x0, h) = (u.coord(0), u.h());

        let rows = (0..u.n())
            .into_par_iter()
            .map(|j| {
                let v = row(u, j);
                let row_max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let levels = row_levels(&levels, &v, row_max, range);
                let sets = sweep_row(x0, h, &v, &levels);
                RowStack { levels, sets, row_max, samples: v }
            })
            .collect();
        Ok(Self { levels, rows, t: 0.0, half_width: u.half_width(), h: u.h() })
    }

    pub fn floor(&self) -> f64 {
        self.levels[0]
    }

    /// Every superlevel set flowed for a further time `t`.
    pub fn flowed(&self, t: f64) -> Self {
        let total = self.t + t;
        let rows = self.rows.par_iter().map(|r| RowStack { sets: r.sets.iter().map(|s| flow_set(s, t)).collect(), ..r.clone() }).collect();
        Self { levels: self.levels.clone(), rows, t: total, half_width: self.half_width, h: self.h }
    }

    /// Largest level step in any row, counting the step from the top level
    /// to the row maximum.
    pub fn max_level_gap(&self) -> f64 {
        let mut gap = 0.0f64;
        for r in &self.rows {
            for w in r.levels.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            if let Some(&last) = r.levels.last() {
                gap = gap.max(r.row_max - last);
            }
        }
        gap
    }

    /// Layer-cake reconstruction on the grid of `original`. Rows that never
    /// exceed the floor are copied from `original`.
    pub fn reconstruct(&self, original: &GridField) -> Result<GridField> {
        let n = original.n();
        if self.rows.len() != n || original.half_width() != self.half_width {
            return Err(LabError::GridMismatch);
        }
        let x0 = original.coord(0);
        let columns: Vec<Vec<f64>> = self
            .rows
            .par_iter()
            .enumerate()
            .map(|(j, r)| {
                if r.levels.is_empty() {
                    row(original, j)
                } else {
                    let geom = RowGeometry { x0, h: self.h, t: self.t };
                    (0..n).map(|i| r.eval(x0 + i as f64 * self.h, &geom)).collect()
                }
            })
            .collect();
        let values = Array2::from_shape_fn((n, n), |(i, j)| columns[j][i]);
        original.with_values(values)
    }
}

/// Linear interpolation of the value from `(xa, va)` to `(xb, vb)` at `x`.
#[inline]
fn lerp(x: f64, xa: f64, va: f64, xb: f64, vb: f64) -> f64 {
    if xb - xa <= 0.0 {
        return vb;
    }
    let s = ((x - xa) / (xb - xa)).clamp(0.0, 1.0);
    va + s * (vb - va)
}

/// Bisection steps used to locate a level inside a band.
const BISECTION_STEPS: usize = 40;

struct RowGeometry {
    x0: f64,
    h: f64,
    t: f64,
}

impl RowStack {
    /// `sup { c : x in {u > c}^t }` with `lo < c < hi` known, by bisection on
    /// the flowed superlevel sets of the samples.
    fn bisect_level(&self, x: f64, mut lo: f64, mut hi: f64, geom: &RowGeometry) -> f64 {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let set = flow_set(&row_superlevel(geom.x0, geom.h, &self.samples, mid), geom.t);
            if set.contains(x) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `sup { c : x in sets[c] }` refined inside the bracketing band.
    fn eval(&self, x: f64, geom: &RowGeometry) -> f64 {
        let base = &self.sets[0];
        let floor = self.levels[0];
        if !base.contains(x) {
            let n = self.samples.len();
            let x_right = geom.x0 + geom.h * (n - 1) as f64;
            return self.below_floor(x, geom.x0, x_right);
        }
        let k = self.sets.partition_point(|s| s.contains(x)) - 1;
        let lo = self.levels[k];
        let hi = self.levels.get(k + 1).copied().unwrap_or(self.row_max);
        let j = self.sets[k].intervals()[self.sets[k].interval_containing(x).expect("x is inside")];
        debug_assert!(lo >= floor);

        let inner: &[Interval] = match self.sets.get(k + 1) {
            Some(next) => {
                let iv = next.intervals();
                let first = iv.partition_point(|p| p.b <= j.a);
                let last = iv.partition_point(|p| p.a < j.b);
                &iv[first..last.max(first)]
            }
            None => &[],
        };
        match inner {
            [] => {
                // single peak inside this band: tent with apex at the centre
                let half = 0.5 * j.len();
                let d = (x - j.center()).abs() / half;
                lo + (hi - lo) * (1.0 - d).max(0.0)
            }
            [first, ..] if x <= first.a => lerp(x, j.a, lo, first.a, hi),
            [.., last] if x >= last.b => lerp(x, last.b, hi, j.b, lo),
            // gap between inner intervals: a merge inside the band makes the
            // endpoints jump in c, so locate the level directly
            _ => self.bisect_level(x, lo, hi, geom),
        }
    }

    /// Outside the flowed floor set: ramp from the floor level to the sample
    /// at the nearer grid end.
    fn below_floor(&self, x: f64, x_left: f64, x_right: f64) -> f64 {
        let iv = self.sets[0].intervals();
        let floor = self.levels[0];
        let (first, last) = (iv[0], iv[iv.len() - 1]);
        if x <= first.a {
            lerp(x, x_left, self.samples[0], first.a, floor)
        } else if x >= last.b {
            lerp(x, last.b, floor, x_right, self.samples[self.samples.len() - 1])
        } else {
            floor
        }
    }
}

/// Angle in `[0, pi)` of the line spanned by `direction`.
fn line_angle(direction: [f64; 2]) -> Result<(f64, [f64; 2])> {
    let norm = direction[0].hypot(direction[1]);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(LabError::InvalidParameter(format!("direction must be a nonzero finite vector, got ({}, {})", direction[0], direction[1])));
    }
    let unit = [direction[0] / norm, direction[1] / norm];
    let angle = unit[1].atan2(unit[0]).rem_euclid(std::f64::consts::PI);
    Ok((angle, unit))
}

fn transpose(u: &GridField) -> GridField {
    u.with_values(u.values().t().to_owned()).expect("same shape")
}

fn symmetrize_rows(u: &GridField, t: f64, k: usize) -> Result<(GridField, f64, f64)> {
    let stack = LevelStack::build(u, k)?;
    let gap = stack.max_level_gap();
    let floor = stack.floor();
    let field = if t == 0.0 { u.clone() } else { stack.flowed(t).reconstruct(u)? };
    Ok((field, gap, floor))
}

/// Continuous Steiner symmetrization `u^t` along `direction`, built from
/// `k >= 64` uniform levels. `t = f64::INFINITY` gives the Steiner symmetral.
///
/// Axis directions are handled by exact index permutation; other directions
/// rotate the field by bilinear resampling, symmetrize along `x1` and rotate
/// back.
pub fn symmetrize_function(u: &GridField, t: f64, direction: [f64; 2], k: usize) -> Result<SymmetrizationResult> {
    if !(t >= 0.0) {
        return Err(LabError::InvalidParameter(format!("flow time must be nonnegative, got {t}")));
    }
    let (angle, unit) = line_angle(direction)?;
    let eps = 1e-12;
    let (field, gap, floor) = if angle < eps || std::f64::consts::PI - angle < eps {
        symmetrize_rows(u, t, k)?
    } else if (angle - std::f64::consts::FRAC_PI_2).abs() < eps {
        let (f, gap, floor) = symmetrize_rows(&transpose(u), t, k)?;
        (transpose(&f), gap, floor)
    } else {
        let turned = rotate_resample(u, -angle);
        let (f, gap, floor) = symmetrize_rows(&turned, t, k)?;
        let field = if t == 0.0 { u.clone() } else { rotate_resample(&f, angle) };
        (field, gap, floor)
    };
    Ok(SymmetrizationResult { field, t, direction: unit, levels_used: k, max_level_gap: gap, floor_level: floor })
}

/// Split `u` into `G_m(u) + H_m(u)`. The sum reproduces `u` bit for bit.
pub fn truncate(u: &GridField, m: f64) -> TruncationPair {
    let g_part = u.map(|v| if v > m { v - m } else { 0.0 });
    let h_part = u.zip_map(&g_part, |v, g| v - g).expect("same grid");
    TruncationPair { m, g_part, h_part }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::lipschitz;

    fn gauss(l: f64, n: usize, cx: f64, cy: f64) -> GridField {
        GridField::from_fn(l, n, |x, y| (-((x - cx).powi(2) + (y - cy).powi(2))).exp()).unwrap()
    }

    #[test]
    fn parabola_rows() {
        let u = GridField::from_fn(2.0, 33, |x, _| 1.0 - x * x).unwrap();
        for set in superlevel_rows(&u, 0.0) {
            assert_eq!(set.len(), 1);
            let iv = set.intervals()[0];
            assert!((iv.a + 1.0).abs() < 1e-12 && (iv.b - 1.0).abs() < 1e-12);
        }
        assert!(superlevel_rows(&u, 1.0).iter().all(IntervalSet::is_empty));
    }

    #[test]
    fn two_bump_rows_have_two_intervals() {
        let u = GridField::from_fn(4.0, 129, |x, y| (-((x - 2.0).powi(2) + y * y)).exp() + (-((x + 2.0).powi(2) + y * y)).exp()).unwrap();
        let rows = superlevel_rows(&u, 0.5);
        assert_eq!(rows[64].len(), 2);
    }

    #[test]
    fn sweep_matches_direct_scan() {
        let u = GridField::from_fn(3.0, 65, |x, y| (x * 2.1).sin() * (-(x * x + y * y) / 3.0).exp() + 0.3 * (y * 1.3).cos()).unwrap();
        let levels: Vec<f64> = (0..40).map(|k| -0.8 + 0.045 * k as f64).collect();
        for j in [0, 7, 32, 50] {
            let v = row(&u, j);
            let swept = sweep_row(u.coord(0), u.h(), &v, &levels);
            for (c, s) in levels.iter().zip(&swept) {
                assert_eq!(*s, row_superlevel(u.coord(0), u.h(), &v, *c), "row {j} level {c}");
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let u = gauss(4.0, 65, 1.0, 0.5);
        for dir in [[1.0, 0.0], [1.0, 1.0], [0.0, 2.0]] {
            let r = symmetrize_function(&u, 0.0, dir, 64).unwrap();
            assert_eq!(r.field, u);
        }
    }

    #[test]
    fn shifted_gaussian_translates() {
        let u = gauss(6.0, 241, 1.0, 0.0);
        for t in [0.3, 1.0, 2.5] {
            let r = symmetrize_function(&u, t, [1.0, 0.0], 128).unwrap();
            let c = (-t).exp();
            let exact = gauss(6.0, 241, c, 0.0);
            let err = r.field.max_abs_diff(&exact);
            assert!(err <= r.max_level_gap + u.h(), "t={t}: {err}");
        }
    }

    #[test]
    fn centered_bump_is_fixed_in_every_direction() {
        let u = gauss(5.0, 161, 0.0, 0.0);
        for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 2.0]] {
            let r = symmetrize_function(&u, 1.0, dir, 128).unwrap();
            let tol = r.max_level_gap + 10.0 * u.h() * u.h() * 2.0;
            assert!(r.field.max_abs_diff(&u) <= tol, "{dir:?}: {}", r.field.max_abs_diff(&u));
        }
    }

    #[test]
    fn vertical_direction_translates_along_x2() {
        let u = gauss(6.0, 161, 0.0, -1.5);
        let r = symmetrize_function(&u, f64::INFINITY, [0.0, 1.0], 128).unwrap();
        let err = r.field.max_abs_diff(&gauss(6.0, 161, 0.0, 0.0));
        assert!(err <= r.max_level_gap + u.h(), "{err}");
    }

    #[test]
    fn rejects_bad_input() {
        let u = gauss(4.0, 33, 0.0, 0.0);
        assert!(symmetrize_function(&u, 1.0, [1.0, 0.0], 32).is_err());
        assert!(symmetrize_function(&u, -1.0, [1.0, 0.0], 64).is_err());
        assert!(symmetrize_function(&u, 1.0, [0.0, 0.0], 64).is_err());
        let ramp = GridField::from_fn(1.0, 33, |x, _| x).unwrap();
        assert!(matches!(symmetrize_function(&ramp, 1.0, [1.0, 0.0], 64), Err(LabError::UnboundedSuperlevel { .. })));
    }

    /// Fill gaps narrower than `w`.
    fn close_gaps(s: &IntervalSet, w: f64) -> IntervalSet {
        let mut out: Vec<Interval> = Vec::new();
        for &iv in s.intervals() {
            match out.last_mut() {
                Some(last) if iv.a - last.b < w => last.b = iv.b,
                _ => out.push(iv),
            }
        }
        IntervalSet::from_sorted(out)
    }

    #[test]
    fn layer_cake_consistency() {
        let u = GridField::from_fn(5.0, 161, |x, y| (-((x - 1.5).powi(2) + y * y)).exp() + 0.7 * (-((x + 1.8).powi(2) + 2.0 * y * y)).exp()).unwrap();
        let t = 0.7;
        let r = symmetrize_function(&u, t, [1.0, 0.0], 128).unwrap();
        let h = u.h();
        for c in [0.1, 0.3, 0.5, 0.8] {
            let after = superlevel_rows(&r.field, c);
            let flowed: Vec<_> = superlevel_rows(&u, c).iter().map(|s| flow_set(s, t)).collect();
            for (a, b) in after.iter().zip(&flowed) {
                // each endpoint may move by a cell, so gaps up to 2h can vanish
                let (a, b) = (close_gaps(a, 2.0 * h), close_gaps(b, 2.0 * h));
                assert_eq!(a.len(), b.len(), "c={c}: {a:?} vs {b:?}");
                assert!((a.measure() - b.measure()).abs() <= 2.0 * h, "c={c}");
                assert!(a.is_subset_of(&b, h) && b.is_subset_of(&a, h), "c={c}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn lipschitz_does_not_grow() {
        let u = GridField::from_fn(5.0, 161, |x, y| (-((x - 1.5).powi(2) + y * y)).exp() + 0.7 * (-((x + 1.8).powi(2) + 2.0 * y * y)).exp()).unwrap();
        for t in [0.2, 1.0, f64::INFINITY] {
            let r = symmetrize_function(&u, t, [1.0, 0.0], 128).unwrap();
            assert!(lipschitz(&r.field) <= 1.05 * lipschitz(&u), "t={t}");
        }
    }

    #[test]
    fn truncation_examples() {
        let u = GridField::from_fn(4.0, 65, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap();
        let p = truncate(&u, 0.5);
        for ((&v, &g), &h) in u.values().iter().zip(p.g_part.values()).zip(p.h_part.values()) {
            assert_eq!(g + h, v);
            assert_eq!(g, (v - 0.5).max(0.0));
            assert_eq!(h, v.min(0.5));
        }
        assert_eq!(truncate(&u, 2.0).g_part.max(), 0.0);
        let ramp = GridField::from_fn(1.0, 17, |x, _| x).unwrap();
        let q = truncate(&ramp, 0.0);
        assert!(q.g_part.values().iter().zip(ramp.values()).all(|(&g, &v)| g == v.max(0.0)));
    }

    #[test]
    fn truncation_commutes_with_symmetrization() {
        let u = GridField::from_fn(5.0, 161, |x, y| (-((x - 1.5).powi(2) + y * y)).exp() + 0.7 * (-((x + 1.8).powi(2) + 2.0 * y * y)).exp()).unwrap();
        let m = 0.35;
        let t = 0.8;
        let lhs = truncate(&symmetrize_function(&u, t, [1.0, 0.0], 128).unwrap().field, m).g_part;
        let g = truncate(&u, m).g_part;
        let r = symmetrize_function(&g, t, [1.0, 0.0], 128).unwrap();
        let tol = 2.0 * r.max_level_gap + 2.0 * u.h() * lipschitz(&u);
        assert!(lhs.max_abs_diff(&r.field) <= tol, "{} > {tol}", lhs.max_abs_diff(&r.field));
    }
}
