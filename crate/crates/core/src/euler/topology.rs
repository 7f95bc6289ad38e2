//! Stagnation set, level-curve reconstruction of `f` and local symmetry.

use std::collections::VecDeque;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::field::diff::max_second_derivative;
use crate::field::{extract_contours, laplacian, lipschitz, radial_profile, ContourSet, GridField, Polyline};
use crate::report::{CheckRecord, Comparison};

use super::anchors;
use super::fields::DerivedFields;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagnationComponent {
    pub cells: usize,
    pub centroid: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagnationAnalysis {
    /// Cells with `|v| <= tol_v` count as stagnant.
    pub tol_v: f64,
    /// Components inside `|x| <= L/2` that do not reach the mask edge.
    pub components: Vec<StagnationComponent>,
    /// Components reaching the mask edge; these belong to the far field.
    pub far_field_components: usize,
    /// Every masked cell is stagnant.
    pub whole_plane: bool,
    /// `0` moving or unmasked, `k >= 1` interior component `k - 1`, `-1` far field.
    #[serde(skip)]
    pub labels: Array2<i32>,
}

impl StagnationAnalysis {
    pub fn connected(&self) -> bool {
        self.whole_plane || self.components.len() == 1
    }
}

/// Stagnant cells `|v| <= 5 h max|D^2 u|` inside `|x| <= L/2`, grouped into
/// 8-connected components.
pub fn stagnation_analysis(u: &GridField, v_mag: &GridField) -> Result<StagnationAnalysis> {
    if !u.same_grid(v_mag) {
        return Err(LabError::GridMismatch);
    }
    let (n, h) = (u.n(), u.h());
    let tol_v = 5.0 * h * max_second_derivative(u);
    let limit = 0.5 * u.half_width();
    let masked = |i: usize, j: usize| u.coord(i).hypot(u.coord(j)) <= limit;
    let stagnant = |i: usize, j: usize| masked(i, j) && v_mag.get(i, j) <= tol_v;

    let mut labels = Array2::<i32>::zeros((n, n));
    let mut seen = Array2::<bool>::from_elem((n, n), false);
    let mut components = Vec::new();
    let mut far = 0;
    let mut total_masked = 0usize;
    let mut total_stagnant = 0usize;
    for i in 0..n {
        for j in 0..n {
            if masked(i, j) {
                total_masked += 1;
            }
            if seen[[i, j]] || !stagnant(i, j) {
                continue;
            }
            let mut queue = VecDeque::from([(i, j)]);
            seen[[i, j]] = true;
            let mut cells = Vec::new();
            let mut edge = false;
            while let Some((a, b)) = queue.pop_front() {
                cells.push((a, b));
                for da in -1i64..=1 {
                    for db in -1i64..=1 {
                        let (x, y) = (a as i64 + da, b as i64 + db);
                        if x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                            edge = true;
                            continue;
                        }
                        let (x, y) = (x as usize, y as usize);
                        if !masked(x, y) {
                            edge = true;
                        } else if !seen[[x, y]] && stagnant(x, y) {
                            seen[[x, y]] = true;
                            queue.push_back((x, y));
                        }
                    }
                }
            }
            total_stagnant += cells.len();
            let label = if edge {
                far += 1;
                -1
            } else {
                let k = cells.len() as f64;
                let cx = cells.iter().map(|&(a, _)| u.coord(a)).sum::<f64>() / k;
                let cy = cells.iter().map(|&(_, b)| u.coord(b)).sum::<f64>() / k;
                components.push(StagnationComponent { cells: cells.len(), centroid: [cx, cy] });
                components.len() as i32
            };
            for (a, b) in cells {
                labels[[a, b]] = label;
            }
        }
    }
    Ok(StagnationAnalysis { tol_v, components, far_field_components: far, whole_plane: total_masked > 0 && total_stagnant == total_masked, labels })
}

/// One reconstructed level of `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FLevel {
    pub c: f64,
    /// `F(c) = -mean of B over the level curve`.
    pub primitive: f64,
    /// Central difference of `F` in `c`.
    pub f: f64,
    pub closed: bool,
    pub curves: usize,
    /// Arclength-weighted standard deviation of `B` on the curve.
    pub bernoulli_scatter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FReconstruction {
    pub levels: Vec<FLevel>,
    /// `(max u, -Δu at the stagnation point)`.
    pub at_max: (f64, f64),
    /// `sup |-Δu - f(u)|` off the stagnation band, within the level range.
    pub residual_sup: f64,
    pub records: Vec<CheckRecord>,
}

impl FReconstruction {
    /// Linear interpolation of the table, clamped at the ends.
    pub fn eval(&self, c: f64) -> f64 {
        let t = &self.levels;
        let k = t.partition_point(|l| l.c <= c);
        if k == 0 {
            return t[0].f;
        }
        if k == t.len() {
            return t[k - 1].f;
        }
        let s = (c - t[k - 1].c) / (t[k].c - t[k - 1].c);
        t[k - 1].f * (1.0 - s) + t[k].f * s
    }

    /// `sup |table - f|` over the reconstructed levels.
    pub fn compare(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.levels.iter().map(|l| (l.f - f(l.c)).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_f(&self) -> f64 {
        self.levels.iter().map(|l| l.f.abs()).fold(0.0, f64::max)
    }
}

/// Arclength-weighted mean and standard deviation of `field` along curves.
fn curve_stats(field: &GridField, curves: &[Polyline]) -> (f64, f64) {
    let (mut w, mut s, mut s2) = (0.0, 0.0, 0.0);
    for p in curves {
        for (a, b) in p.segments() {
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let v = field.sample_clamped(m[0], m[1]);
            w += len;
            s += len * v;
            s2 += len * v * v;
        }
    }
    if w == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = s / w;
    (mean, (s2 / w - mean * mean).max(0.0).sqrt())
}

fn level_primitive(u: &GridField, b: &GridField, c: f64) -> f64 {
    -curve_stats(b, &extract_contours(u, c).polylines).0
}

/// Level curve of `u` at `c` with its closedness and connectedness records.
pub fn contour_records(u: &GridField, c: f64) -> (ContourSet, Vec<CheckRecord>) {
    let set = extract_contours(u, c);
    let closed = !set.is_empty() && set.all_closed();
    let records = vec![
        CheckRecord::flag(format!("contour.closed.c={c}"), anchors::LEVEL_CURVES, closed),
        CheckRecord::flag(format!("contour.connected.c={c}"), anchors::LEVEL_CURVES, set.connected_component_count == 1)
            .with_meta("components", set.connected_component_count),
    ];
    (set, records)
}

/// Reconstructs `F` and `f` from the level curves of `u` and the Bernoulli
/// function `B`.
///
/// Each level gets records for closedness, connectedness and constancy of
/// `B` along the curve (tolerance `10 h^2 max|D^2 B| + 1e-9`). `f(c)` is the
/// central difference of `F` with step `5e-3 (max u - min level)`.
pub fn reconstruct_f(u: &GridField, fields: &DerivedFields, levels: &[f64]) -> Result<FReconstruction> {
    if levels.is_empty() || levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(LabError::InvalidParameter("levels must be nonempty and increasing".into()));
    }
    let (umax, h) = (u.max(), u.h());
    if levels[levels.len() - 1] >= umax || levels[0] <= u.ring_max() {
        return Err(LabError::InvalidParameter(format!("levels must lie strictly between the boundary maximum {} and max u {umax}", u.ring_max())));
    }
    let b = &fields.bernoulli;
    let tol_b = 10.0 * h * h * max_second_derivative(b) + 1e-9;
    let delta = 5e-3 * (umax - levels[0]);
    let mut out = FReconstruction { levels: Vec::new(), at_max: (umax, 0.0), residual_sup: 0.0, records: Vec::new() };
    for &c in levels {
        let (set, records) = contour_records(u, c);
        out.records.extend(records);
        let (mean, scatter) = curve_stats(b, &set.polylines);
        let closed = !set.is_empty() && set.all_closed();
        let f = (level_primitive(u, b, c + delta) - level_primitive(u, b, c - delta)) / (2.0 * delta);
        out.records.push(
            CheckRecord::check(format!("contour.bernoulli_constancy.c={c}"), anchors::LEVEL_CURVES, Comparison::AtMost, scatter, 0.0, tol_b)
                .with_meta("tolerance", "10 h^2 max|D^2 B| + 1e-9"),
        );
        out.levels.push(FLevel { c, primitive: -mean, f, closed, curves: set.polylines.len(), bernoulli_scatter: scatter });
    }

    // f at the maximum from the Laplacian at the slowest cell near the argmax.
    let lap = laplacian(u);
    let speed = fields.v.magnitude();
    let (im, jm) = u.argmax();
    let n = u.n() as i64;
    let mut best = (f64::INFINITY, im, jm);
    for di in -2i64..=2 {
        for dj in -2i64..=2 {
            let (i, j) = (im as i64 + di, jm as i64 + dj);
            if i < 0 || j < 0 || i >= n || j >= n {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            if speed.get(i, j) < best.0 {
                best = (speed.get(i, j), i, j);
            }
        }
    }
    out.at_max = (umax, -lap.get(best.1, best.2));

    let tol_v = 5.0 * h * max_second_derivative(u);
    let (lo, hi) = (levels[0], levels[levels.len() - 1]);
    let m = super::fields::RESIDUAL_MARGIN;
    for i in m..u.n() - m {
        for j in m..u.n() - m {
            let w = u.get(i, j);
            if speed.get(i, j) > tol_v && (lo..=hi).contains(&w) {
                out.residual_sup = out.residual_sup.max((-lap.get(i, j) - out.eval(w)).abs());
            }
        }
    }
    let scale = out.max_abs_f().max(out.at_max.1.abs());
    out.records.push(
        CheckRecord::check("f_reconstruction.residual_sup", anchors::LEVEL_CURVES, Comparison::AtMost, out.residual_sup, 0.0, 0.02 * scale)
            .with_meta("tolerance", "0.02 max|f|"),
    );
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Radial,
    LocallySymmetricMulti,
    Nonradial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub classification: SymmetryClass,
    pub center: [f64; 2],
    /// `(r_in, r_out)` of each annulus where circle means strictly decrease
    /// and the circle scatter stays below `tol_s`.
    pub annuli: Vec<(f64, f64)>,
    pub radial_fraction: f64,
    pub tol_s: f64,
    pub record: CheckRecord,
}

/// Minimum number of radii in an annulus.
const MIN_ANNULUS_RADII: usize = 3;

/// Classifies `u` about the centroid of the stagnation component holding its
/// maximum.
///
/// Radii with circle scatter at most `2 h Lip(u) + 1e-6` are radial. At
/// least 95% radial radii and one annulus give `Radial`; several annuli give
/// `LocallySymmetricMulti`; anything else is `Nonradial`.
pub fn local_symmetry_detect(u: &GridField, stagnation: &StagnationAnalysis) -> Result<SymmetryReport> {
    let (im, jm) = u.argmax();
    let top = [u.coord(im), u.coord(jm)];
    let center = stagnation
        .components
        .iter()
        .min_by(|a, b| {
            let da = (a.centroid[0] - top[0]).hypot(a.centroid[1] - top[1]);
            let db = (b.centroid[0] - top[0]).hypot(b.centroid[1] - top[1]);
            da.total_cmp(&db)
        })
        .map_or(top, |c| c.centroid);
    let profile = radial_profile(u, center)?;
    let tol_s = 2.0 * u.h() * lipschitz(u) + 1e-6;
    let ok: Vec<bool> = profile.scatter.iter().map(|&s| s <= tol_s).collect();
    let radial_fraction = ok.iter().filter(|&&b| b).count() as f64 / ok.len().max(1) as f64;

    let mut annuli = Vec::new();
    let mut start: Option<usize> = None;
    let close = |s: usize, e: usize, annuli: &mut Vec<(f64, f64)>| {
        if e + 1 - s >= MIN_ANNULUS_RADII {
            let r_in = if s == 0 { 0.0 } else { profile.r[s] };
            annuli.push((r_in, profile.r[e]));
        }
    };
    for k in 0..profile.len() {
        let continues = ok[k] && start.is_some() && profile.values[k] < profile.values[k - 1];
        match (start, continues) {
            (Some(_), true) => {}
            (Some(s), false) => {
                close(s, k - 1, &mut annuli);
                start = ok[k].then_some(k);
            }
            (None, _) => start = ok[k].then_some(k),
        }
    }
    if let Some(s) = start {
        close(s, profile.len() - 1, &mut annuli);
    }

    let classification = if radial_fraction >= 0.95 && annuli.len() == 1 {
        SymmetryClass::Radial
    } else if annuli.len() > 1 {
        SymmetryClass::LocallySymmetricMulti
    } else {
        SymmetryClass::Nonradial
    };
    let record = CheckRecord::flag("symmetry.radial", anchors::SYMMETRY, classification == SymmetryClass::Radial)
        .with_meta("classification", format!("{classification:?}"))
        .with_meta("radial_fraction", radial_fraction)
        .with_meta("center", format!("({}, {})", center[0], center[1]));
    Ok(SymmetryReport { classification, center, annuli, radial_fraction, tol_s, record })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::{gaussian_f, gaussian_primitive};
    use crate::euler::fields::derive_fields_with;

    fn gauss(l: f64, n: usize, c: [f64; 2]) -> GridField {
        GridField::from_fn(l, n, |x, y| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / 2.0).exp()).unwrap()
    }

    #[test]
    fn gaussian_has_one_stagnation_point() {
        let u = gauss(8.0, 257, [0.0, 0.0]);
        let f = derive_fields_with(&u, gaussian_primitive);
        let s = stagnation_analysis(&u, &f.v.magnitude()).unwrap();
        assert!(s.connected() && !s.whole_plane, "{:?}", s.components);
        assert!(s.components[0].centroid[0].abs() < 1e-9 && s.components[0].centroid[1].abs() < 1e-9);
    }

    #[test]
    fn constant_field_is_whole_plane() {
        let u = GridField::from_fn(4.0, 65, |_, _| 1.0).unwrap();
        let f = derive_fields_with(&u, |_| 0.0);
        let s = stagnation_analysis(&u, &f.v.magnitude()).unwrap();
        assert!(s.whole_plane && s.connected());
    }

    #[test]
    fn two_bumps_have_two_interior_stagnation_points() {
        let u = GridField::from_fn(6.0, 385, |x, y| (-((x - 2.0).powi(2) + y * y)).exp() + (-((x + 2.0).powi(2) + y * y)).exp()).unwrap();
        let f = derive_fields_with(&u, |w| w);
        let s = stagnation_analysis(&u, &f.v.magnitude()).unwrap();
        // the slow saddle region joins the far field; the two maxima stay interior
        assert_eq!(s.components.len(), 2, "{:?}", s.components);
        assert!(s.far_field_components >= 1 && !s.connected());
    }

    #[test]
    fn reconstructs_gaussian_f() {
        let u = gauss(8.0, 513, [0.0, 0.0]);
        let fields = derive_fields_with(&u, gaussian_primitive);
        let levels: Vec<f64> = (0..17).map(|k| 0.1 + 0.05 * k as f64).collect();
        let r = reconstruct_f(&u, &fields, &levels).unwrap();
        for rec in &r.records {
            assert!(rec.passed, "{rec:?}");
        }
        let err = r.compare(gaussian_f);
        assert!(err <= 0.02 * r.max_abs_f(), "{err}");
        assert!((r.at_max.1 - 2.0).abs() < 1e-3, "{:?}", r.at_max);
        for l in &r.levels {
            assert!((l.primitive - gaussian_primitive(l.c)).abs() < 1e-3, "{l:?}");
        }
    }

    #[test]
    fn rejects_levels_outside_range() {
        let u = gauss(4.0, 65, [0.0, 0.0]);
        let fields = derive_fields_with(&u, gaussian_primitive);
        assert!(reconstruct_f(&u, &fields, &[0.5, 1.5]).is_err());
        assert!(reconstruct_f(&u, &fields, &[0.6, 0.5]).is_err());
    }

    #[test]
    fn symmetry_classes() {
        let u = gauss(8.0, 257, [0.5, -0.25]);
        let fields = derive_fields_with(&u, gaussian_primitive);
        let s = stagnation_analysis(&u, &fields.v.magnitude()).unwrap();
        let rep = local_symmetry_detect(&u, &s).unwrap();
        assert_eq!(rep.classification, SymmetryClass::Radial, "{rep:?}");
        assert!((rep.center[0] - 0.5).abs() < 1e-9 && (rep.center[1] + 0.25).abs() < 1e-9);

        let two = GridField::from_fn(6.0, 257, |x, y| (-((x - 2.0).powi(2) + y * y)).exp() + (-((x + 2.0).powi(2) + y * y)).exp()).unwrap();
        let fields = derive_fields_with(&two, |w| w);
        let s = stagnation_analysis(&two, &fields.v.magnitude()).unwrap();
        let rep = local_symmetry_detect(&two, &s).unwrap();
        assert_ne!(rep.classification, SymmetryClass::Radial, "{rep:?}");
        assert!(!rep.record.passed);
    }
}
