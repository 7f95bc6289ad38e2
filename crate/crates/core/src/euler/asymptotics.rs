//! Far-field behaviour: limit at infinity, decay of the flow quantities,
//! vanishing integrals and the sign of `f` near the limit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::case::{counterexample_radius, counterexample_radius_bisect, counterexample_u, CaseKind, FlowCase, Limit};
use crate::error::Result;
use crate::field::{circle_trace_auto, integrate, GridField, Region};
use crate::quad1d::adaptive_simpson;
use crate::report::{CheckRecord, Comparison};

use super::anchors;
use super::fields::{derive_fields_with, DerivedFields};
use super::topology::reconstruct_f;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    /// Circle mean of `u` at the largest usable radius, unless the field is
    /// classified as divergent or oscillating.
    pub limit_estimate: Option<f64>,
    /// `u` keeps dropping by comparable amounts per octave of radius.
    pub divergent: bool,
    pub records: Vec<CheckRecord>,
}

/// Ratio of consecutive per-octave drops above which `u` is taken to diverge
/// to `-∞`.
pub const DIVERGENCE_RATIO: f64 = 0.5;

fn circle_mean(f: &GridField, r: f64) -> Result<f64> {
    Ok(circle_trace_auto(f, r)?.mean)
}

fn circle_max_abs(f: &GridField, r: f64) -> Result<f64> {
    Ok(circle_trace_auto(f, r)?.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Number of strict increases in a sequence, ignoring relative noise.
fn increases(values: &[f64]) -> usize {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.windows(2).filter(|w| w[1] > w[0] + 1e-9 * scale).count()
}

/// Far-field records of a case. Grid cases get the limit estimate, decay,
/// integral and `f`-sign records; radial models get the monotone pressure
/// record; the oscillating counterexample gets its radius, value and energy
/// records.
pub fn asymptotics_report(case: &FlowCase) -> Result<AsymptoticsReport> {
    let mut out = AsymptoticsReport { limit_estimate: None, divergent: false, records: Vec::new() };
    if let Some(u) = &case.grid {
        grid_asymptotics(case, u, &mut out)?;
    }
    if let (Some(model), Some(nl)) = (&case.radial, &case.nonlinearity) {
        let r_end = model.r_max.min(case.grid.as_ref().map_or(20.0, |g| g.half_width()));
        let p: Vec<f64> = (0..=400)
            .map(|k| {
                let r = r_end * k as f64 / 400.0;
                -0.5 * model.du(r).powi(2) - nl.primitive(model.u(r))
            })
            .collect();
        let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let drops = p.windows(2).filter(|w| w[1] < w[0] - 1e-9 * scale).count();
        out.records.push(
            CheckRecord::check("asymptotics.radial_pressure_nondecreasing", anchors::ASYMPTOTICS, Comparison::AtMost, drops as f64, 0.0, 0.0)
                .with_meta("meaning", "decreases of -u'^2/2 - F(u) along r"),
        );
    }
    if let CaseKind::OscillatingCounterexample { alpha, r_max } = case.kind {
        counterexample_records(alpha, r_max, &mut out);
    }
    Ok(out)
}

fn grid_asymptotics(case: &FlowCase, u: &GridField, out: &mut AsymptoticsReport) -> Result<()> {
    let h = u.h();
    let r_top = u.half_width() - 2.0 * h;
    let m = [circle_mean(u, r_top / 4.0)?, circle_mean(u, r_top / 2.0)?, circle_mean(u, r_top)?];
    let (d1, d2) = (m[0] - m[1], m[1] - m[2]);
    out.divergent = d1 > 0.0 && d2 > 0.0 && d2 / d1 >= DIVERGENCE_RATIO;
    let range = u.max() - u.min();
    let l_hat = m[2];
    out.records.push(CheckRecord::diagnostic("asymptotics.limit_estimate", anchors::ASYMPTOTICS, l_hat, case.limit.value().unwrap_or(f64::NAN)));
    // whether the infimum is reached at a finite point can only be judged inside the window
    let inner_min = (0..u.n())
        .flat_map(|i| (0..u.n()).map(move |j| (i, j)))
        .filter(|&(i, j)| u.coord(i).hypot(u.coord(j)) < r_top)
        .map(|(i, j)| u.get(i, j))
        .fold(f64::INFINITY, f64::min);
    let outer_min = circle_trace_auto(u, r_top)?.values.iter().copied().fold(f64::INFINITY, f64::min);
    out.records.push(
        CheckRecord::diagnostic("asymptotics.min_attained_inside", anchors::ASYMPTOTICS, inner_min, outer_min)
            .with_meta("attained", inner_min < outer_min - 1e-12 * range.max(f64::MIN_POSITIVE)),
    );
    match case.limit {
        Limit::Finite(expected) => {
            out.records.push(
                CheckRecord::check("asymptotics.limit", anchors::ASYMPTOTICS, Comparison::Near, l_hat, expected, 1e-4 * range)
                    .with_meta("tolerance", "1e-4 (max u - min u)"),
            );
        }
        Limit::NegInfinity => {
            out.records.push(
                CheckRecord::flag("asymptotics.divergent_to_minus_infinity", anchors::ASYMPTOTICS, out.divergent)
                    .with_meta("octave_drop_ratio", d2 / d1),
            );
        }
        Limit::None => {}
    }
    if !out.divergent {
        out.limit_estimate = Some(l_hat);
    }
    if !matches!(case.limit, Limit::Finite(_)) {
        return Ok(());
    }

    let fields = case.nonlinearity.as_ref().map(|nl| derive_fields_with(u, |w| nl.primitive(w)));
    let fields = match fields {
        Some(f) => f,
        // velocity and vorticity still make sense without F
        None => derive_fields_with(u, |_| 0.0),
    };
    decay_records(u, &fields, case.nonlinearity.is_some(), r_top, out)?;
    hypothesis_surrogate(case, &fields, r_top, out)?;
    if let Some(nl) = &case.nonlinearity {
        integral_records(u, &fields, |w| nl.f(w), |w| nl.primitive(w), r_top, out)?;
        let top = u.max();
        let levels: Vec<f64> = (0..7).map(|k| l_hat + (0.01 + 0.02 * k as f64) * (top - l_hat)).collect();
        if levels[0] > u.ring_max() {
            let rec = reconstruct_f(u, &fields, &levels)?;
            let tol = 0.02 * rec.max_abs_f().max(rec.at_max.1.abs());
            let fmax = rec.levels.iter().map(|l| l.f).fold(f64::NEG_INFINITY, f64::max);
            let rise = rec.levels.windows(2).map(|w| w[1].f - w[0].f).fold(0.0, f64::max);
            out.records.push(
                CheckRecord::check("asymptotics.f_nonpositive_near_limit", anchors::ASYMPTOTICS, Comparison::AtMost, fmax, 0.0, tol)
                    .with_meta("levels", "L + (0.01 .. 0.13)(M - L)"),
            );
            out.records.push(
                CheckRecord::check("asymptotics.f_nonincreasing_near_limit", anchors::ASYMPTOTICS, Comparison::AtMost, rise, 0.0, tol)
                    .with_meta("levels", "L + (0.01 .. 0.13)(M - L)"),
            );
        }
    }
    Ok(())
}

fn outer_radii(r_top: f64, h: f64) -> Vec<f64> {
    let count = ((0.5 * r_top) / (4.0 * h)).floor().max(2.0) as usize;
    crate::euler::scans::linspace(0.5 * r_top, r_top, count)
}

fn decay_records(u: &GridField, fields: &DerivedFields, with_b: bool, r_top: f64, out: &mut AsymptoticsReport) -> Result<()> {
    let radii = outer_radii(r_top, u.h());
    let speed = fields.v.magnitude();
    let mut series: Vec<(&str, &GridField)> = vec![("speed", &speed), ("vorticity", &fields.omega)];
    if with_b {
        series.push(("bernoulli", &fields.bernoulli));
    }
    for (name, f) in series {
        let values = radii.iter().map(|&r| circle_max_abs(f, r)).collect::<Result<Vec<_>>>()?;
        out.records.push(
            CheckRecord::check(format!("asymptotics.decay.{name}"), anchors::ASYMPTOTICS, Comparison::AtMost, increases(&values) as f64, 0.0, 0.0)
                .with_meta("meaning", "increases of the circle maximum over the outer half"),
        );
    }
    Ok(())
}

/// Surrogate for the assumption that the vorticity has no local extrema
/// outside a ball: its circle means are monotone beyond that radius.
fn hypothesis_surrogate(case: &FlowCase, fields: &DerivedFields, r_top: f64, out: &mut AsymptoticsReport) -> Result<()> {
    let Some(r0) = case.h_ball else {
        return Ok(());
    };
    let h = fields.omega.h();
    let start = r0 + 4.0 * h;
    if start >= r_top {
        return Ok(());
    }
    let count = ((r_top - start) / (2.0 * h)).floor().max(2.0) as usize;
    let radii = crate::euler::scans::linspace(start, r_top, count);
    let means = radii.iter().map(|&r| circle_mean(&fields.omega, r)).collect::<Result<Vec<_>>>()?;
    let scale = means.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<i8> = means.windows(2).map(|w| w[1] - w[0]).filter(|d| d.abs() > 1e-9 * scale).map(|d| if d > 0.0 { 1 } else { -1 }).collect();
    let turns = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let (imax, jmax) = fields.omega.argmax();
    let (imin, jmin) = fields.omega.map(|w| -w).argmax();
    out.records.push(
        CheckRecord::check("asymptotics.vorticity_monotone_outside_ball", anchors::ASYMPTOTICS, Comparison::AtMost, turns as f64, 0.0, 0.0)
            .with_meta("ball_radius", r0)
            .with_meta("omega_argmax", format!("({}, {})", fields.omega.coord(imax), fields.omega.coord(jmax)))
            .with_meta("omega_argmin", format!("({}, {})", fields.omega.coord(imin), fields.omega.coord(jmin))),
    );
    Ok(())
}

fn integral_records(
    u: &GridField,
    fields: &DerivedFields,
    f: impl Fn(f64) -> f64,
    primitive: impl Fn(f64) -> f64,
    r_top: f64,
    out: &mut AsymptoticsReport,
) -> Result<()> {
    let fu = u.map(f);
    let big_f = u.map(primitive);
    let tail_region = Region::annulus(0.75 * r_top, r_top);
    let mut totals = Vec::new();
    for (name, g) in [("vorticity", &fields.omega), ("bernoulli", &fields.bernoulli), ("f_of_u", &fu), ("primitive_of_u", &big_f)] {
        let abs = g.map(f64::abs);
        let l1 = integrate(&abs, Region::All)?;
        let tail = integrate(&abs, tail_region)?;
        let total = integrate(g, Region::All)?;
        totals.push((total, l1 + tail));
        out.records.push(
            CheckRecord::check(format!("asymptotics.integral.{name}"), anchors::ASYMPTOTICS, Comparison::AtMost, total.abs(), 0.0, 1e-3 * l1 + tail)
                .with_meta("tolerance", "1e-3 L1 + outer-annulus tail"),
        );
    }
    let (w, f) = (totals[0], totals[2]);
    out.records.push(
        CheckRecord::check("asymptotics.vorticity_equals_minus_f", anchors::ASYMPTOTICS, Comparison::Near, w.0, -f.0, 1e-3 * w.1.max(f.1))
            .with_meta("tolerance", "1e-3 (L1 + tail)"),
    );
    Ok(())
}

fn counterexample_records(alpha: f64, r_max: f64, out: &mut AsymptoticsReport) {
    for k in 1..=3u32 {
        let closed = counterexample_radius(alpha, k);
        let bis = counterexample_radius_bisect(alpha, k);
        out.records.push(
            CheckRecord::check(format!("counterexample.radius.k={k}"), anchors::COUNTEREXAMPLE, Comparison::Near, bis, closed, 1e-10 * closed)
                .with_meta("tolerance", "1e-10 relative"),
        );
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.records.push(
            CheckRecord::check(
                format!("counterexample.value.k={k}"),
                anchors::COUNTEREXAMPLE,
                Comparison::Near,
                counterexample_u(closed, alpha),
                sign,
                1e-6,
            )
            .with_meta("radius", closed),
        );
    }
    let swing = (counterexample_u(counterexample_radius(alpha, 2), alpha) - counterexample_u(counterexample_radius(alpha, 1), alpha)).abs();
    out.records.push(CheckRecord::flag("counterexample.no_limit", anchors::COUNTEREXAMPLE, swing >= 1.0).with_meta("swing", swing));

    let total = counterexample_energy(alpha, 0.0, r_max);
    let tail = counterexample_energy(alpha, 1e7, r_max);
    out.records.push(
        CheckRecord::check("counterexample.energy_tail", anchors::COUNTEREXAMPLE, Comparison::AtMost, tail, 1e-3 * total, 0.0)
            .with_meta("meaning", "energy over [1e7, r_max] against 1e-3 of the energy over [0, r_max]")
            .with_meta("ratio", tail / total),
    );
    out.records.push(CheckRecord::diagnostic("counterexample.energy_total", anchors::COUNTEREXAMPLE, total, f64::NAN));
}

/// `2π ∫_a^b u'(r)^2 r dr`, integrated in `log r` beyond `r = 1`.
pub fn counterexample_energy(alpha: f64, a: f64, b: f64) -> f64 {
    let du = |r: f64| crate::case::counterexample_du(r, alpha);
    let mut e = 0.0;
    if a < 1.0 {
        e += adaptive_simpson(&|r: f64| du(r).powi(2) * r, a, b.min(1.0), 1e-14);
    }
    if b > 1.0 {
        let (s0, s1) = (a.max(1.0).ln(), b.ln());
        e += adaptive_simpson(
            &|s: f64| {
                let r = s.exp();
                du(r).powi(2) * r * r
            },
            s0,
            s1,
            1e-14,
        );
    }
    2.0 * PI * e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::{build_flow_case, GridSpec};

    fn names(r: &AsymptoticsReport) -> Vec<&str> {
        r.records.iter().map(|x| x.name.as_str()).collect()
    }

    #[test]
    fn gaussian_far_field() {
        let case = build_flow_case(&CaseKind::GaussianVortex { center: [0.0, 0.0] }, Some(GridSpec { half_width: 8.0, n: 257 })).unwrap();
        let r = asymptotics_report(&case).unwrap();
        assert!(!r.divergent);
        assert!(r.limit_estimate.unwrap().abs() <= 1e-4);
        for rec in &r.records {
            assert!(rec.acceptable(), "{rec:?}");
        }
        assert!(names(&r).contains(&"asymptotics.f_nonpositive_near_limit"));
        assert!(names(&r).contains(&"asymptotics.vorticity_monotone_outside_ball"));
        let min = r.records.iter().find(|x| x.name == "asymptotics.min_attained_inside").unwrap();
        assert_eq!(min.metadata["attained"], "false");
    }

    #[test]
    fn log_unbounded_is_flagged() {
        let case = build_flow_case(&CaseKind::LogUnbounded { alpha: 0.4 }, Some(GridSpec { half_width: 8.0, n: 129 })).unwrap();
        let r = asymptotics_report(&case).unwrap();
        assert!(r.divergent && r.limit_estimate.is_none());
        assert!(r.records.iter().any(|x| x.name == "asymptotics.divergent_to_minus_infinity" && x.passed));
    }

    #[test]
    fn counterexample_energy_tail_is_heavy() {
        let total = counterexample_energy(0.4, 0.0, 1e8);
        let tail = counterexample_energy(0.4, 1e7, 1e8);
        let ratio = tail / total;
        assert!(ratio > 1e-3 && ratio < 0.1, "{ratio}");
        let case = build_flow_case(&CaseKind::OscillatingCounterexample { alpha: 0.4, r_max: 1e8 }, None).unwrap();
        let r = asymptotics_report(&case).unwrap();
        for rec in &r.records {
            if rec.name == "counterexample.energy_tail" {
                assert!(!rec.passed);
            } else {
                assert!(rec.acceptable(), "{rec:?}");
            }
        }
    }

    #[test]
    fn energy_splits_additively() {
        let a = counterexample_energy(0.3, 0.0, 50.0);
        let b = counterexample_energy(0.3, 50.0, 1e4);
        let c = counterexample_energy(0.3, 0.0, 1e4);
        assert!((a + b - c).abs() <= 1e-10 * c);
    }
}
