//! Scans over circles `|x| = R`: oscillation, weighted flux, Green identity,
//! annular means and the Pohozaev identity.

use serde::Serialize;

use crate::case::FlowCase;
use crate::error::{LabError, Result};
use crate::field::{circle_trace, default_samples, gradient, integrate, laplacian, lipschitz, GridField, Region, VectorFieldGrid};
use crate::report::{CheckRecord, Comparison, PlotSeries};

use super::anchors;

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
        return Err(LabError::InvalidParameter("radii must be positive and increasing".into()));
    }
    Ok(())
}

/// Evenly spaced radii `start, ..., stop`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start];
    }
    (0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect()
}

/// Traces of the normal and tangential derivative on a circle, sharing the
/// sample points with any other trace of the same radius.
struct DerivativeTrace {
    normal: Vec<f64>,
    tangential: Vec<f64>,
}

fn derivative_trace(grad: &VectorFieldGrid, r: f64, n: usize) -> Result<DerivativeTrace> {
    let gx = circle_trace(&grad.x, r, n)?.values;
    let gy = circle_trace(&grad.y, r, n)?.values;
    let mut normal = Vec::with_capacity(n);
    let mut tangential = Vec::with_capacity(n);
    for (k, (a, b)) in gx.iter().zip(&gy).enumerate() {
        let (s, c) = crate::field::trace::sample_angle(k, n).sin_cos();
        normal.push(c * a + s * b);
        tangential.push(-s * a + c * b);
    }
    Ok(DerivativeTrace { normal, tangential })
}

fn line_integral(values: impl Iterator<Item = f64>, r: f64, n: usize) -> f64 {
    values.sum::<f64>() * 2.0 * std::f64::consts::PI * r / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationScan {
    pub radii: Vec<f64>,
    pub oscillation: Vec<f64>,
    /// Radii at which the oscillation reaches a new running minimum.
    pub best_sequence: Vec<f64>,
    pub tolerance: f64,
    pub record: CheckRecord,
}

/// Oscillation `max - min` of `u` on each circle; passes when the smallest
/// oscillation over the outer half is at most `5 h Lip(u) + 1e-3`.
pub fn oscillation_scan(u: &GridField, radii: &[f64]) -> Result<OscillationScan> {
    check_radii(radii)?;
    let oscillation = radii.iter().map(|&r| Ok(circle_trace(u, r, default_samples(r, u.h()))?.oscillation)).collect::<Result<Vec<_>>>()?;
    let mut best_sequence = Vec::new();
    let mut best = f64::INFINITY;
    for (&r, &o) in radii.iter().zip(&oscillation) {
        if o < best {
            best = o;
            best_sequence.push(r);
        }
    }
    let tolerance = 5.0 * u.h() * lipschitz(u) + 1e-3;
    let outer_min = oscillation[radii.len() / 2..].iter().copied().fold(f64::INFINITY, f64::min);
    let record = CheckRecord::check("scan.oscillation.outer_min", anchors::OSCILLATION, Comparison::AtMost, outer_min, 0.0, tolerance)
        .with_meta("tolerance", "5 h Lip(u) + 1e-3");
    Ok(OscillationScan { radii: radii.to_vec(), oscillation, best_sequence, tolerance, record })
}

impl OscillationScan {
    pub fn plot(&self) -> PlotSeries {
        PlotSeries::new("oscillation", "R", "oscillation", self.radii.iter().copied().zip(self.oscillation.iter().copied()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryScan {
    pub radii: Vec<f64>,
    /// `R log R ∮ |∇u|^2` for `R > 1`.
    pub weighted_flux: Vec<f64>,
    pub running_min: Vec<f64>,
    pub green_residual: Vec<f64>,
    /// `∮ φ^2 / (R log R)` for `R > 1`.
    pub growth: Vec<f64>,
    pub records: Vec<CheckRecord>,
}

/// Weighted flux, Green identity `∫(-Δu)φ = ∫∇u·∇φ - ∮φ ∂_ν u` and growth of
/// `∮ φ^2` on each circle.
///
/// Flux and growth use radii `R > 1` only. The Green residual tolerance is
/// `0.1 h` times the sum of the absolute sizes of the three terms.
pub fn boundary_scan(u: &GridField, phi: &GridField, radii: &[f64]) -> Result<BoundaryScan> {
    check_radii(radii)?;
    if !u.same_grid(phi) {
        return Err(LabError::GridMismatch);
    }
    let h = u.h();
    let gu = gradient(u);
    let gphi = gradient(phi);
    let speed2 = gu.squared_norm();
    let lap_phi = laplacian(u).zip_map(phi, |l, p| -l * p)?;
    let dot = gu.dot(&gphi)?;

    let mut out = BoundaryScan {
        radii: Vec::new(),
        weighted_flux: Vec::new(),
        running_min: Vec::new(),
        green_residual: Vec::new(),
        growth: Vec::new(),
        records: Vec::new(),
    };
    // (residual, tolerance, radius) with the largest residual / tolerance
    let mut worst_green = (0.0f64, 0.0f64, f64::NAN);
    let mut worst_ratio = f64::NEG_INFINITY;
    for &r in radii {
        let n = default_samples(r, h);
        let phi_tr = circle_trace(phi, r, n)?.values;
        let dn = derivative_trace(&gu, r, n)?.normal;
        let boundary = line_integral(phi_tr.iter().zip(&dn).map(|(p, d)| p * d), r, n);
        let lhs = integrate(&lap_phi, Region::ball(r))?;
        let rhs = integrate(&dot, Region::ball(r))? - boundary;
        let scale = integrate(&lap_phi.map(f64::abs), Region::ball(r))?
            + integrate(&dot.map(f64::abs), Region::ball(r))?
            + line_integral(phi_tr.iter().zip(&dn).map(|(p, d)| (p * d).abs()), r, n);
        let residual = (lhs - rhs).abs();
        out.green_residual.push(residual);
        let tol = 0.1 * h * scale;
        let ratio = if tol > 0.0 {
            residual / tol
        } else if residual > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_green = (residual, tol, r);
        }

        if r > 1.0 {
            let flux = circle_trace(&speed2, r, n)?.line_integral;
            let w = r * r.ln() * flux;
            let run = out.running_min.last().map_or(w, |&m: &f64| m.min(w));
            out.radii.push(r);
            out.weighted_flux.push(w);
            out.running_min.push(run);
            let phi2 = line_integral(phi_tr.iter().map(|p| p * p), r, n);
            out.growth.push(phi2 / (r * r.ln()));
        }
    }

    out.records.push(
        CheckRecord::check("scan.green_identity.worst", anchors::GREEN, Comparison::AtMost, worst_green.0, 0.0, worst_green.1)
            .with_meta("tolerance", "0.1 h (∫|Δu φ| + ∫|∇u·∇φ| + ∮|φ ∂_ν u|)")
            .with_meta("radius", worst_green.2),
    );
    if out.running_min.len() >= 4 {
        let mid = out.running_min[out.running_min.len() / 2 - 1];
        let end = *out.running_min.last().expect("nonempty");
        out.records.push(
            CheckRecord::flag("scan.flux.running_min_decreases", anchors::FLUX, end < mid)
                .with_meta("meaning", "running minimum of R log R ∮|∇u|^2 at the last radius is strictly below its value entering the outer half")
                .with_meta("end", end)
                .with_meta("entering_outer_half", mid),
        );
        let half = out.growth.len() / 2;
        let inner = out.growth[..half].iter().copied().fold(0.0, f64::max);
        let outer = out.growth[half..].iter().copied().fold(0.0, f64::max);
        out.records.push(
            CheckRecord::check("scan.flux.phi_growth_bounded", anchors::FLUX, Comparison::AtMost, outer, 2.0 * inner, 0.0)
                .with_meta("meaning", "max over outer half of ∮φ^2/(R log R) within twice the inner-half max"),
        );
    }
    Ok(out)
}

impl BoundaryScan {
    pub fn plot(&self) -> PlotSeries {
        PlotSeries::new("weighted_flux", "R", "R_log_R_flux", self.radii.iter().copied().zip(self.weighted_flux.iter().copied()).collect())
    }
}

/// `|sqrt(∮_{r2} φ^2 / r2) - sqrt(∮_{r1} φ^2 / r1)| <= sqrt(log(r2/r1) ∫_A |∇φ|^2)`
/// for each pair, with 1% relative slack.
pub fn annular_mean_check(phi: &GridField, pairs: &[(f64, f64)]) -> Result<Vec<CheckRecord>> {
    let h = phi.h();
    let grad2 = gradient(phi).squared_norm();
    let scale = phi.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for &(r1, r2) in pairs {
        if !(r1 > 0.0 && r1 < r2) {
            return Err(LabError::InvalidParameter(format!("degenerate annulus ({r1}, {r2})")));
        }
        let mean = |r: f64| -> Result<f64> {
            let n = default_samples(r, h);
            let tr = circle_trace(phi, r, n)?;
            Ok((line_integral(tr.values.iter().map(|v| v * v), r, n) / r).sqrt())
        };
        let lhs = (mean(r2)? - mean(r1)?).abs();
        let rhs = ((r2 / r1).ln() * integrate(&grad2, Region::annulus(r1, r2))?).sqrt();
        out.push(
            CheckRecord::check(format!("annular_mean.r1={r1}.r2={r2}"), anchors::ANNULAR, Comparison::AtMost, lhs, rhs, 0.01 * rhs + 1e-12 * scale)
                .with_meta("tolerance", "0.01 rhs + 1e-12 max|φ|")
                .with_meta("slack", rhs - lhs),
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PohozaevScan {
    pub radii: Vec<f64>,
    /// `Ψ(R) = ∫_{B(R)} F(u)`
    pub psi: Vec<f64>,
    /// `½ ∮ (|∂_ν u|^2 - |∂_τ u|^2)`
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
    pub scale: Vec<f64>,
    /// Least-squares `ℓ` in `Ψ(R) ≈ ℓ R^2` over the outer half.
    pub ell: f64,
    pub records: Vec<CheckRecord>,
}

/// Per-radius Pohozaev identity `2Ψ = R ∮ F(u) + R h(R)`, the calibration
/// `Ψ/R^2 -> ℓ`, and decay of `Ψ` at the largest radius.
///
/// The identity residual must stay within `1e-2` of the per-radius scale
/// `2∫|F| + R∮|F| + R/2 ∮(|∂_ν u|^2 + |∂_τ u|^2)` for radii `R >= 1`.
/// `|ℓ|` and `|Ψ(R_max)|` must stay within `1e-3 ∫_{B(R_max)} |F(u)|`.
pub fn pohozaev_scan(case: &FlowCase, radii: &[f64]) -> Result<PohozaevScan> {
    let nl = case.nonlinearity()?;
    pohozaev_scan_with(case.grid()?, &|w| nl.primitive(w), radii)
}

/// [`pohozaev_scan`] with an explicit primitive.
pub fn pohozaev_scan_with(u: &GridField, primitive: &dyn Fn(f64) -> f64, radii: &[f64]) -> Result<PohozaevScan> {
    check_radii(radii)?;
    let h = u.h();
    let fu = u.map(primitive);
    let abs_fu = fu.map(f64::abs);
    let grad = gradient(u);
    let mut scan = PohozaevScan {
        radii: radii.to_vec(),
        psi: Vec::new(),
        h: Vec::new(),
        residual: Vec::new(),
        scale: Vec::new(),
        ell: 0.0,
        records: Vec::new(),
    };
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for &r in radii {
        let n = default_samples(r, h);
        let f_tr = circle_trace(&fu, r, n)?.values;
        let d = derivative_trace(&grad, r, n)?;
        let psi = integrate(&fu, Region::ball(r))?;
        let f_line = line_integral(f_tr.iter().copied(), r, n);
        let hr = 0.5 * line_integral(d.normal.iter().zip(&d.tangential).map(|(a, b)| a * a - b * b), r, n);
        let residual = (2.0 * psi - r * f_line - r * hr).abs();
        let scale = 2.0 * integrate(&abs_fu, Region::ball(r))?
            + r * line_integral(f_tr.iter().map(|v| v.abs()), r, n)
            + 0.5 * r * line_integral(d.normal.iter().zip(&d.tangential).map(|(a, b)| a * a + b * b), r, n);
        scan.psi.push(psi);
        scan.h.push(hr);
        scan.residual.push(residual);
        scan.scale.push(scale);
        if r >= 1.0 && residual / scale.max(f64::MIN_POSITIVE) > worst.0 / worst.1.max(f64::MIN_POSITIVE) {
            worst = (residual, scale, r);
        }
    }
    let half = radii.len() / 2;
    let (num, den) = radii[half..].iter().zip(&scan.psi[half..]).fold((0.0, 0.0), |(a, b), (&r, &p)| (a + p * r * r, b + r.powi(4)));
    scan.ell = num / den;

    let r_max = *radii.last().expect("nonempty");
    let mass = integrate(&abs_fu, Region::ball(r_max))?;
    let psi_end = *scan.psi.last().expect("nonempty");
    scan.records = vec![
        CheckRecord::check("pohozaev.identity_worst", anchors::POHOZAEV, Comparison::AtMost, worst.0, 0.0, 1e-2 * worst.1)
            .with_meta("tolerance", "1e-2 per-radius scale, radii >= 1")
            .with_meta("radius", worst.2),
        CheckRecord::check("pohozaev.calibration_ell", anchors::POHOZAEV, Comparison::AtMost, scan.ell.abs(), 0.0, 1e-3 * mass)
            .with_meta("tolerance", "1e-3 ∫_{B(R_max)} |F(u)|")
            .with_meta("ell", scan.ell),
        CheckRecord::check("pohozaev.psi_at_max_radius", anchors::POHOZAEV, Comparison::AtMost, psi_end.abs(), 0.0, 1e-3 * mass)
            .with_meta("tolerance", "1e-3 ∫_{B(R_max)} |F(u)|")
            .with_meta("radius", r_max),
    ];
    Ok(scan)
}

impl PohozaevScan {
    pub fn plot(&self) -> PlotSeries {
        PlotSeries::new("pohozaev_psi", "R", "Psi", self.radii.iter().copied().zip(self.psi.iter().copied()).collect())
    }
}
