use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::GridField;
use crate::error::{LabError, Result};

pub const MIN_CIRCLE_SAMPLES: usize = 64;

/// Samples of a field along a circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleTrace {
    pub radius: f64,
    pub values: Vec<f64>,
    /// `max - min` over the samples.
    pub oscillation: f64,
    pub mean: f64,
    /// Periodic trapezoid approximation of the line integral.
    pub line_integral: f64,
}

impl CircleTrace {
    fn from_values(radius: f64, values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let (lo, hi, sum) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), &v| (lo.min(v), hi.max(v), s + v));
        Self { radius, oscillation: hi - lo, mean: sum / n, line_integral: sum * 2.0 * PI * radius / n, values }
    }

    /// Standard deviation of the samples.
    pub fn scatter(&self) -> f64 {
        let n = self.values.len() as f64;
        let var = self.values.iter().map(|v| (v - self.mean).powi(2)).sum::<f64>() / n;
        var.sqrt()
    }
}

/// Angle of the k-th of `n` equispaced samples.
#[inline]
pub fn sample_angle(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// Number of samples resolving a circle of radius `r` at two points per grid spacing.
pub fn default_samples(r: f64, h: f64) -> usize {
    ((4.0 * PI * r / h).ceil() as usize).max(MIN_CIRCLE_SAMPLES)
}

fn sample_circle(f: &GridField, center: [f64; 2], r: f64, n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|k| {
            let th = sample_angle(k, n_theta);
            f.sample_clamped(center[0] + r * th.cos(), center[1] + r * th.sin())
        })
        .collect()
}

/// Bilinear trace of `f` on the circle of radius `r` about the origin.
///
/// Requires `r + h <= L` and at least 64 samples.
pub fn circle_trace(f: &GridField, r: f64, n_theta: usize) -> Result<CircleTrace> {
    if n_theta < MIN_CIRCLE_SAMPLES {
        return Err(LabError::InvalidParameter(format!("circle trace needs at least {MIN_CIRCLE_SAMPLES} samples, got {n_theta}")));
    }
    if !(r > 0.0) || r + f.h() > f.half_width() * (1.0 + 1e-12) {
        return Err(LabError::OutOfDomain { what: "circle", radius: r, half_width: f.half_width() });
    }
    Ok(CircleTrace::from_values(r, sample_circle(f, [0.0, 0.0], r, n_theta)))
}

/// Like [`circle_trace`] with the default sample count.
pub fn circle_trace_auto(f: &GridField, r: f64) -> Result<CircleTrace> {
    circle_trace(f, r, default_samples(r, f.h()))
}

/// Circle means about `center` at radii `k h`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    /// Standard deviation of the circle samples at each radius; empty for
    /// analytic profiles.
    #[serde(default)]
    pub scatter: Vec<f64>,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() {
            return Err(LabError::InvalidParameter("radial profile lengths differ".into()));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) || r.first().is_some_and(|&r0| r0 < 0.0) {
            return Err(LabError::InvalidParameter("radii must be nonnegative and increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidParameter("radial profile has non-finite values".into()));
        }
        Ok(Self { r, values, scatter: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Piecewise-linear interpolation, clamped at the ends.
    pub fn eval(&self, r: f64) -> f64 {
        let k = self.r.partition_point(|&s| s <= r);
        if k == 0 {
            return self.values[0];
        }
        if k == self.r.len() {
            return *self.values.last().expect("nonempty profile");
        }
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let s = (r - r0) / (r1 - r0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }
}

/// Circle means and scatter of `f` about `center` at radii `k h`,
/// `k = 1 ..= floor((L - |center|) / h)`.
pub fn radial_profile(f: &GridField, center: [f64; 2]) -> Result<RadialProfile> {
    let l = f.half_width();
    let offset = center[0].hypot(center[1]);
    if offset >= l {
        return Err(LabError::InvalidParameter(format!("profile centre ({}, {}) outside the domain", center[0], center[1])));
    }
    let h = f.h();
    let kmax = ((l - offset) / h + 1e-9).floor() as usize;
    let mut out = RadialProfile::default();
    for k in 1..=kmax {
        let r = k as f64 * h;
        let trace = CircleTrace::from_values(r, sample_circle(f, center, r, default_samples(r, h)));
        out.r.push(r);
        out.values.push(trace.mean);
        out.scatter.push(trace.scatter());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(l: f64, n: usize) -> GridField {
        GridField::from_fn(l, n, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap()
    }

    #[test]
    fn radial_field_has_no_oscillation() {
        let f = gauss(4.0, 513);
        let tr = circle_trace(&f, 1.0, 256).unwrap();
        // bilinear error h^2/8 |D^2 u| with h = 1/64
        assert!(tr.oscillation <= 1e-4, "{}", tr.oscillation);
        assert!((tr.mean - (-0.5f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn linear_field_oscillates_by_diameter() {
        let f = GridField::from_fn(2.0, 129, |x, _| x).unwrap();
        let tr = circle_trace(&f, 1.0, 400).unwrap();
        assert!((tr.oscillation - 2.0).abs() < 1e-10);
        assert!(tr.mean.abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_and_too_few_samples() {
        let f = gauss(2.0, 65);
        assert!(matches!(circle_trace(&f, 3.0, 64), Err(LabError::OutOfDomain { .. })));
        assert!(circle_trace(&f, 2.0, 64).is_err());
        assert!(circle_trace(&f, 1.0, 32).is_err());
    }

    #[test]
    fn line_integral_of_constant() {
        let f = GridField::from_fn(2.0, 65, |_, _| 3.0).unwrap();
        let tr = circle_trace(&f, 1.5, 128).unwrap();
        assert!((tr.line_integral - 3.0 * 2.0 * PI * 1.5).abs() < 1e-10);
    }

    #[test]
    fn gaussian_profile() {
        let f = gauss(4.0, 257);
        let p = radial_profile(&f, [0.0, 0.0]).unwrap();
        assert_eq!(p.len(), 128);
        let h = f.h();
        for (k, (&r, &v)) in p.r.iter().zip(&p.values).enumerate() {
            assert!((r - (k + 1) as f64 * h).abs() < 1e-12);
            // bilinear error is at most h^2/8 (|u_xx| + |u_yy|) <= h^2/4
            assert!((v - (-r * r / 2.0).exp()).abs() < 0.25 * h * h, "r={r}");
        }
        assert!(p.scatter.iter().all(|&s| s < 0.25 * h * h));
    }

    #[test]
    fn fine_gaussian_profile_to_1e6() {
        let f = gauss(2.0, 2049);
        let p = radial_profile(&f, [0.0, 0.0]).unwrap();
        for (&r, (&v, &s)) in p.r.iter().zip(p.values.iter().zip(&p.scatter)) {
            assert!((v - (-r * r / 2.0).exp()).abs() <= 1e-6, "r={r}");
            assert!(s <= 1e-6, "r={r}");
        }
        let tr = circle_trace(&f, 1.0, 512).unwrap();
        assert!(tr.oscillation <= 1e-6, "{}", tr.oscillation);
    }

    #[test]
    fn linear_profile_has_cosine_scatter() {
        let f = GridField::from_fn(2.0, 129, |x, _| x).unwrap();
        let p = radial_profile(&f, [0.0, 0.0]).unwrap();
        for ((&r, &v), &s) in p.r.iter().zip(&p.values).zip(&p.scatter) {
            assert!(v.abs() < 1e-12);
            assert!((s - r * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9 * (1.0 + r));
        }
    }

    #[test]
    fn constant_profile() {
        let f = GridField::from_fn(2.0, 33, |_, _| -1.25).unwrap();
        let p = radial_profile(&f, [0.3, -0.2]).unwrap();
        assert!(p.values.iter().all(|&v| (v + 1.25).abs() < 1e-14));
        assert!(p.scatter.iter().all(|&s| s < 1e-14));
    }
}
