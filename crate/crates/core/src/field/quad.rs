//! Composite trapezoidal quadrature over the whole grid, discs and annuli.
//!
//! Each grid node owns the dual cell `[x - h/2, x + h/2]^2`. For discs and
//! annuli the node weight is multiplied by the fraction of its dual cell
//! inside the region; cells cut by a circle are resolved by 4x4 subsampling,
//! which keeps the integral a continuous-looking function of the radius.

use serde::{Deserialize, Serialize};

use super::grid::GridField;
use crate::error::{LabError, Result};

/// Sub-samples per axis for cells cut by a circle.
const SUBSAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    All,
    /// Open disc `B(R)` centred at the origin.
    Ball {
        radius: f64,
    },
    /// Annulus `r1 < |x| < r2` centred at the origin.
    Annulus {
        inner: f64,
        outer: f64,
    },
}

impl Region {
    pub fn ball(radius: f64) -> Self {
        Region::Ball { radius }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Region::Annulus { inner, outer }
    }
}

/// Fraction of the square cell centred at `(x, y)` with side `h` lying in `|p| < r`.
fn disc_fraction(x: f64, y: f64, h: f64, r: f64) -> f64 {
    let rho = x.hypot(y);
    let half_diag = std::f64::consts::FRAC_1_SQRT_2 * h;
    if rho + half_diag <= r {
        return 1.0;
    }
    if rho - half_diag >= r {
        return 0.0;
    }
    let step = h / SUBSAMPLES as f64;
    let r2 = r * r;
    let mut inside = 0usize;
    for a in 0..SUBSAMPLES {
        let px = x - 0.5 * h + (a as f64 + 0.5) * step;
        for b in 0..SUBSAMPLES {
            let py = y - 0.5 * h + (b as f64 + 0.5) * step;
            if px * px + py * py < r2 {
                inside += 1;
            }
        }
    }
    inside as f64 / (SUBSAMPLES * SUBSAMPLES) as f64
}

fn check_radius(f: &GridField, r: f64) -> Result<()> {
    if !(r >= 0.0) || r > f.half_width() * (1.0 + 1e-12) {
        return Err(LabError::OutOfDomain { what: "integration region", radius: r, half_width: f.half_width() });
    }
    Ok(())
}

/// Quadrature weight of node `(i, j)` for `region` (already validated).
fn weight(f: &GridField, region: &Region, i: usize, j: usize) -> f64 {
    let n = f.n();
    let h = f.h();
    let edge = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let base = edge(i) * edge(j) * h * h;
    match *region {
        Region::All => base,
        Region::Ball { radius } => base * disc_fraction(f.coord(i), f.coord(j), h, radius),
        Region::Annulus { inner, outer } => {
            let (x, y) = (f.coord(i), f.coord(j));
            base * (disc_fraction(x, y, h, outer) - disc_fraction(x, y, h, inner))
        }
    }
}

pub fn integrate(f: &GridField, region: Region) -> Result<f64> {
    match region {
        Region::All => {}
        Region::Ball { radius } => check_radius(f, radius)?,
        Region::Annulus { inner, outer } => {
            check_radius(f, outer)?;
            if !(inner >= 0.0 && inner < outer) {
                return Err(LabError::InvalidParameter(format!("annulus needs 0 <= inner < outer, got ({inner}, {outer})")));
            }
        }
    }
    let n = f.n();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let w = weight(f, &region, i, j);
            if w != 0.0 {
                row += w * f.get(i, j);
            }
        }
        total += row;
    }
    Ok(total)
}

/// `integral |f|` over `region`.
pub fn l1_norm(f: &GridField, region: Region) -> Result<f64> {
    integrate(&f.map(f64::abs), region)
}

/// `(integral f^2)^{1/2}` over `region`.
pub fn l2_norm(f: &GridField, region: Region) -> Result<f64> {
    Ok(integrate(&f.map(|v| v * v), region)?.sqrt())
}

/// Dirichlet energy `integral |grad f|^2` over the whole grid.
pub fn dirichlet_energy(f: &GridField) -> f64 {
    let g = super::diff::gradient(f).squared_norm();
    integrate(&g, Region::All).expect("whole-grid region is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_over_square() {
        let f = GridField::from_fn(1.0, 17, |_, _| 1.0).unwrap();
        assert!((integrate(&f, Region::All).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let f = GridField::from_fn(8.0, 257, |x, y| (-(x * x + y * y)).exp()).unwrap();
        assert!((integrate(&f, Region::All).unwrap() - PI).abs() < 1e-4);
    }

    #[test]
    fn gaussian_energy_is_pi() {
        // |grad e^{-r^2/2}|^2 = r^2 e^{-r^2}, integral = 2 pi * 1/2
        let f = GridField::from_fn(8.0, 257, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap();
        let e = dirichlet_energy(&f);
        assert!((e - PI).abs() < 0.01 * PI, "{e}");
    }

    #[test]
    fn second_order_convergence() {
        // small domain so the truncation tail does not hide the h^2 error
        // (integral_{-l}^{l} e^{-x^2} dx)^2 = pi erf(l)^2
        let exact = |l: f64| PI * libm_erf(l).powi(2);
        let err = |n: usize| {
            let f = GridField::from_fn(1.0, n, |x, y| (-(x * x + y * y)).exp()).unwrap();
            (integrate(&f, Region::All).unwrap() - exact(1.0)).abs()
        };
        let (e1, e2) = (err(33), err(65));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    // erf via its series; enough digits for the convergence test
    fn libm_erf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term.abs() > 1e-17 {
            k += 1.0;
            term *= -x * x / k;
            sum += term / (2.0 * k + 1.0);
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn disc_and_annulus_areas() {
        let one = GridField::from_fn(4.0, 129, |_, _| 1.0).unwrap();
        let a = integrate(&one, Region::ball(2.0)).unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-2, "{a}");
        let b = integrate(&one, Region::annulus(1.0, 3.0)).unwrap();
        assert!((b - 8.0 * PI).abs() < 1e-2, "{b}");
        assert!(integrate(&one, Region::ball(4.5)).is_err());
        assert!(integrate(&one, Region::annulus(3.0, 1.0)).is_err());
    }
}
