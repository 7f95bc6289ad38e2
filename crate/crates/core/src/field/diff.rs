//! Finite-difference operators on [`GridField`].
//!
//! Interior points use second-order central differences; boundary points use
//! second-order one-sided stencils. The Laplacian is the 5-point stencil in
//! the interior.

use ndarray::Array2;

use super::grid::{GridField, VectorFieldGrid};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

#[inline]
fn at(v: &Array2<f64>, axis: Axis, line: usize, k: usize) -> f64 {
    match axis {
        Axis::X1 => v[[k, line]],
        Axis::X2 => v[[line, k]],
    }
}

/// First partial derivative along `axis`.
pub fn partial(f: &GridField, axis: Axis) -> GridField {
    let n = f.n();
    let h = f.h();
    let v = f.values();
    let out = Array2::from_shape_fn((n, n), |(i, j)| {
        let (line, k) = match axis {
            Axis::X1 => (j, i),
            Axis::X2 => (i, j),
        };
        let g = |k: usize| at(v, axis, line, k);
        if k == 0 {
            (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * g(n - 1) - 4.0 * g(n - 2) + g(n - 3)) / (2.0 * h)
        } else {
            (g(k + 1) - g(k - 1)) / (2.0 * h)
        }
    });
    f.with_values_unchecked(out)
}

/// Second partial derivative along `axis`.
pub fn second_partial(f: &GridField, axis: Axis) -> GridField {
    let n = f.n();
    let h2 = f.h() * f.h();
    let v = f.values();
    let out = Array2::from_shape_fn((n, n), |(i, j)| {
        let (line, k) = match axis {
            Axis::X1 => (j, i),
            Axis::X2 => (i, j),
        };
        let g = |k: usize| at(v, axis, line, k);
        if k == 0 {
            (2.0 * g(0) - 5.0 * g(1) + 4.0 * g(2) - g(3)) / h2
        } else if k == n - 1 {
            (2.0 * g(n - 1) - 5.0 * g(n - 2) + 4.0 * g(n - 3) - g(n - 4)) / h2
        } else {
            (g(k + 1) - 2.0 * g(k) + g(k - 1)) / h2
        }
    });
    f.with_values_unchecked(out)
}

pub fn gradient(f: &GridField) -> VectorFieldGrid {
    VectorFieldGrid { x: partial(f, Axis::X1), y: partial(f, Axis::X2) }
}

/// `(grad u)^perp = (-d2 u, d1 u)`, the velocity of stream function `u`.
pub fn perp_gradient(f: &GridField) -> VectorFieldGrid {
    gradient(f).perp()
}

pub fn divergence(v: &VectorFieldGrid) -> Result<GridField> {
    if !v.x.same_grid(&v.y) {
        return Err(LabError::GridMismatch);
    }
    partial(&v.x, Axis::X1).zip_map(&partial(&v.y, Axis::X2), |a, b| a + b)
}

/// Scalar curl `d1 v2 - d2 v1`.
pub fn curl(v: &VectorFieldGrid) -> Result<GridField> {
    if !v.x.same_grid(&v.y) {
        return Err(LabError::GridMismatch);
    }
    partial(&v.y, Axis::X1).zip_map(&partial(&v.x, Axis::X2), |a, b| a - b)
}

pub fn laplacian(f: &GridField) -> GridField {
    second_partial(f, Axis::X1).zip_map(&second_partial(f, Axis::X2), |a, b| a + b).expect("same grid")
}

/// Discrete Lipschitz constant: `max |grad f|` over the grid.
pub fn lipschitz(f: &GridField) -> f64 {
    gradient(f).magnitude().max()
}

/// Largest entry of the discrete Hessian, `max |D^2 f|`.
pub fn max_second_derivative(f: &GridField) -> f64 {
    let fxx = second_partial(f, Axis::X1);
    let fyy = second_partial(f, Axis::X2);
    let fxy = partial(&partial(f, Axis::X1), Axis::X2);
    [fxx, fyy, fxy].iter().map(|g| g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max)
}

/// Largest third derivative, estimated by differencing the Hessian.
pub fn max_third_derivative(f: &GridField) -> f64 {
    let fxx = second_partial(f, Axis::X1);
    let fyy = second_partial(f, Axis::X2);
    [partial(&fxx, Axis::X1), partial(&fxx, Axis::X2), partial(&fyy, Axis::X1), partial(&fyy, Axis::X2)]
        .iter()
        .map(|g| g.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_max(f: &GridField, margin: usize, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = f.n();
        let mut m = 0.0f64;
        for i in margin..n - margin {
            for j in margin..n - margin {
                m = m.max((f.get(i, j) - g(f.coord(i), f.coord(j))).abs());
            }
        }
        m
    }

    #[test]
    fn gradient_of_linear_is_exact() {
        let f = GridField::from_fn(2.0, 33, |x, _| x).unwrap();
        let g = gradient(&f);
        assert!(interior_max(&g.x, 0, |_, _| 1.0) < 1e-12);
        assert!(interior_max(&g.y, 0, |_, _| 0.0) < 1e-12);
    }

    #[test]
    fn laplacian_of_quadratic_is_exact() {
        let f = GridField::from_fn(2.0, 33, |x, y| x * x + y * y).unwrap();
        let l = laplacian(&f);
        assert!(interior_max(&l, 0, |_, _| 4.0) < 1e-10);
    }

    #[test]
    fn laplacian_of_gaussian_at_origin() {
        for n in [65, 129] {
            let f = GridField::from_fn(4.0, n, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap();
            let l = laplacian(&f);
            let h = f.h();
            let mid = (n - 1) / 2;
            // 5-point error h^2/12 (u_xxxx + u_yyyy) = h^2/2 at the origin
            assert!((l.get(mid, mid) + 2.0).abs() <= 0.6 * h * h, "n={n}: {}", l.get(mid, mid));
        }
    }

    #[test]
    fn laplacian_matches_div_grad_on_quadratics() {
        let f = GridField::from_fn(1.5, 31, |x, y| 0.3 * x * x - 1.2 * x * y + 2.0 * y * y + x - y).unwrap();
        let a = laplacian(&f);
        let b = divergence(&gradient(&f)).unwrap();
        let n = f.n();
        for i in 2..n - 2 {
            for j in 2..n - 2 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn laplacian_and_div_grad_agree_to_second_order_for_smooth_fields() {
        let err = |n: usize| {
            let f = GridField::from_fn(4.0, n, |x, y| (-(x * x + 0.5 * y * y) / 2.0).exp()).unwrap();
            let (a, b) = (laplacian(&f), divergence(&gradient(&f)).unwrap());
            let mut m = 0.0f64;
            for i in 2..n - 2 {
                for j in 2..n - 2 {
                    m = m.max((a.get(i, j) - b.get(i, j)).abs());
                }
            }
            m
        };
        let (e1, e2) = (err(65), err(129));
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn curl_of_perp_gradient_is_laplacian() {
        let f = GridField::from_fn(2.0, 33, |x, y| x * x * 0.5 + y * y).unwrap();
        let w = curl(&perp_gradient(&f)).unwrap();
        assert!(interior_max(&w, 2, |_, _| 3.0) < 1e-10);
    }

    #[test]
    fn mismatched_components_rejected() {
        let a = GridField::from_fn(1.0, 17, |x, _| x).unwrap();
        let b = GridField::from_fn(2.0, 17, |x, _| x).unwrap();
        assert!(VectorFieldGrid::new(a, b).is_err());
    }
}
