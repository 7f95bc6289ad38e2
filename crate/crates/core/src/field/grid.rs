use ndarray::{Array2, Zip};

use crate::error::{LabError, Result};

/// Smallest admissible number of points per axis.
pub const MIN_POINTS: usize = 16;

/// Scalar field sampled on the uniform square grid over `[-L, L]^2`.
///
/// `values[[i, j]]` is the sample at `(x1, x2) = (-L + i h, -L + j h)` with
/// `h = 2L / (n - 1)`. The first index runs along `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    half_width: f64,
    h: f64,
    values: Array2<f64>,
}

impl GridField {
    pub fn new(half_width: f64, values: Array2<f64>) -> Result<Self> {
        let (n, m) = values.dim();
        if n != m {
            return Err(LabError::InvalidGrid(format!("grid must be square, got {n}x{m}")));
        }
        if n < MIN_POINTS {
            return Err(LabError::InvalidGrid(format!("need at least {MIN_POINTS} points per axis, got {n}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(LabError::InvalidGrid(format!("non-finite value {v} at ({i}, {j})")));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        Ok(Self { half_width, h, values })
    }

    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(LabError::InvalidGrid(format!("need at least {MIN_POINTS} points per axis, got {n}")));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(-half_width + i as f64 * h, -half_width + j as f64 * h));
        Self::new(half_width, values)
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Array2<f64>) -> Result<Self> {
        if values.dim() != self.values.dim() {
            return Err(LabError::GridMismatch);
        }
        Self::new(self.half_width, values)
    }

    pub(crate) fn with_values_unchecked(&self, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), self.values.dim());
        Self { half_width: self.half_width, h: self.h, values }
    }

    pub fn constant_like(&self, c: f64) -> Self {
        self.with_values_unchecked(Array2::from_elem(self.values.dim(), c))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.n() == other.n() && self.half_width == other.half_width
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values_unchecked(self.values.mapv(f))
    }

    /// Pointwise map over position and value.
    pub fn map_with_coords(&self, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(self.values.dim(), |(i, j)| f(self.coord(i), self.coord(j), self.values[[i, j]]));
        self.with_values_unchecked(values)
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(LabError::GridMismatch);
        }
        let mut out = self.values.clone();
        Zip::from(&mut out).and(&other.values).for_each(|a, &b| *a = f(*a, b));
        Ok(self.with_values_unchecked(out))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut val = f64::NEG_INFINITY;
        for ((i, j), &v) in self.values.indexed_iter() {
            if v > val {
                val = v;
                best = (i, j);
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &GridField) -> f64 {
        Zip::from(&self.values).and(&other.values).fold(0.0f64, |m, &a, &b| m.max((a - b).abs()))
    }

    /// Values on the outermost ring of grid points, each point once.
    fn ring(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        let v = &self.values;
        let sides = (0..n).flat_map(move |k| [v[[k, 0]], v[[k, n - 1]]]);
        let caps = (1..n - 1).flat_map(move |k| [v[[0, k]], v[[n - 1, k]]]);
        sides.chain(caps)
    }

    /// Mean over the outermost ring of grid points.
    pub fn ring_mean(&self) -> f64 {
        let (sum, count) = self.ring().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        sum / count as f64
    }

    pub fn ring_max(&self) -> f64 {
        self.ring().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation; `None` outside the closed domain.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        let l = self.half_width;
        let slack = 1e-9 * self.h;
        if x < -l - slack || x > l + slack || y < -l - slack || y > l + slack {
            return None;
        }
        Some(self.sample_clamped(x, y))
    }

    /// Bilinear interpolation with coordinates clamped into the domain.
    pub fn sample_clamped(&self, x: f64, y: f64) -> f64 {
        let n = self.n();
        let fx = ((x + self.half_width) / self.h).clamp(0.0, (n - 1) as f64);
        let fy = ((y + self.half_width) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (fx.floor() as usize).min(n - 2);
        let j = (fy.floor() as usize).min(n - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v = &self.values;
        (1.0 - tx) * ((1.0 - ty) * v[[i, j]] + ty * v[[i, j + 1]]) + tx * ((1.0 - ty) * v[[i + 1, j]] + ty * v[[i + 1, j + 1]])
    }
}

/// Pair of grid fields on the same geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldGrid {
    pub x: GridField,
    pub y: GridField,
}

impl VectorFieldGrid {
    pub fn new(x: GridField, y: GridField) -> Result<Self> {
        if !x.same_grid(&y) {
            return Err(LabError::GridMismatch);
        }
        Ok(Self { x, y })
    }

    pub fn magnitude(&self) -> GridField {
        self.x.zip_map(&self.y, f64::hypot).expect("components share a grid")
    }

    pub fn squared_norm(&self) -> GridField {
        self.x.zip_map(&self.y, |a, b| a * a + b * b).expect("components share a grid")
    }

    /// Rotation by +90 degrees: `(a, b) -> (-b, a)`.
    pub fn perp(&self) -> Self {
        Self { x: self.y.map(|v| -v), y: self.x.clone() }
    }

    pub fn dot(&self, other: &VectorFieldGrid) -> Result<GridField> {
        let a = self.x.zip_map(&other.x, |p, q| p * q)?;
        let b = self.y.zip_map(&other.y, |p, q| p * q)?;
        a.zip_map(&b, |p, q| p + q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_and_validation() {
        let f = GridField::from_fn(1.0, 17, |x, y| x + 2.0 * y).unwrap();
        assert_eq!(f.n(), 17);
        assert!((f.h() - 0.125).abs() < 1e-15);
        assert_eq!(f.coord(0), -1.0);
        assert_eq!(f.coord(16), 1.0);
        assert!((f.get(16, 8) - 1.0).abs() < 1e-15);
        assert!(GridField::from_fn(1.0, 8, |_, _| 0.0).is_err());
        assert!(GridField::from_fn(1.0, 17, |x, _| 1.0 / x).is_err());
    }

    #[test]
    fn bilinear_is_exact_for_bilinear_functions() {
        let f = GridField::from_fn(2.0, 33, |x, y| 1.0 + x - 3.0 * y + 0.5 * x * y).unwrap();
        for &(x, y) in &[(0.31, -1.7), (1.99, 2.0), (-2.0, -2.0), (0.0, 0.123)] {
            let exact = 1.0 + x - 3.0 * y + 0.5 * x * y;
            assert!((f.sample(x, y).unwrap() - exact).abs() < 1e-12);
        }
        assert!(f.sample(2.1, 0.0).is_none());
    }

    #[test]
    fn ring_statistics() {
        let f = GridField::from_fn(1.0, 16, |x, y| x.abs().max(y.abs())).unwrap();
        assert!((f.ring_mean() - 1.0).abs() < 1e-12);
        assert!((f.ring_max() - 1.0).abs() < 1e-12);
        let g = GridField::from_fn(1.0, 16, |x, _| x).unwrap();
        assert!(g.ring_mean().abs() < 1e-12);
        assert_eq!(g.ring_max(), 1.0);
    }
}
