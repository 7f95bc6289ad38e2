use ndarray::Array2;

use super::grid::GridField;

/// Bilinear resampling of `f ∘ R(-angle)`: the pattern of `f` rotated
/// counter-clockwise by `angle`.
///
/// Target points whose preimage falls outside `[-L, L]^2` take the mean of
/// the source's outermost ring, which stands in for the far-field value.
pub fn rotate_resample(f: &GridField, angle: f64) -> GridField {
    if angle == 0.0 {
        return f.clone();
    }
    let fill = f.ring_mean();
    let (s, c) = angle.sin_cos();
    let n = f.n();
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let (x, y) = (f.coord(i), f.coord(j));
        f.sample(c * x + s * y, -s * x + c * y).unwrap_or(fill)
    });
    f.with_values_unchecked(values)
}
