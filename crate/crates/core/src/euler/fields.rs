use serde::Serialize;

use crate::case::FlowCase;
use crate::error::Result;
use crate::field::{gradient, laplacian, partial, Axis, GridField, VectorFieldGrid};
use crate::report::{CheckRecord, Comparison};

use super::anchors;

/// Velocity, vorticity, Bernoulli function and pressure of a stream function.
#[derive(Debug, Clone)]
pub struct DerivedFields {
    pub v: VectorFieldGrid,
    pub omega: GridField,
    pub bernoulli: GridField,
    pub pressure: GridField,
}

/// `v = (∇u)^perp`, `ω = Δu`, `B = -F(u)`, `p = B - |v|^2 / 2`.
pub fn derive_fields_with(u: &GridField, primitive: impl Fn(f64) -> f64) -> DerivedFields {
    let v = gradient(u).perp();
    let omega = laplacian(u);
    let bernoulli = u.map(|w| -primitive(w));
    let pressure = bernoulli.zip_map(&v.squared_norm(), |b, s| b - 0.5 * s).expect("same grid");
    DerivedFields { v, omega, bernoulli, pressure }
}

/// [`derive_fields_with`] using the case grid and primitive.
pub fn derive_fields(case: &FlowCase) -> Result<DerivedFields> {
    let u = case.grid()?;
    let nl = case.nonlinearity()?;
    Ok(derive_fields_with(u, |w| nl.primitive(w)))
}

/// Sup norms of the three steady-flow residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    /// `|v·∇v + ∇p|`
    pub momentum: f64,
    /// `|div v|`
    pub divergence: f64,
    /// `|∇B + ω v^perp|`
    pub bernoulli: f64,
    /// Tolerance `C h^2 S` shared by the three records.
    pub tolerance: f64,
}

/// Cells excluded next to the grid boundary.
pub const RESIDUAL_MARGIN: usize = 3;

/// Residual constant in `C h^2 S`.
pub const RESIDUAL_CONSTANT: f64 = 2.0;

fn interior_sup(f: &GridField, margin: usize) -> f64 {
    let n = f.n();
    let mut m = 0.0f64;
    for i in margin..n - margin {
        for j in margin..n - margin {
            m = m.max(f.get(i, j).abs());
        }
    }
    m
}

fn max_abs(f: &GridField) -> f64 {
    f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Residuals of the momentum equation, incompressibility and the Bernoulli
/// form, over the interior minus a 3-cell margin.
///
/// The tolerance is `C h^2 S` with `S = D3 (1 + |v|) + D2^2`, where `D2`
/// and `D3` bound the first and second derivatives of `v` (estimated by
/// differencing `v`) and `C = 2`.
pub fn euler_residuals(fields: &DerivedFields) -> (ResidualSummary, Vec<CheckRecord>) {
    let DerivedFields { v, omega, bernoulli, pressure } = fields;
    let h = omega.h();
    let (v1x, v1y) = (partial(&v.x, Axis::X1), partial(&v.x, Axis::X2));
    let (v2x, v2y) = (partial(&v.y, Axis::X1), partial(&v.y, Axis::X2));
    let (px, py) = (partial(pressure, Axis::X1), partial(pressure, Axis::X2));
    let (bx, by) = (partial(bernoulli, Axis::X1), partial(bernoulli, Axis::X2));

    let n = omega.n();
    let mut mom = omega.constant_like(0.0).into_values();
    let mut div = mom.clone();
    let mut e2 = mom.clone();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (v.x.get(i, j), v.y.get(i, j));
            let r1 = a * v1x.get(i, j) + b * v1y.get(i, j) + px.get(i, j);
            let r2 = a * v2x.get(i, j) + b * v2y.get(i, j) + py.get(i, j);
            mom[[i, j]] = r1.hypot(r2);
            div[[i, j]] = v1x.get(i, j) + v2y.get(i, j);
            // v^perp = (-v2, v1)
            let w = omega.get(i, j);
            e2[[i, j]] = (bx.get(i, j) - w * b).hypot(by.get(i, j) + w * a);
        }
    }
    let sup = |a| interior_sup(&omega.with_values(a).expect("same shape"), RESIDUAL_MARGIN);

    let d2 = [&v1x, &v1y, &v2x, &v2y].iter().map(|g| max_abs(g)).fold(0.0, f64::max);
    let d3 = [
        partial(&v1x, Axis::X1),
        partial(&v1y, Axis::X2),
        partial(&v2x, Axis::X1),
        partial(&v2y, Axis::X2),
        partial(&v1x, Axis::X2),
        partial(&v2x, Axis::X2),
    ]
    .iter()
    .map(max_abs)
    .fold(0.0, f64::max);
    let speed = max_abs(&v.magnitude());
    let scale = d3 * (1.0 + speed) + d2 * d2;
    let tolerance = RESIDUAL_CONSTANT * h * h * scale;

    let summary = ResidualSummary { momentum: sup(mom), divergence: sup(div), bernoulli: sup(e2), tolerance };
    let record = |name: &str, value: f64| {
        CheckRecord::check(name, anchors::EULER, Comparison::AtMost, value, 0.0, tolerance)
            .with_meta("tolerance", "2 h^2 (D3 (1 + max|v|) + D2^2)")
            .with_meta("margin_cells", RESIDUAL_MARGIN)
    };
    let records = vec![
        record("euler.momentum_residual", summary.momentum),
        record("euler.divergence_residual", summary.divergence),
        record("euler.bernoulli_residual", summary.bernoulli),
    ];
    (summary, records)
}
