//! Named steady-flow scenarios: a stream function on a grid and/or a radial
//! profile, optionally with the nonlinearity `f` (`-Δu = f(u)`) and its
//! primitive `F`, normalised by `F(L) = 0` at the far-field value `L`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{read_grid, GridField, RadialProfile};
use crate::quad1d::bisect;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nonlinearity `f` together with a primitive `F`.
#[derive(Clone)]
pub struct Nonlinearity {
    pub label: String,
    f: RealFn,
    primitive: RealFn,
    /// Value range on which `f` is meaningful.
    pub domain: (f64, f64),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("Nonlinearity").field("label", &self.label).field("domain", &self.domain).finish()
    }
}

/// `f(w) = 2w(1 + ln w)`, extended by zero for `w <= 0`.
pub fn gaussian_f(w: f64) -> f64 {
    if w > 0.0 {
        2.0 * w * (1.0 + w.ln())
    } else {
        0.0
    }
}

/// `F(w) = w^2 (1/2 + ln w)`, extended by zero for `w <= 0`.
pub fn gaussian_primitive(w: f64) -> f64 {
    if w > 0.0 {
        w * w * (0.5 + w.ln())
    } else {
        0.0
    }
}

impl Nonlinearity {
    pub fn new(
        label: impl Into<String>,
        domain: (f64, f64),
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        primitive: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), f: Arc::new(f), primitive: Arc::new(primitive), domain }
    }

    /// The nonlinearity of the Gaussian vortex `u = e^{-r^2/2}`.
    pub fn gaussian() -> Self {
        Self::new("gaussian", (0.0, 1.0), gaussian_f, gaussian_primitive)
    }

    /// Piecewise-linear `f` through `(c_k, f_k)`, constant outside the table,
    /// with the primitive anchored by `F(c_0) = 0`.
    pub fn from_table(c: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let table = RadialProfile::new(c, f).map_err(|e| LabError::InvalidParameter(format!("f table: {e}")))?;
        if table.len() < 2 {
            return Err(LabError::InvalidParameter("f table needs at least two rows".into()));
        }
        let mut cumulative = vec![0.0];
        for k in 1..table.len() {
            let dc = table.r[k] - table.r[k - 1];
            cumulative.push(cumulative[k - 1] + 0.5 * dc * (table.values[k] + table.values[k - 1]));
        }
        let domain = (table.r[0], table.r[table.len() - 1]);
        let f_table = table.clone();
        let primitive = move |w: f64| {
            let (c, v) = (&table.r, &table.values);
            let last = c.len() - 1;
            if w <= c[0] {
                return v[0] * (w - c[0]);
            }
            if w >= c[last] {
                return cumulative[last] + v[last] * (w - c[last]);
            }
            let k = c.partition_point(|&s| s <= w) - 1;
            let s = w - c[k];
            let slope = (v[k + 1] - v[k]) / (c[k + 1] - c[k]);
            cumulative[k] + v[k] * s + 0.5 * slope * s * s
        };
        Ok(Self::new("table", domain, move |w| f_table.eval(w), primitive))
    }

    /// Same `f`, primitive shifted by `constant`.
    pub fn with_primitive_shift(&self, constant: f64) -> Self {
        let p = self.primitive.clone();
        Self { label: format!("{}+{constant}", self.label), f: self.f.clone(), primitive: Arc::new(move |w| p(w) + constant), domain: self.domain }
    }

    #[inline]
    pub fn f(&self, w: f64) -> f64 {
        (self.f)(w)
    }

    #[inline]
    pub fn primitive(&self, w: f64) -> f64 {
        (self.primitive)(w)
    }

    /// Largest relative gap between `F'` (central difference) and `f` on
    /// `samples` points inside the domain, away from its ends.
    pub fn primitive_mismatch(&self, samples: usize) -> f64 {
        let (a, b) = self.domain;
        let (lo, hi) = (a + 0.05 * (b - a), b - 0.05 * (b - a));
        let d = 1e-5 * (b - a);
        (0..samples)
            .map(|k| {
                let w = lo + (hi - lo) * k as f64 / (samples - 1).max(1) as f64;
                let fd = (self.primitive(w + d) - self.primitive(w - d)) / (2.0 * d);
                (fd - self.f(w)).abs() / (1.0 + self.f(w).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Analytic radial stream function `u(r)` with derivative, about `center`.
#[derive(Clone)]
pub struct RadialModel {
    pub center: [f64; 2],
    pub r_max: f64,
    u: RealFn,
    du: RealFn,
}

impl fmt::Debug for RadialModel {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("RadialModel").field("center", &self.center).field("r_max", &self.r_max).finish()
    }
}

impl RadialModel {
    pub fn new(
        center: [f64; 2],
        r_max: f64,
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { center, r_max, u: Arc::new(u), du: Arc::new(du) }
    }

    #[inline]
    pub fn u(&self, r: f64) -> f64 {
        (self.u)(r)
    }

    #[inline]
    pub fn du(&self, r: f64) -> f64 {
        (self.du)(r)
    }

    pub fn profile(&self, radii: &[f64]) -> Result<RadialProfile> {
        RadialProfile::new(radii.to_vec(), radii.iter().map(|&r| self.u(r)).collect())
    }
}

/// Far-field behaviour of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Finite(f64),
    NegInfinity,
    /// `u` has no limit at infinity.
    None,
}

impl Limit {
    pub fn value(self) -> Option<f64> {
        match self {
            Limit::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Nonlinearity given in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FSpec {
    Gaussian,
    Table { c: Vec<f64>, f: Vec<f64> },
}

impl FSpec {
    pub fn build(&self) -> Result<Nonlinearity> {
        match self {
            FSpec::Gaussian => Ok(Nonlinearity::gaussian()),
            FSpec::Table { c, f } => Nonlinearity::from_table(c.clone(), f.clone()),
        }
    }
}

fn default_u0() -> f64 {
    1.0
}

fn default_r_max() -> f64 {
    1e8
}

fn default_width() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseKind {
    /// `u = e^{-|x - center|^2 / 2}`.
    GaussianVortex {
        #[serde(default)]
        center: [f64; 2],
    },
    /// Radial solution of `u'' + u'/r + f(u) = 0`, `u(0) = u0`, `u'(0) = 0`.
    RadialFromF {
        #[serde(default = "default_u0")]
        u0: f64,
        f: FSpec,
    },
    /// `u = -(log(2 + r^2))^alpha`.
    LogUnbounded { alpha: f64 },
    /// `u = cos((log(2 + r^2))^alpha)`, radial profile only.
    OscillatingCounterexample {
        alpha: f64,
        #[serde(default = "default_r_max")]
        r_max: f64,
    },
    /// `u = e^{-|x - q|^2} + e^{-|x + q|^2}`.
    TwoBump { q: [f64; 2] },
    /// `u = e^{-|x - center|^2 / width^2}`, no associated `f`.
    GaussianBump {
        center: [f64; 2],
        #[serde(default = "default_width")]
        width: f64,
    },
    /// `u = max(0, 1 - |x - center|^2 / radius^2)^2`.
    CompactBump {
        center: [f64; 2],
        #[serde(default = "default_width")]
        radius: f64,
    },
    /// `u = x1`, a field whose gradient is not square integrable.
    Linear,
    /// Grid file plus JSON sidecar (default: the grid path with `.json`
    /// appended).
    FromFile {
        path: PathBuf,
        #[serde(default)]
        sidecar: Option<PathBuf>,
    },
}

/// Grid geometry of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct FlowCase {
    pub name: String,
    pub kind: CaseKind,
    pub grid: Option<GridField>,
    pub radial: Option<RadialModel>,
    pub nonlinearity: Option<Nonlinearity>,
    pub limit: Limit,
    pub analytic_refs: BTreeMap<String, f64>,
    /// Radius outside which the vorticity is assumed free of local extrema.
    pub h_ball: Option<f64>,
}

impl FlowCase {
    pub fn grid(&self) -> Result<&GridField> {
        self.grid.as_ref().ok_or_else(|| LabError::MissingGrid(self.name.clone()))
    }

    pub fn nonlinearity(&self) -> Result<&Nonlinearity> {
        self.nonlinearity.as_ref().ok_or_else(|| LabError::MissingNonlinearity(self.name.clone()))
    }

    /// Replace the grid by `u` (e.g. a perturbed copy), keeping metadata.
    pub fn with_grid(&self, u: GridField) -> Self {
        Self { grid: Some(u), ..self.clone() }
    }

    fn bare(name: &str, kind: &CaseKind, limit: Limit) -> Self {
        Self {
            name: name.to_string(),
            kind: kind.clone(),
            grid: None,
            radial: None,
            nonlinearity: None,
            limit,
            analytic_refs: BTreeMap::new(),
            h_ball: None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(LabError::InvalidParameter(format!("alpha must lie in (0, 1/2), got {alpha}")))
    }
}

fn need_grid(spec: Option<GridSpec>, kind: &str) -> Result<GridSpec> {
    spec.ok_or_else(|| LabError::MissingGrid(kind.to_string()))
}

fn radial_grid(model: &RadialModel, spec: GridSpec) -> Result<GridField> {
    let [cx, cy] = model.center;
    GridField::from_fn(spec.half_width, spec.n, |x, y| model.u((x - cx).hypot(y - cy)))
}

/// `psi(r) = (log(2 + r^2))^alpha`, stable for very large `r`.
pub fn counterexample_psi(r: f64, alpha: f64) -> f64 {
    let log_term = if r > 1e150 { 2.0 * r.ln() + (2.0 / (r * r)).ln_1p() } else { (2.0 + r * r).ln() };
    log_term.powf(alpha)
}

/// `u(r) = cos(psi(r))` of the oscillating counterexample.
pub fn counterexample_u(r: f64, alpha: f64) -> f64 {
    counterexample_psi(r, alpha).cos()
}

/// `u'(r) = -sin(psi) alpha log(2 + r^2)^(alpha - 1) 2r / (2 + r^2)`.
pub fn counterexample_du(r: f64, alpha: f64) -> f64 {
    let log_term = (2.0 + r * r).ln();
    -counterexample_psi(r, alpha).sin() * alpha * log_term.powf(alpha - 1.0) * 2.0 * r / (2.0 + r * r)
}

/// Closed-form radius where `psi = k pi`: `sqrt(e^{(k pi)^{1/alpha}} - 2)`.
pub fn counterexample_radius(alpha: f64, k: u32) -> f64 {
    ((k as f64 * PI).powf(1.0 / alpha).exp() - 2.0).sqrt()
}

/// The same radius found by bisection on `psi(r) = k pi` in `log r`.
pub fn counterexample_radius_bisect(alpha: f64, k: u32) -> f64 {
    let target = k as f64 * PI;
    let s = bisect(|s: f64| counterexample_psi(s.exp(), alpha) - target, 0.0, 700.0);
    s.exp()
}

/// Hermite interpolation of samples `(r_k, u_k, u'_k)` on a uniform grid.
struct HermiteTable {
    dr: f64,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl HermiteTable {
    fn locate(&self, r: f64) -> (usize, f64) {
        let last = self.u.len() - 1;
        let x = (r / self.dr).clamp(0.0, last as f64);
        let k = (x.floor() as usize).min(last - 1);
        (k, x - k as f64)
    }

    fn u(&self, r: f64) -> f64 {
        let (k, s) = self.locate(r);
        let (h00, h10, h01, h11) = ((1.0 + 2.0 * s) * (1.0 - s).powi(2), s * (1.0 - s).powi(2), s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        h00 * self.u[k] + h10 * self.dr * self.du[k] + h01 * self.u[k + 1] + h11 * self.dr * self.du[k + 1]
    }

    fn du(&self, r: f64) -> f64 {
        let (k, s) = self.locate(r);
        let (g00, g10, g01, g11) = (6.0 * s * (s - 1.0), (1.0 - s) * (1.0 - 3.0 * s), 6.0 * s * (1.0 - s), s * (3.0 * s - 2.0));
        (g00 * self.u[k] + g01 * self.u[k + 1]) / self.dr + g10 * self.du[k] + g11 * self.du[k + 1]
    }
}

/// Integrate `u'' + u'/r + f(u) = 0` from `u(0) = u0`, `u'(0) = 0` to
/// `r_end` with classical RK4 at step `dr`. The first step uses the series
/// `u = u0 - f(u0) r^2 / 4`, `u' = -f(u0) r / 2`.
pub fn solve_radial(nl: &Nonlinearity, u0: f64, r_end: f64, dr: f64) -> Result<RadialModel> {
    if !(dr > 0.0 && r_end > dr) {
        return Err(LabError::InvalidParameter(format!("bad radial step {dr} for range {r_end}")));
    }
    let steps = (r_end / dr).ceil() as usize;
    let f0 = nl.f(u0);
    let mut u = vec![u0, u0 - 0.25 * f0 * dr * dr];
    let mut du = vec![0.0, -0.5 * f0 * dr];
    let rhs = |r: f64, y: [f64; 2]| [y[1], -y[1] / r - nl.f(y[0])];
    for k in 1..steps {
        let r = k as f64 * dr;
        let y = [u[k], du[k]];
        let k1 = rhs(r, y);
        let k2 = rhs(r + 0.5 * dr, [y[0] + 0.5 * dr * k1[0], y[1] + 0.5 * dr * k1[1]]);
        let k3 = rhs(r + 0.5 * dr, [y[0] + 0.5 * dr * k2[0], y[1] + 0.5 * dr * k2[1]]);
        let k4 = rhs(r + dr, [y[0] + dr * k3[0], y[1] + dr * k3[1]]);
        let next = [y[0] + dr / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]), y[1] + dr / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])];
        if !(next[0].is_finite() && next[1].is_finite()) || next[0].abs() > 1e12 {
            return Err(LabError::OdeBlowUp { r: r + dr });
        }
        u.push(next[0]);
        du.push(next[1]);
    }
    let table = Arc::new(HermiteTable { dr, u, du });
    let t2 = table.clone();
    Ok(RadialModel::new([0.0, 0.0], steps as f64 * dr, move |r| table.u(r), move |r| t2.du(r)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    name: String,
    #[serde(default)]
    f_table: Option<FTable>,
    #[serde(rename = "L_expected")]
    l_expected: serde_json::Value,
    #[serde(rename = "H_ball", default)]
    h_ball: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FTable {
    c: Vec<f64>,
    f: Vec<f64>,
}

fn parse_limit(v: &serde_json::Value, path: &Path) -> Result<Limit> {
    match v {
        serde_json::Value::Number(n) => Ok(Limit::Finite(n.as_f64().unwrap_or(f64::NAN))),
        serde_json::Value::String(s) if s == "-inf" => Ok(Limit::NegInfinity),
        serde_json::Value::Null => Ok(Limit::None),
        other => Err(LabError::Format { path: path.to_path_buf(), msg: format!("L_expected must be a number, \"-inf\" or null, got {other}") }),
    }
}

fn load_from_file(kind: &CaseKind, path: &Path, sidecar: Option<&Path>) -> Result<FlowCase> {
    let grid = read_grid(path)?;
    let sidecar_path = sidecar.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = path.as_os_str().to_owned();
        p.push(".json");
        PathBuf::from(p)
    });
    let text = std::fs::read_to_string(&sidecar_path)?;
    let meta: Sidecar = serde_json::from_str(&text)
        .map_err(|e| LabError::Format { path: sidecar_path.clone(), msg: format!("line {}, column {}: {e}", e.line(), e.column()) })?;
    let mut case = FlowCase::bare(&meta.name, kind, parse_limit(&meta.l_expected, &sidecar_path)?);
    case.h_ball = meta.h_ball;
    if let Some(t) = meta.f_table {
        case.nonlinearity = Some(Nonlinearity::from_table(t.c, t.f)?);
    }
    case.grid = Some(grid);
    Ok(case)
}

/// Build a flow case. `grid` is required for every kind except the
/// one-dimensional counterexample and file input.
pub fn build_flow_case(kind: &CaseKind, grid: Option<GridSpec>) -> Result<FlowCase> {
    match kind {
        CaseKind::GaussianVortex { center } => {
            let spec = need_grid(grid, "gaussian_vortex")?;
            let mut case = FlowCase::bare("gaussian_vortex", kind, Limit::Finite(0.0));
            let model = RadialModel::new(*center, f64::INFINITY, |r| (-0.5 * r * r).exp(), |r| -r * (-0.5 * r * r).exp());
            case.grid = Some(radial_grid(&model, spec)?);
            case.radial = Some(model);
            case.nonlinearity = Some(Nonlinearity::gaussian());
            case.h_ball = Some(2.0);
            case.analytic_refs = BTreeMap::from([
                ("energy".to_string(), PI),
                ("f_at_max".to_string(), 2.0),
                ("bernoulli_at_center".to_string(), -0.5),
                ("max_speed".to_string(), (-0.5f64).exp()),
                ("total_vorticity".to_string(), 0.0),
                ("total_bernoulli".to_string(), 0.0),
            ]);
            Ok(case)
        }
        CaseKind::RadialFromF { u0, f } => {
            let spec = need_grid(grid, "radial_from_f")?;
            let nl = f.build()?;
            let r_end = spec.half_width * std::f64::consts::SQRT_2 + 1.0;
            let dr = (spec.half_width / (spec.n as f64 * 8.0)).min(1e-3);
            let model = solve_radial(&nl, *u0, r_end, dr)?;
            let far = model.u(model.r_max);
            let mut case = FlowCase::bare("radial_from_f", kind, Limit::Finite(far));
            case.grid = Some(radial_grid(&model, spec)?);
            case.radial = Some(model);
            case.analytic_refs.insert("f_at_max".to_string(), nl.f(*u0));
            case.nonlinearity = Some(nl);
            Ok(case)
        }
        CaseKind::LogUnbounded { alpha } => {
            check_alpha(*alpha)?;
            let spec = need_grid(grid, "log_unbounded")?;
            let a = *alpha;
            let model = RadialModel::new(
                [0.0, 0.0],
                f64::INFINITY,
                move |r| -(2.0 + r * r).ln().powf(a),
                move |r| -a * (2.0 + r * r).ln().powf(a - 1.0) * 2.0 * r / (2.0 + r * r),
            );
            let mut case = FlowCase::bare("log_unbounded", kind, Limit::NegInfinity);
            case.grid = Some(radial_grid(&model, spec)?);
            case.radial = Some(model);
            Ok(case)
        }
        CaseKind::OscillatingCounterexample { alpha, r_max } => {
            check_alpha(*alpha)?;
            let a = *alpha;
            let mut case = FlowCase::bare("oscillating_counterexample", kind, Limit::None);
            case.radial = Some(RadialModel::new([0.0, 0.0], *r_max, move |r| counterexample_u(r, a), move |r| counterexample_du(r, a)));
            for k in 1..=3u32 {
                case.analytic_refs.insert(format!("stagnation_radius_{k}"), counterexample_radius(a, k));
            }
            Ok(case)
        }
        CaseKind::TwoBump { q } => {
            let spec = need_grid(grid, "two_bump")?;
            let [qx, qy] = *q;
            let mut case = FlowCase::bare("two_bump", kind, Limit::Finite(0.0));
            case.grid = Some(GridField::from_fn(spec.half_width, spec.n, |x, y| {
                (-((x - qx).powi(2) + (y - qy).powi(2))).exp() + (-((x + qx).powi(2) + (y + qy).powi(2))).exp()
            })?);
            Ok(case)
        }
        CaseKind::GaussianBump { center, width } => {
            let spec = need_grid(grid, "gaussian_bump")?;
            let ([cx, cy], w2) = (*center, width * width);
            let mut case = FlowCase::bare("gaussian_bump", kind, Limit::Finite(0.0));
            case.grid = Some(GridField::from_fn(spec.half_width, spec.n, |x, y| (-((x - cx).powi(2) + (y - cy).powi(2)) / w2).exp())?);
            Ok(case)
        }
        CaseKind::CompactBump { center, radius } => {
            let spec = need_grid(grid, "compact_bump")?;
            let ([cx, cy], r2) = (*center, radius * radius);
            let mut case = FlowCase::bare("compact_bump", kind, Limit::Finite(0.0));
            case.grid =
                Some(GridField::from_fn(spec.half_width, spec.n, |x, y| (1.0 - ((x - cx).powi(2) + (y - cy).powi(2)) / r2).max(0.0).powi(2))?);
            Ok(case)
        }
        CaseKind::Linear => {
            let spec = need_grid(grid, "linear")?;
            let mut case = FlowCase::bare("linear", kind, Limit::None);
            case.grid = Some(GridField::from_fn(spec.half_width, spec.n, |x, _| x)?);
            Ok(case)
        }
        CaseKind::FromFile { path, sidecar } => load_from_file(kind, path, sidecar.as_deref()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_nonlinearity_and_primitive() {
        let nl = Nonlinearity::gaussian();
        assert_eq!(nl.f(1.0), 2.0);
        assert_eq!(nl.primitive(1.0), 0.5);
        assert!(nl.primitive_mismatch(200) < 1e-8);
        let shifted = nl.with_primitive_shift(1.0);
        assert_eq!(shifted.primitive(1.0), 1.5);
        assert_eq!(shifted.f(0.3), nl.f(0.3));
    }

    #[test]
    fn table_primitive_matches_table() {
        let c: Vec<f64> = (0..=50).map(|k| 0.02 * k as f64).collect();
        let f: Vec<f64> = c.iter().map(|&w| 3.0 * w * w - 1.0).collect();
        let nl = Nonlinearity::from_table(c, f).unwrap();
        assert!(nl.primitive_mismatch(100) < 1e-8);
        // F(w) = w^3 - w with F(0) = 0, up to the piecewise-linear error
        assert!((nl.primitive(0.7) - (0.343 - 0.7)).abs() < 1e-3);
    }

    #[test]
    fn radial_ode_reproduces_gaussian() {
        let model = solve_radial(&Nonlinearity::gaussian(), 1.0, 6.0, 1e-3).unwrap();
        for k in 0..=400 {
            let r = 0.01 * k as f64;
            assert!((model.u(r) - (-r * r / 2.0).exp()).abs() <= 1e-5, "r={r}");
            assert!((model.du(r) + r * (-r * r / 2.0).exp()).abs() <= 1e-5, "r={r}");
        }
    }

    #[test]
    fn radial_ode_blow_up_is_reported() {
        let nl = Nonlinearity::new("cubic", (0.0, 10.0), |w| -w * w * w, |w| -w.powi(4) / 4.0);
        assert!(matches!(solve_radial(&nl, 3.0, 50.0, 1e-3), Err(LabError::OdeBlowUp { .. })));
    }

    #[test]
    fn gaussian_case_matches_stagnation_value() {
        let case = build_flow_case(&CaseKind::GaussianVortex { center: [0.0, 0.0] }, Some(GridSpec { half_width: 4.0, n: 129 })).unwrap();
        let u = case.grid().unwrap();
        let lap = crate::field::laplacian(u);
        let mid = 64;
        assert!((-lap.get(mid, mid) - case.nonlinearity().unwrap().f(1.0)).abs() < 0.01);
    }

    #[test]
    fn counterexample_radii() {
        let r1 = counterexample_radius(0.4, 1);
        assert!((r1 - 6.28e3).abs() < 10.0, "{r1}");
        for k in 1..=3 {
            let r = counterexample_radius(0.4, k);
            let b = counterexample_radius_bisect(0.4, k);
            assert!(((r - b) / r).abs() <= 1e-10, "k={k}: {r} vs {b}");
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((counterexample_u(r, 0.4) - sign).abs() <= 1e-6);
        }
    }

    #[test]
    fn alpha_range_enforced() {
        for alpha in [0.0, 0.5, 0.7] {
            assert!(build_flow_case(&CaseKind::LogUnbounded { alpha }, Some(GridSpec { half_width: 4.0, n: 33 })).is_err());
        }
    }

    #[test]
    fn case_kind_json() {
        let k: CaseKind = serde_json::from_str(r#"{"kind":"two_bump","q":[2,0]}"#).unwrap();
        assert_eq!(k, CaseKind::TwoBump { q: [2.0, 0.0] });
        assert!(serde_json::from_str::<CaseKind>(r#"{"kind":"two_bump","q":[2,0],"x":1}"#).is_err());
        let g: CaseKind = serde_json::from_str(r#"{"kind":"gaussian_vortex"}"#).unwrap();
        assert_eq!(g, CaseKind::GaussianVortex { center: [0.0, 0.0] });
    }
}
