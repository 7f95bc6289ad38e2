//! Scenario files: a case, a grid, and the list of verifiers and scans to run
//! on it. A run produces a [`Report`] plus plot series and writes them to an
//! output directory.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::case::{build_flow_case, CaseKind, FlowCase, GridSpec};
use crate::error::{LabError, Result};
use crate::euler::{self, anchors as flow_anchors, linspace};
use crate::field::{dirichlet_energy, write_grid, GridField, Payload};
use crate::report::{CheckRecord, Comparison, PlotSeries, Report};
use crate::steiner::symmetrize_function;
use crate::verify;

/// Smallest grid accepted for flow diagnostics.
pub const MIN_EULER_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub case: CaseKind,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Seeded smooth perturbation added to the case grid.
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub symmetrization: SymmetrizationSpec,
    #[serde(default)]
    pub scans: ScanSpec,
    /// Steps to run; empty means every step the case supports.
    #[serde(default)]
    pub steps: Vec<Step>,
    /// Record-name patterns (trailing `*` = prefix) expected to fail.
    #[serde(default)]
    pub expect_fail: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: f64,
    #[serde(default = "default_bumps")]
    pub bumps: usize,
    #[serde(default = "default_bump_width")]
    pub width: f64,
}

fn default_bumps() -> usize {
    3
}

fn default_bump_width() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrizationSpec {
    #[serde(default = "default_t_list")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_directions")]
    pub directions: Vec<[f64; 2]>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// The energy derivative should vanish (the case is already symmetric).
    #[serde(default)]
    pub expect_symmetric: bool,
}

fn default_t_list() -> Vec<f64> {
    vec![0.1, 0.5, 2.0]
}

fn default_directions() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

fn default_levels() -> usize {
    256
}

impl Default for SymmetrizationSpec {
    fn default() -> Self {
        Self { t_list: default_t_list(), directions: default_directions(), levels: default_levels(), expect_symmetric: false }
    }
}

/// `count` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RangeSpec {
    /// Values rounded to 12 decimals so record names stay readable.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count).into_iter().map(|v| (v * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default)]
    pub radii: Option<RangeSpec>,
    /// Absolute levels of `u` for contours and `f` reconstruction.
    #[serde(default)]
    pub levels: Option<RangeSpec>,
    /// Annuli `(r1, r2)` for the annular-mean inequality.
    #[serde(default)]
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub formats: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Symmetrized grids for every time and direction, plus energies.
    Symmetrize,
    /// Rearrangement axioms, Pólya–Szegő, L2 continuity, truncation, J test.
    Verify,
    /// Derived fields, residuals, stagnation set and symmetry.
    Euler,
    /// Level curves and reconstruction of `f`.
    ReconstructF,
    Oscillation,
    Flux,
    Pohozaev,
    Annular,
    Asymptotics,
}

impl Step {
    pub const ALL: [Step; 9] = [
        Step::Symmetrize,
        Step::Verify,
        Step::Euler,
        Step::ReconstructF,
        Step::Oscillation,
        Step::Flux,
        Step::Pohozaev,
        Step::Annular,
        Step::Asymptotics,
    ];

    fn needs_grid(self) -> bool {
        self != Step::Asymptotics
    }

    fn needs_nonlinearity(self) -> bool {
        self == Step::Pohozaev
    }
}

impl Scenario {
    /// Parses a scenario; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| LabError::Config { line: e.line(), column: e.column(), msg: e.to_string() })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut s = Self::from_json(&text)?;
        // file cases resolve relative to the scenario file
        if let CaseKind::FromFile { path: grid, sidecar } = &mut s.case {
            let base = path.parent().unwrap_or(Path::new("."));
            if grid.is_relative() {
                *grid = base.join(&*grid);
            }
            if let Some(side) = sidecar.as_mut().filter(|p| p.is_relative()) {
                *side = base.join(&*side);
            }
        }
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config { line: 0, column: 0, msg });
        if self.symmetrization.t_list.iter().any(|t| !(*t >= 0.0)) {
            return bad("symmetrization.t_list must be nonnegative".into());
        }
        if self.symmetrization.directions.iter().any(|d| !(d[0].hypot(d[1]) > 0.0)) {
            return bad("symmetrization.directions must be nonzero".into());
        }
        if let Some(g) = self.grid {
            let euler_steps = self.steps.is_empty() || self.steps.iter().any(|s| *s != Step::Symmetrize && *s != Step::Verify);
            if euler_steps && g.n < MIN_EULER_N {
                return bad(format!("grid.n must be at least {MIN_EULER_N} for flow diagnostics, got {}", g.n));
            }
        }
        for r in [self.scans.radii, self.scans.levels].into_iter().flatten() {
            if r.count == 0 || !(r.start <= r.stop) {
                return bad(format!("bad range {r:?}"));
            }
        }
        Ok(())
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub plots: Vec<PlotSeries>,
    /// Symmetrized grids keyed by file stem.
    pub grids: Vec<(String, GridField)>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.report.all_acceptable() {
            0
        } else {
            2
        }
    }

    /// Writes `report.json`, `records.csv`, `plots/*.csv` and `grids/*.grid`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<()> {
        fs::create_dir_all(dir)?;
        if format.json() {
            self.report.write_json(&dir.join("report.json"))?;
        }
        if format.csv() {
            self.report.write_csv(&dir.join("records.csv"))?;
        }
        if !self.plots.is_empty() {
            fs::create_dir_all(dir.join("plots"))?;
            for p in &self.plots {
                p.write_csv(&dir.join("plots").join(format!("{}.csv", p.name)))?;
            }
        }
        if !self.grids.is_empty() {
            fs::create_dir_all(dir.join("grids"))?;
            for (stem, g) in &self.grids {
                write_grid(&dir.join("grids").join(format!("{stem}.grid")), g, Payload::F64le)?;
            }
        }
        Ok(())
    }
}

/// Adds `bumps` seeded Gaussians of random sign and height in
/// `[amplitude/2, amplitude]` centred in `[-L/2, L/2]^2`.
pub fn perturb(u: &GridField, p: &Perturbation, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * u.half_width();
    let bumps: Vec<(f64, f64, f64)> = (0..p.bumps)
        .map(|_| {
            let a = p.amplitude * rng.gen_range(0.5..=1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (a, rng.gen_range(-half..=half), rng.gen_range(-half..=half))
        })
        .collect();
    let w2 = p.width * p.width;
    u.map_with_coords(|x, y, v| v + bumps.iter().map(|&(a, cx, cy)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / w2).exp()).sum::<f64>())
}

/// Builds the case, runs the requested steps and collects records.
///
/// `steps` overrides the scenario's own list. Explicitly requested steps the
/// case cannot support are errors; with the default list they are skipped.
pub fn run_scenario(scenario: &Scenario, steps: Option<&[Step]>) -> Result<RunOutput> {
    let mut case = build_flow_case(&scenario.case, scenario.grid)?;
    if let (Some(p), Some(u)) = (&scenario.perturbation, &case.grid) {
        case = case.with_grid(perturb(u, p, scenario.seed));
    }
    let explicit: Vec<Step> = match steps {
        Some(s) => s.to_vec(),
        None => scenario.steps.clone(),
    };
    let plan: Vec<Step> = if explicit.is_empty() {
        Step::ALL
            .into_iter()
            .filter(|s| (!s.needs_grid() || case.grid.is_some()) && (!s.needs_nonlinearity() || case.nonlinearity.is_some()))
            .collect()
    } else {
        explicit
    };

    let mut out = RunOutput { report: Report::new(scenario.name.clone(), scenario.seed), plots: Vec::new(), grids: Vec::new() };
    for step in plan {
        run_step(step, scenario, &case, &mut out)?;
    }
    out.report.apply_expect_fail(&scenario.expect_fail);
    out.report.sort();
    Ok(out)
}

fn default_radii(u: &GridField) -> Vec<f64> {
    linspace(1.0, u.half_width() - 1.0, 25)
}

fn level_grid(u: &GridField) -> Vec<f64> {
    let top = u.max();
    (1..=9).map(|k| 0.1 * k as f64 * top).collect()
}

/// Radius of a ball holding the support of a nonnegative `u`, if it fits
/// inside the grid.
fn compact_support_radius(u: &GridField) -> Option<f64> {
    let top = u.max();
    let mut r = 0.0f64;
    for ((i, j), &v) in u.values().indexed_iter() {
        if v < 0.0 {
            return None;
        }
        if v > 1e-14 * top {
            r = r.max(u.coord(i).hypot(u.coord(j)));
        }
    }
    let r = r + 2.0 * u.h();
    (r <= u.half_width()).then_some(r)
}

fn direction_tag(d: [f64; 2]) -> String {
    format!("{}", d[1].atan2(d[0]).to_degrees().rem_euclid(180.0))
}

fn run_step(step: Step, sc: &Scenario, case: &FlowCase, out: &mut RunOutput) -> Result<()> {
    let sym = &sc.symmetrization;
    let k = sym.levels;
    match step {
        Step::Symmetrize => {
            let u = case.grid()?;
            let e0 = dirichlet_energy(u);
            for &dir in &sym.directions {
                let tag = direction_tag(dir);
                let mut energies = vec![(0.0, e0)];
                for &t in &sym.t_list {
                    let ut = symmetrize_function(u, t, dir, k)?;
                    energies.push((t, dirichlet_energy(&ut.field)));
                    let mut rec = verify::polya_szego_record(u, &ut);
                    rec.name = format!("{}.deg={tag}", rec.name);
                    out.report.records.push(rec.with_meta("max_level_gap", ut.max_level_gap));
                    out.grids.push((format!("symmetrized_deg={tag}_t={t}"), ut.field));
                }
                energies.sort_by(|a, b| a.0.total_cmp(&b.0));
                energies.dedup_by(|a, b| a.0 == b.0);
                out.plots.push(PlotSeries::new(&format!("energy_vs_t_deg={tag}"), "t", "dirichlet_energy", energies));
            }
        }
        Step::Verify => {
            let u = case.grid()?;
            let positive: Vec<f64> = sym.t_list.iter().copied().filter(|&t| t > 0.0).collect();
            let t = positive.first().copied().unwrap_or(0.0);
            let s = positive.get(1).copied().unwrap_or(t);
            let levels = match sc.scans.levels {
                Some(r) => r.values(),
                None => level_grid(u),
            };
            let nl = case.nonlinearity.as_ref();
            let prim = nl.map(|nl| move |w: f64| nl.primitive(w));
            let prim_ref: Option<&dyn Fn(f64) -> f64> = prim.as_ref().map(|f| f as &dyn Fn(f64) -> f64);
            out.report.extend(verify::verify_rearrangement_axioms(u, t, s, &levels, k, prim_ref)?);
            let support = compact_support_radius(u);
            for &t in &sym.t_list {
                out.report.records.push(verify::verify_polya_szego(u, t, k)?);
                if let Some(radius) = support {
                    out.report.records.push(verify::verify_l2_continuity(u, t, radius, k)?);
                }
            }
            let top = u.max();
            for frac in [0.25, 0.5, 0.75] {
                out.report.extend(verify::verify_truncation_algebra(u, frac * top, t, k)?);
            }
            if nl.is_some() {
                let dir = sym.directions.first().copied().unwrap_or([1.0, 0.0]);
                out.report.extend(verify::j_derivative_test(case, &[1e-3, 1e-2, 1e-1], dir, k)?);
            }
            out.report.records.push(verify::energy_derivative_test(u, &sym.t_list, &sym.directions, k, sym.expect_symmetric)?);
        }
        Step::Euler => {
            let u = case.grid()?;
            let fields = match &case.nonlinearity {
                Some(nl) => {
                    let fields = euler::derive_fields_with(u, |w| nl.primitive(w));
                    let (_, recs) = euler::euler_residuals(&fields);
                    out.report.extend(recs);
                    fields
                }
                None => euler::derive_fields_with(u, |_| 0.0),
            };
            let speed = fields.v.magnitude();
            let stag = euler::stagnation_analysis(u, &speed)?;
            out.report.records.push(
                CheckRecord::flag("stagnation.connected", flow_anchors::LEVEL_CURVES, stag.connected())
                    .with_meta("components", stag.components.len())
                    .with_meta("far_field_components", stag.far_field_components)
                    .with_meta("tol_v", stag.tol_v),
            );
            let symm = euler::local_symmetry_detect(u, &stag)?;
            let mut sym_rec = symm.record.clone();
            if let Some(center) = case.radial.as_ref().map(|m| m.center) {
                let off = (symm.center[0] - center[0]).hypot(symm.center[1] - center[1]);
                out.report.records.push(
                    CheckRecord::check("symmetry.center", flow_anchors::SYMMETRY, Comparison::AtMost, off, 0.0, u.h()).with_meta("tolerance", "h"),
                );
                sym_rec = sym_rec.with_meta("expected_center", format!("({}, {})", center[0], center[1]));
            }
            out.report.records.push(sym_rec);
            analytic_records(case, u, &fields, out);
        }
        Step::ReconstructF => {
            let u = case.grid()?;
            let levels = match sc.scans.levels {
                Some(r) => r.values(),
                None => level_grid(u),
            };
            match &case.nonlinearity {
                Some(nl) => {
                    let fields = euler::derive_fields_with(u, |w| nl.primitive(w));
                    let rec = euler::reconstruct_f(u, &fields, &levels)?;
                    let scale = rec.max_abs_f();
                    out.report.records.push(
                        CheckRecord::check(
                            "f_reconstruction.sup_error",
                            flow_anchors::LEVEL_CURVES,
                            Comparison::AtMost,
                            rec.compare(|w| nl.f(w)),
                            0.0,
                            0.02 * scale,
                        )
                        .with_meta("tolerance", "0.02 max|f|"),
                    );
                    let h = u.h();
                    out.report.records.push(
                        CheckRecord::check(
                            "f_reconstruction.at_max",
                            flow_anchors::LEVEL_CURVES,
                            Comparison::Near,
                            rec.at_max.1,
                            nl.f(rec.at_max.0),
                            2.0 * h * h * (1.0 + nl.f(rec.at_max.0).abs()),
                        )
                        .with_meta("tolerance", "2 h^2 (1 + |f(max u)|)"),
                    );
                    out.plots.push(PlotSeries::new("f_reconstructed", "c", "f", rec.levels.iter().map(|l| (l.c, l.f)).collect()));
                    out.report.extend(rec.records);
                }
                None => {
                    for &c in &levels {
                        out.report.extend(euler::contour_records(u, c).1);
                    }
                }
            }
        }
        Step::Oscillation => {
            let u = case.grid()?;
            let radii = sc.scans.radii.map_or_else(|| default_radii(u), |r| r.values());
            let scan = euler::oscillation_scan(u, &radii)?;
            out.plots.push(scan.plot());
            out.report.records.push(scan.record.with_meta("best_sequence_len", scan.best_sequence.len()));
        }
        Step::Flux => {
            let u = case.grid()?;
            let radii = sc.scans.radii.map_or_else(|| default_radii(u), |r| r.values());
            let scan = euler::boundary_scan(u, u, &radii)?;
            out.plots.push(scan.plot());
            out.report.extend(scan.records);
        }
        Step::Pohozaev => {
            let u = case.grid()?;
            let nl = case.nonlinearity()?;
            let radii = sc.scans.radii.map_or_else(|| default_radii(u), |r| r.values());
            let scan = euler::pohozaev_scan(case, &radii)?;
            out.plots.push(scan.plot());
            out.report.extend(scan.records);
            // shifting F by a constant must show up as ell = pi * shift
            let shifted = euler::pohozaev_scan_with(u, &|w| nl.primitive(w) + 1.0, &radii)?;
            out.report.records.push(
                CheckRecord::check("pohozaev.control_shifted_primitive", flow_anchors::POHOZAEV, Comparison::Near, shifted.ell, PI, 0.02 * PI)
                    .with_meta("meaning", "F + 1 gives Psi(R) ~ pi R^2"),
            );
        }
        Step::Annular => {
            let u = case.grid()?;
            let pairs = if sc.scans.pairs.is_empty() {
                let l = u.half_width();
                vec![(0.125 * l, 0.25 * l), (0.25 * l, 0.5 * l), (0.5 * l, 0.75 * l)]
            } else {
                sc.scans.pairs.clone()
            };
            out.report.extend(euler::annular_mean_check(u, &pairs)?);
        }
        Step::Asymptotics => {
            let rep = euler::asymptotics_report(case)?;
            out.report.extend(rep.records);
        }
    }
    Ok(())
}

/// Comparisons against the case's closed-form reference values.
fn analytic_records(case: &FlowCase, u: &GridField, fields: &euler::DerivedFields, out: &mut RunOutput) {
    let refs = &case.analytic_refs;
    let mut push = |name: &str, value: f64, rel: f64, abs: f64| {
        if let Some(&expected) = refs.get(name) {
            out.report.records.push(
                CheckRecord::check(format!("analytic.{name}"), flow_anchors::EULER, Comparison::Near, value, expected, rel * expected.abs() + abs)
                    .with_meta("relative_tolerance", rel)
                    .with_meta("absolute_tolerance", abs),
            );
        }
    };
    let h = u.h();
    push("energy", dirichlet_energy(u), 5e-3, 0.0);
    push("max_speed", fields.v.magnitude().max(), 0.0, 2.0 * h * h + 1e-3 * h);
    let (i, j) = u.argmax();
    push("bernoulli_at_center", fields.bernoulli.get(i, j), 0.0, 1e-12);
    let l1 = |g: &GridField| crate::field::l1_norm(g, crate::field::Region::All).unwrap_or(f64::NAN);
    let total = |g: &GridField| crate::field::integrate(g, crate::field::Region::All).unwrap_or(f64::NAN);
    push("total_vorticity", total(&fields.omega), 0.0, 1e-3 * l1(&fields.omega));
    push("total_bernoulli", total(&fields.bernoulli), 0.0, 1e-3 * l1(&fields.bernoulli));
}

/// Loads, runs and writes a scenario; returns the exit code.
pub fn run_file(
    path: &Path,
    out_dir: Option<&Path>,
    seed: Option<u64>,
    format: Option<OutputFormat>,
    steps: Option<&[Step]>,
) -> Result<(RunOutput, i32)> {
    let mut sc = Scenario::load(path)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    let dir = out_dir.map(Path::to_path_buf).or_else(|| sc.output.directory.clone()).unwrap_or_else(|| PathBuf::from("out").join(&sc.name));
    let run = run_scenario(&sc, steps)?;
    run.write(&dir, format.unwrap_or(sc.output.formats))?;
    let code = run.exit_code();
    Ok((run, code))
}
