//! Steady planar Euler flows generated by a stream function `u` with
//! `-Δu = f(u)`: derived fields, circle scans, level-curve reconstruction of
//! `f`, stagnation topology and far-field behaviour.

pub mod asymptotics;
pub mod fields;
pub mod scans;
pub mod topology;

pub use asymptotics::{asymptotics_report, counterexample_energy, AsymptoticsReport};
pub use fields::{derive_fields, derive_fields_with, euler_residuals, DerivedFields, ResidualSummary};
pub use scans::{
    annular_mean_check, boundary_scan, linspace, oscillation_scan, pohozaev_scan, pohozaev_scan_with, BoundaryScan, OscillationScan, PohozaevScan,
};
pub use topology::{
    contour_records, local_symmetry_detect, reconstruct_f, stagnation_analysis, FLevel, FReconstruction, StagnationAnalysis, StagnationComponent,
    SymmetryClass, SymmetryReport,
};

pub mod anchors {
    pub const EULER: &str = "euler-equations";
    pub const OSCILLATION: &str = "circle-oscillation";
    pub const GREEN: &str = "green-identity";
    pub const FLUX: &str = "weighted-flux";
    pub const ANNULAR: &str = "annular-mean";
    pub const POHOZAEV: &str = "pohozaev";
    pub const LEVEL_CURVES: &str = "level-curves";
    pub const SYMMETRY: &str = "local-symmetry";
    pub const ASYMPTOTICS: &str = "asymptotics";
    pub const COUNTEREXAMPLE: &str = "counterexample";
}
