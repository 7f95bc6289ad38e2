//! Uniform-grid scalar fields on `[-L, L]^2` and the numerical plumbing
//! around them.

pub mod contour;
pub mod diff;
pub mod grid;
pub mod io;
pub mod quad;
pub mod rotate;
pub mod trace;

pub use contour::{extract_contours, ContourSet, Polyline};
pub use diff::{curl, divergence, gradient, laplacian, lipschitz, partial, perp_gradient, Axis};
pub use grid::{GridField, VectorFieldGrid};
pub use io::{read_grid, write_grid, Payload};
pub use quad::{dirichlet_energy, integrate, l1_norm, l2_norm, Region};
pub use rotate::rotate_resample;
pub use trace::{circle_trace, circle_trace_auto, default_samples, radial_profile, CircleTrace, RadialProfile};
