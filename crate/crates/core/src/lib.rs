//! Continuous Steiner symmetrization and diagnostics for steady planar
//! Euler flows.
//!
//! [`interval`] flows finite unions of intervals exactly. [`steiner`] lifts
//! that flow to grid functions through their superlevel sets, and
//! [`verify`] turns the rearrangement inequalities into pass/fail
//! [`report::CheckRecord`]s. [`euler`] derives velocity, vorticity, pressure
//! and the Bernoulli function from a stream function and runs the circle
//! scans, level-curve and stagnation analyses on it. [`scenario`] drives all
//! of this from a JSON file, which is what the `steiner-lab` binary does.
//!
//! ```
//! use steiner_lab::interval::{flow_set, next_merge_time, Interval, IntervalSet};
//!
//! let set = IntervalSet::new(vec![Interval::new(-3.0, -1.0)?, Interval::new(1.0, 3.0)?])?;
//! let merge = next_merge_time(&set).unwrap();
//! assert!((merge.time - 2f64.ln()).abs() < 1e-12);
//! assert_eq!(flow_set(&set, f64::INFINITY).len(), 1);
//! # Ok::<(), steiner_lab::LabError>(())
//! ```

pub mod case;
pub mod error;
pub mod euler;
pub mod field;
pub mod interval;
pub mod quad1d;
pub mod report;
pub mod scenario;
pub mod steiner;
pub mod verify;

pub use error::{LabError, Result};
