//! Finite-difference estimate of the first variation J(t) of the energy
//! functional along the symmetrization flow, for a centred and a shifted
//! Gaussian vortex.
//!
//! `cargo run --release --example j_derivative`

use std::f64::consts::PI;

use steiner_lab::case::{build_flow_case, CaseKind, GridSpec};
use steiner_lab::verify::j_derivative_test;

fn main() -> steiner_lab::Result<()> {
    let t_list = [1e-3, 1e-2, 1e-1];
    for s in [0.0, 0.5] {
        let case = build_flow_case(&CaseKind::GaussianVortex { center: [s, 0.0] }, Some(GridSpec { half_width: 8.0, n: 513 }))?;
        println!("vortex centred at ({s}, 0)");
        for r in j_derivative_test(&case, &t_list, [1.0, 0.0], 256)? {
            println!("  {:<32} {:>11.4e}  bound {:>10.4e}  {}", r.name, r.lhs, r.rhs, if r.passed { "ok" } else { "FAIL" });
        }
        for t in t_list {
            // leading-order value of J/t for a shifted radial vortex
            println!("  closed form J/t at t = {t}: {:.4e}", -PI * s * s * (1.0 - (-t).exp()).powi(2) / (2.0 * t));
        }
    }
    Ok(())
}
