//! The Gaussian vortex: velocity, vorticity, Bernoulli function and
//! pressure from the stream function, with Euler residuals and the
//! stagnation and symmetry diagnostics.
//!
//! `cargo run --release --example gaussian_vortex`

use steiner_lab::case::{build_flow_case, CaseKind, GridSpec};
use steiner_lab::euler::{derive_fields, euler_residuals, local_symmetry_detect, stagnation_analysis};
use steiner_lab::field::{dirichlet_energy, integrate, Region};

fn main() -> steiner_lab::Result<()> {
    let case = build_flow_case(&CaseKind::GaussianVortex { center: [0.0, 0.0] }, Some(GridSpec { half_width: 8.0, n: 513 }))?;
    let u = case.grid()?;
    let fields = derive_fields(&case)?;
    let (summary, records) = euler_residuals(&fields);

    println!("energy            {:.6}  (pi = {:.6})", dirichlet_energy(u), std::f64::consts::PI);
    println!("max speed         {:.6}", fields.v.magnitude().max());
    println!("total vorticity   {:.2e}", integrate(&fields.omega, Region::All)?);
    println!("B(0)              {:.6}", fields.bernoulli.sample(0.0, 0.0).unwrap_or(f64::NAN));
    println!(
        "residuals         momentum {:.2e}, divergence {:.2e}, bernoulli {:.2e} (tol {:.2e})",
        summary.momentum, summary.divergence, summary.bernoulli, summary.tolerance
    );
    for r in &records {
        println!("  {:<28} {}", r.name, if r.passed { "pass" } else { "FAIL" });
    }

    let stag = stagnation_analysis(u, &fields.v.magnitude())?;
    println!("stagnation        {} interior component(s), tol_v {:.2e}", stag.components.len(), stag.tol_v);
    let sym = local_symmetry_detect(u, &stag)?;
    println!(
        "symmetry          {:?} about ({:.3}, {:.3}), {:.0}% radial radii",
        sym.classification,
        sym.center[0],
        sym.center[1],
        100.0 * sym.radial_fraction
    );
    Ok(())
}
