//! Fields that must fail: two separated bumps (disconnected level sets,
//! several stagnation points, not radial), a linear field (no circle
//! oscillation decay), and a randomly perturbed vortex (Euler residuals).
//!
//! `cargo run --release --example negative_controls`

use steiner_lab::case::{build_flow_case, gaussian_primitive, CaseKind, GridSpec};
use steiner_lab::euler::{
    contour_records, derive_fields_with, euler_residuals, linspace, local_symmetry_detect, oscillation_scan, stagnation_analysis,
};
use steiner_lab::field::GridField;
use steiner_lab::scenario::{perturb, Perturbation};

fn main() -> steiner_lab::Result<()> {
    let two = build_flow_case(&CaseKind::TwoBump { q: [2.0, 0.0] }, Some(GridSpec { half_width: 6.0, n: 513 }))?;
    let u = two.grid()?;
    // no f for this field; the velocity does not depend on the primitive
    let fields = derive_fields_with(u, |_| 0.0);
    let stag = stagnation_analysis(u, &fields.v.magnitude())?;
    let sym = local_symmetry_detect(u, &stag)?;
    let (contours, _) = contour_records(u, 0.5);
    println!(
        "two bumps: {} stagnation components, {:?}, {} curves at c = 0.5",
        stag.components.len(),
        sym.classification,
        contours.connected_component_count
    );

    let lin = GridField::from_fn(8.0, 257, |x, _| x)?;
    let osc = oscillation_scan(&lin, &linspace(1.0, 7.0, 7))?;
    println!("linear: oscillation at R = 7 is {:.3} (tol {:.2e}), record {}", osc.oscillation[6], osc.tolerance, osc.record.passed);

    let vortex = GridField::from_fn(6.0, 257, |x, y| (-(x * x + y * y) / 2.0).exp())?;
    let noisy = perturb(&vortex, &Perturbation { amplitude: 0.05, bumps: 3, width: 0.5 }, 7);
    for (name, field) in [("clean", &vortex), ("perturbed", &noisy)] {
        let (summary, recs) = euler_residuals(&derive_fields_with(field, gaussian_primitive));
        let failed: Vec<&str> = recs.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        println!("{name:>9} vortex: bernoulli residual {:.2e} (tol {:.2e}) failing {:?}", summary.bernoulli, summary.tolerance, failed);
    }
    Ok(())
}
