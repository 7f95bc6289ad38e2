//! Recover f from level curves of u: the Bernoulli function is constant on
//! each closed level curve, and its derivative in u gives -f.
//!
//! `cargo run --release --example reconstruct_f`

use steiner_lab::case::{build_flow_case, gaussian_f, CaseKind, GridSpec};
use steiner_lab::euler::{derive_fields, linspace, reconstruct_f};

fn main() -> steiner_lab::Result<()> {
    let case = build_flow_case(&CaseKind::GaussianVortex { center: [0.3, -0.2] }, Some(GridSpec { half_width: 8.0, n: 513 }))?;
    let u = case.grid()?;
    let fields = derive_fields(&case)?;
    let levels = linspace(0.1, 0.9, 9);
    let rec = reconstruct_f(u, &fields, &levels)?;
    println!("{:>6} {:>10} {:>10} {:>8} {:>12}", "c", "f(c)", "exact", "curves", "B scatter");
    for lv in &rec.levels {
        println!("{:>6.3} {:>10.5} {:>10.5} {:>8} {:>12.2e}", lv.c, lv.f, gaussian_f(lv.c), lv.curves, lv.bernoulli_scatter);
    }
    println!("sup error {:.2e}; at max u = {:.5}, -lap u = {:.5}", rec.compare(gaussian_f), rec.at_max.0, rec.at_max.1);
    Ok(())
}
