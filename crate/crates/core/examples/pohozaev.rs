//! Circle scan of the Pohozaev-type identity on the Gaussian vortex, and the
//! control in which the primitive of f is shifted by a constant.
//!
//! `cargo run --release --example pohozaev`

use steiner_lab::case::gaussian_primitive;
use steiner_lab::euler::{linspace, pohozaev_scan_with};
use steiner_lab::field::GridField;

fn main() -> steiner_lab::Result<()> {
    let u = GridField::from_fn(8.0, 513, |x, y| (-(x * x + y * y) / 2.0).exp())?;
    let radii = linspace(1.0, 7.0, 13);
    let scan = pohozaev_scan_with(&u, &gaussian_primitive, &radii)?;
    println!("{:>6} {:>14} {:>14} {:>10}", "R", "Psi(R)", "exact", "residual");
    for (k, &r) in scan.radii.iter().enumerate() {
        let exact = 0.5 * std::f64::consts::PI * r * r * (-r * r).exp();
        println!("{r:>6.2} {:>14.6e} {exact:>14.6e} {:>10.2e}", scan.psi[k], scan.residual[k]);
    }
    println!("ell = {:.3e}", scan.ell);

    // F + 1 adds pi R^2 to the area term, so ell picks up the disc area
    let shifted = pohozaev_scan_with(&u, &|w| gaussian_primitive(w) + 1.0, &radii)?;
    println!("shifted primitive: ell = {:.6} (expect pi)", shifted.ell);
    Ok(())
}
