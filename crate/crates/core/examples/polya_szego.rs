//! Dirichlet energy never increases under symmetrization; it strictly drops
//! when the superlevel sets are not already symmetric.
//!
//! `cargo run --release --example polya_szego`

use steiner_lab::field::GridField;
use steiner_lab::verify::{verify_l2_continuity, verify_polya_szego};

fn main() -> steiner_lab::Result<()> {
    let centred = GridField::from_fn(4.0, 257, |x, y| (-(x * x + y * y)).exp())?;
    let split = GridField::from_fn(6.0, 385, |x, y| (-((x - 2.0).powi(2) + y * y)).exp() + (-((x + 2.0).powi(2) + y * y)).exp())?;
    for (name, u) in [("centred gaussian", &centred), ("two bumps", &split)] {
        for t in [0.1, 0.5, 2.0] {
            let rec = verify_polya_szego(u, t, 256)?;
            println!(
                "{name:>16} t = {t}: E(u^t) = {:.6}  E(u) = {:.6}  ratio {:.4}  {}",
                rec.lhs,
                rec.rhs,
                rec.lhs / rec.rhs,
                if rec.passed { "ok" } else { "VIOLATED" }
            );
        }
    }

    // continuity in time: ||u^t - u||_2 against t R ||d1 u||_2
    let bump = GridField::from_fn(5.0, 321, |x, y| {
        let r2 = ((x - 1.0).powi(2) + (y - 0.5).powi(2)) / 2.25;
        (1.0 - r2).max(0.0).powi(2)
    })?;
    for t in [0.01, 0.1, 0.5] {
        let rec = verify_l2_continuity(&bump, t, 4.0, 256)?;
        println!("L2 continuity t = {t}: {:.4e} <= {:.4e}", rec.lhs, rec.rhs);
    }
    Ok(())
}
