//! Split u into G = max(u - m, 0) and H = min(u, m), symmetrize both, and
//! check the pieces still add up and stay monotone in m.
//!
//! `cargo run --release --example truncation`

use steiner_lab::field::GridField;
use steiner_lab::verify::verify_truncation_algebra;

fn main() -> steiner_lab::Result<()> {
    let u = GridField::from_fn(8.0, 385, |x, y| (-((x - 0.5).powi(2) + y * y) / 2.0).exp())?;
    for m in [0.25, 0.5, 0.75] {
        for r in verify_truncation_algebra(&u, m, 0.5, 256)? {
            println!("m = {m:<5} {:<44} lhs {:>10.3e} rhs {:>10.3e} {}", r.name, r.lhs, r.rhs, if r.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
