//! A radial stream function whose values keep oscillating as r grows: no
//! limit at infinity although the Dirichlet energy is finite.
//!
//! `cargo run --release --example counterexample`

use steiner_lab::case::{counterexample_radius, counterexample_u};
use steiner_lab::euler::counterexample_energy;

fn main() {
    let alpha = 0.4;
    for k in 1..=3 {
        let r = counterexample_radius(alpha, k);
        println!("R_{k} = {r:.6e}, u(R_{k}) = {:+.6}", counterexample_u(r, alpha));
    }
    for r in [1e2, 1e4, 1e6, 1e8] {
        println!("u({r:.0e}) = {:+.6}", counterexample_u(r, alpha));
    }
    let total = counterexample_energy(alpha, 0.0, 1e8);
    for (a, b) in [(0.0, 1.0), (1.0, 1e3), (1e3, 1e7), (1e7, 1e8)] {
        let e = counterexample_energy(alpha, a, b);
        println!("energy on [{a:.0e}, {b:.0e}] = {e:.5}  ({:.2}% of total)", 100.0 * e / total);
    }
}
