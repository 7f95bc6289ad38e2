//! Symmetrize a two-bump field at several times and directions, print the
//! Dirichlet energy, and write the fields as grid files.
//!
//! `cargo run --release --example symmetrize -- [out_dir]`

use std::path::PathBuf;

use steiner_lab::field::{dirichlet_energy, write_grid, GridField, Payload};
use steiner_lab::steiner::{superlevel_area, symmetrize_function};

fn main() -> steiner_lab::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "out/symmetrize".into()).into();
    std::fs::create_dir_all(&out)?;
    let u = GridField::from_fn(6.0, 257, |x, y| (-((x - 2.0).powi(2) + (y - 0.5).powi(2))).exp() + 0.7 * (-((x + 2.0).powi(2) + y * y)).exp())?;
    println!("E(u) = {:.6}, |{{u > 0.5}}| = {:.4}", dirichlet_energy(&u), superlevel_area(&u, 0.5));
    write_grid(&out.join("u.grid"), &u, Payload::F64le)?;

    for (dir_name, dir) in [("x", [1.0, 0.0]), ("diag", [1.0, 1.0])] {
        for t in [0.1, 0.5, 2.0, f64::INFINITY] {
            let r = symmetrize_function(&u, t, dir, 256)?;
            println!(
                "dir {dir_name:>4} t = {t:>4}: E = {:.6}  |{{u^t > 0.5}}| = {:.4}  level gap {:.1e}",
                dirichlet_energy(&r.field),
                superlevel_area(&r.field, 0.5),
                r.max_level_gap
            );
            write_grid(&out.join(format!("u_{dir_name}_t{t}.grid")), &r.field, Payload::F64le)?;
        }
    }
    println!("grids written to {}", out.display());
    Ok(())
}
