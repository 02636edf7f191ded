//! Eigenvalues of `-Δ + V` lie above those of `-Δ + min V`, the comparison
//! that min-max gives for a bounded potential.
//!
//! Run with `cargo run --release --example minmax_ordering`.

use hybrid_turbulence::schrodinger::{minmax_check, Boundary, BoxGrid, Potential};
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    for (seed, bc) in [(1, Boundary::Dirichlet), (2, Boundary::Neumann)] {
        let grid = BoxGrid::new(2, 20, 1.0, bc)?;
        let v = Potential::random(&grid, -20.0, 20.0, seed)?;
        let report = minmax_check(&grid, &v, 8)?;
        println!("{bc:?} walls, V uniform in [-20, 20], min V = {:.4}", v.min());
        println!("   j   lambda_j(V)     lower bound     margin");
        for j in 0..report.values.len() {
            println!(
                "  {:2}  {:14.6}  {:14.6}  {:10.4}",
                j + 1,
                report.values[j],
                report.lower[j],
                report.margins[j]
            );
        }
        println!("  all margins nonnegative: {}\n", report.passed());
    }

    // A constant potential sits exactly on the bound.
    let grid = BoxGrid::new(2, 16, 1.0, Boundary::Dirichlet)?;
    let report = minmax_check(&grid, &Potential::constant(&grid, 3.0), 5)?;
    println!("constant V = 3: smallest margin {:.2e}", report.min_margin());
    Ok(())
}
