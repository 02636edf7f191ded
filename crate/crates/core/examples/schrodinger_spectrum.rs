//! Lowest eigenvalues of `-Δ + V` on a box with Dirichlet and Neumann walls.
//!
//! Run with `cargo run --release --example schrodinger_spectrum`.

use std::f64::consts::PI;

use hybrid_turbulence::schrodinger::{
    assemble, growth_check, spectrum, spectrum_with, symmetry_defect, Boundary, BoxGrid, Potential, Solver,
};
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let line = BoxGrid::new(1, 400, 1.0, Boundary::Dirichlet)?;
    let op = assemble(&line, &Potential::zero(&line))?;
    let s = spectrum(&op, 4)?;
    println!("free particle on [0, 1], Dirichlet:");
    for (j, v) in s.values.iter().enumerate() {
        let exact = ((j + 1) as f64 * PI).powi(2);
        println!("  lambda_{} = {v:.8}  (j pi)^2 = {exact:.8}", j + 1);
    }

    let neumann = BoxGrid::new(1, 400, 1.0, Boundary::Neumann)?;
    let s = spectrum(&assemble(&neumann, &Potential::zero(&neumann))?, 3)?;
    println!("Neumann ground state {:.3e}, then {:.6} and {:.6}", s.values[0], s.values[1], s.values[2]);

    // A harmonic well on the unit square, centered in the box.
    let square = BoxGrid::new(2, 48, 1.0, Boundary::Dirichlet)?;
    let omega: f64 = 200.0;
    let well = Potential::from_fn(&square, |x| {
        omega * omega * ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))
    })?;
    let op = assemble(&square, &well)?;
    println!("harmonic well, symmetry defect {:.2e}", symmetry_defect(&op));
    let dense = spectrum_with(&op, 6, Solver::Dense)?;
    let iterative = spectrum_with(&op, 6, Solver::Iterative)?;
    for j in 0..6 {
        println!(
            "  lambda_{} dense {:.6}  iterative {:.6}  residual {:.1e}",
            j + 1,
            dense.values[j],
            iterative.values[j],
            iterative.residuals[j]
        );
    }
    println!("  oscillator levels 2 omega (1, 2, 2, 3, 3, 3) = {:.1}, {:.1}, {:.1}", 2.0 * omega, 4.0 * omega, 6.0 * omega);

    let random = Potential::random(&square, 0.0, 5.0, 11)?;
    let growth = growth_check(&square, &random, 40)?;
    println!(
        "random potential: eigenvalue growth exponent {:.3} (Weyl {}), {}",
        growth.exponent,
        growth.expected_exponent,
        if growth.passed { "consistent" } else { "inconsistent" }
    );
    Ok(())
}
