//! Directional dissipation by the Fourier multiplier `P̂(Σξ)` and the decay
//! rates it gives to individual modes.
//!
//! Run with `cargo run --example anisotropic_decay`.

use hybrid_turbulence::anisotropic::{AnisotropySpec, Symbol};
use hybrid_turbulence::spectral::PeriodicGrid;
use hybrid_turbulence::Result;
use nalgebra::DMatrix;

fn main() -> Result<()> {
    let grid = PeriodicGrid::square(32, 1.0)?;
    let stretched = AnisotropySpec::diagonal(&[4.0, 1.0], Symbol::laplacian())?;
    println!("Sigma = diag(4, 1), P(z) = |z|^2");
    for mode in [[1, 0], [0, 1], [1, 1], [2, -1], [0, 3]] {
        let rate = stretched.rate(&grid.wavevector(grid.flat_of_mode(mode)));
        let measured = stretched.measure_decay(&grid, mode, 1.0 / rate)?;
        println!("  mode {mode:?}: symbol {rate:12.4}  measured {measured:12.4}");
    }
    let x = stretched.measure_decay(&grid, [1, 0], 0.001)?;
    let y = stretched.measure_decay(&grid, [0, 1], 0.001)?;
    println!("  x/y rate ratio {:.6} (Sigma_11^2 / Sigma_22^2 = 16)", x / y);

    let sheared = AnisotropySpec::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]), Symbol::power(0.75)?)?;
    println!("sheared Sigma, gamma = 0.75, slowest nonzero rate {:.4}", sheared.min_nonzero_rate(&grid)?);

    let bad = AnisotropySpec::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]), Symbol::laplacian());
    if let Err(e) = bad {
        println!("indefinite Sigma rejected: {e}");
    }
    Ok(())
}
