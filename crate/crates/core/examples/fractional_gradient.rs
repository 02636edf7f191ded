//! Riesz fractional gradient `|ξ|^s` acting on Fourier modes in 1D and 2D.
//!
//! Run with `cargo run --example fractional_gradient`.

use std::f64::consts::PI;

use hybrid_turbulence::spectral::{PeriodicGrid, SpectralField};
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let length = 2.0;
    let grid = PeriodicGrid::line(64, length)?;
    println!("1D, L = {length}");
    for k in [1, 3, 7] {
        let f = SpectralField::from_fn(&grid, |x| (2.0 * PI * k as f64 * x[0] / length).cos()).into_fourier();
        let idx = grid.flat_of_mode([k, 0]);
        for s in [0.5, 1.0, 2.0] {
            let g = f.fractional_gradient(s)?;
            let ratio = g.values(0)[idx].norm() / f.values(0)[idx].norm();
            let expected = (2.0 * PI * k as f64 / length).powf(s);
            println!("  k = {k}, s = {s}: multiplier {ratio:.12}  (2 pi k / L)^s = {expected:.12}");
        }
    }

    let grid = PeriodicGrid::square(32, 1.0)?;
    let mode = [3, -2];
    let xi = grid.wavevector(grid.flat_of_mode(mode));
    let f = SpectralField::from_fn(&grid, |x| (xi[0] * x[0] + xi[1] * x[1]).sin()).into_fourier();
    let half = f.fractional_gradient(0.5)?;
    let twice = half.fractional_gradient(0.5)?;
    let once = f.fractional_gradient(1.0)?;
    let diff = twice.add(&once.scaled(-1.0))?.max_abs();
    println!("2D mode {mode:?}: |grad^(1/2) grad^(1/2) f - grad^1 f|_max = {diff:.3e}");

    let physical = once.into_physical();
    let reference = SpectralField::from_fn(&grid, |x| (xi[0] * x[0] + xi[1] * x[1]).sin()).scaled(xi[0].hypot(xi[1]));
    println!("grad^1 f equals |xi| f pointwise: {:.3e}", physical.add(&reference.scaled(-1.0))?.max_abs());
    Ok(())
}
