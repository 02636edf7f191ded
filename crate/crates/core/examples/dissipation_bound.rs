//! Free decay of the hybrid norm under anisotropic dissipation, and the
//! Gronwall-type bound that holds under steady forcing.
//!
//! Run with `cargo run --release --example dissipation_bound`.

use hybrid_turbulence::anisotropic::{AnisotropySpec, Symbol};
use hybrid_turbulence::norms::NormParams;
use hybrid_turbulence::sim::random_field;
use hybrid_turbulence::spectral::PeriodicGrid;
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let grid = PeriodicGrid::square(32, 1.0)?;
    let spec = AnisotropySpec::diagonal(&[2.0, 1.0], Symbol::laplacian())?;
    let u0 = random_field(&grid, (1, 8), 1.0, 3)?.into_physical();
    let params = NormParams::new(1.0, 2.0, 2.0)?;

    let free = spec.dissipation_check(&u0, None, 0.05, 0.001, params)?;
    println!("unforced: monotone {} (largest relative step change {:.3e})", free.monotone, free.max_increase);
    if let Some(c) = free.decay_constant {
        println!("fitted decay constant of |u|^2 = {c:.4}, rate floor {:.4}", free.rate_floor);
    }

    let forcing = random_field(&grid, (1, 2), 20.0, 4)?.into_physical();
    let forced = spec.dissipation_check(&u0, Some(&forcing), 0.2, 0.002, params)?;
    let bound = forced.bound.as_ref().expect("forced runs carry a bound");
    println!("forced: bound holds {:?}", forced.gronwall_ok);
    for i in (0..forced.times.len()).step_by(20) {
        println!("  t = {:.3}  |u|^2 = {:12.6}  bound {:12.6}", forced.times[i], forced.norm_sq[i], bound[i]);
    }

    // A step past the explicit stability limit is refused with a suggestion.
    if let Err(e) = spec.dissipation_check(&u0, Some(&forcing), 0.2, 0.1, params) {
        println!("dt = 0.1: {e}");
    }
    Ok(())
}
