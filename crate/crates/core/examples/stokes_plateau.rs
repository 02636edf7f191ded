//! Linear (Stokes) response to white-in-time noise: shell energies settle at
//! the level where viscous loss balances injected power.
//!
//! Run with `cargo run --release --example stokes_plateau`.

use std::f64::consts::PI;

use hybrid_turbulence::sim::{run_ensemble, shell_of, Dissipation, InitialCondition, SimConfig, NOISE_SHELLS};
use hybrid_turbulence::spectral::PeriodicGrid;
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let nu = 0.5;
    let config = SimConfig {
        grid: PeriodicGrid::square(16, 2.0 * PI)?,
        dissipation: Dissipation::Viscosity(nu),
        dt: 0.004,
        horizon: 10.0,
        sample_interval: 0.1,
        initial: InitialCondition::Zero,
        noise_amplitude: 1.0,
        ensemble_size: 16,
        nonlinear: false,
        seed: 5,
        ..SimConfig::default()
    };
    let stats = run_ensemble(&config)?;
    let grid = &config.grid;
    let variances = config.noise_variances();
    let start = stats.times.len() / 2;
    println!("shell   measured   equilibrium");
    for (s, series) in NOISE_SHELLS.zip(&stats.shell_energy) {
        // Each forced mode relaxes to |Ω| σ² / (2 ν |ξ|⁴) in velocity energy.
        let equilibrium: f64 = (1..grid.len())
            .filter(|&i| shell_of(grid, i) == s)
            .map(|i| grid.measure() * variances[i] / (2.0 * nu * grid.wavevector_norm_sq(i).powi(2)))
            .sum();
        let measured = series[start..].iter().sum::<f64>() / (series.len() - start) as f64;
        println!("  {s}   {measured:10.6}   {equilibrium:10.6}");
    }
    Ok(())
}
