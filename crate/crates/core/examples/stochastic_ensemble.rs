//! Stochastically forced 2D Navier-Stokes ensemble: mean energy, running
//! supremum of the hybrid norm, and the Gronwall envelope.
//!
//! Run with `cargo run --release --example stochastic_ensemble`.

use std::f64::consts::PI;

use hybrid_turbulence::sim::{gronwall_check, run_ensemble, Dissipation, Forcing, SimConfig};
use hybrid_turbulence::spectral::PeriodicGrid;
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let config = SimConfig {
        grid: PeriodicGrid::square(32, 2.0 * PI)?,
        dissipation: Dissipation::Viscosity(0.05),
        dt: 0.01,
        horizon: 2.0,
        sample_interval: 0.1,
        forcing: Forcing::Mode {
            mode: [2, 1],
            amplitude: 0.5,
        },
        noise_amplitude: 0.5,
        ensemble_size: 8,
        seed: 2024,
        ..SimConfig::default()
    };
    let stats = run_ensemble(&config)?;
    let envelope = gronwall_check(&stats, &config)?;
    println!("{} members, alpha = {:.4}, fitted C = {:.4}", stats.members, envelope.alpha, envelope.constant);
    println!("     t     E|u|^2     E|u|_B^2   E sup|u|_B^2      bound");
    for i in (0..stats.times.len()).step_by(2) {
        println!(
            "  {:5.2}  {:9.5}  {:11.5}  {:13.5}  {:9.5}",
            stats.times[i], stats.mean_energy[i], stats.mean_hybrid_norm_sq[i], stats.mean_running_sup[i], envelope.bound[i]
        );
    }
    println!("bound respected: {}", envelope.passed());
    println!("largest per-step energy residual {:.3e}", stats.max_abs_residual());
    Ok(())
}
