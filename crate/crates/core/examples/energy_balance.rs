//! Stepping a single trajectory by hand and checking the discrete energy
//! balance, including its second-order convergence in the time step.
//!
//! Run with `cargo run --release --example energy_balance`.

use std::f64::consts::PI;

use hybrid_turbulence::sim::{residual_study, Dissipation, SimConfig, Stepper, VelocityState};
use hybrid_turbulence::spectral::PeriodicGrid;
use hybrid_turbulence::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let config = SimConfig {
        grid: PeriodicGrid::square(64, 2.0 * PI)?,
        dissipation: Dissipation::Viscosity(0.05),
        dt: 0.01,
        horizon: 0.5,
        sample_interval: 0.05,
        ensemble_size: 1,
        noise_amplitude: 0.0,
        seed: 9,
        ..SimConfig::default()
    };
    let stepper = Stepper::new(&config)?;
    let mut state = VelocityState::new(config.initial_vorticity()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    println!("step   energy        enstrophy     residual      div");
    for _ in 0..config.steps() {
        let residual = stepper.step(&mut state, &mut rng)?;
        if state.steps() % 10 == 0 {
            println!(
                "{:4}   {:.6e}  {:.6e}  {:+.3e}  {:.1e}",
                state.steps(),
                state.energy(),
                state.enstrophy(),
                residual,
                state.divergence_defect()
            );
        }
    }

    let study = residual_study(&config)?;
    println!(
        "max residual {:.3e} at dt = {}, {:.3e} at dt = {}: order {:.3}",
        study.max_residual[0], study.dt[0], study.max_residual[1], study.dt[1], study.order
    );
    Ok(())
}
