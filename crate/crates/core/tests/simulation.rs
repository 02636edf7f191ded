//! Trajectory-level properties of the stochastic Navier-Stokes simulator.

use std::f64::consts::PI;

use hybrid_turbulence::sim::{
    gronwall_check, run_ensemble, Dissipation, Forcing, InitialCondition, SimConfig, Stepper, VelocityState,
};
use hybrid_turbulence::spectral::PeriodicGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn torus(n: usize) -> PeriodicGrid {
    PeriodicGrid::square(n, 2.0 * PI).unwrap()
}

#[test]
fn inviscid_energy_drift_is_small() {
    let config = SimConfig {
        grid: torus(128),
        dissipation: Dissipation::Viscosity(0.0),
        dt: 1e-4,
        horizon: 1.0,
        initial: InitialCondition::Random {
            shells: (1, 3),
            amplitude: 0.25,
        },
        noise_amplitude: 0.0,
        seed: 8,
        ..SimConfig::default()
    };
    let stepper = Stepper::new(&config).unwrap();
    let mut state = VelocityState::new(config.initial_vorticity().unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let e0 = state.energy();
    for _ in 0..config.steps() {
        stepper.step(&mut state, &mut rng).unwrap();
    }
    let drift = (state.energy() - e0).abs() / e0 / config.horizon;
    assert!(drift <= 1e-6, "relative drift per unit time {drift:e}");
    assert!(state.divergence_defect() <= 1e-12);
    assert!(state.vorticity().values(0)[0].norm() == 0.0);
}

fn stokes(amplitude: f64, members: usize) -> SimConfig {
    SimConfig {
        grid: torus(16),
        dissipation: Dissipation::Viscosity(0.5),
        dt: 0.004,
        horizon: 10.0,
        sample_interval: 0.1,
        initial: InitialCondition::Zero,
        noise_amplitude: amplitude,
        ensemble_size: members,
        nonlinear: false,
        seed: 31,
        ..SimConfig::default()
    }
}

#[test]
fn plateau_scales_with_the_square_of_the_noise_amplitude() {
    let plateau = |a: f64| {
        let stats = run_ensemble(&stokes(a, 16)).unwrap();
        let start = stats.times.len() / 2;
        stats.mean_energy[start..].iter().sum::<f64>() / (stats.mean_energy.len() - start) as f64
    };
    let ratio = plateau(2.0) / plateau(1.0);
    assert!((ratio / 4.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn noise_runs_are_reproducible_and_member_order_independent() {
    let config = stokes(1.0, 6);
    let short = SimConfig {
        horizon: 0.4,
        ..config
    };
    let a = run_ensemble(&short).unwrap();
    let b = run_ensemble(&short).unwrap();
    assert_eq!(a.mean_energy, b.mean_energy);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| run_ensemble(&short).unwrap());
    assert_eq!(a.mean_energy, c.mean_energy);
    assert_eq!(a.shell_energy, c.shell_energy);
}

#[test]
fn forced_deterministic_run_respects_the_envelope() {
    let config = SimConfig {
        grid: torus(32),
        dt: 0.01,
        horizon: 3.0,
        sample_interval: 0.1,
        forcing: Forcing::Band {
            shells: (1, 2),
            amplitude: 1.0,
        },
        noise_amplitude: 0.0,
        ensemble_size: 1,
        ..SimConfig::default()
    };
    let stats = run_ensemble(&config).unwrap();
    let report = gronwall_check(&stats, &config).unwrap();
    assert!(report.passed(), "violations at {:?}", report.violations);
    assert!(report.alpha > 0.0 && report.forcing_norm > 0.0);
}

#[test]
fn trajectory_from_rest_stays_below_the_forcing_envelope() {
    let config = SimConfig {
        grid: torus(32),
        dt: 0.01,
        horizon: 4.0,
        sample_interval: 0.1,
        initial: InitialCondition::Zero,
        forcing: Forcing::Mode {
            mode: [1, 2],
            amplitude: 2.0,
        },
        noise_amplitude: 0.0,
        ensemble_size: 1,
        ..SimConfig::default()
    };
    let stats = run_ensemble(&config).unwrap();
    let report = gronwall_check(&stats, &config).unwrap();
    assert_eq!(report.initial, 0.0);
    assert!(report.passed());
    // From rest the bound reduces to ((C F / α)(1 - e^{-αt/2}))², below (C F / α)².
    let ceiling = (report.constant * report.forcing_norm / report.alpha).powi(2);
    let sup = stats.mean_hybrid_norm_sq.iter().copied().fold(0.0, f64::max);
    assert!(sup <= ceiling * (1.0 + 1e-12), "{sup} > {ceiling}");
}

#[test]
fn running_supremum_dominates_the_mean() {
    let stats = run_ensemble(&SimConfig {
        grid: torus(16),
        dt: 0.01,
        horizon: 0.5,
        sample_interval: 0.05,
        ensemble_size: 4,
        noise_amplitude: 1.0,
        ..SimConfig::default()
    })
    .unwrap();
    for (sup, mean) in stats.mean_running_sup.iter().zip(&stats.mean_hybrid_norm_sq) {
        assert!(sup >= mean);
    }
    assert!(stats.mean_running_sup.windows(2).all(|w| w[0] <= w[1]));
}
