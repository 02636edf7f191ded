use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{shell_of, SimConfig, Stepper, VelocityState, NOISE_SHELLS};
use crate::error::{Error, Result};
use crate::norms::hybrid_norm_vector;
use crate::schrodinger::fit_slope;

/// Sampled statistics of one trajectory or the mean over an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub members: usize,
    pub times: Vec<f64>,
    /// `𝔼‖u(t)‖²_{L²}`.
    pub mean_energy: Vec<f64>,
    /// `𝔼‖u(t)‖²_{B^s_{p,q}}` of the velocity.
    pub mean_hybrid_norm_sq: Vec<f64>,
    /// `𝔼 sup_{r ≤ t} ‖u(r)‖²_{B^s_{p,q}}`.
    pub mean_running_sup: Vec<f64>,
    /// Ensemble-mean energy-balance residual of every step.
    pub residual: Vec<f64>,
    /// Largest `|residual|` over the steps ending at each sample; 0 at `t = 0`.
    pub sample_residual: Vec<f64>,
    /// `𝔼‖u_shell‖²_{L²}` for each noise shell, indexed `shell - 1`.
    pub shell_energy: Vec<Vec<f64>>,
    /// Mean enstrophy in `{|k_x| ≥ c, |k_y| < c}` and `{|k_y| ≥ c, |k_x| < c}`.
    pub band_enstrophy: [Vec<f64>; 2],
}

impl EnsembleStats {
    fn empty(samples: usize, steps: usize) -> Self {
        Self {
            members: 0,
            times: Vec::with_capacity(samples),
            mean_energy: Vec::with_capacity(samples),
            mean_hybrid_norm_sq: Vec::with_capacity(samples),
            mean_running_sup: Vec::with_capacity(samples),
            residual: Vec::with_capacity(steps),
            sample_residual: Vec::with_capacity(samples),
            shell_energy: vec![Vec::with_capacity(samples); *NOISE_SHELLS.end()],
            band_enstrophy: [Vec::with_capacity(samples), Vec::with_capacity(samples)],
        }
    }

    /// Final value of the running-sup statistic.
    pub fn sup_hybrid(&self) -> f64 {
        self.mean_running_sup.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }

    /// Exponential decay rate of each directional band enstrophy, from a
    /// least-squares fit of its logarithm. NaN when fewer than two samples
    /// are positive.
    pub fn band_decay_rates(&self) -> [f64; 2] {
        let rate = |series: &[f64]| {
            let pts: Vec<(f64, f64)> = self
                .times
                .iter()
                .zip(series)
                .filter(|(_, v)| **v > 1e-300)
                .map(|(t, v)| (*t, v.ln()))
                .collect();
            if pts.len() < 2 {
                f64::NAN
            } else {
                -fit_slope(&pts)
            }
        };
        [rate(&self.band_enstrophy[0]), rate(&self.band_enstrophy[1])]
    }

    fn mean_of(parts: &[EnsembleStats]) -> Self {
        let m = parts.len() as f64;
        let avg = |pick: &dyn Fn(&EnsembleStats) -> &Vec<f64>| -> Vec<f64> {
            let mut acc = vec![0.0; pick(&parts[0]).len()];
            for p in parts {
                acc.iter_mut().zip(pick(p)).for_each(|(a, v)| *a += v);
            }
            acc.into_iter().map(|a| a / m).collect()
        };
        let residual = avg(&|p| &p.residual);
        let sps = if parts[0].times.len() > 1 {
            residual.len() / (parts[0].times.len() - 1)
        } else {
            1
        };
        let sample_residual = std::iter::once(0.0)
            .chain(
                residual
                    .chunks(sps.max(1))
                    .take(parts[0].times.len() - 1)
                    .map(|c| c.iter().map(|r| r.abs()).fold(0.0, f64::max)),
            )
            .collect();
        Self {
            members: parts.len(),
            times: parts[0].times.clone(),
            mean_energy: avg(&|p| &p.mean_energy),
            mean_hybrid_norm_sq: avg(&|p| &p.mean_hybrid_norm_sq),
            mean_running_sup: avg(&|p| &p.mean_running_sup),
            residual,
            sample_residual,
            shell_energy: (0..parts[0].shell_energy.len())
                .map(|s| avg(&|p| &p.shell_energy[s]))
                .collect(),
            band_enstrophy: [avg(&|p| &p.band_enstrophy[0]), avg(&|p| &p.band_enstrophy[1])],
        }
    }
}

struct Sampler {
    cutoff: i64,
    shells: Vec<usize>,
}

impl Sampler {
    fn record(&self, config: &SimConfig, state: &VelocityState, stats: &mut EnsembleStats) -> Result<()> {
        let grid = &config.grid;
        let w = state.vorticity().values(0);
        let hybrid = hybrid_norm_vector(&state.velocity(), config.norm_params)?.powi(2);
        let sup = stats.mean_running_sup.last().map_or(hybrid, |s| s.max(hybrid));
        stats.times.push(state.steps() as f64 * config.dt);
        stats.mean_energy.push(state.energy());
        stats.mean_hybrid_norm_sq.push(hybrid);
        stats.mean_running_sup.push(sup);

        let mut shells = vec![0.0; stats.shell_energy.len()];
        let mut bands = [0.0; 2];
        for i in 1..grid.len() {
            let e = w[i].norm_sqr();
            let s = self.shells[i];
            if (1..=shells.len()).contains(&s) {
                shells[s - 1] += e / grid.wavevector_norm_sq(i);
            }
            let [kx, ky] = grid.mode_vector(i);
            let (hx, hy) = (kx.abs() >= self.cutoff, ky.abs() >= self.cutoff);
            if hx && !hy {
                bands[0] += e;
            } else if hy && !hx {
                bands[1] += e;
            }
        }
        let vol = grid.measure();
        for (series, v) in stats.shell_energy.iter_mut().zip(shells) {
            series.push(vol * v);
        }
        for (series, v) in stats.band_enstrophy.iter_mut().zip(bands) {
            series.push(vol * v);
        }
        Ok(())
    }
}

fn trajectory(config: &SimConfig, stepper: &Stepper, initial: &VelocityState, member: usize) -> Result<EnsembleStats> {
    let sps = config.steps_per_sample()?;
    let steps = config.steps();
    let mut stats = EnsembleStats::empty(steps / sps + 1, steps);
    stats.members = 1;
    let sampler = Sampler {
        cutoff: config.band_cutoff,
        shells: (0..config.grid.len()).map(|i| shell_of(&config.grid, i)).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(member as u64);
    let mut state = initial.clone();
    sampler.record(config, &state, &mut stats)?;
    let usable = steps / sps * sps;
    for step in 1..=usable {
        stats.residual.push(stepper.step(&mut state, &mut rng)?);
        if step % sps == 0 {
            sampler.record(config, &state, &mut stats)?;
        }
    }
    Ok(stats)
}

fn prepare(config: &SimConfig) -> Result<(Stepper, VelocityState)> {
    config.validate()?;
    let stepper = Stepper::new(config)?;
    let initial = VelocityState::new(config.initial_vorticity()?)?;
    stepper.check_cfl(&initial)?;
    Ok((stepper, initial))
}

/// Run a single ensemble member with its derived random stream.
pub fn run_member(config: &SimConfig, member: usize) -> Result<EnsembleStats> {
    let (stepper, initial) = prepare(config)?;
    Ok(EnsembleStats::mean_of(&[trajectory(config, &stepper, &initial, member)?]))
}

/// Run all `M` members in parallel and average their statistics.
///
/// Member `m` draws its noise from stream `m` of a ChaCha8 generator seeded
/// with the master seed, so results do not depend on thread scheduling.
pub fn run_ensemble(config: &SimConfig) -> Result<EnsembleStats> {
    let (stepper, initial) = prepare(config)?;
    let results: Vec<Result<EnsembleStats>> = (0..config.ensemble_size)
        .into_par_iter()
        .map(|m| trajectory(config, &stepper, &initial, m))
        .collect();
    let mut parts = Vec::with_capacity(results.len());
    for (member, r) in results.into_iter().enumerate() {
        parts.push(r.map_err(|e| Error::Member {
            member,
            source: Box::new(e),
        })?);
    }
    Ok(EnsembleStats::mean_of(&parts))
}

/// Largest per-step energy-balance residual at `dt` and `dt/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualStudy {
    pub dt: [f64; 2],
    pub max_residual: [f64; 2],
    /// `log2` of the ratio of the two residuals.
    pub order: f64,
}

/// Deterministic time-step refinement of the energy-balance residual.
/// Runs member 0 only, with the noise switched off.
pub fn residual_study(config: &SimConfig) -> Result<ResidualStudy> {
    let config = &SimConfig {
        noise_amplitude: 0.0,
        ..config.clone()
    };
    let coarse = run_member(config, 0)?.max_abs_residual();
    let fine_config = SimConfig {
        dt: config.dt / 2.0,
        ..config.clone()
    };
    let fine = run_member(&fine_config, 0)?.max_abs_residual();
    Ok(ResidualStudy {
        dt: [config.dt, fine_config.dt],
        max_residual: [coarse, fine],
        order: (coarse / fine).log2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    fn small() -> SimConfig {
        SimConfig {
            grid: PeriodicGrid::square(16, 2.0 * std::f64::consts::PI).unwrap(),
            dt: 0.01,
            horizon: 0.2,
            sample_interval: 0.05,
            ensemble_size: 3,
            noise_amplitude: 0.5,
            ..SimConfig::default()
        }
    }

    #[test]
    fn ensemble_is_deterministic_and_ordered() {
        let c = small();
        let a = run_ensemble(&c).unwrap();
        let b = run_ensemble(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times.len(), 5);
        assert_eq!(a.residual.len(), 20);
        assert_eq!(a.sample_residual.len(), 5);
        assert_eq!(a.members, 3);
        let members: Vec<_> = (0..3).map(|m| run_member(&c, m).unwrap()).collect();
        let e = members.iter().map(|s| s.mean_energy[4]).sum::<f64>() / 3.0;
        assert!((a.mean_energy[4] - e).abs() < 1e-14 * e);
        assert_ne!(members[0].mean_energy[4], members[1].mean_energy[4]);
    }

    #[test]
    fn running_sup_is_nondecreasing() {
        let s = run_member(&small(), 0).unwrap();
        assert!(s.mean_running_sup.windows(2).all(|w| w[1] >= w[0]));
        assert!(s.mean_running_sup.iter().zip(&s.mean_hybrid_norm_sq).all(|(a, b)| a >= b));
    }

    #[test]
    fn deterministic_decay_is_monotone() {
        let c = SimConfig {
            noise_amplitude: 0.0,
            ..small()
        };
        let s = run_member(&c, 0).unwrap();
        assert!(s.mean_energy.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn cfl_violation_is_a_stability_error() {
        let c = SimConfig {
            dt: 0.2,
            horizon: 0.4,
            sample_interval: 0.2,
            initial: crate::sim::InitialCondition::Random {
                shells: (1, 4),
                amplitude: 50.0,
            },
            ..small()
        };
        assert!(matches!(run_ensemble(&c), Err(Error::Stability { .. })));
    }
}
