use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use super::{complex_normal, SimConfig, CFL_LIMIT};
use crate::error::{Error, Result};
use crate::spectral::{PeriodicGrid, Representation, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Wavevector with Nyquist components dropped, so that odd multipliers
/// keep real fields real.
fn derivative_wavevector(grid: &PeriodicGrid, flat: usize) -> [f64; 2] {
    let xi = grid.wavevector(flat);
    [
        if grid.is_nyquist(flat, 0) { 0.0 } else { xi[0] },
        if grid.is_nyquist(flat, 1) { 0.0 } else { xi[1] },
    ]
}

/// 2/3-rule mask: keeps modes with `3|k_x| < n` and `3|k_y| < n`.
pub fn dealias_mask(grid: &PeriodicGrid) -> Vec<bool> {
    let n = grid.n() as i64;
    (0..grid.len())
        .map(|i| grid.mode_vector(i).iter().all(|m| 3 * m.abs() < n))
        .collect()
}

/// Vorticity state on a two-dimensional grid, held in Fourier form with
/// zero mean.
#[derive(Clone, Debug)]
pub struct VelocityState {
    vorticity: SpectralField,
    steps: usize,
}

impl VelocityState {
    pub fn new(vorticity: SpectralField) -> Result<Self> {
        if vorticity.grid().dim() != 2 || !vorticity.is_scalar() || !vorticity.is_real() {
            return Err(Error::config("vorticity must be a real scalar field on a 2D grid"));
        }
        let mut vorticity = vorticity.into_fourier();
        vorticity.values_mut(0)[0] = ZERO;
        Ok(Self { vorticity, steps: 0 })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.vorticity.grid()
    }

    pub fn vorticity(&self) -> &SpectralField {
        &self.vorticity
    }

    /// Steps taken since construction.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Velocity `(∂_y ψ, -∂_x ψ)` in Fourier form.
    pub fn velocity(&self) -> SpectralField {
        velocity_from_vorticity(&self.vorticity).expect("state holds a 2D Fourier scalar")
    }

    /// `‖u‖²_{L²} = |Ω| Σ |ω̂|² / |ξ|²`.
    pub fn energy(&self) -> f64 {
        inverse_laplacian_sum(self.grid(), self.vorticity.values(0), |_| 1.0)
    }

    /// `‖ω‖²_{L²}`.
    pub fn enstrophy(&self) -> f64 {
        self.grid().measure() * self.vorticity.values(0).iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Spectral `L²` norm of `∇·u`.
    pub fn divergence_defect(&self) -> f64 {
        let u = self.velocity();
        let grid = self.grid();
        let sum: f64 = (0..grid.len())
            .map(|i| {
                let xi = derivative_wavevector(grid, i);
                (u.values(0)[i] * xi[0] + u.values(1)[i] * xi[1]).norm_sqr()
            })
            .sum();
        (grid.measure() * sum).sqrt()
    }

    /// Largest pointwise speed `max |u(x)|`.
    pub fn max_speed(&self) -> f64 {
        let u = self.velocity().into_physical();
        u.values(0)
            .iter()
            .zip(u.values(1))
            .map(|(a, b)| a.re.hypot(b.re))
            .fold(0.0, f64::max)
    }
}

/// `|Ω| Σ_{k≠0} w(k) |ĉ_k|² / |ξ_k|²`.
fn inverse_laplacian_sum(grid: &PeriodicGrid, coeffs: &[Complex64], weight: impl Fn(usize) -> f64) -> f64 {
    let sum: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, z)| weight(i) * z.norm_sqr() / grid.wavevector_norm_sq(i))
        .sum();
    grid.measure() * sum
}

/// Divergence-free velocity induced by a scalar vorticity field.
pub fn velocity_from_vorticity(vorticity: &SpectralField) -> Result<SpectralField> {
    vorticity.expect_scalar()?;
    let grid = vorticity.grid();
    if grid.dim() != 2 {
        return Err(Error::config("velocity reconstruction needs a 2D grid"));
    }
    let w = vorticity.clone().into_fourier();
    let mut u = vec![ZERO; grid.len()];
    let mut v = vec![ZERO; grid.len()];
    for i in 1..grid.len() {
        let psi = w.values(0)[i] / grid.wavevector_norm_sq(i);
        let xi = derivative_wavevector(grid, i);
        u[i] = Complex64::new(0.0, xi[1]) * psi;
        v[i] = Complex64::new(0.0, -xi[0]) * psi;
    }
    SpectralField::from_coefficients(grid, vec![u, v], w.is_real())
}

/// Projection onto divergence-free fields, `(I - ξξᵀ/|ξ|²) v̂(ξ)`. The mean
/// mode is left unchanged.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    v.expect(Representation::Fourier)?;
    let grid = v.grid();
    if grid.dim() != 2 || v.components() != 2 {
        return Err(Error::config("Leray projection needs a 2-component field on a 2D grid"));
    }
    let mut out = v.clone();
    for i in 1..grid.len() {
        let xi = derivative_wavevector(grid, i);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2 == 0.0 {
            continue;
        }
        let (a, b) = (v.values(0)[i], v.values(1)[i]);
        let dot = (a * xi[0] + b * xi[1]) / r2;
        out.values_mut(0)[i] = a - dot * xi[0];
        out.values_mut(1)[i] = b - dot * xi[1];
    }
    Ok(out)
}

/// Advection term `-(u·∇)ω` of a state, pseudo-spectrally, in Fourier form.
pub fn nonlinear_term(state: &VelocityState, dealias: bool) -> SpectralField {
    let grid = state.grid();
    let mask = dealias.then(|| dealias_mask(grid));
    let coeffs = advection(grid, state.vorticity.values(0), mask.as_deref());
    SpectralField::from_coefficients(grid, vec![coeffs], true).expect("grid-sized coefficients")
}

fn advection(grid: &PeriodicGrid, w: &[Complex64], mask: Option<&[bool]>) -> Vec<Complex64> {
    let len = grid.len();
    let mut u = vec![ZERO; len];
    let mut v = vec![ZERO; len];
    let mut wx = vec![ZERO; len];
    let mut wy = vec![ZERO; len];
    for i in 1..len {
        let xi = derivative_wavevector(grid, i);
        let psi = w[i] / grid.wavevector_norm_sq(i);
        u[i] = Complex64::new(0.0, xi[1]) * psi;
        v[i] = Complex64::new(0.0, -xi[0]) * psi;
        wx[i] = Complex64::new(0.0, xi[0]) * w[i];
        wy[i] = Complex64::new(0.0, xi[1]) * w[i];
    }
    for buf in [&mut u, &mut v, &mut wx, &mut wy] {
        grid.transform(buf, true);
    }
    let mut out: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(-(u[i].re * wx[i].re + v[i].re * wy[i].re), 0.0))
        .collect();
    grid.transform(&mut out, false);
    out[0] = ZERO;
    if let Some(mask) = mask {
        out.iter_mut().zip(mask).filter(|(_, k)| !**k).for_each(|(z, _)| *z = ZERO);
    }
    out
}

/// Precomputed single-step update for one configuration.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: PeriodicGrid,
    dt: f64,
    rates: Vec<f64>,
    decay: Vec<f64>,
    mask: Option<Vec<bool>>,
    forcing: Option<Vec<Complex64>>,
    // (flat index of one mode of each conjugate pair, σ_k √dt)
    noise: Vec<(usize, f64)>,
    nonlinear: bool,
}

impl Stepper {
    /// Build from a configuration. Only the dissipation law, forcing and
    /// noise are read; no positivity check is made on the viscosity.
    pub fn new(config: &SimConfig) -> Result<Self> {
        let grid = config.grid.clone();
        let dt = config.dt;
        let rates = config.dissipation.rates(&grid)?;
        let decay = rates.iter().map(|r| (-dt * r).exp()).collect();
        let forcing = config.forcing_vorticity()?.map(|f| f.values(0).to_vec());
        let noise = config
            .noise_variances()
            .into_iter()
            .enumerate()
            .filter(|&(i, var)| var > 0.0 && i < grid.mirror(i))
            .map(|(i, var)| (i, (var * dt).sqrt()))
            .collect();
        Ok(Self {
            mask: config.dealias.then(|| dealias_mask(&grid)),
            grid,
            dt,
            rates,
            decay,
            forcing,
            noise,
            nonlinear: config.nonlinear,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Modal dissipation rates in FFT order.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Advective Courant check; a no-op without advection.
    pub fn check_cfl(&self, state: &VelocityState) -> Result<()> {
        if !self.nonlinear {
            return Ok(());
        }
        let umax = state.max_speed();
        let h = self.grid.spacing();
        if self.dt * umax / h > CFL_LIMIT {
            return Err(Error::Stability {
                dt: self.dt,
                suggested: CFL_LIMIT * h / umax,
            });
        }
        Ok(())
    }

    /// Advance one step and return the energy-balance residual
    ///
    /// ```text
    /// r = Δ(½‖u‖²) + dt·D(u) - dt·⟨f, u⟩ - (noise contribution)
    /// ```
    ///
    /// with `D` and `⟨f, u⟩` evaluated at the start of the step. The noise
    /// contribution is the pathwise energy added by the noise increment.
    pub fn step(&self, state: &mut VelocityState, rng: &mut ChaCha8Rng) -> Result<f64> {
        let grid = &self.grid;
        let dt = self.dt;
        let w = state.vorticity.values(0);
        let before = 0.5 * inverse_laplacian_sum(grid, w, |_| 1.0);
        let dissipation = inverse_laplacian_sum(grid, w, |i| self.rates[i]);
        let power = self.forcing.as_ref().map_or(0.0, |g| {
            let sum: f64 = (1..grid.len())
                .map(|i| (g[i] * w[i].conj()).re / grid.wavevector_norm_sq(i))
                .sum();
            grid.measure() * sum
        });

        let n_hat = self
            .nonlinear
            .then(|| advection(grid, w, self.mask.as_deref()));
        let mut next: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let mut tend = n_hat.as_ref().map_or(ZERO, |n| n[i]);
                if let Some(g) = &self.forcing {
                    tend += g[i];
                }
                (w[i] + tend * dt) * self.decay[i]
            })
            .collect();
        next[0] = ZERO;
        let after = 0.5 * inverse_laplacian_sum(grid, &next, |_| 1.0);
        let residual = after - before + dt * dissipation - dt * power;

        for &(i, amp) in &self.noise {
            let z = complex_normal(rng) * amp;
            next[i] += z;
            let m = grid.mirror(i);
            next[m] += z.conj();
        }

        state.steps += 1;
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::BlowUp { step: state.steps });
        }
        state.vorticity.values_mut(0).copy_from_slice(&next);
        Ok(residual)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::SeedableRng;

    use super::*;
    use crate::sim::{Dissipation, InitialCondition};

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::square(n, 1.0).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> VelocityState {
        let cfg = SimConfig {
            grid: grid(n),
            seed,
            initial: InitialCondition::Random {
                shells: (1, n / 4),
                amplitude: 1.0,
            },
            ..SimConfig::default()
        };
        VelocityState::new(cfg.initial_vorticity().unwrap()).unwrap()
    }

    #[test]
    fn velocity_is_divergence_free() {
        let s = random_state(32, 3);
        assert!(s.divergence_defect() < 1e-12);
        let u = s.velocity();
        assert!(u.hermitian_defect().unwrap() < 1e-14);
    }

    #[test]
    fn energy_matches_physical_quadrature() {
        let s = random_state(32, 5);
        let u = s.velocity().into_physical();
        let direct = u.l2_norm_physical().unwrap().powi(2);
        assert!((s.energy() - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn projection_annihilates_gradients_and_is_idempotent() {
        let g = grid(16);
        let phi = SpectralField::from_fn(&g, |x| (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos());
        let grad = phi.gradient().unwrap().into_fourier();
        assert!(leray_project(&grad).unwrap().max_abs() < 1e-13);

        let v = SpectralField::from_real_components(
            &g,
            vec![
                (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect(),
                (0..g.len()).map(|i| (i as f64 * 0.11).cos()).collect(),
            ],
        )
        .unwrap()
        .into_fourier();
        let p = leray_project(&v).unwrap();
        let pp = leray_project(&p).unwrap();
        for c in 0..2 {
            for (a, b) in p.values(c).iter().zip(pp.values(c)) {
                assert!((a - b).norm() < 1e-13);
            }
        }
        assert_eq!(p.values(0)[0], v.values(0)[0]);
    }

    #[test]
    fn cellular_mode_is_a_steady_euler_flow() {
        let g = grid(32);
        let w = SpectralField::from_fn(&g, |x| 3.0 * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos());
        let s = VelocityState::new(w).unwrap();
        assert!(nonlinear_term(&s, true).max_abs() < 1e-12);
    }

    #[test]
    fn advection_conserves_energy_and_enstrophy() {
        let s = random_state(32, 7);
        let n = nonlinear_term(&s, true);
        let g = s.grid();
        let w = s.vorticity().values(0);
        let enstrophy_flux: f64 = (0..g.len()).map(|i| (n.values(0)[i] * w[i].conj()).re).sum();
        let energy_flux: f64 = (1..g.len())
            .map(|i| (n.values(0)[i] * w[i].conj()).re / g.wavevector_norm_sq(i))
            .sum();
        let scale: f64 = n.values(0).iter().map(|z| z.norm()).sum::<f64>();
        assert!(enstrophy_flux.abs() < 1e-10 * scale, "{enstrophy_flux}");
        assert!(energy_flux.abs() < 1e-10 * scale, "{energy_flux}");
    }

    #[test]
    fn viscous_step_decreases_energy() {
        let cfg = SimConfig {
            grid: grid(32),
            dt: 1e-3,
            ..SimConfig::default()
        };
        let stepper = Stepper::new(&cfg).unwrap();
        let mut s = random_state(32, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let e0 = s.energy();
            stepper.step(&mut s, &mut rng).unwrap();
            assert!(s.energy() < e0);
            assert_eq!(s.vorticity().values(0)[0], ZERO);
        }
        assert_eq!(s.steps(), 20);
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let cfg = SimConfig {
            grid: grid(16),
            dt: 1e-3,
            dissipation: Dissipation::Viscosity(-1e6),
            ..SimConfig::default()
        };
        let stepper = Stepper::new(&cfg).unwrap();
        let mut s = random_state(16, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = (0..50).try_for_each(|_| stepper.step(&mut s, &mut rng).map(|_| ()));
        assert!(matches!(err, Err(Error::BlowUp { step: 1 })));
    }
}
