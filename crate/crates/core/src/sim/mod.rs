//! Two-dimensional stochastic Navier-Stokes on the torus in vorticity form.
//!
//! The evolved quantity is the scalar vorticity `ω = ∂_x v - ∂_y u`. The
//! velocity is recovered from the streamfunction, `ψ̂ = ω̂ / |ξ|²`,
//! `u = (∂_y ψ, -∂_x ψ)`, so it is divergence-free by construction.
//!
//! ```text
//! dω = (-𝒟ω - (u·∇)ω + g) dt + dW
//! ```
//!
//! `𝒟` is either `ν(-Δ)` or an anisotropic multiplier `P̂(Σξ)`, `g` is a
//! static vorticity forcing and `W` is Gaussian noise, white in time and
//! supported on the lowest wavenumber shells.
//!
//! Time stepping multiplies by the exact modal decay `e^{-λ_k dt}` and
//! treats advection, forcing and noise explicitly:
//!
//! ```text
//! ω̂ ← e^{-λ dt} (ω̂ + dt (N̂ + ĝ)) + σ √dt ζ
//! ```

mod ensemble;
mod gronwall;
mod state;

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use ensemble::{residual_study, run_ensemble, run_member, EnsembleStats, ResidualStudy};
pub use gronwall::{gronwall_check, GronwallReport, FIT_FRACTION};
pub use state::{dealias_mask, leray_project, nonlinear_term, velocity_from_vorticity, Stepper, VelocityState};

use crate::anisotropic::AnisotropySpec;
use crate::error::{Error, Result};
use crate::norms::NormParams;
use crate::spectral::{PeriodicGrid, Representation, SpectralField};

/// Wavenumber shells that receive noise.
pub const NOISE_SHELLS: RangeInclusive<usize> = 1..=4;

/// Largest advective Courant number `dt·max|u|/h` accepted at start.
pub const CFL_LIMIT: f64 = 0.5;

// RNG streams reserved for set-up draws; members use streams 0..M.
const INITIAL_STREAM: u64 = u64::MAX;
const FORCING_STREAM: u64 = u64::MAX - 1;
pub(crate) const FIELD_STREAM: u64 = u64::MAX - 2;

/// Modal dissipation law.
#[derive(Clone, Debug, PartialEq)]
pub enum Dissipation {
    /// `λ_k = ν |ξ_k|²`.
    Viscosity(f64),
    /// `λ_k = P̂(Σ ξ_k)`.
    Anisotropic(AnisotropySpec),
}

impl Dissipation {
    /// Rate of every grid mode in FFT order.
    pub fn rates(&self, grid: &PeriodicGrid) -> Result<Vec<f64>> {
        match self {
            Dissipation::Viscosity(nu) => {
                Ok((0..grid.len()).map(|i| nu * grid.wavevector_norm_sq(i)).collect())
            }
            Dissipation::Anisotropic(spec) => spec.rates(grid),
        }
    }

    /// Smallest rate over nonzero modes.
    pub fn min_nonzero_rate(&self, grid: &PeriodicGrid) -> Result<f64> {
        Ok(self.rates(grid)?[1..].iter().copied().fold(f64::INFINITY, f64::min))
    }
}

/// Static vorticity forcing `g`.
#[derive(Clone, Debug)]
pub enum Forcing {
    None,
    /// `amplitude · cos(ξ_k · x)` for the integer mode `k`.
    Mode { mode: [i64; 2], amplitude: f64 },
    /// Random phases on the shells `lo..=hi`, scaled to the given RMS
    /// value. Drawn once from the master seed.
    Band { shells: (usize, usize), amplitude: f64 },
    /// Explicit real scalar field on the simulation grid.
    Field(SpectralField),
}

/// Initial vorticity.
#[derive(Clone, Debug)]
pub enum InitialCondition {
    Zero,
    /// `amplitude · cos(ξ_k · x)`.
    Mode { mode: [i64; 2], amplitude: f64 },
    /// Random phases on the shells `lo..=hi` with the given RMS value,
    /// drawn from the master seed and shared by all members.
    Random { shells: (usize, usize), amplitude: f64 },
    Field(SpectralField),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    /// Two-dimensional periodic grid.
    pub grid: PeriodicGrid,
    pub dissipation: Dissipation,
    pub dt: f64,
    /// Final time `T`.
    pub horizon: f64,
    /// Spacing of recorded samples; a multiple of `dt`.
    pub sample_interval: f64,
    pub forcing: Forcing,
    pub initial: InitialCondition,
    /// Square root of the total noise variance per unit time, `Σ σ_k² = A²`.
    pub noise_amplitude: f64,
    /// Ensemble size `M`.
    pub ensemble_size: usize,
    pub seed: u64,
    pub norm_params: NormParams,
    /// 2/3-rule truncation of the advection term.
    pub dealias: bool,
    /// `false` drops advection (linear Stokes dynamics).
    pub nonlinear: bool,
    /// Integer wavenumber separating the directional enstrophy bands.
    pub band_cutoff: i64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid: PeriodicGrid::square(64, 2.0 * std::f64::consts::PI).expect("valid default grid"),
            dissipation: Dissipation::Viscosity(0.05),
            dt: 0.005,
            horizon: 1.0,
            sample_interval: 0.05,
            forcing: Forcing::None,
            initial: InitialCondition::Random {
                shells: (1, 4),
                amplitude: 1.0,
            },
            noise_amplitude: 0.0,
            ensemble_size: 16,
            seed: 0,
            norm_params: NormParams::default(),
            dealias: true,
            nonlinear: true,
            band_cutoff: 4,
        }
    }
}

impl SimConfig {
    /// Check every invariant except the advective CFL bound, which needs the
    /// initial state.
    pub fn validate(&self) -> Result<()> {
        if self.grid.dim() != 2 {
            return Err(Error::config("the simulator needs a two-dimensional grid"));
        }
        match &self.dissipation {
            Dissipation::Viscosity(nu) if !(nu.is_finite() && *nu > 0.0) => {
                return Err(Error::config(format!("viscosity must be positive, got {nu}")));
            }
            Dissipation::Anisotropic(spec) if spec.dim() != 2 => {
                return Err(Error::config("sigma must be 2x2 for the simulator"));
            }
            _ => {}
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::config(format!(
                "horizon T = {} must be at least dt = {}",
                self.horizon, self.dt
            )));
        }
        self.steps_per_sample()?;
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(Error::config(format!(
                "noise amplitude must be >= 0, got {}",
                self.noise_amplitude
            )));
        }
        if self.ensemble_size == 0 {
            return Err(Error::config("ensemble size must be at least 1"));
        }
        if self.band_cutoff < 1 || self.band_cutoff >= self.grid.n() as i64 / 2 {
            return Err(Error::config(format!(
                "band cutoff must lie in [1, n/2), got {}",
                self.band_cutoff
            )));
        }
        for field in [self.forcing_field_ref(), self.initial_field_ref()].into_iter().flatten() {
            if field.grid() != &self.grid || !field.is_scalar() || !field.is_real() {
                return Err(Error::config(
                    "forcing and initial fields must be real scalars on the simulation grid",
                ));
            }
        }
        Ok(())
    }

    fn forcing_field_ref(&self) -> Option<&SpectralField> {
        match &self.forcing {
            Forcing::Field(f) => Some(f),
            _ => None,
        }
    }

    fn initial_field_ref(&self) -> Option<&SpectralField> {
        match &self.initial {
            InitialCondition::Field(f) => Some(f),
            _ => None,
        }
    }

    /// Number of time steps, `round(T/dt)` when `T` is a multiple of `dt`
    /// and `floor(T/dt)` otherwise.
    pub fn steps(&self) -> usize {
        step_count(self.horizon, self.dt)
    }

    pub fn steps_per_sample(&self) -> Result<usize> {
        let ratio = self.sample_interval / self.dt;
        let k = ratio.round();
        if !(k >= 1.0 && (ratio - k).abs() <= 1e-9 * k) {
            return Err(Error::config(format!(
                "sample interval {} must be a positive multiple of dt = {}",
                self.sample_interval, self.dt
            )));
        }
        Ok(k as usize)
    }

    /// Sample instants `0, Δ, 2Δ, ...` up to the last completed step.
    pub fn sample_times(&self) -> Result<Vec<f64>> {
        let sps = self.steps_per_sample()?;
        Ok((0..=self.steps() / sps)
            .map(|j| (j * sps) as f64 * self.dt)
            .collect())
    }

    /// Initial vorticity in Fourier form with the mean removed.
    pub fn initial_vorticity(&self) -> Result<SpectralField> {
        let field = match &self.initial {
            InitialCondition::Zero => SpectralField::zeros(&self.grid, 1, Representation::Fourier),
            InitialCondition::Mode { mode, amplitude } => cosine_mode(&self.grid, *mode, *amplitude)?,
            InitialCondition::Random { shells, amplitude } => {
                random_band(&self.grid, *shells, *amplitude, self.seed, INITIAL_STREAM)?
            }
            InitialCondition::Field(f) => f.clone(),
        };
        let mut field = field.into_fourier();
        field.values_mut(0)[0] = Complex64::new(0.0, 0.0);
        if self.dealias {
            apply_mask(&mut field, &dealias_mask(&self.grid));
        }
        Ok(field)
    }

    /// Vorticity forcing in Fourier form, `None` when identically zero.
    pub fn forcing_vorticity(&self) -> Result<Option<SpectralField>> {
        let field = match &self.forcing {
            Forcing::None => return Ok(None),
            Forcing::Mode { mode, amplitude } => cosine_mode(&self.grid, *mode, *amplitude)?,
            Forcing::Band { shells, amplitude } => {
                random_band(&self.grid, *shells, *amplitude, self.seed, FORCING_STREAM)?
            }
            Forcing::Field(f) => f.clone(),
        };
        let mut field = field.into_fourier();
        field.values_mut(0)[0] = Complex64::new(0.0, 0.0);
        if self.dealias {
            apply_mask(&mut field, &dealias_mask(&self.grid));
        }
        Ok((field.max_abs() > 0.0).then_some(field))
    }

    /// Per-mode noise variance `σ_k²` in FFT order. Modes on
    /// [`NOISE_SHELLS`] share the total `A²` equally; self-conjugate
    /// modes and modes removed by dealiasing get none.
    pub fn noise_variances(&self) -> Vec<f64> {
        let grid = &self.grid;
        let mask = self.dealias.then(|| dealias_mask(grid));
        let forced: Vec<bool> = (0..grid.len())
            .map(|i| {
                let shell = shell_of(grid, i);
                NOISE_SHELLS.contains(&shell)
                    && grid.mirror(i) != i
                    && !grid.is_nyquist(i, 0)
                    && !grid.is_nyquist(i, 1)
                    && mask.as_ref().is_none_or(|m| m[i])
            })
            .collect();
        let count = forced.iter().filter(|f| **f).count();
        let each = if count == 0 {
            0.0
        } else {
            self.noise_amplitude.powi(2) / count as f64
        };
        forced.into_iter().map(|f| if f { each } else { 0.0 }).collect()
    }
}

pub(crate) fn step_count(horizon: f64, dt: f64) -> usize {
    let ratio = horizon / dt;
    let k = ratio.round();
    if (ratio - k).abs() <= 1e-9 * k.max(1.0) {
        k as usize
    } else {
        ratio.floor() as usize
    }
}

/// Integer shell `round(|k|)` of a grid mode.
pub fn shell_of(grid: &PeriodicGrid, flat: usize) -> usize {
    let m = grid.mode_vector(flat);
    ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt().round() as usize
}

pub(crate) fn apply_mask(field: &mut SpectralField, mask: &[bool]) {
    for c in 0..field.components() {
        for (z, keep) in field.values_mut(c).iter_mut().zip(mask) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn cosine_mode(grid: &PeriodicGrid, mode: [i64; 2], amplitude: f64) -> Result<SpectralField> {
    let half = grid.n() as i64 / 2;
    if mode.iter().any(|m| !(-half < *m && *m < half)) {
        return Err(Error::config(format!("mode {mode:?} is not resolved on an n = {} grid", grid.n())));
    }
    let (kx, ky) = (grid.wavenumber(mode[0]), grid.wavenumber(mode[1]));
    Ok(SpectralField::from_fn(grid, |x| amplitude * (kx * x[0] + ky * x[1]).cos()))
}

/// Real random field with independent Gaussian Fourier coefficients on the
/// shells `lo..=hi`, scaled to the given RMS value. Works in one and two
/// dimensions and is returned in Fourier representation.
///
/// ```
/// use hybrid_turbulence::sim::random_field;
/// use hybrid_turbulence::spectral::PeriodicGrid;
///
/// let grid = PeriodicGrid::square(32, 1.0).unwrap();
/// let f = random_field(&grid, (1, 4), 2.0, 7).unwrap();
/// let rms = f.l2_norm_spectral().unwrap() / grid.measure().sqrt();
/// assert!((rms - 2.0).abs() < 1e-12);
/// ```
pub fn random_field(grid: &PeriodicGrid, shells: (usize, usize), rms: f64, seed: u64) -> Result<SpectralField> {
    random_band(grid, shells, rms, seed, FIELD_STREAM)
}

pub(crate) fn random_band(
    grid: &PeriodicGrid,
    shells: (usize, usize),
    rms: f64,
    seed: u64,
    stream: u64,
) -> Result<SpectralField> {
    let (lo, hi) = shells;
    if lo == 0 || lo > hi || hi >= grid.n() / 2 {
        return Err(Error::config(format!(
            "shell range {lo}..={hi} must satisfy 1 <= lo <= hi < n/2"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.len() {
        let m = grid.mirror(i);
        if i >= m || !(lo..=hi).contains(&shell_of(grid, i)) {
            continue;
        }
        let z = complex_normal(&mut rng);
        coeffs[i] = z;
        coeffs[m] = z.conj();
    }
    let energy: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if energy > 0.0 {
        let scale = rms / energy.sqrt();
        coeffs.iter_mut().for_each(|z| *z *= scale);
    }
    SpectralField::from_coefficients(grid, vec![coeffs], true)
}

/// Complex Gaussian with `E|z|² = 1`.
pub(crate) fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}
