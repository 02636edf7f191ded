//! Direction-dependent dissipation as a Fourier multiplier.
//!
//! The operator acts by `(𝒫u)^(ξ) = P̂(Σξ) û(ξ)` with `Σ` symmetric positive
//! definite and `P̂(ζ) = |ζ|^{2γ}`. Decay is fastest along the principal
//! axes of `Σ` with the largest eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::{hybrid_norm, NormParams};
use crate::schrodinger::fit_slope;
use crate::spectral::{PeriodicGrid, SpectralField};

/// Radial multiplier symbol. Every variant has `P̂(0) = 0`, is nonnegative
/// and nondecreasing in `|ζ|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    /// `|ζ|^{2γ}` with `γ ∈ [0.5, 2]`.
    Power { gamma: f64 },
    /// `P̂ ≡ 0`.
    Zero,
}

impl Symbol {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(0.5..=2.0).contains(&gamma) {
            return Err(Error::config(format!("symbol exponent gamma must lie in [0.5, 2], got {gamma}")));
        }
        Ok(Symbol::Power { gamma })
    }

    /// Classical viscosity, `|ζ|²`.
    pub fn laplacian() -> Self {
        Symbol::Power { gamma: 1.0 }
    }

    pub fn eval(&self, zeta: &[f64]) -> f64 {
        match *self {
            Symbol::Zero => 0.0,
            Symbol::Power { gamma } => {
                let r2: f64 = zeta.iter().map(|z| z * z).sum();
                if r2 == 0.0 {
                    0.0
                } else if gamma == 1.0 {
                    r2
                } else {
                    r2.powf(gamma)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnisotropySpec {
    sigma: DMatrix<f64>,
    symbol: Symbol,
}

impl AnisotropySpec {
    /// Validates that `sigma` is square, exactly symmetric and positive definite.
    pub fn new(sigma: DMatrix<f64>, symbol: Symbol) -> Result<Self> {
        let d = sigma.nrows();
        if d != sigma.ncols() || !(d == 1 || d == 2) {
            return Err(Error::config(format!(
                "sigma must be 1x1 or 2x2, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if sigma.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sigma has non-finite entries"));
        }
        if sigma != sigma.transpose() {
            return Err(Error::config("sigma must be symmetric"));
        }
        let eig = SymmetricEigen::new(sigma.clone());
        let lowest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if !(lowest > 0.0) {
            return Err(Error::config(format!(
                "sigma must be positive definite (smallest eigenvalue {lowest})"
            )));
        }
        if let Symbol::Power { gamma } = symbol {
            Symbol::power(gamma)?;
        }
        Ok(Self { sigma, symbol })
    }

    pub fn diagonal(diag: &[f64], symbol: Symbol) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)), symbol)
    }

    /// `Σ = scale · I` in `dim` dimensions.
    pub fn isotropic(dim: usize, scale: f64, symbol: Symbol) -> Result<Self> {
        Self::diagonal(&vec![scale; dim], symbol)
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    /// Modal dissipation rate `P̂(Σξ)`.
    pub fn rate(&self, xi: &[f64]) -> f64 {
        let d = self.dim();
        let mut zeta = [0.0; 2];
        for (i, z) in zeta.iter_mut().enumerate().take(d) {
            *z = (0..d).map(|j| self.sigma[(i, j)] * xi[j]).sum();
        }
        self.symbol.eval(&zeta[..d])
    }

    fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        if grid.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "sigma is {d}x{d} but the grid is {}-dimensional",
                grid.dim(),
                d = self.dim()
            )))
        }
    }

    /// Rate of every grid mode, in FFT order.
    pub fn rates(&self, grid: &PeriodicGrid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        let d = grid.dim();
        Ok((0..grid.len())
            .map(|i| self.rate(&grid.wavevector(i)[..d]))
            .collect())
    }

    /// Smallest rate over nonzero grid modes.
    pub fn min_nonzero_rate(&self, grid: &PeriodicGrid) -> Result<f64> {
        Ok(self.rates(grid)?[1..].iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// `P̂(Σξ) û(ξ)`.
    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        self.check_grid(u.grid())?;
        u.apply_multiplier(|xi| self.rate(xi))
    }

    /// Exact flow of `∂_t u = -𝒫u` over `dt`.
    pub fn semigroup_step(&self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("time step must be positive, got {dt}")));
        }
        self.check_grid(u.grid())?;
        u.apply_multiplier(|xi| (-dt * self.rate(xi)).exp())
    }

    /// Evolve a unit single-mode field to time `t` and fit its exponential decay rate.
    pub fn measure_decay(&self, grid: &PeriodicGrid, mode: [i64; 2], t: f64) -> Result<f64> {
        self.check_grid(grid)?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!("decay horizon must be positive, got {t}")));
        }
        let half = grid.n() as i64 / 2;
        let on_grid = |m: i64| (-half..half).contains(&m);
        if !on_grid(mode[0]) || !on_grid(mode[1]) || (grid.dim() == 1 && mode[1] != 0) {
            return Err(Error::domain(format!("mode {mode:?} is not on the grid")));
        }
        let idx = grid.flat_of_mode(mode);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        coeffs[idx] = Complex64::new(1.0, 0.0);
        let mut u = SpectralField::from_coefficients(grid, vec![coeffs], false)?;

        const SAMPLES: usize = 8;
        let dt = t / SAMPLES as f64;
        let mut points = vec![(0.0, 0.0)];
        for i in 1..=SAMPLES {
            u = self.semigroup_step(&u, dt)?;
            let amp = u.values(0)[idx].norm();
            if amp < 1e-250 {
                break;
            }
            points.push((i as f64 * dt, amp.ln()));
        }
        if points.len() < 2 {
            return Err(Error::domain(format!(
                "mode {mode:?} decays below resolution before t/{SAMPLES}; use a shorter horizon"
            )));
        }
        Ok(-fit_slope(&points))
    }

    /// Evolve `∂_t u = -𝒫u + f` with constant forcing and check the
    /// dissipation inequalities on `‖u(t)‖²_{B^s_{p,q}}`.
    ///
    /// The time stepper is the exact exponential integrator for constant
    /// forcing. `C` is the smallest nonzero modal rate on the grid; the
    /// forced bound is `‖u0‖² e^{-Ct} + sup‖f‖²_{B^{s-1}} / C`.
    pub fn dissipation_check(
        &self,
        u0: &SpectralField,
        forcing: Option<&SpectralField>,
        horizon: f64,
        dt: f64,
        params: NormParams,
    ) -> Result<DissipationReport> {
        let grid = u0.grid().clone();
        self.check_grid(&grid)?;
        u0.expect_scalar()?;
        if !u0.is_real() {
            return Err(Error::domain("initial field must be real-valued"));
        }
        if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon >= dt) {
            return Err(Error::domain(format!(
                "need 0 < dt <= T, got dt = {dt}, T = {horizon}"
            )));
        }
        let forcing = match forcing {
            Some(f) => {
                f.expect_scalar()?;
                if f.grid() != &grid || !f.is_real() {
                    return Err(Error::domain("forcing must be a real scalar field on the same grid"));
                }
                let f = f.clone().into_fourier();
                (f.max_abs() > 0.0).then_some(f)
            }
            None => None,
        };
        let rates = self.rates(&grid)?;
        let floor = rates[1..].iter().copied().fold(f64::INFINITY, f64::min);
        if floor > 0.0 && dt * floor > 1.0 {
            return Err(Error::Stability {
                dt,
                suggested: 0.5 / floor,
            });
        }

        let decay: Vec<f64> = rates.iter().map(|r| (-dt * r).exp()).collect();
        let gain: Vec<f64> = rates
            .iter()
            .zip(&decay)
            .map(|(r, e)| if *r * dt < 1e-12 { dt } else { (1.0 - e) / r })
            .collect();

        let steps = (horizon / dt + 1e-9).floor() as usize;
        let mut u = u0.clone().into_fourier();
        let mut times = Vec::with_capacity(steps + 1);
        let mut norm_sq = Vec::with_capacity(steps + 1);
        times.push(0.0);
        norm_sq.push(hybrid_norm(&u, params)?.powi(2));
        for step in 1..=steps {
            let f_hat = forcing.as_ref().map(|f| f.values(0));
            for (i, z) in u.values_mut(0).iter_mut().enumerate() {
                let push = f_hat.map_or(Complex64::new(0.0, 0.0), |f| f[i] * gain[i]);
                *z = *z * decay[i] + push;
            }
            times.push(step as f64 * dt);
            norm_sq.push(hybrid_norm(&u, params)?.powi(2));
        }

        let max_increase = norm_sq
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max);
        let monotone = max_increase <= MONOTONE_TOL;
        let decay_constant = if forcing.is_none() {
            let pts: Vec<(f64, f64)> = times
                .iter()
                .zip(&norm_sq)
                .filter(|(_, y)| **y > 0.0)
                .map(|(t, y)| (*t, y.ln()))
                .collect();
            (pts.len() >= 2).then(|| -fit_slope(&pts))
        } else {
            None
        };
        let (forcing_norm_sq, bound) = match (&forcing, floor > 0.0) {
            (Some(f), true) => {
                let s = hybrid_norm(f, params.lowered())?.powi(2);
                let b = times
                    .iter()
                    .map(|t| norm_sq[0] * (-floor * t).exp() + s / floor)
                    .collect();
                (Some(s), Some(b))
            }
            _ => (None, None),
        };
        let gronwall_ok = bound.as_ref().map(|b: &Vec<f64>| {
            norm_sq
                .iter()
                .zip(b)
                .all(|(y, bound)| *y <= bound * (1.0 + MONOTONE_TOL))
        });
        Ok(DissipationReport {
            times,
            norm_sq,
            rate_floor: floor,
            forcing_norm_sq,
            bound,
            monotone,
            max_increase,
            decay_constant,
            gronwall_ok,
        })
    }
}

/// Relative slack allowed when comparing consecutive norm samples.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DissipationReport {
    pub times: Vec<f64>,
    /// `‖u(t)‖²_{B^s_{p,q}}` at every step.
    pub norm_sq: Vec<f64>,
    /// Smallest nonzero modal rate, used as the Gronwall constant `C`.
    pub rate_floor: f64,
    /// `‖f‖²_{B^{s-1}}` for forced runs.
    pub forcing_norm_sq: Option<f64>,
    pub bound: Option<Vec<f64>>,
    pub monotone: bool,
    /// Largest relative step-to-step increase of the squared norm.
    pub max_increase: f64,
    /// Fitted exponential decay constant of the squared norm (unforced runs).
    pub decay_constant: Option<f64>,
    pub gronwall_ok: Option<bool>,
}

impl DissipationReport {
    /// Rows of `(t, norm², bound)`; the bound column is NaN when absent.
    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.times.iter().enumerate().map(move |(i, t)| {
            let b = self.bound.as_ref().map_or(f64::NAN, |b| b[i]);
            vec![*t, self.norm_sq[i], b]
        })
    }
}
