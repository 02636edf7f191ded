//! Periodic grids, spectral fields and Fourier multipliers.
//!
//! Fields live on the torus `[0, L)^d` with `d` in {1, 2}. The forward
//! transform is normalised so that a constant field `c` has the single
//! coefficient `c` at `k = 0`:
//!
//! ```text
//! f̂(k) = (1/N) Σ_j f(x_j) exp(-i ξ_k · x_j),   ξ_k = 2πk/L
//! ```
//!
//! With that convention Parseval reads `h^d Σ|f_j|² = |Ω| Σ|f̂_k|²`.
//!
//! Two-dimensional arrays are stored row-major with `x` varying fastest,
//! i.e. `flat = iy * n + ix`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid with cached FFT plans.
#[derive(Clone)]
pub struct PeriodicGrid {
    dim: usize,
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::config(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::config(format!(
                "points per dimension must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("side length must be positive, got {length}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            dim,
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn line(n: usize, length: f64) -> Result<Self> {
        Self::new(1, n, length)
    }

    pub fn square(n: usize, length: f64) -> Result<Self> {
        Self::new(2, n, length)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of a single grid point, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Domain measure `L^dim`.
    pub fn measure(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Signed integer mode for an FFT-ordered index, in `[-n/2, n/2)`.
    pub fn mode(&self, index: usize) -> i64 {
        let half = self.n / 2;
        if index < half {
            index as i64
        } else {
            index as i64 - self.n as i64
        }
    }

    /// FFT-ordered index of a signed mode (taken modulo `n`).
    pub fn index_of_mode(&self, mode: i64) -> usize {
        mode.rem_euclid(self.n as i64) as usize
    }

    pub fn wavenumber(&self, mode: i64) -> f64 {
        2.0 * PI * mode as f64 / self.length
    }

    pub fn flat_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub(crate) fn split(&self, flat: usize) -> (usize, usize) {
        (flat % self.n, flat / self.n)
    }

    /// Integer mode vector of a flat index; the second entry is 0 in 1D.
    pub fn mode_vector(&self, flat: usize) -> [i64; 2] {
        let (ix, iy) = self.split(flat);
        if self.dim == 1 {
            [self.mode(ix), 0]
        } else {
            [self.mode(ix), self.mode(iy)]
        }
    }

    /// Flat index of an integer mode vector.
    pub fn flat_of_mode(&self, mode: [i64; 2]) -> usize {
        let ix = self.index_of_mode(mode[0]);
        if self.dim == 1 {
            ix
        } else {
            self.flat_index(ix, self.index_of_mode(mode[1]))
        }
    }

    /// Physical wavevector ξ of a flat index; the second entry is 0 in 1D.
    pub fn wavevector(&self, flat: usize) -> [f64; 2] {
        let m = self.mode_vector(flat);
        [self.wavenumber(m[0]), self.wavenumber(m[1])]
    }

    pub fn wavevector_norm_sq(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        xi[0] * xi[0] + xi[1] * xi[1]
    }

    /// Index of `-k` for the mode stored at `flat`. The Nyquist mode maps to itself.
    pub fn mirror(&self, flat: usize) -> usize {
        let (ix, iy) = self.split(flat);
        let mx = (self.n - ix) % self.n;
        if self.dim == 1 {
            mx
        } else {
            self.flat_index(mx, (self.n - iy) % self.n)
        }
    }

    /// Whether the mode at `flat` sits on the Nyquist line of `axis`.
    pub fn is_nyquist(&self, flat: usize, axis: usize) -> bool {
        let (ix, iy) = self.split(flat);
        let i = if axis == 0 { ix } else { iy };
        i == self.n / 2
    }

    /// Physical coordinates of grid node `flat`.
    pub fn node(&self, flat: usize) -> [f64; 2] {
        let (ix, iy) = self.split(flat);
        let h = self.spacing();
        if self.dim == 1 {
            [ix as f64 * h, 0.0]
        } else {
            [ix as f64 * h, iy as f64 * h]
        }
    }

    pub(crate) fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        plan.process(data);
        if self.dim == 2 {
            transpose_square(data, self.n);
            plan.process(data);
            transpose_square(data, self.n);
        }
        if !inverse {
            let scale = 1.0 / self.len() as f64;
            data.iter_mut().for_each(|c| *c *= scale);
        }
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Fourier,
}

impl Representation {
    fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Fourier => "Fourier",
        }
    }
}

/// Scalar or vector field on a [`PeriodicGrid`].
///
/// Values are always stored as complex numbers. A field tagged real has
/// zero imaginary part in physical space and Hermitian-symmetric
/// coefficients in Fourier space.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: PeriodicGrid,
    data: Vec<Vec<Complex64>>,
    repr: Representation,
    real: bool,
}

impl SpectralField {
    /// Real scalar field sampled from `f` at the grid nodes. `f` receives
    /// a coordinate slice of length `dim`.
    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len())
            .map(|i| Complex64::new(f(&grid.node(i)[..d]), 0.0))
            .collect();
        Self {
            grid: grid.clone(),
            data: vec![values],
            repr: Representation::Physical,
            real: true,
        }
    }

    pub fn from_real(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_real_components(grid, vec![values])
    }

    pub fn from_real_components(grid: &PeriodicGrid, components: Vec<Vec<f64>>) -> Result<Self> {
        let data = components
            .into_iter()
            .map(|c| {
                check_len(grid, c.len())?;
                Ok(c.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
            })
            .collect::<Result<Vec<Vec<Complex64>>>>()?;
        Self::assemble(grid, data, Representation::Physical, true)
    }

    /// Field from Fourier coefficients in FFT order.
    pub fn from_coefficients(
        grid: &PeriodicGrid,
        components: Vec<Vec<Complex64>>,
        real: bool,
    ) -> Result<Self> {
        for c in &components {
            check_len(grid, c.len())?;
        }
        Self::assemble(grid, components, Representation::Fourier, real)
    }

    pub fn zeros(grid: &PeriodicGrid, components: usize, repr: Representation) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; components.max(1)],
            repr,
            real: true,
        }
    }

    /// Stack scalar fields into a vector field. All parts must share grid and representation.
    pub fn stack(parts: Vec<SpectralField>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::config("cannot stack an empty list of fields"))?;
        let grid = first.grid.clone();
        let repr = first.repr;
        let mut real = true;
        let mut data = Vec::with_capacity(parts.len());
        for p in parts {
            if p.grid != grid || p.repr != repr {
                return Err(Error::config("stacked fields must share grid and representation"));
            }
            real &= p.real;
            data.extend(p.data);
        }
        Self::assemble(&grid, data, repr, real)
    }

    fn assemble(
        grid: &PeriodicGrid,
        data: Vec<Vec<Complex64>>,
        repr: Representation,
        real: bool,
    ) -> Result<Self> {
        if data.is_empty() || data.len() > 2 {
            return Err(Error::config(format!(
                "a field has 1 or 2 components, got {}",
                data.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            data,
            repr,
            real,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.data.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    /// Raw values of component `c` in the current representation.
    pub fn values(&self, c: usize) -> &[Complex64] {
        &self.data[c]
    }

    pub(crate) fn values_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c]
    }

    /// Real parts of component `c`; requires the physical representation.
    pub fn real_values(&self, c: usize) -> Result<Vec<f64>> {
        self.expect(Representation::Physical)?;
        Ok(self.data[c].iter().map(|z| z.re).collect())
    }

    /// Scalar field holding component `c`.
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            data: vec![self.data[c].clone()],
            repr: self.repr,
            real: self.real,
        }
    }

    pub(crate) fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::Representation {
                expected: repr.name(),
                found: self.repr.name(),
            })
        }
    }

    pub(crate) fn expect_scalar(&self) -> Result<()> {
        if self.is_scalar() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "operation needs a scalar field, got {} components",
                self.components()
            )))
        }
    }

    /// Forward transform. The field must be in physical representation.
    pub fn to_fourier(&self) -> Result<Self> {
        self.expect(Representation::Physical)?;
        Ok(self.clone().into_fourier())
    }

    /// Inverse transform. The field must be in Fourier representation.
    pub fn to_physical(&self) -> Result<Self> {
        self.expect(Representation::Fourier)?;
        Ok(self.clone().into_physical())
    }

    /// Fourier representation, transforming only if needed.
    pub fn into_fourier(mut self) -> Self {
        if self.repr == Representation::Physical {
            for c in &mut self.data {
                self.grid.transform(c, false);
            }
            self.repr = Representation::Fourier;
        }
        self
    }

    /// Physical representation, transforming only if needed.
    pub fn into_physical(mut self) -> Self {
        if self.repr == Representation::Fourier {
            for c in &mut self.data {
                self.grid.transform(c, true);
                if self.real {
                    c.iter_mut().for_each(|z| z.im = 0.0);
                }
            }
            self.repr = Representation::Physical;
        }
        self
    }

    fn into_repr(self, repr: Representation) -> Self {
        match repr {
            Representation::Physical => self.into_physical(),
            Representation::Fourier => self.into_fourier(),
        }
    }

    /// `(∫ |f|² dx)^{1/2}` by the grid quadrature; summed over components.
    pub fn l2_norm_physical(&self) -> Result<f64> {
        self.expect(Representation::Physical)?;
        let sum: f64 = self.data.iter().flatten().map(|z| z.norm_sqr()).sum();
        Ok((self.grid.cell_volume() * sum).sqrt())
    }

    /// `(|Ω| Σ |f̂_k|²)^{1/2}`; equals [`Self::l2_norm_physical`] by Parseval.
    pub fn l2_norm_spectral(&self) -> Result<f64> {
        self.expect(Representation::Fourier)?;
        let sum: f64 = self.data.iter().flatten().map(|z| z.norm_sqr()).sum();
        Ok((self.grid.measure() * sum).sqrt())
    }

    /// Largest violation of `f̂(-k) = conj f̂(k)` over all components.
    pub fn hermitian_defect(&self) -> Result<f64> {
        self.expect(Representation::Fourier)?;
        let mut worst = 0.0f64;
        for c in &self.data {
            for (i, z) in c.iter().enumerate() {
                let m = self.grid.mirror(i);
                worst = worst.max((z - c[m].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Multiply every Fourier coefficient by `m(ξ)`.
    ///
    /// `m` receives the wavevector as a slice of length `dim`. The real tag
    /// survives only when `m` is even on the grid.
    pub fn apply_multiplier(&self, m: impl Fn(&[f64]) -> f64) -> Result<Self> {
        self.expect(Representation::Fourier)?;
        let d = self.grid.dim();
        let len = self.grid.len();
        let mut symbol = Vec::with_capacity(len);
        for i in 0..len {
            let xi = self.grid.wavevector(i);
            let v = m(&xi[..d]);
            if !v.is_finite() {
                return Err(Error::domain(format!(
                    "multiplier is not finite at wavenumber {:?} (mode {:?})",
                    &xi[..d],
                    &self.grid.mode_vector(i)[..d]
                )));
            }
            symbol.push(v);
        }
        let even = (0..len).all(|i| symbol[i] == symbol[self.grid.mirror(i)]);
        let mut out = self.clone();
        for c in &mut out.data {
            c.iter_mut().zip(&symbol).for_each(|(z, s)| *z *= *s);
        }
        out.real = self.real && even;
        Ok(out)
    }

    /// Riesz fractional derivative: coefficients `|ξ|^s f̂(ξ)`.
    ///
    /// For `s > 0` the mean mode is annihilated; `s = 0` is the identity.
    /// The result is returned in the representation of `self`.
    pub fn fractional_gradient(&self, s: f64) -> Result<Self> {
        self.expect_scalar()?;
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::domain(format!("fractional order must be >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(self.clone());
        }
        let repr = self.repr;
        let spectral = self.clone().into_fourier();
        let half = 0.5 * s;
        let out = spectral.apply_multiplier(|xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            if r2 == 0.0 {
                0.0
            } else {
                r2.powf(half)
            }
        })?;
        Ok(out.into_repr(repr))
    }

    /// Spectral gradient; component `j` has coefficients `i ξ_j f̂(ξ)`.
    ///
    /// The Nyquist line of each axis is dropped so that real input stays real.
    pub fn gradient(&self) -> Result<Self> {
        self.expect_scalar()?;
        let repr = self.repr;
        let spectral = self.clone().into_fourier();
        let grid = &spectral.grid;
        let mut comps = Vec::with_capacity(grid.dim());
        for axis in 0..grid.dim() {
            let coeffs = spectral.data[0]
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    if grid.is_nyquist(i, axis) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        z * Complex64::new(0.0, grid.wavevector(i)[axis])
                    }
                })
                .collect();
            comps.push(coeffs);
        }
        let out = SpectralField {
            grid: grid.clone(),
            data: comps,
            repr: Representation::Fourier,
            real: self.real,
        };
        Ok(out.into_repr(repr))
    }

    /// `a * self`, elementwise in the current representation.
    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().flatten().for_each(|z| *z *= a);
        out
    }

    /// `self + other`; grids, component counts and representations must agree.
    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid
            || self.repr != other.repr
            || self.components() != other.components()
        {
            return Err(Error::config("fields must share grid, shape and representation"));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        out.real = self.real && other.real;
        Ok(out)
    }

    /// Largest absolute value over all components, in the current representation.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_len(grid: &PeriodicGrid, len: usize) -> Result<()> {
    if len == grid.len() {
        Ok(())
    } else {
        Err(Error::config(format!(
            "expected {} grid values, got {len}",
            grid.len()
        )))
    }
}
