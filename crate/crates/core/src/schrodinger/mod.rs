//! Finite-difference Schrödinger-type operator `L = -Δ + V` on a box.
//!
//! The Laplacian is the second-order central-difference stencil. Dirichlet
//! boxes use nodes at `(i + 1) h` with `h = L/(n + 1)`; Neumann boxes use
//! cell centres `(i + 1/2) h` with `h = L/n` and a mirrored ghost value at
//! each wall, which keeps the stencil symmetric. In 2D the operator is the
//! Kronecker sum of the 1D stencils, indexed `iy * n + ix`.

mod eigen;
mod sparse;

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use eigen::{smallest, Eigenpairs, Solver, DENSE_LIMIT, RESIDUAL_TOL};
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::io::{read_grid_csv, write_grid_csv, GridHeader};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxGrid {
    dim: usize,
    n: usize,
    length: f64,
    bc: Boundary,
}

impl BoxGrid {
    pub fn new(dim: usize, n: usize, length: f64, bc: Boundary) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::config(format!("box dimension must be 1 or 2, got {dim}")));
        }
        if n < 3 {
            return Err(Error::config(format!("need at least 3 points per dimension, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("side length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length, bc })
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

    pub fn boundary(&self) -> Boundary {
        self.bc
    }

    /// Number of unknowns, `n^dim`.
    pub fn size(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        match self.bc {
            Boundary::Dirichlet => self.length / (self.n as f64 + 1.0),
            Boundary::Neumann => self.length / self.n as f64,
        }
    }

    fn coordinate(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.bc {
            Boundary::Dirichlet => (i as f64 + 1.0) * h,
            Boundary::Neumann => (i as f64 + 0.5) * h,
        }
    }

    /// Coordinates of unknown `idx`; the second entry is 0 in 1D.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = (idx % self.n, idx / self.n);
        if self.dim == 1 {
            [self.coordinate(ix), 0.0]
        } else {
            [self.coordinate(ix), self.coordinate(iy)]
        }
    }

    /// Exact eigenvalues of the discrete `-Δ` on this grid, ascending.
    pub fn laplacian_eigenvalues(&self) -> Vec<f64> {
        let h = self.spacing();
        let line: Vec<f64> = (0..self.n)
            .map(|j| {
                let arg = match self.bc {
                    Boundary::Dirichlet => (j as f64 + 1.0) * PI / (2.0 * (self.n as f64 + 1.0)),
                    Boundary::Neumann => j as f64 * PI / (2.0 * self.n as f64),
                };
                4.0 / (h * h) * arg.sin().powi(2)
            })
            .collect();
        let mut all: Vec<f64> = if self.dim == 1 {
            line
        } else {
            line.iter().flat_map(|a| line.iter().map(move |b| a + b)).collect()
        };
        all.sort_by(f64::total_cmp);
        all
    }
}

/// Bounded potential sampled at the unknowns of a [`BoxGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
}

impl Potential {
    pub fn new(grid: &BoxGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::config(format!(
                "potential has {} samples, grid needs {}",
                values.len(),
                grid.size()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("potential is not finite at node {i}")));
        }
        Ok(Self { values })
    }

    pub fn zero(grid: &BoxGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &BoxGrid, c: f64) -> Self {
        Self {
            values: vec![c; grid.size()],
        }
    }

    /// Sample `f` at the grid nodes; `f` gets a slice of length `dim`.
    pub fn from_fn(grid: &BoxGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = grid.dim();
        Self::new(grid, (0..grid.size()).map(|i| f(&grid.node(i)[..d])).collect())
    }

    /// Independent uniform samples in `[lo, hi)`.
    pub fn random(grid: &BoxGrid, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(grid, (0..grid.size()).map(|_| rng.random_range(lo..hi)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Read a potential written by [`Potential::save_csv`]; the header must
    /// match `grid`.
    pub fn load_csv(grid: &BoxGrid, path: &Path) -> Result<Self> {
        let (header, values) = read_grid_csv(path)?;
        if header.dim != grid.dim() || header.n != grid.n() || header.length != grid.length() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                message: format!(
                    "header dim={} n={} length={} does not match the box grid",
                    header.dim, header.n, header.length
                ),
            });
        }
        Self::new(grid, values)
    }

    pub fn save_csv(&self, grid: &BoxGrid, path: &Path) -> Result<()> {
        let header = GridHeader {
            dim: grid.dim(),
            n: grid.n(),
            length: grid.length(),
        };
        write_grid_csv(path, header, &self.values)
    }
}

/// Assembled matrix of `-Δ + V`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    grid: BoxGrid,
    matrix: CsrMatrix,
    potential_min: f64,
}

/// Matrix of `-Δ_h + diag(V)` for the grid's boundary condition.
pub fn assemble(grid: &BoxGrid, potential: &Potential) -> Result<DiscreteOperator> {
    let n = grid.n();
    if potential.values.len() != grid.size() {
        return Err(Error::config("potential does not match the grid"));
    }
    if potential.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("potential has non-finite entries"));
    }
    let inv_h2 = 1.0 / grid.spacing().powi(2);
    let line = line_stencil(n, grid.boundary(), inv_h2);
    let mut triplets = Vec::with_capacity(grid.size() * (1 + 2 * grid.dim()));
    match grid.dim() {
        1 => triplets.extend(line.iter().copied()),
        _ => {
            for outer in 0..n {
                for &(i, j, v) in &line {
                    triplets.push((outer * n + i, outer * n + j, v));
                    triplets.push((i * n + outer, j * n + outer, v));
                }
            }
        }
    }
    for (i, v) in potential.values.iter().enumerate() {
        triplets.push((i, i, *v));
    }
    Ok(DiscreteOperator {
        grid: *grid,
        matrix: CsrMatrix::from_triplets(grid.size(), triplets),
        potential_min: potential.min(),
    })
}

fn line_stencil(n: usize, bc: Boundary, inv_h2: f64) -> Vec<(usize, usize, f64)> {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        let wall = i == 0 || i == n - 1;
        let diag = match bc {
            Boundary::Neumann if wall => inv_h2,
            _ => 2.0 * inv_h2,
        };
        t.push((i, i, diag));
        if i + 1 < n {
            t.push((i, i + 1, -inv_h2));
            t.push((i + 1, i, -inv_h2));
        }
    }
    t
}

impl DiscreteOperator {
    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `C = min V` over the grid.
    pub fn potential_min(&self) -> f64 {
        self.potential_min
    }

    /// Add `delta` to the single stored entry `(i, j)`. Breaks symmetry on
    /// purpose; used to check that the symmetry diagnostics catch it.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, i: usize, j: usize, delta: f64) -> bool {
        self.matrix.perturb_entry(i, j, delta)
    }
}

/// Eigenvalue report returned by [`spectrum`].
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub solver: Solver,
}

/// `k` smallest eigenvalues of the operator, nondecreasing.
pub fn spectrum(op: &DiscreteOperator, k: usize) -> Result<Spectrum> {
    spectrum_with(op, k, Solver::Auto)
}

pub fn spectrum_with(op: &DiscreteOperator, k: usize, solver: Solver) -> Result<Spectrum> {
    let pairs = smallest(&op.matrix, k, solver)?;
    Ok(Spectrum {
        values: pairs.values,
        residuals: pairs.residuals,
        iterations: pairs.iterations,
        solver: pairs.solver,
    })
}

/// Number of random vector pairs probed by [`symmetry_defect`].
pub const SYMMETRY_PROBES: usize = 24;
const SYMMETRY_SEED: u64 = 0xad_1017;

/// `max |⟨Aψ,φ⟩ - ⟨ψ,Aφ⟩| / (‖ψ‖‖φ‖‖A‖)` over a fixed batch of random pairs.
pub fn symmetry_defect(op: &DiscreteOperator) -> f64 {
    matrix_symmetry_defect(&op.matrix)
}

pub fn matrix_symmetry_defect(a: &CsrMatrix) -> f64 {
    let n = a.size();
    let norm = a.inf_norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SYMMETRY_SEED);
    let mut worst = 0.0f64;
    for _ in 0..SYMMETRY_PROBES {
        let psi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let phi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = dot(&a.apply(&psi), &phi);
        let rhs = dot(&psi, &a.apply(&phi));
        let scale = norm * dot(&psi, &psi).sqrt() * dot(&phi, &phi).sqrt();
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tolerance on min-max margins.
pub const MARGIN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct MinMaxReport {
    /// Eigenvalues of `-Δ + V`.
    pub values: Vec<f64>,
    /// Eigenvalues of `-Δ + min V`.
    pub lower: Vec<f64>,
    /// `values[j] - lower[j]`.
    pub margins: Vec<f64>,
}

impl MinMaxReport {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.margins.iter().all(|m| *m >= -MARGIN_TOL)
    }
}

/// Compare the spectrum of `-Δ + V` with that of `-Δ + min V` index by index.
pub fn minmax_check(grid: &BoxGrid, potential: &Potential, k: usize) -> Result<MinMaxReport> {
    let op = assemble(grid, potential)?;
    let floor = assemble(grid, &Potential::constant(grid, potential.min()))?;
    let values = spectrum(&op, k)?.values;
    let lower = spectrum(&floor, k)?.values;
    let margins = values.iter().zip(&lower).map(|(a, b)| a - b).collect();
    Ok(MinMaxReport {
        values,
        lower,
        margins,
    })
}

/// Width of the accepted window around the Weyl exponent `2/d`.
pub const GROWTH_EXPONENT_WINDOW: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub values: Vec<f64>,
    /// Least-squares slope of `ln(λ_j - min V)` against `ln j`.
    pub exponent: f64,
    /// Weyl exponent `2/d` of the grid dimension.
    pub expected_exponent: f64,
    /// `λ_k - λ_1` compared with `μ_k - μ_1 - osc V`, where `μ` is the
    /// discrete Laplacian spectrum.
    pub spread: f64,
    pub baseline_spread: f64,
    pub passed: bool,
}

/// Check that the low spectrum grows with the Weyl-type trend of the grid.
pub fn growth_check(grid: &BoxGrid, potential: &Potential, k: usize) -> Result<GrowthReport> {
    if k < 3 {
        return Err(Error::config("growth check needs at least 3 eigenvalues"));
    }
    let op = assemble(grid, potential)?;
    let values = spectrum(&op, k)?.values;
    let shift = potential.min();
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(j, &lam)| {
            let v = lam - shift;
            (v > 0.0).then(|| (((j + 1) as f64).ln(), v.ln()))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::domain("too few positive shifted eigenvalues to fit a growth exponent"));
    }
    let exponent = fit_slope(&points);
    let expected_exponent = 2.0 / grid.dim() as f64;
    let mu = grid.laplacian_eigenvalues();
    let oscillation = potential.max() - potential.min();
    let spread = values[k - 1] - values[0];
    let baseline_spread = mu[k - 1] - mu[0] - oscillation;
    let passed = (exponent - expected_exponent).abs() <= GROWTH_EXPONENT_WINDOW
        && spread >= baseline_spread * (1.0 - 1e-9) - 1e-9;
    Ok(GrowthReport {
        values,
        exponent,
        expected_exponent,
        spread,
        baseline_spread,
        passed,
    })
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
