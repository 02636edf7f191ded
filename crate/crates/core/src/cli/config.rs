//! TOML configuration shared by all subcommands.
//!
//! Every key is optional. Unknown keys are rejected so that typos surface
//! as errors instead of silently falling back to defaults.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::anisotropic::{AnisotropySpec, Symbol};
use crate::error::{Error, Result};
use crate::io::read_grid_csv;
use crate::norms::NormParams;
use crate::schrodinger::{Boundary, BoxGrid, Potential, Solver};
use crate::sim::{random_band, Dissipation, Forcing, InitialCondition, SimConfig, FIELD_STREAM};
use crate::spectral::{PeriodicGrid, SpectralField};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Master seed for every random draw; `--seed` overrides it.
    pub seed: u64,
    /// Norm parameters used by `norm`, `dissipate` and `simulate`.
    pub norm: NormParams,
    /// Input of the `norm` command.
    pub field: FieldSpec,
    pub spectrum: SpectrumSection,
    pub dissipate: DissipateSection,
    pub simulate: SimulateSection,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            message: e.message().to_owned(),
        })
    }

    /// The fully resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is representable as TOML")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Zero,
    #[default]
    Sine,
    Cosine,
    Random,
    Csv,
}

/// A scalar field on a periodic grid: built-in generator or CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    /// Integer mode of `sine`/`cosine`: `amplitude · sin(ξ_k · x)`.
    pub mode: [i64; 2],
    /// Peak value for `sine`/`cosine`, RMS value for `random`.
    pub amplitude: f64,
    /// Inclusive shell range of `random`.
    pub shells: [usize; 2],
    /// Input of `csv`; the grid is taken from the file header.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            kind: FieldKind::Sine,
            dim: 1,
            n: 64,
            length: 1.0,
            mode: [1, 0],
            amplitude: 1.0,
            shells: [1, 4],
            path: None,
        }
    }
}

impl FieldSpec {
    fn random_2d() -> Self {
        Self {
            kind: FieldKind::Random,
            dim: 2,
            n: 32,
            ..Self::default()
        }
    }

    pub fn build(&self, seed: u64) -> Result<SpectralField> {
        if self.kind == FieldKind::Csv {
            let path = self
                .path
                .as_ref()
                .ok_or_else(|| Error::config("field kind `csv` needs a `path`"))?;
            let (h, values) = read_grid_csv(path)?;
            let grid = PeriodicGrid::new(h.dim, h.n, h.length).map_err(|e| Error::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
            return SpectralField::from_real(&grid, values);
        }
        let grid = PeriodicGrid::new(self.dim, self.n, self.length)?;
        let mode = self.mode_on(&grid)?;
        let xi = [grid.wavenumber(mode[0]), grid.wavenumber(mode[1])];
        let phase = move |x: &[f64]| xi[0] * x[0] + x.get(1).map_or(0.0, |y| xi[1] * y);
        let a = self.amplitude;
        Ok(match self.kind {
            FieldKind::Zero => SpectralField::from_fn(&grid, |_| 0.0),
            FieldKind::Sine => SpectralField::from_fn(&grid, |x| a * phase(x).sin()),
            FieldKind::Cosine => SpectralField::from_fn(&grid, |x| a * phase(x).cos()),
            FieldKind::Random => random_field(&grid, self.shells, a, seed)?,
            FieldKind::Csv => unreachable!(),
        })
    }

    fn mode_on(&self, grid: &PeriodicGrid) -> Result<[i64; 2]> {
        let half = grid.n() as i64 / 2;
        let mode = if grid.dim() == 1 { [self.mode[0], 0] } else { self.mode };
        if mode.iter().any(|m| m.abs() >= half) {
            return Err(Error::config(format!("mode {:?} is not resolved with n = {}", self.mode, grid.n())));
        }
        Ok(mode)
    }
}

fn random_field(grid: &PeriodicGrid, shells: [usize; 2], rms: f64, seed: u64) -> Result<SpectralField> {
    Ok(random_band(grid, (shells[0], shells[1]), rms, seed, FIELD_STREAM)?.into_physical())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    #[default]
    Zero,
    Constant,
    Random,
    /// `value · |x - c|²` with `c` the box centre.
    Harmonic,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub value: f64,
    /// Range of `random` samples.
    pub lo: f64,
    pub hi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            kind: PotentialKind::Zero,
            value: 0.0,
            lo: 0.0,
            hi: 1.0,
            path: None,
        }
    }
}

impl PotentialSpec {
    pub fn build(&self, grid: &BoxGrid, seed: u64) -> Result<Potential> {
        match self.kind {
            PotentialKind::Zero => Ok(Potential::zero(grid)),
            PotentialKind::Constant => Ok(Potential::constant(grid, self.value)),
            PotentialKind::Random => {
                if !(self.lo < self.hi) {
                    return Err(Error::config("random potential needs lo < hi"));
                }
                Potential::random(grid, self.lo, self.hi, seed)
            }
            PotentialKind::Harmonic => {
                let c = 0.5 * grid.length();
                Potential::from_fn(grid, |x| self.value * x.iter().map(|v| (v - c).powi(2)).sum::<f64>())
            }
            PotentialKind::Csv => {
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::config("potential kind `csv` needs a `path`"))?;
                Potential::load_csv(grid, path)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub boundary: Boundary,
    /// Number of eigenvalues.
    pub k: usize,
    pub solver: Solver,
    pub potential: PotentialSpec,
    /// Also solve with `V + shift` and report the shift-identity defect.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    /// Report min-max margins against `-Δ + min V`.
    pub minmax: bool,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 512,
            length: 1.0,
            boundary: Boundary::Dirichlet,
            k: 5,
            solver: Solver::Auto,
            potential: PotentialSpec::default(),
            shift: None,
            minmax: true,
        }
    }
}

impl SpectrumSection {
    pub fn grid(&self) -> Result<BoxGrid> {
        BoxGrid::new(self.dim, self.n, self.length, self.boundary)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    #[default]
    Power,
    Zero,
}

fn symbol(kind: SymbolKind, gamma: f64) -> Result<Symbol> {
    match kind {
        SymbolKind::Power => Symbol::power(gamma),
        SymbolKind::Zero => Ok(Symbol::Zero),
    }
}

fn sigma_matrix(rows: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Ok(DMatrix::identity(dim, dim));
    }
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::config(format!("sigma must be a {dim}x{dim} array of rows")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissipateSection {
    /// Rows of `Σ`; empty means the identity.
    pub sigma: Vec<Vec<f64>>,
    pub symbol: SymbolKind,
    /// Exponent `γ` of `P̂(ζ) = |ζ|^{2γ}`.
    pub gamma: f64,
    pub horizon: f64,
    pub dt: f64,
    pub initial: FieldSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forcing: Option<FieldSpec>,
    /// Integer modes whose decay rate is measured; empty picks the axes.
    pub decay_modes: Vec<[i64; 2]>,
    pub decay_time: f64,
}

impl Default for DissipateSection {
    fn default() -> Self {
        Self {
            sigma: Vec::new(),
            symbol: SymbolKind::Power,
            gamma: 1.0,
            horizon: 0.05,
            dt: 0.001,
            initial: FieldSpec::random_2d(),
            forcing: None,
            decay_modes: Vec::new(),
            decay_time: 0.01,
        }
    }
}

impl DissipateSection {
    pub fn spec(&self, dim: usize) -> Result<AnisotropySpec> {
        AnisotropySpec::new(sigma_matrix(&self.sigma, dim)?, symbol(self.symbol, self.gamma)?)
    }

    pub fn modes(&self, dim: usize) -> Vec<[i64; 2]> {
        match (self.decay_modes.is_empty(), dim) {
            (false, _) => self.decay_modes.clone(),
            (true, 1) => vec![[1, 0], [2, 0]],
            (true, _) => vec![[1, 0], [0, 1]],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DissipationKind {
    #[default]
    Viscous,
    Anisotropic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimFieldKind {
    #[default]
    None,
    Cosine,
    Random,
    Csv,
}

/// Initial vorticity or vorticity forcing of the simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimField {
    pub kind: SimFieldKind,
    pub mode: [i64; 2],
    pub amplitude: f64,
    pub shells: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for SimField {
    fn default() -> Self {
        Self {
            kind: SimFieldKind::None,
            mode: [1, 0],
            amplitude: 1.0,
            shells: [1, 4],
            path: None,
        }
    }
}

impl SimField {
    fn load(&self, grid: &PeriodicGrid) -> Result<SpectralField> {
        let path = self
            .path
            .as_ref()
            .ok_or_else(|| Error::config("field kind `csv` needs a `path`"))?;
        let (h, values) = read_grid_csv(path)?;
        if h.dim != 2 || h.n != grid.n() || h.length != grid.length() {
            return Err(Error::Parse {
                path: path.clone(),
                message: "grid header does not match the simulation grid".into(),
            });
        }
        SpectralField::from_real(grid, values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub n: usize,
    pub length: f64,
    pub dissipation: DissipationKind,
    /// `ν` of the viscous law.
    pub viscosity: f64,
    /// `Σ` and symbol of the anisotropic law.
    pub sigma: Vec<Vec<f64>>,
    pub symbol: SymbolKind,
    pub gamma: f64,
    pub dt: f64,
    pub horizon: f64,
    pub sample_interval: f64,
    pub noise_amplitude: f64,
    pub ensemble_size: usize,
    pub dealias: bool,
    pub nonlinear: bool,
    pub band_cutoff: i64,
    pub initial: SimField,
    pub forcing: SimField,
}

impl Default for SimulateSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            n: d.grid.n(),
            length: 2.0 * PI,
            dissipation: DissipationKind::Viscous,
            viscosity: 0.05,
            sigma: Vec::new(),
            symbol: SymbolKind::Power,
            gamma: 1.0,
            dt: d.dt,
            horizon: d.horizon,
            sample_interval: d.sample_interval,
            noise_amplitude: d.noise_amplitude,
            ensemble_size: d.ensemble_size,
            dealias: d.dealias,
            nonlinear: d.nonlinear,
            band_cutoff: d.band_cutoff,
            initial: SimField {
                kind: SimFieldKind::Random,
                ..SimField::default()
            },
            forcing: SimField::default(),
        }
    }
}

impl SimulateSection {
    pub fn build(&self, seed: u64, norm_params: NormParams) -> Result<SimConfig> {
        let grid = PeriodicGrid::square(self.n, self.length)?;
        let dissipation = match self.dissipation {
            DissipationKind::Viscous => Dissipation::Viscosity(self.viscosity),
            DissipationKind::Anisotropic => Dissipation::Anisotropic(AnisotropySpec::new(
                sigma_matrix(&self.sigma, 2)?,
                symbol(self.symbol, self.gamma)?,
            )?),
        };
        let shells = |f: &SimField| (f.shells[0], f.shells[1]);
        let initial = match self.initial.kind {
            SimFieldKind::None => InitialCondition::Zero,
            SimFieldKind::Cosine => InitialCondition::Mode {
                mode: self.initial.mode,
                amplitude: self.initial.amplitude,
            },
            SimFieldKind::Random => InitialCondition::Random {
                shells: shells(&self.initial),
                amplitude: self.initial.amplitude,
            },
            SimFieldKind::Csv => InitialCondition::Field(self.initial.load(&grid)?),
        };
        let forcing = match self.forcing.kind {
            SimFieldKind::None => Forcing::None,
            SimFieldKind::Cosine => Forcing::Mode {
                mode: self.forcing.mode,
                amplitude: self.forcing.amplitude,
            },
            SimFieldKind::Random => Forcing::Band {
                shells: shells(&self.forcing),
                amplitude: self.forcing.amplitude,
            },
            SimFieldKind::Csv => Forcing::Field(self.forcing.load(&grid)?),
        };
        let cfg = SimConfig {
            grid,
            dissipation,
            dt: self.dt,
            horizon: self.horizon,
            sample_interval: self.sample_interval,
            forcing,
            initial,
            noise_amplitude: self.noise_amplitude,
            ensemble_size: self.ensemble_size,
            seed,
            norm_params,
            dealias: self.dealias,
            nonlinear: self.nonlinear,
            band_cutoff: self.band_cutoff,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
