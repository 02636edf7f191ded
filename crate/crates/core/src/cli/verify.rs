//! Self-check suite behind the `verify` command.
//!
//! Each check compares a library result with an analytic target or an
//! identity and records the measured value, the threshold and the outcome.
//! Reduced mode halves grid sizes and ensemble sizes and relaxes the
//! statistical tolerances:
//!
//! | check                  | default   | reduced   |
//! |------------------------|-----------|-----------|
//! | stokes_plateau         | 0.20      | 0.30      |
//! | energy_residual_order  | >= 1.8    | >= 1.7    |
//!
//! All other thresholds are the same in both modes.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::anisotropic::{AnisotropySpec, Symbol, MONOTONE_TOL};
use crate::error::Result;
use crate::norms::{hybrid_norm, sobolev_norm, NormParams};
use crate::schrodinger::{assemble, minmax_check, spectrum, symmetry_defect, Boundary, BoxGrid, Potential};
use crate::sim::{random_field as band_field, residual_study, run_ensemble, shell_of, Dissipation, InitialCondition, SimConfig};
use crate::spectral::{PeriodicGrid, SpectralField};

/// Deliberate defects for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Break the symmetry of one assembled operator.
    Symmetry,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub reduced: bool,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// `<=`, `>=` or `>`.
    pub comparison: &'static str,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            comparison: "<=",
            threshold,
            passed: value <= threshold,
        }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            comparison: ">=",
            threshold,
            passed: value >= threshold,
        }
    }

    fn above(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            comparison: ">",
            threshold,
            passed: value > threshold,
        }
    }
}

pub fn render_table(checks: &[Check]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>24}  {:<2} {:>10}  result", "check", "value", "", "threshold");
    for c in checks {
        let _ = writeln!(
            s,
            "{:<28} {:>24.16e}  {:<2} {:>10.3e}  {}",
            c.name,
            c.value,
            c.comparison,
            c.threshold,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    s
}

struct Sizes {
    field_n: usize,
    line_n: usize,
    square_n: usize,
    potential_n: usize,
    minmax_n: usize,
    torus_n: usize,
    residual_n: usize,
    plateau_members: usize,
    plateau_horizon: f64,
    plateau_tol: f64,
    order_min: f64,
    directional_runs: u64,
}

impl Sizes {
    fn new(reduced: bool) -> Self {
        if reduced {
            Self {
                field_n: 32,
                line_n: 256,
                square_n: 32,
                potential_n: 16,
                minmax_n: 10,
                torus_n: 16,
                residual_n: 64,
                plateau_members: 16,
                plateau_horizon: 10.0,
                plateau_tol: 0.3,
                order_min: 1.7,
                directional_runs: 4,
            }
        } else {
            Self {
                field_n: 64,
                line_n: 512,
                square_n: 64,
                potential_n: 32,
                minmax_n: 20,
                torus_n: 32,
                residual_n: 128,
                plateau_members: 32,
                plateau_horizon: 20.0,
                plateau_tol: 0.2,
                order_min: 1.8,
                directional_runs: 8,
            }
        }
    }
}

pub fn run_checks(opts: Options, seed: u64) -> Result<Vec<Check>> {
    let z = Sizes::new(opts.reduced);
    let mut out = Vec::new();
    out.push(norm_reduction(&z, seed)?);
    out.push(fractional_gradient(&z)?);
    out.extend(dirichlet_spectrum(&z, seed)?);
    out.push(symmetry(&z, seed, opts.fault == Some(Fault::Symmetry))?);
    out.push(minmax(&z, seed)?);
    out.extend(decay_rates(&z)?);
    out.extend(dissipation(&z, seed)?);
    out.push(energy_order(&z, seed)?);
    out.push(plateau(&z, seed)?);
    out.push(directional(&z, seed)?);
    out.push(determinism(seed)?);
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_field(dim: usize, n: usize, seed: u64) -> Result<SpectralField> {
    let grid = PeriodicGrid::new(dim, n, 1.0)?;
    Ok(band_field(&grid, (1, n / 4), 1.0, seed)?.into_physical())
}

fn norm_reduction(z: &Sizes, seed: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let f = random_field(1 + (i % 2) as usize, z.field_n, seed.wrapping_add(i))?;
        for s in [0.0, 0.5, 1.0, 2.0] {
            for p in [2.0, 3.0, 4.0] {
                let h = hybrid_norm(&f, NormParams::new(s, p, p)?)?;
                worst = worst.max(rel(h, sobolev_norm(&f, s, p)?));
            }
        }
    }
    Ok(Check::at_most("norm_reduction", worst, 1e-14))
}

fn fractional_gradient(z: &Sizes) -> Result<Check> {
    let mut worst = 0.0f64;
    let length = 1.7;
    for dim in [1, 2] {
        let n = if dim == 1 { z.field_n } else { z.field_n / 2 };
        let grid = PeriodicGrid::new(dim, n, length)?;
        for k in 1..=(n / 3) as i64 {
            let mode = [k, if dim == 2 { k / 2 } else { 0 }];
            let xi = [grid.wavenumber(mode[0]), grid.wavenumber(mode[1])];
            let f = SpectralField::from_fn(&grid, |x| {
                (xi[0] * x[0] + x.get(1).map_or(0.0, |y| xi[1] * y)).cos()
            })
            .into_fourier();
            let idx = grid.flat_of_mode(mode);
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            for s in [0.5, 1.0, 1.5, 2.0] {
                let g = f.fractional_gradient(s)?;
                let ratio = g.values(0)[idx].norm() / f.values(0)[idx].norm();
                worst = worst.max(rel(ratio, r.powf(s)));
            }
        }
    }
    Ok(Check::at_most("fractional_gradient", worst, 1e-10))
}

fn dirichlet_spectrum(z: &Sizes, seed: u64) -> Result<Vec<Check>> {
    let line = BoxGrid::new(1, z.line_n, 1.0, Boundary::Dirichlet)?;
    let l1 = spectrum(&assemble(&line, &Potential::zero(&line))?, 1)?.values[0];
    let square = BoxGrid::new(2, z.square_n, 1.0, Boundary::Dirichlet)?;
    let l2 = spectrum(&assemble(&square, &Potential::zero(&square))?, 1)?.values[0];

    let c = 2.5;
    let v = Potential::random(&line, 0.0, 10.0, seed)?;
    let moved = Potential::new(&line, v.values().iter().map(|x| x + c).collect())?;
    let a = spectrum(&assemble(&line, &v)?, 5)?.values;
    let b = spectrum(&assemble(&line, &moved)?, 5)?.values;
    let shift = a.iter().zip(&b).map(|(x, y)| (y - x - c).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("dirichlet_line_lambda1", rel(l1, PI * PI), 1e-3),
        Check::at_most("dirichlet_square_lambda1", rel(l2, 2.0 * PI * PI), 1e-2),
        Check::at_most("shift_identity", shift, 1e-10),
    ])
}

fn symmetry(z: &Sizes, seed: u64, corrupt: bool) -> Result<Check> {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let bc = if i % 2 == 0 { Boundary::Dirichlet } else { Boundary::Neumann };
        let grid = BoxGrid::new(2, z.potential_n, 1.0, bc)?;
        let v = Potential::random(&grid, -5.0, 5.0, seed.wrapping_add(100 + i))?;
        let mut op = assemble(&grid, &v)?;
        if corrupt && i == 0 {
            op.corrupt_entry(0, 1, 1e-3);
        }
        worst = worst.max(symmetry_defect(&op));
    }
    Ok(Check::at_most("symmetry_defect", worst, 1e-14))
}

fn minmax(z: &Sizes, seed: u64) -> Result<Check> {
    let mut worst = f64::INFINITY;
    for i in 0..20u64 {
        let bc = if i % 2 == 0 { Boundary::Dirichlet } else { Boundary::Neumann };
        let grid = BoxGrid::new(2, z.minmax_n, 1.0, bc)?;
        let v = Potential::random(&grid, -20.0, 20.0, seed.wrapping_add(200 + i))?;
        worst = worst.min(minmax_check(&grid, &v, 10)?.min_margin());
    }
    Ok(Check::at_least("minmax_margin", worst, -1e-10))
}

fn decay_rates(z: &Sizes) -> Result<Vec<Check>> {
    let grid = PeriodicGrid::square(z.torus_n, 1.0)?;
    let spec = AnisotropySpec::diagonal(&[4.0, 1.0], Symbol::laplacian())?;
    let mut worst = 0.0f64;
    let mut axis = [0.0; 2];
    for (j, mode) in [[1, 0], [0, 1], [1, 1], [2, -1], [0, 3]].into_iter().enumerate() {
        let symbol = spec.rate(&grid.wavevector(grid.flat_of_mode(mode)));
        let measured = spec.measure_decay(&grid, mode, 1.0 / symbol)?;
        worst = worst.max(rel(measured, symbol));
        if j < 2 {
            axis[j] = measured;
        }
    }
    Ok(vec![
        Check::at_most("modal_decay_rate", worst, 5e-3),
        Check::at_most("axis_rate_ratio", rel(axis[0] / axis[1], 16.0), 1e-2),
    ])
}

fn dissipation(z: &Sizes, seed: u64) -> Result<Vec<Check>> {
    let spec = AnisotropySpec::diagonal(&[2.0, 1.0], Symbol::laplacian())?;
    let settings = [
        NormParams::new(1.0, 2.0, 2.0)?,
        NormParams::new(0.5, 3.0, 3.0)?,
        NormParams::new(1.5, 2.0, 4.0)?,
    ];
    let mut increase = f64::NEG_INFINITY;
    let mut gronwall_failures = 0.0;
    for i in 0..10u64 {
        let u0 = random_field(2, z.torus_n, seed.wrapping_add(300 + i))?;
        let f = random_field(2, z.torus_n, seed.wrapping_add(400 + i))?.scaled(20.0);
        for p in settings {
            let free = spec.dissipation_check(&u0, None, 0.05, 0.001, p)?;
            increase = increase.max(free.max_increase);
            let forced = spec.dissipation_check(&u0, Some(&f), 0.2, 0.002, p)?;
            if forced.gronwall_ok != Some(true) {
                gronwall_failures += 1.0;
            }
        }
    }
    Ok(vec![
        Check::at_most("dissipation_monotone", increase, MONOTONE_TOL),
        Check::at_most("dissipation_gronwall_failures", gronwall_failures, 0.0),
    ])
}

fn torus(n: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::square(n, 2.0 * PI)
}

fn energy_order(z: &Sizes, seed: u64) -> Result<Check> {
    let cfg = SimConfig {
        grid: torus(z.residual_n)?,
        dissipation: Dissipation::Viscosity(0.05),
        dt: 0.01,
        horizon: 0.5,
        sample_interval: 0.05,
        ensemble_size: 1,
        seed,
        ..SimConfig::default()
    };
    Ok(Check::at_least("energy_residual_order", residual_study(&cfg)?.order, z.order_min))
}

fn plateau(z: &Sizes, seed: u64) -> Result<Check> {
    let nu = 0.5;
    let cfg = SimConfig {
        grid: torus(32)?,
        dissipation: Dissipation::Viscosity(nu),
        dt: 0.002,
        horizon: z.plateau_horizon,
        sample_interval: 0.1,
        initial: InitialCondition::Zero,
        noise_amplitude: 1.0,
        ensemble_size: z.plateau_members,
        nonlinear: false,
        seed,
        ..SimConfig::default()
    };
    let stats = run_ensemble(&cfg)?;
    let var = cfg.noise_variances();
    let g = &cfg.grid;
    let start = stats.times.len() / 2;
    let mut worst = 0.0f64;
    for (s, series) in stats.shell_energy.iter().enumerate() {
        let want: f64 = (1..g.len())
            .filter(|&i| shell_of(g, i) == s + 1)
            .map(|i| {
                let k2 = g.wavevector_norm_sq(i);
                g.measure() * var[i] / (2.0 * nu * k2 * k2)
            })
            .sum();
        let got = series[start..].iter().sum::<f64>() / (series.len() - start) as f64;
        worst = worst.max(rel(got, want));
    }
    Ok(Check::at_most("stokes_plateau", worst, z.plateau_tol))
}

fn directional(z: &Sizes, seed: u64) -> Result<Check> {
    let spec = AnisotropySpec::diagonal(&[4.0, 1.0], Symbol::laplacian())?;
    let mut margin = f64::INFINITY;
    for run in 0..z.directional_runs {
        let cfg = SimConfig {
            grid: torus(z.torus_n)?,
            dissipation: Dissipation::Anisotropic(spec.clone()),
            dt: 0.0005,
            horizon: 0.02,
            sample_interval: 0.001,
            initial: InitialCondition::Random {
                shells: (1, z.torus_n / 3),
                amplitude: 1.0,
            },
            noise_amplitude: 0.1,
            ensemble_size: 4,
            seed: seed.wrapping_add(500 + run),
            ..SimConfig::default()
        };
        let [x, y] = run_ensemble(&cfg)?.band_decay_rates();
        margin = margin.min(x - y);
    }
    Ok(Check::above("directional_rate_gap", margin, 0.0))
}

fn determinism(seed: u64) -> Result<Check> {
    let config = format!(
        "seed = {seed}\n[simulate]\nn = 16\nhorizon = 0.1\ndt = 0.01\nsample_interval = 0.02\n\
         ensemble_size = 3\nnoise_amplitude = 0.5\n[simulate.forcing]\nkind = \"random\"\namplitude = 0.3\n"
    );
    let base = scratch_dir();
    std::fs::create_dir_all(&base)?;
    let cfg_path = base.join("config.toml");
    std::fs::write(&cfg_path, config)?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = base.join(format!("run{run}"));
        for args in [vec!["simulate"], vec!["spectrum"], vec!["dissipate"], vec!["norm"]] {
            let mut argv = vec!["hybrid-turbulence".to_owned()];
            argv.extend(args.iter().map(|s| s.to_string()));
            argv.extend(["--config".to_owned(), cfg_path.display().to_string()]);
            argv.extend(["--out".to_owned(), out.display().to_string()]);
            let cli = <super::Cli as clap::Parser>::try_parse_from(argv).expect("static arguments parse");
            super::run(&cli)?;
        }
        outputs.push(out);
    }
    let mut differing = 0.0;
    let mut compared = 0;
    for entry in std::fs::read_dir(&outputs[0])? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            compared += 1;
            let other = outputs[1].join(path.file_name().expect("file entry"));
            if std::fs::read(&path)? != std::fs::read(&other)? {
                differing += 1.0;
            }
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    if compared == 0 {
        differing = f64::INFINITY;
    }
    Ok(Check::at_most("csv_determinism", differing, 0.0))
}

fn scratch_dir() -> PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    std::env::temp_dir().join(format!(
        "hybrid-turbulence-verify-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lists_every_check() {
        let checks = vec![Check::at_most("a", 1.0, 2.0), Check::above("b", -1.0, 0.0)];
        let t = render_table(&checks);
        assert!(t.contains("pass") && t.contains("FAIL"));
        assert_eq!(t.lines().count(), 3);
    }

    #[test]
    fn injected_symmetry_fault_is_caught() {
        let z = Sizes::new(true);
        assert!(symmetry(&z, 0, false).unwrap().passed);
        assert!(!symmetry(&z, 0, true).unwrap().passed);
    }
}
