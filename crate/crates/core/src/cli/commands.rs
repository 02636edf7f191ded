use std::path::Path;

use super::verify::{self, Options};
use super::{Config, RunManifest};
use crate::error::Result;
use crate::io::{fmt_f64, write_records, write_table};
use crate::norms::hybrid_norm;
use crate::schrodinger::{assemble, minmax_check, spectrum_with, symmetry_defect, Potential};
use crate::sim::{gronwall_check, residual_study, run_ensemble, NOISE_SHELLS};

pub(super) fn norm(config: &Config, out: &Path, manifest: &mut RunManifest) -> Result<u8> {
    let field = config.field.build(config.seed)?;
    let p = config.norm;
    let value = hybrid_norm(&field, p)?;
    println!("hybrid norm (s={}, p={}, q={}) = {}", p.s(), p.p(), p.q(), fmt_f64(value));
    let file = "norm.csv";
    let meta = manifest.header(file, &[]);
    write_table(&out.join(file), &meta, &["s", "p", "q", "norm"], [vec![p.s(), p.p(), p.q(), value]])?;
    Ok(0)
}

pub(super) fn spectrum(config: &Config, out: &Path, manifest: &mut RunManifest) -> Result<u8> {
    let sec = &config.spectrum;
    let grid = sec.grid()?;
    let potential = sec.potential.build(&grid, config.seed)?;
    let op = assemble(&grid, &potential)?;
    let spec = spectrum_with(&op, sec.k, sec.solver)?;
    let k = spec.values.len();

    let (lower, margins) = if sec.minmax {
        let r = minmax_check(&grid, &potential, sec.k)?;
        println!(
            "min-max margins: smallest {} ({})",
            fmt_f64(r.min_margin()),
            if r.passed() { "pass" } else { "FAIL" }
        );
        (r.lower, r.margins)
    } else {
        (vec![f64::NAN; k], vec![f64::NAN; k])
    };
    let shifted = match sec.shift {
        Some(c) => {
            let moved = Potential::new(&grid, potential.values().iter().map(|v| v + c).collect())?;
            let s = spectrum_with(&assemble(&grid, &moved)?, sec.k, sec.solver)?;
            let defect = s
                .values
                .iter()
                .zip(&spec.values)
                .map(|(a, b)| (a - b - c).abs())
                .fold(0.0, f64::max);
            println!("shift identity defect (c = {c}) = {}", fmt_f64(defect));
            s.values
        }
        None => vec![f64::NAN; k],
    };
    println!("symmetry defect = {}", fmt_f64(symmetry_defect(&op)));
    for (j, v) in spec.values.iter().enumerate() {
        println!("lambda_{} = {}", j + 1, fmt_f64(*v));
    }

    let file = "spectrum.csv";
    let meta = manifest.header(file, &[("solver", format!("{:?}", spec.solver).to_lowercase())]);
    let rows = (0..k).map(|j| {
        vec![
            (j + 1) as f64,
            spec.values[j],
            lower[j],
            margins[j],
            shifted[j],
            spec.residuals[j],
        ]
    });
    write_table(
        &out.join(file),
        &meta,
        &["j", "eigenvalue", "lower", "margin", "shifted", "residual"],
        rows,
    )?;
    Ok(0)
}

pub(super) fn dissipate(config: &Config, out: &Path, manifest: &mut RunManifest) -> Result<u8> {
    let sec = &config.dissipate;
    let u0 = sec.initial.build(config.seed)?;
    let grid = u0.grid().clone();
    let spec = sec.spec(grid.dim())?;
    let forcing = sec.forcing.as_ref().map(|f| f.build(config.seed)).transpose()?;
    let report = spec.dissipation_check(&u0, forcing.as_ref(), sec.horizon, sec.dt, config.norm)?;

    println!(
        "monotone nonincrease: {} (largest relative increase {})",
        if report.monotone { "pass" } else { "FAIL" },
        fmt_f64(report.max_increase)
    );
    if let Some(c) = report.decay_constant {
        println!("fitted decay constant of the squared norm = {}", fmt_f64(c));
    }
    match report.gronwall_ok {
        Some(ok) => println!("Gronwall bound: {}", if ok { "pass" } else { "FAIL" }),
        None => println!("Gronwall bound: not applicable"),
    }

    let mut decay_rows = Vec::new();
    for mode in sec.modes(grid.dim()) {
        let measured = spec.measure_decay(&grid, mode, sec.decay_time)?;
        let idx = grid.flat_of_mode(mode);
        let predicted = spec.rate(&grid.wavevector(idx)[..grid.dim()]);
        println!("mode {mode:?}: decay rate {} (symbol {})", fmt_f64(measured), fmt_f64(predicted));
        decay_rows.push(vec![mode[0] as f64, mode[1] as f64, measured, predicted]);
    }
    if decay_rows.len() >= 2 && decay_rows[1][2] > 0.0 {
        println!("rate ratio (first/second) = {}", fmt_f64(decay_rows[0][2] / decay_rows[1][2]));
    }

    let file = "dissipation.csv";
    let meta = manifest.header(
        file,
        &[
            ("monotone", report.monotone.to_string()),
            ("rate_floor", fmt_f64(report.rate_floor)),
        ],
    );
    write_table(&out.join(file), &meta, &["t", "norm_sq", "bound"], report.rows())?;
    let file = "decay_rates.csv";
    let meta = manifest.header(file, &[]);
    write_table(&out.join(file), &meta, &["kx", "ky", "measured", "symbol"], decay_rows)?;
    Ok(0)
}

pub(super) fn simulate(config: &Config, dt_study: bool, out: &Path, manifest: &mut RunManifest) -> Result<u8> {
    let cfg = config.simulate.build(config.seed, config.norm)?;
    let stats = run_ensemble(&cfg)?;
    let gronwall = gronwall_check(&stats, &cfg);
    let bound = match &gronwall {
        Ok(g) => g.bound.clone(),
        Err(e) => {
            println!("Gronwall check skipped: {e}");
            vec![f64::NAN; stats.times.len()]
        }
    };
    println!("members = {}, samples = {}", stats.members, stats.times.len());
    println!("E[sup ||u||^2_B] = {}", fmt_f64(stats.sup_hybrid()));
    println!("final E||u||^2 = {}", fmt_f64(*stats.mean_energy.last().unwrap_or(&0.0)));
    println!("max |energy residual| per step = {}", fmt_f64(stats.max_abs_residual()));
    if let Ok(g) = &gronwall {
        println!(
            "Gronwall bound (alpha = {}, C = {}, early-window fit {}): {}",
            fmt_f64(g.alpha),
            fmt_f64(g.constant),
            fmt_f64(g.fitted_constant),
            if g.passed() { "pass" } else { "FAIL" }
        );
    }
    let [rx, ry] = stats.band_decay_rates();
    println!("band enstrophy decay rates: x {} y {}", fmt_f64(rx), fmt_f64(ry));

    let noise = format!(
        "additive vorticity noise on shells {}..={} with equal variance per mode; total variance per unit time = {}",
        NOISE_SHELLS.start(),
        NOISE_SHELLS.end(),
        fmt_f64(cfg.noise_amplitude.powi(2))
    );
    let file = "ensemble.csv";
    let meta = manifest.header(file, &[("members", stats.members.to_string()), ("noise", noise)]);
    let mut columns = vec![
        "t".to_owned(),
        "mean_energy".into(),
        "mean_hybrid_norm_sq".into(),
        "mean_running_sup".into(),
        "residual".into(),
        "bound".into(),
        "band_x_enstrophy".into(),
        "band_y_enstrophy".into(),
    ];
    columns.extend(NOISE_SHELLS.map(|s| format!("shell{s}_energy")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows = (0..stats.times.len()).map(|i| {
        let mut row = vec![
            stats.times[i],
            stats.mean_energy[i],
            stats.mean_hybrid_norm_sq[i],
            stats.mean_running_sup[i],
            stats.sample_residual[i],
            bound[i],
            stats.band_enstrophy[0][i],
            stats.band_enstrophy[1][i],
        ];
        row.extend(stats.shell_energy.iter().map(|s| s[i]));
        row
    });
    write_table(&out.join(file), &meta, &cols, rows)?;

    if dt_study {
        let study = residual_study(&cfg)?;
        println!(
            "deterministic energy residual order = {} (max residual {} at dt = {}, {} at dt = {})",
            fmt_f64(study.order),
            fmt_f64(study.max_residual[0]),
            study.dt[0],
            fmt_f64(study.max_residual[1]),
            study.dt[1]
        );
        let file = "residual_study.csv";
        let meta = manifest.header(file, &[("order", fmt_f64(study.order))]);
        let rows = (0..2).map(|i| vec![study.dt[i], study.max_residual[i]]);
        write_table(&out.join(file), &meta, &["dt", "max_residual"], rows)?;
    }
    Ok(0)
}

pub(super) fn verify(config: &Config, opts: Options, out: &Path, manifest: &mut RunManifest) -> Result<u8> {
    let checks = verify::run_checks(opts, config.seed)?;
    println!("{}", verify::render_table(&checks));
    let all = checks.iter().all(|c| c.passed);
    println!("{} of {} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
    let file = "verify.csv";
    let meta = manifest.header(file, &[("reduced", opts.reduced.to_string())]);
    let rows = checks.iter().map(|c| {
        vec![
            c.name.to_owned(),
            fmt_f64(c.value),
            c.comparison.to_owned(),
            fmt_f64(c.threshold),
            c.passed.to_string(),
        ]
    });
    write_records(&out.join(file), &meta, &["check", "value", "comparison", "threshold", "passed"], rows)?;
    Ok(if all { 0 } else { 1 })
}
