//! Hybrid norm of a smooth periodic field and its classical special cases.
//!
//! Run with `cargo run --example hybrid_norm`.

use std::f64::consts::PI;

use hybrid_turbulence::norms::{hybrid_norm, hybrid_norm_with, lq_norm, sobolev_norm, GradientKind, NormParams};
use hybrid_turbulence::spectral::{PeriodicGrid, SpectralField};
use hybrid_turbulence::Result;

fn main() -> Result<()> {
    let grid = PeriodicGrid::line(128, 1.0)?;
    let f = SpectralField::from_fn(&grid, |x| (2.0 * PI * x[0]).sin());

    let h1 = NormParams::new(1.0, 2.0, 2.0)?;
    println!("B^1_(2,2) norm of sin(2 pi x):   {:.12}", hybrid_norm(&f, h1)?);
    println!("same with the true gradient:     {:.12}", hybrid_norm_with(&f, h1, GradientKind::TrueGradient)?);
    println!("closed form sqrt(1/2 + 2 pi^2):  {:.12}", (0.5 + 2.0 * PI * PI).sqrt());

    // s = 0 and p = q: the functional is 2^(1/p) times the L^p norm.
    let p = 3.0;
    let h0 = hybrid_norm(&f, NormParams::new(0.0, p, p)?)?;
    println!("s = 0, p = q = 3: {:.12} vs 2^(1/3) |f|_3 = {:.12}", h0, 2f64.powf(1.0 / p) * lq_norm(&f, p)?);

    // p = q gives the Sobolev-type norm (|grad^s f|_p^p + |f|_p^p)^(1/p).
    for s in [0.5, 1.0, 1.5, 2.0] {
        let params = NormParams::new(s, 4.0, 4.0)?;
        println!("s = {s}: hybrid {:.10}  sobolev {:.10}", hybrid_norm(&f, params)?, sobolev_norm(&f, s, 4.0)?);
    }

    // p != q is not homogeneous: doubling the field does not double the value.
    let mixed = NormParams::new(1.0, 2.0, 4.0)?;
    let a = hybrid_norm(&f, mixed)?;
    let b = hybrid_norm(&f.scaled(2.0), mixed)?;
    println!("p = 2, q = 4: |f| = {a:.8}, |2f| = {b:.8}, ratio {:.6}", b / a);

    match NormParams::new(1.0, 1.0, 2.0) {
        Ok(_) => println!("unexpected: p = 1 accepted"),
        Err(e) => println!("p = 1 is rejected: {e}"),
    }
    Ok(())
}
