//! Hybrid Sobolev-Besov norm and its special cases.
//!
//! ```text
//! ‖f‖_{B^s_{p,q}} = ( ∫_Ω |∇^s f|^p + |f|^q dx )^{1/p}
//! ```
//!
//! `∇^s` is the Riesz multiplier `|ξ|^s` from [`crate::spectral`], and the
//! integral uses the uniform grid quadrature. For `p != q` the functional
//! is not homogeneous; callers get the literal value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Smoothness order `s` and integrability exponents `p`, `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct NormParams {
    s: f64,
    p: f64,
    q: f64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawParams {
    s: f64,
    p: f64,
    q: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        NormParams::default().into()
    }
}

impl TryFrom<RawParams> for NormParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        NormParams::new(raw.s, raw.p, raw.q)
    }
}

impl From<NormParams> for RawParams {
    fn from(p: NormParams) -> Self {
        RawParams {
            s: p.s,
            p: p.p,
            q: p.q,
        }
    }
}

impl NormParams {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::domain(format!("smoothness s must be >= 0, got {s}")));
        }
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        Ok(Self { s, p, q })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Parameters one order of smoothness lower, clamped at `s = 0`.
    ///
    /// Used for the forcing norm `‖f‖_{B^{s-1}}`.
    pub fn lowered(&self) -> Self {
        Self {
            s: (self.s - 1.0).max(0.0),
            ..*self
        }
    }
}

impl Default for NormParams {
    fn default() -> Self {
        Self {
            s: 1.0,
            p: 2.0,
            q: 2.0,
        }
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("exponent {name} must satisfy 1 < {name} < inf, got {v}")))
    }
}

/// How `|∇^s f|` is formed for a scalar field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientKind {
    /// Absolute value of the Riesz-multiplier field `|ξ|^s f̂`.
    #[default]
    Riesz,
    /// Euclidean magnitude of the true gradient. Only valid for `s = 1`.
    TrueGradient,
}

/// Hybrid norm of a real scalar field.
pub fn hybrid_norm(f: &SpectralField, params: NormParams) -> Result<f64> {
    hybrid_norm_with(f, params, GradientKind::Riesz)
}

pub fn hybrid_norm_with(f: &SpectralField, params: NormParams, kind: GradientKind) -> Result<f64> {
    f.expect_scalar()?;
    if !f.is_real() {
        return Err(Error::domain("hybrid norm needs a real-valued field"));
    }
    let physical = f.clone().into_physical();
    let values = physical.real_values(0)?;
    let smooth: Vec<f64> = match kind {
        GradientKind::Riesz => {
            let d = physical.fractional_gradient(params.s)?;
            d.real_values(0)?.into_iter().map(f64::abs).collect()
        }
        GradientKind::TrueGradient => {
            if params.s != 1.0 {
                return Err(Error::domain(format!(
                    "true-gradient variant is defined for s = 1 only, got s = {}",
                    params.s
                )));
            }
            let g = physical.gradient()?;
            pointwise_magnitude(&g)?
        }
    };
    Ok(integrate(f, &smooth, &values, params))
}

/// Hybrid norm of a real vector field; `|·|` is the pointwise Euclidean
/// magnitude over components. Reduces to [`hybrid_norm`] for one component.
pub fn hybrid_norm_vector(u: &SpectralField, params: NormParams) -> Result<f64> {
    if !u.is_real() {
        return Err(Error::domain("hybrid norm needs a real-valued field"));
    }
    let mut smooth_parts = Vec::with_capacity(u.components());
    let mut value_parts = Vec::with_capacity(u.components());
    for c in 0..u.components() {
        let comp = u.component(c);
        smooth_parts.push(comp.fractional_gradient(params.s)?.into_physical());
        value_parts.push(comp.into_physical());
    }
    let smooth = pointwise_magnitude(&SpectralField::stack(smooth_parts)?)?;
    let values = pointwise_magnitude(&SpectralField::stack(value_parts)?)?;
    Ok(integrate(u, &smooth, &values, params))
}

fn pointwise_magnitude(v: &SpectralField) -> Result<Vec<f64>> {
    let v = v.clone().into_physical();
    let mut mag = vec![0.0; v.grid().len()];
    for c in 0..v.components() {
        for (m, z) in mag.iter_mut().zip(v.values(c)) {
            *m += z.re * z.re;
        }
    }
    Ok(mag.into_iter().map(f64::sqrt).collect())
}

fn integrate(f: &SpectralField, smooth: &[f64], values: &[f64], params: NormParams) -> f64 {
    let sum: f64 = smooth
        .iter()
        .zip(values)
        .map(|(g, v)| g.powf(params.p) + v.abs().powf(params.q))
        .sum();
    (f.grid().cell_volume() * sum).powf(1.0 / params.p)
}

/// Sobolev case `p = q` of the hybrid norm.
pub fn sobolev_norm(f: &SpectralField, s: f64, p: f64) -> Result<f64> {
    hybrid_norm(f, NormParams::new(s, p, p)?)
}

/// `(∫ |f|^q dx)^{1/q}`.
pub fn lq_norm(f: &SpectralField, q: f64) -> Result<f64> {
    f.expect_scalar()?;
    check_exponent("q", q)?;
    let physical = f.clone().into_physical();
    let sum: f64 = physical.values(0).iter().map(|z| z.norm().powf(q)).sum();
    Ok((f.grid().cell_volume() * sum).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::PeriodicGrid;

    fn sine() -> SpectralField {
        let g = PeriodicGrid::line(64, 1.0).unwrap();
        SpectralField::from_fn(&g, |x| (2.0 * PI * x[0]).sin())
    }

    #[test]
    fn params_are_validated() {
        assert!(NormParams::new(1.0, 1.0, 2.0).is_err());
        assert!(NormParams::new(1.0, 2.0, 0.5).is_err());
        assert!(NormParams::new(-0.1, 2.0, 2.0).is_err());
        assert!(NormParams::new(1.0, f64::INFINITY, 2.0).is_err());
        assert!(NormParams::new(0.0, 1.5, 7.0).is_ok());
    }

    #[test]
    fn lowered_clamps_at_zero() {
        let p = NormParams::new(0.5, 3.0, 2.0).unwrap().lowered();
        assert_eq!(p.s(), 0.0);
        assert_eq!(NormParams::new(2.5, 3.0, 2.0).unwrap().lowered().s(), 1.5);
    }

    #[test]
    fn zero_and_constant_fields() {
        let g = PeriodicGrid::square(16, 1.0).unwrap();
        let params = NormParams::new(1.0, 2.0, 2.0).unwrap();
        let zero = SpectralField::from_fn(&g, |_| 0.0);
        assert_eq!(hybrid_norm(&zero, params).unwrap(), 0.0);
        let c = SpectralField::from_fn(&g, |_| -1.75);
        assert!((hybrid_norm(&c, params).unwrap() - 1.75).abs() < 1e-13);
        assert!((lq_norm(&c, 3.0).unwrap() - 1.75).abs() < 1e-13);
    }

    #[test]
    fn sine_values_match_analytic_integrals() {
        let f = sine();
        // ∫|2π cos|² = 2π², ∫ sin² = 1/2
        let want = (2.0 * PI * PI + 0.5_f64).sqrt();
        let got = hybrid_norm(&f, NormParams::new(1.0, 2.0, 2.0).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((got - 4.498_800_818).abs() < 1e-8);
        assert!((sobolev_norm(&f, 0.0, 2.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((lq_norm(&f, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn true_gradient_variant_agrees_for_s_one() {
        let f = sine();
        let p = NormParams::new(1.0, 2.0, 2.0).unwrap();
        let a = hybrid_norm(&f, p).unwrap();
        let b = hybrid_norm_with(&f, p, GradientKind::TrueGradient).unwrap();
        assert!((a - b).abs() < 1e-12);
        let p2 = NormParams::new(0.5, 2.0, 2.0).unwrap();
        assert!(hybrid_norm_with(&f, p2, GradientKind::TrueGradient).is_err());
    }

    #[test]
    fn lq_rejects_small_exponent() {
        assert!(matches!(lq_norm(&sine(), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn vector_norm_reduces_to_scalar() {
        let f = sine();
        let p = NormParams::new(0.5, 3.0, 2.0).unwrap();
        let v = SpectralField::stack(vec![f.clone()]).unwrap();
        let a = hybrid_norm(&f, p).unwrap();
        let b = hybrid_norm_vector(&v, p).unwrap();
        assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn deserialize_validates() {
        let ok: NormParams = toml::from_str("s = 1.0\np = 2.0\nq = 3.0").unwrap();
        assert_eq!(ok.q(), 3.0);
        assert!(toml::from_str::<NormParams>("s = 1.0\np = 1.0\nq = 3.0").is_err());
    }
}
