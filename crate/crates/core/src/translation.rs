//! Minimal translation surfaces `z = g(u) + h(v)`.
//!
//! The slopes are `g' = s^(2m-1)` and `h' = t^(2m-1)` with `F_m(s) = a u` and
//! `F_m(t) = -a v`, where `F_m(s) = (2m-1) int_0^s dt / (1 + t^(2m))` is odd,
//! increasing and bounded. The surface therefore lives over the open square
//! `|a u|, |a v| < sup F_m`.

use crate::curvature::{PatchSample, SurfacePatch};
use crate::error::{Error, Result};
use crate::geometry::{GraphJet2, NormOrder, Vec3};
use crate::numerics::{integrate, invert_monotone, QuadratureConfig, Tolerances};

/// Parameters of a minimal translation surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationSpec {
    pub m: NormOrder,
    pub a: f64,
}

impl TranslationSpec {
    pub fn new(m: NormOrder, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "translation parameter a must be finite and nonzero, got {a}"
            )));
        }
        Ok(Self { m, a })
    }
}

fn slope_integrand(t: f64, e: i32) -> f64 {
    1.0 / (1.0 + t.powi(e))
}

// After t = 1/tau the tail over [1, s] becomes an integral over [1/s, 1].
fn tail_integrand(tau: f64, e: i32) -> f64 {
    tau.powi(e - 2) / (1.0 + tau.powi(e))
}

/// `F_m(s) = (2m-1) int_0^s dt / (1 + t^(2m))`.
///
/// Beyond `|s| = 1` the integral is split at 1 and the tail is evaluated in
/// the reciprocal variable, so large arguments stay on a short interval.
pub fn slope_integral(s: f64, m: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::NonFinite { x: s });
    }
    let e = m.exponent();
    let a = s.abs();
    let value = if a <= 1.0 {
        integrate(|t| slope_integrand(t, e), 0.0, a, cfg)?
    } else {
        let head = integrate(|t| slope_integrand(t, e), 0.0, 1.0, cfg)?;
        let tail = integrate(|t| tail_integrand(t, e), 1.0 / a, 1.0, cfg)?;
        head + tail
    };
    Ok((m.k() * value).copysign(s))
}

/// `lim_{s -> oo} F_m(s)`, evaluated exactly through the reciprocal tail.
pub fn slope_integral_sup(m: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
    let e = m.exponent();
    let head = integrate(|t| slope_integrand(t, e), 0.0, 1.0, cfg)?;
    let tail = integrate(|t| tail_integrand(t, e), 0.0, 1.0, cfg)?;
    Ok(m.k() * (head + tail))
}

/// Closed form of `sup F_m`: `(2m-1) (pi / 2m) / sin(pi / 2m)`.
pub fn slope_integral_sup_closed_form(m: NormOrder) -> f64 {
    let x = std::f64::consts::PI / f64::from(m.exponent());
    m.k() * x / x.sin()
}

/// Elementary antiderivative of `F_2`.
pub fn slope_integral_m2_elementary(s: f64) -> f64 {
    let r = std::f64::consts::SQRT_2;
    let logs = (s * s + r * s + 1.0).ln() - (s * s - r * s + 1.0).ln();
    let atans = (r * s + 1.0).atan() + (r * s - 1.0).atan();
    3.0 * r / 8.0 * logs + 3.0 * r / 4.0 * atans
}

/// Solves `F_m(s) = y` given `sup = sup F_m`.
fn invert_slope_integral(y: f64, m: NormOrder, sup: f64, tol: &Tolerances) -> Result<f64> {
    if !(y.abs() < sup) {
        return Err(Error::OutOfRange { value: y, bound: sup });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| slope_integral(s, m, &tol.quadrature);
    let s = invert_monotone(f, y, (-1.0, 1.0), &tol.inversion)?;
    // One Newton step with the exact derivative (2m-1) / (1 + s^2m).
    let residual = f(s)? - y;
    let polished = s - residual * (1.0 + s.powi(m.exponent())) / m.k();
    Ok(if polished.is_finite() { polished } else { s })
}

/// Inverse of [`slope_integral`]; `OutOfRange` when `|y| >= sup F_m`.
pub fn slope_integral_inverse(y: f64, m: NormOrder, tol: &Tolerances) -> Result<f64> {
    let sup = slope_integral_sup(m, &tol.quadrature)?;
    invert_slope_integral(y, m, sup, tol)
}

/// Value and first two derivatives of one factor curve of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A minimal translation surface with its range bound precomputed.
#[derive(Debug, Clone)]
pub struct TranslationSurface {
    spec: TranslationSpec,
    tol: Tolerances,
    sup: f64,
}

impl TranslationSurface {
    pub fn new(spec: TranslationSpec, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        let sup = slope_integral_sup(spec.m, &tol.quadrature)?;
        Ok(Self { spec, tol, sup })
    }

    pub fn spec(&self) -> TranslationSpec {
        self.spec
    }

    /// `sup F_m`.
    pub fn slope_integral_sup(&self) -> f64 {
        self.sup
    }

    /// Half-width of the maximal square `|u|, |v| < sup F_m / |a|`.
    pub fn half_width(&self) -> f64 {
        self.sup / self.spec.a.abs()
    }

    pub fn slope_integral(&self, s: f64) -> Result<f64> {
        slope_integral(s, self.spec.m, &self.tol.quadrature)
    }

    pub fn slope_integral_inverse(&self, y: f64) -> Result<f64> {
        invert_slope_integral(y, self.spec.m, self.sup, &self.tol)
    }

    fn log_term(&self, s: f64) -> f64 {
        let m = self.spec.m;
        m.k() / f64::from(m.exponent()) * s.powi(m.exponent()).ln_1p()
    }

    /// The surface in the `(s, t)` parametrization, defined on the whole plane.
    pub fn point_st(&self, s: f64, t: f64) -> Result<Vec3> {
        let a = self.spec.a;
        let x = self.slope_integral(s)? / a;
        let y = -self.slope_integral(t)? / a;
        let z = (self.log_term(s) - self.log_term(t)) / a;
        Ok(Vec3::new(x, y, z))
    }

    /// `g` and its derivatives at `u`; needs `|a u| < sup F_m`.
    pub fn g_jet(&self, u: f64) -> Result<CurveJet> {
        let s = self.slope_integral_inverse(self.spec.a * u)?;
        Ok(self.curve_jet(s, self.spec.a))
    }

    /// `h` and its derivatives at `v`; needs `|a v| < sup F_m`.
    pub fn h_jet(&self, v: f64) -> Result<CurveJet> {
        let t = self.slope_integral_inverse(-self.spec.a * v)?;
        Ok(self.curve_jet(t, -self.spec.a))
    }

    // With s = F^{-1}(c x): value (1/c) (2m-1)/(2m) log(1+s^2m), slope s^(2m-1),
    // and second derivative c s^(2m-2) (1 + s^2m).
    fn curve_jet(&self, s: f64, c: f64) -> CurveJet {
        let e = self.spec.m.exponent();
        let se2 = s.powi(e - 2);
        CurveJet {
            value: self.log_term(s) / c,
            d1: se2 * s,
            d2: c * se2 * (1.0 + s.powi(e)),
        }
    }

    /// The surface as the graph `(u, v, g(u) + h(v))`.
    pub fn point_uv(&self, u: f64, v: f64) -> Result<Vec3> {
        let g = self.g_jet(u)?;
        let h = self.h_jet(v)?;
        Ok(Vec3::new(u, v, g.value + h.value))
    }

    /// Graph 2-jet at `(u, v)`; the mixed partial vanishes.
    pub fn jet(&self, u: f64, v: f64) -> Result<GraphJet2> {
        let g = self.g_jet(u)?;
        let h = self.h_jet(v)?;
        Ok(GraphJet2 { f_u: g.d1, f_v: h.d1, f_uu: g.d2, f_uv: 0.0, f_vv: h.d2 })
    }
}

impl SurfacePatch for TranslationSurface {
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample> {
        let g = self.g_jet(u)?;
        let h = self.h_jet(v)?;
        Ok(PatchSample {
            point: Vec3::new(u, v, g.value + h.value),
            du: Vec3::new(1.0, 0.0, g.d1),
            dv: Vec3::new(0.0, 1.0, h.d1),
        })
    }
}
