//! Mean curvature `H = trace(d eta) / 2` of surfaces in the 2m-normed space.
//!
//! Closed forms are given for graphs, translation graphs `g(u) + h(v)`,
//! homothetical graphs `g(u) h(v)` and the minimality condition of separable
//! surfaces `f(x1) + g(x2) + h(x3) = 0`. [`mean_curvature_numeric`] is an
//! independent route: it differentiates the Birkhoff-Gauss map by central
//! differences and reads off the trace in the tangent basis.

use crate::error::{Error, Result};
use crate::geometry::{
    birkhoff_gauss_tangents, slope_power, slope_weight, GraphJet2, NormOrder, Vec3,
};

/// First derivatives below this magnitude count as zero for the closed-form
/// curvature formulas, which carry negative powers of them.
pub const SLOPE_EPS: f64 = 1e-12;

/// Tangent vectors above this condition number are rejected by the oracle.
pub const MAX_TANGENT_CONDITION: f64 = 1e8;

pub const DEFAULT_ORACLE_STEP: f64 = 1e-4;

/// Position and first partials of a parametrized surface at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSample {
    pub point: Vec3,
    pub du: Vec3,
    pub dv: Vec3,
}

/// A parametrized surface `(u, v) -> X(u, v)`.
///
/// The Birkhoff-Gauss map is oriented by `X_u x X_v`.
pub trait SurfacePatch {
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample>;
}

impl<P: SurfacePatch + ?Sized> SurfacePatch for &P {
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample> {
        (**self).sample(u, v)
    }
}

/// Graph patch built from a closure returning `(f, f_u, f_v)`.
pub struct GraphPatch<F>(pub F);

impl<F> SurfacePatch for GraphPatch<F>
where
    F: Fn(f64, f64) -> (f64, f64, f64),
{
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample> {
        let (f, fu, fv) = (self.0)(u, v);
        Ok(PatchSample {
            point: Vec3::new(u, v, f),
            du: Vec3::new(1.0, 0.0, fu),
            dv: Vec3::new(0.0, 1.0, fv),
        })
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
    pub h_analytic: f64,
    pub h_numeric: Option<f64>,
    /// `|h_analytic|` for surfaces that are claimed minimal.
    pub residual: f64,
}

fn require_slope(x: f64, what: &'static str) -> Result<()> {
    if x.abs() < SLOPE_EPS || !x.is_finite() {
        Err(Error::DegenerateSlope(what))
    } else {
        Ok(())
    }
}

/// `-(1 / (2(2m-1))) A^(-(2m+1)/(2m))` with `A = 1 + |p|^(2m/(2m-1)) + |q|^(2m/(2m-1))`.
fn graph_prefactor(p: f64, q: f64, m: NormOrder) -> f64 {
    let a = 1.0 + slope_power(p, m) + slope_power(q, m);
    let e = f64::from(m.exponent());
    -a.powf(-(e + 1.0) / e) / (2.0 * m.k())
}

/// Mean curvature of the graph `(u, v, f(u, v))` from its 2-jet.
///
/// Requires `f_u != 0` and `f_v != 0`.
pub fn mean_curvature_graph(j: &GraphJet2, m: NormOrder) -> Result<f64> {
    require_slope(j.f_u, "f_u")?;
    require_slope(j.f_v, "f_v")?;
    let wu = slope_weight(j.f_u, m);
    let wv = slope_weight(j.f_v, m);
    let bracket = (wv + j.f_v * j.f_v) * j.f_uu - 2.0 * j.f_u * j.f_v * j.f_uv
        + (wu + j.f_u * j.f_u) * j.f_vv;
    Ok(graph_prefactor(j.f_u, j.f_v, m) * bracket / (wu * wv))
}

/// Mean curvature of the translation graph `g(u) + h(v)`.
pub fn mean_curvature_translation(gp: f64, gpp: f64, hp: f64, hpp: f64, m: NormOrder) -> Result<f64> {
    require_slope(gp, "g'")?;
    require_slope(hp, "h'")?;
    let wg = slope_weight(gp, m);
    let wh = slope_weight(hp, m);
    let bracket = (wh + hp * hp) * gpp + (wg + gp * gp) * hpp;
    Ok(graph_prefactor(gp, hp, m) * bracket / (wg * wh))
}

/// Mean curvature of the homothetical graph `g(u) h(v)`.
pub fn mean_curvature_homothetical(
    g: f64,
    gp: f64,
    gpp: f64,
    h: f64,
    hp: f64,
    hpp: f64,
    m: NormOrder,
) -> Result<f64> {
    for (x, what) in [(g, "g"), (gp, "g'"), (h, "h"), (hp, "h'")] {
        if x.abs() < SLOPE_EPS || !x.is_finite() {
            return Err(Error::DegenerateFactor(what));
        }
    }
    let p = gp * h;
    let q = g * hp;
    let wp = slope_weight(p, m);
    let wq = slope_weight(q, m);
    let bracket = (wq + q * q) * gpp * h - 2.0 * g * h * gp * gp * hp * hp + (wp + p * p) * g * hpp;
    Ok(graph_prefactor(p, q, m) * bracket / (wp * wq))
}

/// Left side of the minimality condition for `f(x1) + g(x2) + h(x3) = 0`;
/// the surface is minimal at the point exactly when this vanishes.
pub fn separable_minimality_residual(
    fp: f64,
    fpp: f64,
    gp: f64,
    gpp: f64,
    hp: f64,
    hpp: f64,
    m: NormOrder,
) -> Result<f64> {
    require_slope(fp, "f'")?;
    require_slope(gp, "g'")?;
    require_slope(hp, "h'")?;
    let (pf, pg, ph) = (slope_power(fp, m), slope_power(gp, m), slope_power(hp, m));
    Ok((pg + ph) * fpp / slope_weight(fp, m)
        + (pf + ph) * gpp / slope_weight(gp, m)
        + (pf + pg) * hpp / slope_weight(hp, m))
}

/// Coefficients of `w` in the tangent basis `{xu, xv}` by least squares.
fn tangent_coordinates(xu: Vec3, xv: Vec3, w: Vec3) -> (f64, f64) {
    let (a, b, c) = (xu.dot(xu), xu.dot(xv), xv.dot(xv));
    let det = a * c - b * b;
    let (ru, rv) = (xu.dot(w), xv.dot(w));
    ((c * ru - b * rv) / det, (a * rv - b * ru) / det)
}

fn tangent_condition(xu: Vec3, xv: Vec3) -> f64 {
    let (a, b, c) = (xu.dot(xu), xu.dot(xv), xv.dot(xv));
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let lmax = 0.5 * (tr + disc);
    let lmin = 0.5 * (tr - disc);
    if lmin <= 0.0 {
        f64::INFINITY
    } else {
        (lmax / lmin).sqrt()
    }
}

/// Mean curvature by central differences of the Birkhoff-Gauss map.
///
/// `eta` is evaluated at the four neighbours `(u +- step, v)`, `(u, v +- step)`;
/// `eta_u`, `eta_v` are decomposed in the tangent basis at `(u, v)` by least
/// squares (the normal leakage of the difference quotient is discarded) and
/// `H` is half the trace. Truncation error is `O(step^2)`.
pub fn mean_curvature_numeric<P: SurfacePatch + ?Sized>(
    surface: &P,
    u: f64,
    v: f64,
    m: NormOrder,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("oracle step must be positive, got {step}")));
    }
    let center = surface.sample(u, v)?;
    let cond = tangent_condition(center.du, center.dv);
    if !(cond <= MAX_TANGENT_CONDITION) {
        return Err(Error::DegenerateTangent { condition: cond });
    }
    let eta = |s: PatchSample| birkhoff_gauss_tangents(s.du, s.dv, m);
    let e_up = eta(surface.sample(u + step, v)?)?;
    let e_um = eta(surface.sample(u - step, v)?)?;
    let e_vp = eta(surface.sample(u, v + step)?)?;
    let e_vm = eta(surface.sample(u, v - step)?)?;
    let inv = 0.5 / step;
    let eta_u = inv * (e_up - e_um);
    let eta_v = inv * (e_vp - e_vm);
    let (a11, _) = tangent_coordinates(center.du, center.dv, eta_u);
    let (_, a22) = tangent_coordinates(center.du, center.dv, eta_v);
    Ok(0.5 * (a11 + a22))
}
