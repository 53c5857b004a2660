//! Separable minimal surfaces `f(x1) + g(x2) + h(x3) = 0`.
//!
//! In the variables `u = f(x1)`, `v = g(x2)`, `w = h(x3)` the slope powers
//! `X(u) = f'^(2m/(2m-1))`, `Y(v)`, `Z(w)` satisfy
//! `B = (Y + Z) X' + (Z + X) Y' + (X + Y) Z' = 0` on `u + v + w = 0`, and
//! `X''' / X' = Y''' / Y' = Z''' / Z'` is a common constant. The three
//! families below (exponential, trigonometric, quadratic) are the solutions
//! of that ODE; each carries six polynomial constraints on its coefficients.
//! The surface is recovered by `x1 = +-int X^(-(2m-1)/(2m)) du` and likewise
//! for `x2`, `x3`, and exists only where `X`, `Y`, `Z` are all positive.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::curvature::{PatchSample, SurfacePatch};
use crate::error::{Error, Result};
use crate::geometry::{GraphJet2, NormOrder, Vec3};
use crate::numerics::{integrate_accepting, QuadratureConfig};

/// Ratio threshold below which `X'` counts as zero in [`third_derivative_ratio`].
pub const RATIO_SLOPE_EPS: f64 = 1e-10;

/// Default positivity margin for [`positivity_domain`].
pub const DEFAULT_POSITIVITY_MARGIN: f64 = 1e-9;

/// Reconstruction integrals may stop short of the requested quadrature
/// tolerance (singular endpoints at the domain boundary); estimates with an
/// error below this, relative to `max(1, |value|)`, are accepted.
pub const RECONSTRUCTION_ACCEPT: f64 = 1e-8;

/// Which solution family, i.e. the sign of the common ratio `X''' / X'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `p + q e^(b x) + r e^(-b x)`, ratio `b^2`.
    Exp { b: f64 },
    /// `p + q cos(b x) + r sin(b x)`, ratio `-b^2`.
    Trig { b: f64 },
    /// `p + q x + r x^2`, ratio `0`.
    Poly,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exp { .. } => "exp",
            Family::Trig { .. } => "trig",
            Family::Poly => "poly",
        }
    }

    pub fn b(self) -> Option<f64> {
        match self {
            Family::Exp { b } | Family::Trig { b } => Some(b),
            Family::Poly => None,
        }
    }

    /// The common value of `X''' / X'`.
    pub fn ratio(self) -> f64 {
        match self {
            Family::Exp { b } => b * b,
            Family::Trig { b } => -b * b,
            Family::Poly => 0.0,
        }
    }
}

/// Coefficients `p_i, q_i, r_i` of `X`, `Y`, `Z` within one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub family: Family,
    pub p: [f64; 3],
    pub q: [f64; 3],
    pub r: [f64; 3],
}

impl CoefficientSet {
    pub fn new(family: Family, p: [f64; 3], q: [f64; 3], r: [f64; 3]) -> Result<Self> {
        if let Some(b) = family.b() {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
            }
        }
        if p.iter().chain(&q).chain(&r).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(Self { family, p, q, r })
    }
}

/// One of the three separated variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    U,
    V,
    W,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::U, Axis::V, Axis::W];

    fn index(self) -> usize {
        self as usize
    }

    /// Name of the slope power on this axis.
    pub fn function_name(self) -> &'static str {
        match self {
            Axis::U => "X(u)",
            Axis::V => "Y(v)",
            Axis::W => "Z(w)",
        }
    }

    fn coordinate_name(self) -> &'static str {
        match self {
            Axis::U => "x1",
            Axis::V => "x2",
            Axis::W => "x3",
        }
    }
}

/// Value and first three derivatives of one factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// The triple `X, Y, Z` of a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzTriple {
    coeffs: CoefficientSet,
}

/// Builds the triple for a coefficient set.
pub fn build_xyz(c: CoefficientSet) -> XyzTriple {
    XyzTriple { coeffs: c }
}

impl XyzTriple {
    pub fn coefficients(&self) -> CoefficientSet {
        self.coeffs
    }

    pub fn eval(&self, axis: Axis, x: f64) -> Derivs {
        let i = axis.index();
        let (p, q, r) = (self.coeffs.p[i], self.coeffs.q[i], self.coeffs.r[i]);
        match self.coeffs.family {
            Family::Exp { b } => {
                let (ep, em) = ((b * x).exp(), (-b * x).exp());
                let odd = q * ep - r * em;
                let even = q * ep + r * em;
                Derivs { value: p + even, d1: b * odd, d2: b * b * even, d3: b * b * b * odd }
            }
            Family::Trig { b } => {
                let (s, c) = (b * x).sin_cos();
                let cos_part = q * c + r * s;
                let sin_part = r * c - q * s;
                Derivs {
                    value: p + cos_part,
                    d1: b * sin_part,
                    d2: -b * b * cos_part,
                    d3: -b * b * b * sin_part,
                }
            }
            Family::Poly => Derivs { value: p + x * (q + r * x), d1: q + 2.0 * r * x, d2: 2.0 * r, d3: 0.0 },
        }
    }

    pub fn value(&self, axis: Axis, x: f64) -> f64 {
        self.eval(axis, x).value
    }

    /// Parameters in `(lo, hi)` where the factor on `axis` is stationary.
    fn stationary_points(&self, axis: Axis, lo: f64, hi: f64) -> Vec<f64> {
        let i = axis.index();
        let (q, r) = (self.coeffs.q[i], self.coeffs.r[i]);
        let mut out = Vec::new();
        match self.coeffs.family {
            Family::Exp { b } => {
                // q e^(2bx) = r
                if q != 0.0 && r / q > 0.0 {
                    out.push((r / q).ln() / (2.0 * b));
                }
            }
            Family::Trig { b } => {
                if q != 0.0 || r != 0.0 {
                    let base = r.atan2(q);
                    let k0 = ((b * lo - base) / PI).floor() as i64;
                    let k1 = ((b * hi - base) / PI).ceil() as i64;
                    for k in k0..=k1 {
                        out.push((base + k as f64 * PI) / b);
                    }
                }
            }
            Family::Poly => {
                if r != 0.0 {
                    out.push(-q / (2.0 * r));
                }
            }
        }
        out.retain(|&x| x > lo && x < hi);
        out
    }
}

/// The six constraint left-hand sides of a family; all zero exactly when
/// `B` vanishes identically on `u + v + w = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResidual(pub [f64; 6]);

impl ConstraintResidual {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Evaluates the constraint system matching the family of `c`.
pub fn check_constraints(c: &CoefficientSet) -> ConstraintResidual {
    let [p1, p2, p3] = c.p;
    let [q1, q2, q3] = c.q;
    let [r1, r2, r3] = c.r;
    ConstraintResidual(match c.family {
        Family::Exp { .. } => [
            (p2 + p3) * r1 - 2.0 * q2 * q3,
            (p1 + p3) * r2 - 2.0 * q1 * q3,
            (p2 + p3) * q1 - 2.0 * r2 * r3,
            (p1 + p3) * q2 - 2.0 * r1 * r3,
            (p1 + p2) * q3 - 2.0 * r1 * r2,
            (p1 + p2) * r3 - 2.0 * q1 * q2,
        ],
        Family::Trig { .. } => [
            (p2 + p3) * q1 - q2 * q3 + r2 * r3,
            (p2 + p3) * r1 + q2 * r3 + q3 * r2,
            (p1 + p3) * q2 - q1 * q3 + r1 * r3,
            (p1 + p3) * r2 + q1 * r3 + q3 * r1,
            (p1 + p2) * q3 - q1 * q2 + r1 * r2,
            (p1 + p2) * r3 + q1 * r2 + q2 * r1,
        ],
        Family::Poly => [
            (p2 + p3) * q1 + (p1 + p3) * q2 + (p1 + p2) * q3,
            2.0 * (p2 + p3) * r1 - 2.0 * (p1 + p2) * r3 + q2 * (q1 - q3),
            2.0 * (p1 + p3) * r2 - 2.0 * (p1 + p2) * r3 + q1 * (q2 - q3),
            (q2 - q3) * r1 - (q1 - q2) * r3,
            (q1 - q3) * r2 + (q1 - q2) * r3,
            r1 * r2 + r1 * r3 + r2 * r3,
        ],
    })
}

/// `B(u, v, -u - v)`.
pub fn b_residual(u: f64, v: f64, t: &XyzTriple) -> f64 {
    let x = t.eval(Axis::U, u);
    let y = t.eval(Axis::V, v);
    let z = t.eval(Axis::W, -u - v);
    (y.value + z.value) * x.d1 + (z.value + x.value) * y.d1 + (x.value + y.value) * z.d1
}

/// Third derivative over first derivative of one factor.
pub fn third_derivative_ratio(t: &XyzTriple, axis: Axis, x: f64) -> Result<f64> {
    let d = t.eval(axis, x);
    if d.d1.abs() < RATIO_SLOPE_EPS {
        return Err(Error::DegenerateSlope(axis.function_name()));
    }
    Ok(d.d3 / d.d1)
}

/// Output of [`solve_trig_coeffs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigSolution {
    pub coeffs: CoefficientSet,
    /// `p_i + |s_i| > 0` for each factor, necessary for positivity somewhere.
    pub positivity_ok: [bool; 3],
}

impl TrigSolution {
    pub fn all_positive(&self) -> bool {
        self.positivity_ok.iter().all(|&ok| ok)
    }
}

/// Solves the trigonometric constraints for given `p` and phases.
///
/// With `s_i = q_i + i r_i`, the system is equivalent to
/// `(p2 + p3) s1 = conj(s2 s3)` together with the moduli
/// `|s2|^2 = (p1 + p2)(p2 + p3)` and `|s3|^2 = (p1 + p3)(p2 + p3)`.
pub fn solve_trig_coeffs(p: [f64; 3], phase2: f64, phase3: f64, b: f64) -> Result<TrigSolution> {
    let [p1, p2, p3] = p;
    let d = p2 + p3;
    if d == 0.0 {
        return Err(Error::InfeasibleModuli("p2 + p3 vanishes".into()));
    }
    let m2 = (p1 + p2) * d;
    let m3 = (p1 + p3) * d;
    if m2 < 0.0 {
        return Err(Error::InfeasibleModuli(format!("|s2|^2 = (p1 + p2)(p2 + p3) = {m2}")));
    }
    if m3 < 0.0 {
        return Err(Error::InfeasibleModuli(format!("|s3|^2 = (p1 + p3)(p2 + p3) = {m3}")));
    }
    let s2 = Complex64::from_polar(m2.sqrt(), phase2);
    let s3 = Complex64::from_polar(m3.sqrt(), phase3);
    let s1 = (s2 * s3).conj() / d;
    let s = [s1, s2, s3];
    let coeffs = CoefficientSet::new(
        Family::Trig { b },
        p,
        [s1.re, s2.re, s3.re],
        [s1.im, s2.im, s3.im],
    )?;
    let positivity_ok = [0, 1, 2].map(|i| p[i] + s[i].norm() > 0.0);
    Ok(TrigSolution { coeffs, positivity_ok })
}

/// Grid points of a parameter window where `X`, `Y` and `Z` exceed a margin.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityDomain {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Row-major: index `j * u.len() + i` for `(u[i], v[j])`.
    inside: Vec<bool>,
    pub delta: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Samples the positivity domain on a `grid x grid` lattice.
pub fn positivity_domain(
    t: &XyzTriple,
    u_window: (f64, f64),
    v_window: (f64, f64),
    grid: usize,
    delta: f64,
) -> Result<PositivityDomain> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must be at least 2, got {grid}")));
    }
    for (lo, hi) in [u_window, v_window] {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("window [{lo}, {hi}] is empty")));
        }
    }
    let u = linspace(u_window.0, u_window.1, grid);
    let v = linspace(v_window.0, v_window.1, grid);
    let xs: Vec<bool> = u.iter().map(|&x| t.value(Axis::U, x) > delta).collect();
    let ys: Vec<bool> = v.iter().map(|&y| t.value(Axis::V, y) > delta).collect();
    let mut inside = Vec::with_capacity(grid * grid);
    for (j, &vj) in v.iter().enumerate() {
        for (i, &ui) in u.iter().enumerate() {
            inside.push(xs[i] && ys[j] && t.value(Axis::W, -ui - vj) > delta);
        }
    }
    Ok(PositivityDomain { u, v, inside, delta })
}

impl PositivityDomain {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.inside[j * self.u.len() + i]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// All `(u, v)` inside the domain, row by row.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.u.len();
        self.inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| (self.u[k % n], self.v[k / n]))
            .collect()
    }

    /// Why the domain is empty, naming a factor that is never positive on
    /// the sampled window when there is one.
    pub fn empty_reason(&self, t: &XyzTriple) -> Option<String> {
        if !self.is_empty() {
            return None;
        }
        let d = self.delta;
        if self.u.iter().all(|&x| t.value(Axis::U, x) <= d) {
            return Some("X(u) <= 0".into());
        }
        if self.v.iter().all(|&y| t.value(Axis::V, y) <= d) {
            return Some("Y(v) <= 0".into());
        }
        let z_never = self
            .v
            .iter()
            .all(|&y| self.u.iter().all(|&x| t.value(Axis::W, -x - y) <= d));
        if z_never {
            return Some("Z(w) <= 0".into());
        }
        Some("X, Y and Z are never simultaneously positive".into())
    }

    /// 4-connected components of the sampled domain, as `(i, j)` indices.
    pub fn components(&self) -> Vec<Vec<(usize, usize)>> {
        let (nu, nv) = (self.u.len(), self.v.len());
        let mut seen = vec![false; nu * nv];
        let mut out = Vec::new();
        for start in 0..nu * nv {
            if !self.inside[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            while let Some(k) = queue.pop_front() {
                let (i, j) = (k % nu, k / nu);
                comp.push((i, j));
                let mut visit = |ii: usize, jj: usize| {
                    let kk = jj * nu + ii;
                    if self.inside[kk] && !seen[kk] {
                        seen[kk] = true;
                        queue.push_back(kk);
                    }
                };
                if i > 0 {
                    visit(i - 1, j);
                }
                if i + 1 < nu {
                    visit(i + 1, j);
                }
                if j > 0 {
                    visit(i, j - 1);
                }
                if j + 1 < nv {
                    visit(i, j + 1);
                }
            }
            comp.sort_unstable_by_key(|&(i, j)| (j, i));
            out.push(comp);
        }
        out
    }

    /// The grid point of a component closest to the component's centroid.
    ///
    /// The centroid itself can fall outside a non-convex component.
    pub fn anchor_of(&self, component: &[(usize, usize)]) -> Option<(f64, f64)> {
        if component.is_empty() {
            return None;
        }
        let n = component.len() as f64;
        let cu = component.iter().map(|&(i, _)| self.u[i]).sum::<f64>() / n;
        let cv = component.iter().map(|&(_, j)| self.v[j]).sum::<f64>() / n;
        component
            .iter()
            .map(|&(i, j)| (self.u[i], self.v[j]))
            .min_by(|a, b| {
                let da = (a.0 - cu).powi(2) + (a.1 - cv).powi(2);
                let db = (b.0 - cu).powi(2) + (b.1 - cv).powi(2);
                da.total_cmp(&db)
            })
    }
}

/// Reflection signs of the three coordinates; the default is `(+, +, +)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signs(pub [bool; 3]);

impl Default for Signs {
    fn default() -> Self {
        Signs([true; 3])
    }
}

impl Signs {
    fn factor(self, axis: Axis) -> f64 {
        if self.0[axis.index()] {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Signs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            write!(f, "{}", if s { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Signs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !matches!(c, ',' | ' ')).collect();
        if chars.len() != 3 {
            return Err(Error::InvalidParameter(format!("expected three signs, got {s:?}")));
        }
        let mut out = [true; 3];
        for (o, c) in out.iter_mut().zip(chars) {
            *o = match c {
                '+' => true,
                '-' => false,
                _ => return Err(Error::InvalidParameter(format!("bad sign {c:?} in {s:?}"))),
            };
        }
        Ok(Signs(out))
    }
}

/// First and second derivatives of `f`, `g`, `h` at a point, as functions
/// of `x1`, `x2`, `x3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableJet {
    pub fp: f64,
    pub fpp: f64,
    pub gp: f64,
    pub gpp: f64,
    pub hp: f64,
    pub hpp: f64,
}

impl SeparableJet {
    /// 2-jet of `x3` as a graph over `(x1, x2)`.
    pub fn graph_jet(&self) -> GraphJet2 {
        let h3 = self.hp.powi(3);
        GraphJet2 {
            f_u: -self.fp / self.hp,
            f_v: -self.gp / self.hp,
            f_uu: -self.fpp / self.hp - self.fp * self.fp * self.hpp / h3,
            f_uv: -self.fp * self.gp * self.hpp / h3,
            f_vv: -self.gpp / self.hp - self.gp * self.gp * self.hpp / h3,
        }
    }
}

/// A reconstructed separable surface, parametrized by `(u, v)`.
#[derive(Debug, Clone)]
pub struct SeparableSurface {
    triple: XyzTriple,
    m: NormOrder,
    anchor: (f64, f64),
    signs: Signs,
    quadrature: QuadratureConfig,
}

impl SeparableSurface {
    /// Fails with `DomainViolation` if the anchor is outside the positivity domain.
    pub fn new(
        triple: XyzTriple,
        m: NormOrder,
        anchor: (f64, f64),
        signs: Signs,
        quadrature: QuadratureConfig,
    ) -> Result<Self> {
        quadrature.validate()?;
        let (u0, v0) = anchor;
        for (axis, x) in [(Axis::U, u0), (Axis::V, v0), (Axis::W, -u0 - v0)] {
            if !(triple.value(axis, x) > 0.0) {
                return Err(Error::DomainViolation { axis: axis.coordinate_name(), at: x });
            }
        }
        Ok(Self { triple, m, anchor, signs, quadrature })
    }

    pub fn triple(&self) -> &XyzTriple {
        &self.triple
    }

    pub fn anchor(&self) -> (f64, f64) {
        self.anchor
    }

    fn base(&self, axis: Axis) -> f64 {
        match axis {
            Axis::U => self.anchor.0,
            Axis::V => self.anchor.1,
            Axis::W => -self.anchor.0 - self.anchor.1,
        }
    }

    /// Ensures the factor stays positive between the anchor and `x`.
    ///
    /// The far end may be a simple zero, where the integrand has an
    /// integrable singularity.
    fn check_leg(&self, axis: Axis, x: f64) -> Result<()> {
        let x0 = self.base(axis);
        let (lo, hi) = if x0 <= x { (x0, x) } else { (x, x0) };
        let violation = |at: f64| Error::DomainViolation { axis: axis.coordinate_name(), at };
        for c in self.triple.stationary_points(axis, lo, hi) {
            if !(self.triple.value(axis, c) > 0.0) {
                return Err(violation(c));
            }
        }
        let end = self.triple.eval(axis, x);
        if end.value < 0.0 || !end.value.is_finite() || (end.value == 0.0 && end.d1 == 0.0) {
            return Err(violation(x));
        }
        Ok(())
    }

    fn exponent(&self) -> f64 {
        -self.m.k() / f64::from(self.m.exponent())
    }

    /// `x_i` as a function of the separated variable on `axis`.
    pub fn coordinate(&self, axis: Axis, x: f64) -> Result<f64> {
        self.check_leg(axis, x)?;
        let x0 = self.base(axis);
        let e = self.exponent();
        // Roundoff can push the factor marginally below zero next to a
        // simple zero at the far end; its magnitude is the right size there.
        let integrand = |s: f64| self.triple.value(axis, s).abs().max(f64::MIN_POSITIVE).powf(e);
        let value = integrate_accepting(integrand, x0, x, &self.quadrature, RECONSTRUCTION_ACCEPT)?;
        Ok(self.signs.factor(axis) * value)
    }

    /// `(x1(u), x2(v), x3(-u - v))`.
    pub fn point(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(Vec3::new(
            self.coordinate(Axis::U, u)?,
            self.coordinate(Axis::V, v)?,
            self.coordinate(Axis::W, -u - v)?,
        ))
    }

    /// `d x_i / d(variable)` on `axis`: `sign X^(-(2m-1)/(2m))`.
    pub fn coordinate_slope(&self, axis: Axis, x: f64) -> f64 {
        self.signs.factor(axis) * self.triple.value(axis, x).powf(self.exponent())
    }

    /// `f'` and `f''` along one axis: `f' = sign X^((2m-1)/(2m))` and
    /// `f'' = ((2m-1)/(2m)) X' X^((2m-2)/(2m))`.
    fn slope_pair(&self, axis: Axis, x: f64) -> Result<(f64, f64)> {
        let d = self.triple.eval(axis, x);
        if !(d.value > 0.0) {
            return Err(Error::DomainViolation { axis: axis.coordinate_name(), at: x });
        }
        let e = f64::from(self.m.exponent());
        let k = self.m.k();
        let fp = self.signs.factor(axis) * d.value.powf(k / e);
        let fpp = k / e * d.d1 * d.value.powf((e - 2.0) / e);
        Ok((fp, fpp))
    }

    pub fn jet(&self, u: f64, v: f64) -> Result<SeparableJet> {
        let (fp, fpp) = self.slope_pair(Axis::U, u)?;
        let (gp, gpp) = self.slope_pair(Axis::V, v)?;
        let (hp, hpp) = self.slope_pair(Axis::W, -u - v)?;
        Ok(SeparableJet { fp, fpp, gp, gpp, hp, hpp })
    }
}

impl SurfacePatch for SeparableSurface {
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample> {
        let w = -u - v;
        let d1 = self.coordinate_slope(Axis::U, u);
        let d2 = self.coordinate_slope(Axis::V, v);
        let d3 = self.coordinate_slope(Axis::W, w);
        if !(d1.is_finite() && d2.is_finite() && d3.is_finite()) {
            return Err(Error::DomainViolation { axis: "x", at: u });
        }
        Ok(PatchSample {
            point: self.point(u, v)?,
            du: Vec3::new(d1, 0.0, -d3),
            dv: Vec3::new(0.0, d2, -d3),
        })
    }
}

/// Reconstructs one point; see [`SeparableSurface`].
pub fn reconstruct_point(
    u: f64,
    v: f64,
    t: &XyzTriple,
    m: NormOrder,
    anchor: (f64, f64),
    signs: Signs,
) -> Result<Vec3> {
    SeparableSurface::new(*t, m, anchor, signs, QuadratureConfig::default())?.point(u, v)
}

/// A worked coefficient set with a parameter window that shows its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub coeffs: CoefficientSet,
    pub u_window: (f64, f64),
    pub v_window: (f64, f64),
}

pub const PRESET_NAMES: [&str; 4] = ["example6.1", "example6.2", "example6.3", "example6.4"];

/// The four worked examples: quadratic, exponential, and two trigonometric
/// sets, the first of which has no positivity domain.
pub fn preset(name: &str) -> Option<Preset> {
    let r2 = std::f64::consts::SQRT_2;
    let (family, p, q, r, u_window, v_window) = match name {
        "example6.1" => (
            Family::Poly,
            [-1.0, -1.0, 2.0],
            [0.0, 0.0, 0.0],
            [1.0, 1.0, -0.5],
            (-3.0, 3.0),
            (-3.0, 3.0),
        ),
        "example6.2" => (
            Family::Exp { b: 1.0 },
            [1.0, 1.0, -1.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 0.0],
            (-3.0, 3.0),
            (-3.0, 3.0),
        ),
        "example6.3" => (
            Family::Trig { b: 1.0 },
            [1.0, 1.0, -0.5],
            [0.0, 0.0, 0.5],
            [1.0, -1.0, 0.0],
            (-PI, PI),
            (-PI, PI),
        ),
        "example6.4" => (
            Family::Trig { b: 1.0 },
            [1.0, 1.0, 1.0],
            [0.0, r2, r2],
            [-2.0, r2, r2],
            (-PI, PI),
            (-PI, PI),
        ),
        _ => return None,
    };
    let name = PRESET_NAMES.into_iter().find(|&n| n == name)?;
    Some(Preset { name, coeffs: CoefficientSet { family, p, q, r }, u_window, v_window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{mean_curvature_graph, mean_curvature_numeric, separable_minimality_residual};
    use crate::numerics::simpson;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triple(name: &str) -> XyzTriple {
        build_xyz(preset(name).unwrap().coeffs)
    }

    fn m(k: u32) -> NormOrder {
        NormOrder::new(k).unwrap()
    }

    #[test]
    fn example_factors() {
        let t = triple("example6.1");
        assert_eq!(t.value(Axis::U, 2.0), 3.0);
        assert_eq!(t.value(Axis::V, -3.0), 8.0);
        assert_eq!(t.value(Axis::W, 1.0), 1.5);
        let t = triple("example6.2");
        assert_eq!(t.value(Axis::U, 0.0), 2.0);
        assert!((t.value(Axis::W, 1.0) - (1f64.exp() - 1.0)).abs() < 1e-15);
        let t = triple("example6.4");
        assert_eq!(t.value(Axis::U, 0.0), 1.0);
        assert!((t.value(Axis::U, 0.4) - (1.0 - 2.0 * 0.4f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn example_constraints_vanish() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap().coeffs;
            assert!(check_constraints(&c).max_abs() < 1e-13, "{name}");
        }
        let zero = CoefficientSet::new(Family::Poly, [0.0; 3], [0.0; 3], [0.0; 3]).unwrap();
        assert_eq!(check_constraints(&zero), ConstraintResidual([0.0; 6]));
    }

    #[test]
    fn hand_checked_b_value() {
        // (8 + 1.5) 4 + (1.5 + 3)(-6) + (3 + 8)(-1) = 0
        assert_eq!(b_residual(2.0, -3.0, &triple("example6.1")), 0.0);
    }

    #[test]
    fn b_vanishes_for_exponential_example() {
        let t = triple("example6.2");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u: f64 = rng.random_range(-4.0..4.0);
            let v: f64 = rng.random_range(-4.0..4.0);
            if u + v < 0.0 {
                let scale: f64 = Axis::ALL.iter().zip([u, v, -u - v]).map(|(&a, x)| t.value(a, x).abs()).sum();
                assert!(b_residual(u, v, &t).abs() < 1e-15 * scale * scale);
            }
        }
    }

    #[test]
    fn perturbation_is_detected() {
        let mut c = preset("example6.1").unwrap().coeffs;
        c.q[0] += 0.1;
        let t = build_xyz(c);
        assert!(b_residual(0.7, -1.9, &t).abs() > 1e-3);
        assert!(check_constraints(&c).max_abs() > 1e-3);
    }

    #[test]
    fn ratio_examples() {
        let exp = build_xyz(CoefficientSet::new(Family::Exp { b: 1.0 }, [0.3; 3], [1.0; 3], [0.5; 3]).unwrap());
        let trig = build_xyz(CoefficientSet::new(Family::Trig { b: 2.0 }, [0.3; 3], [1.0; 3], [0.5; 3]).unwrap());
        let poly = triple("example6.1");
        assert!((third_derivative_ratio(&exp, Axis::U, 0.7).unwrap() - 1.0).abs() < 1e-14);
        assert!((third_derivative_ratio(&trig, Axis::V, 0.7).unwrap() + 4.0).abs() < 1e-13);
        assert_eq!(third_derivative_ratio(&poly, Axis::U, 2.0).unwrap(), 0.0);
        assert!(matches!(third_derivative_ratio(&poly, Axis::U, 0.0), Err(Error::DegenerateSlope(_))));
    }

    #[test]
    fn trig_solver_reproduces_worked_example() {
        let sol = solve_trig_coeffs([1.0; 3], PI / 4.0, PI / 4.0, 1.0).unwrap();
        let want = preset("example6.4").unwrap().coeffs;
        for i in 0..3 {
            assert!((sol.coeffs.q[i] - want.q[i]).abs() < 1e-15);
            assert!((sol.coeffs.r[i] - want.r[i]).abs() < 1e-15);
        }
        assert!(sol.all_positive());
    }

    #[test]
    fn trig_solver_rejects_sign_obstruction() {
        let r = solve_trig_coeffs([1.0, 1.0, -2.0], 0.3, 0.4, 1.0);
        assert!(matches!(r, Err(Error::InfeasibleModuli(_))));
    }

    #[test]
    fn example_6_1_domain_shape() {
        let t = triple("example6.1");
        let d = positivity_domain(&t, (-3.0, 3.0), (-3.0, 3.0), 61, DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert!(!d.is_empty());
        for j in 0..61 {
            for i in 0..61 {
                let (u, v) = (d.u[i], d.v[j]);
                let exact = u.abs() > 1.0 && v.abs() > 1.0 && (u + v).abs() < 2.0;
                let margin = (u.abs() - 1.0).abs().min((v.abs() - 1.0).abs()).min(((u + v).abs() - 2.0).abs());
                if margin > 1e-6 {
                    assert_eq!(d.contains(i, j), exact, "({u}, {v})");
                }
            }
        }
        assert_eq!(d.components().len(), 2);
    }

    #[test]
    fn example_6_2_domain_is_half_plane() {
        let t = triple("example6.2");
        let d = positivity_domain(&t, (-3.0, 3.0), (-3.0, 3.0), 40, DEFAULT_POSITIVITY_MARGIN).unwrap();
        for (u, v) in d.points() {
            assert!(u + v < 0.0);
        }
        assert_eq!(d.count(), (0..40).flat_map(|j| (0..40).map(move |i| (i, j)))
            .filter(|&(i, j)| d.u[i] + d.v[j] < -1e-12).count());
    }

    #[test]
    fn example_6_3_is_rejected() {
        let t = triple("example6.3");
        let d = positivity_domain(&t, (-PI, PI), (-PI, PI), 50, DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.empty_reason(&t).unwrap(), "Z(w) <= 0");
        // No anchor can be placed, so reconstruction refuses everywhere.
        assert!(matches!(
            reconstruct_point(0.1, 0.2, &t, m(2), (0.0, 0.0), Signs::default()),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn example_6_4_domain_nonempty_and_matches_conditions() {
        let t = triple("example6.4");
        let d = positivity_domain(&t, (-PI, PI), (-PI, PI), 50, DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert!(!d.is_empty());
        for (u, v) in d.points() {
            assert!(u.sin() < 0.5);
            assert!((v + PI / 4.0).sin() > -0.5);
            assert!((PI / 4.0 - u - v).sin() > -0.5);
        }
    }

    #[test]
    fn anchor_reconstructs_origin() {
        let t = triple("example6.2");
        let p = reconstruct_point(-1.0, -1.0, &t, m(2), (-1.0, -1.0), Signs::default()).unwrap();
        assert_eq!(p, Vec3::ZERO);
    }

    #[test]
    fn singular_endpoint_against_substituted_grid() {
        // Reaching w = 0 where Z = e^w - 1 vanishes. With e^w - 1 = y^4 the
        // x3 integral from 0 to 2 becomes int 4 / (1 + y^4) dy.
        let t = triple("example6.2");
        let srf = SeparableSurface::new(t, m(2), (-1.0, -1.0), Signs::default(), QuadratureConfig::default()).unwrap();
        let x3 = srf.coordinate(Axis::W, 0.0).unwrap();
        let top = (2f64.exp() - 1.0).powf(0.25);
        let oracle = simpson(|y| 4.0 / (1.0 + y.powi(4)), 0.0, top, 1_000_000);
        assert!((x3 + oracle).abs() < 1e-10, "{x3} vs {}", -oracle);
        let p = srf.point(-2.0, -1.0).unwrap();
        assert!(p.is_finite());
    }

    #[test]
    fn leg_crossing_a_zero_is_refused() {
        let t = triple("example6.1");
        let srf = SeparableSurface::new(t, m(2), (1.5, -1.5), Signs::default(), QuadratureConfig::default()).unwrap();
        assert!(matches!(srf.coordinate(Axis::U, -1.5), Err(Error::DomainViolation { .. })));
        // The stationary point of 2 - w^2/2 at 0 is a maximum, so the leg is fine.
        assert!(srf.coordinate(Axis::W, 1.5).is_ok());
        let t4 = triple("example6.4");
        let srf4 = SeparableSurface::new(t4, m(2), (0.0, 0.0), Signs::default(), QuadratureConfig::default()).unwrap();
        // sin u reaches 1/2 at pi/6, so X = 1 - 2 sin u turns negative on the way to 1.
        assert!(matches!(srf4.coordinate(Axis::U, 1.0), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn signs_parse_and_reflect() {
        let s: Signs = "+,-,+".parse().unwrap();
        assert_eq!(s.to_string(), "+-+");
        assert!("++".parse::<Signs>().is_err());
        let t = triple("example6.1");
        let plus = reconstruct_point(2.0, -2.5, &t, m(2), (1.6, -1.6), Signs::default()).unwrap();
        let mixed = reconstruct_point(2.0, -2.5, &t, m(2), (1.6, -1.6), s).unwrap();
        assert_eq!(mixed, Vec3::new(plus.x1, -plus.x2, plus.x3));
    }

    fn assert_minimal_on(name: &str, k: u32) {
        let pre = preset(name).unwrap();
        let t = build_xyz(pre.coeffs);
        let d = positivity_domain(&t, pre.u_window, pre.v_window, 30, 1e-3).unwrap();
        for comp in d.components() {
            let anchor = d.anchor_of(&comp).unwrap();
            let srf = SeparableSurface::new(t, m(k), anchor, Signs::default(), QuadratureConfig::default()).unwrap();
            for &(i, j) in &comp {
                let (u, v) = (d.u[i], d.v[j]);
                let jet = srf.jet(u, v).unwrap();
                let res = separable_minimality_residual(jet.fp, jet.fpp, jet.gp, jet.gpp, jet.hp, jet.hpp, m(k)).unwrap();
                let h = mean_curvature_graph(&jet.graph_jet(), m(k)).unwrap();
                assert!(res.abs() < 1e-8, "{name} m={k} ({u}, {v}): residual {res}");
                assert!(h.abs() < 1e-8 * (1.0 + jet.graph_jet().f_uu.abs() + jet.graph_jet().f_vv.abs()),
                    "{name} m={k} ({u}, {v}): H {h}");
            }
        }
    }

    #[test]
    fn reconstructed_examples_are_minimal() {
        for name in ["example6.1", "example6.2", "example6.4"] {
            for k in [2, 3] {
                assert_minimal_on(name, k);
            }
        }
    }

    #[test]
    fn oracle_confirms_reconstruction() {
        let t = triple("example6.1");
        let srf = SeparableSurface::new(t, m(2), (1.6, -1.6), Signs::default(), QuadratureConfig::default()).unwrap();
        for (u, v) in [(1.6, -1.6), (2.0, -2.5), (1.3, -2.2)] {
            let h = mean_curvature_numeric(&srf, u, v, m(2), 1e-4).unwrap();
            assert!(h.abs() < 1e-6, "({u}, {v}): {h}");
        }
    }

    #[test]
    fn embeddings_depend_on_m() {
        let t = triple("example6.4");
        let a = reconstruct_point(0.3, 0.4, &t, m(2), (0.0, 0.0), Signs::default()).unwrap();
        let b = reconstruct_point(0.3, 0.4, &t, m(3), (0.0, 0.0), Signs::default()).unwrap();
        assert!((a - b).max_abs() > 1e-3);
    }

    #[test]
    fn preset_names_round_trip() {
        for name in PRESET_NAMES {
            assert_eq!(preset(name).unwrap().name, name);
        }
        assert!(preset("example6.5").is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn trig_solver_output_satisfies_constraints(
            p in prop::array::uniform3(0.1f64..3.0),
            phase2 in -PI..PI,
            phase3 in -PI..PI,
            b in 0.2f64..3.0,
        ) {
            let sol = solve_trig_coeffs(p, phase2, phase3, b).unwrap();
            prop_assert!(check_constraints(&sol.coeffs).max_abs() < 1e-12);
            let t = build_xyz(sol.coeffs);
            prop_assert!(b_residual(0.3, -1.1, &t).abs() < 1e-11);
        }

        #[test]
        fn solved_sets_with_positive_flags_have_a_domain(
            p in prop::array::uniform3(0.1f64..3.0),
            phase2 in -PI..PI,
            phase3 in -PI..PI,
        ) {
            let sol = solve_trig_coeffs(p, phase2, phase3, 1.0).unwrap();
            prop_assume!(sol.all_positive());
            let t = build_xyz(sol.coeffs);
            let d = positivity_domain(&t, (-PI, PI), (-PI, PI), 60, DEFAULT_POSITIVITY_MARGIN).unwrap();
            prop_assert!(!d.is_empty());
        }

        #[test]
        fn b_is_m_independent_and_vanishes(u in -3.0f64..3.0, v in -3.0f64..3.0, name in prop::sample::select(PRESET_NAMES.to_vec())) {
            let t = triple(name);
            prop_assert!(b_residual(u, v, &t).abs() < 1e-10 * (1.0 + (u.abs() + v.abs()).exp()));
        }

        #[test]
        fn ratios_are_family_constants(x in -3.0f64..3.0, b in 0.3f64..2.5, which in 0usize..3) {
            let axis = Axis::ALL[which];
            for family in [Family::Exp { b }, Family::Trig { b }, Family::Poly] {
                let c = CoefficientSet::new(family, [0.5, -0.2, 1.0], [0.7, 1.1, -0.4], [0.3, 0.9, 1.3]).unwrap();
                let t = build_xyz(c);
                if let Ok(r) = third_derivative_ratio(&t, axis, x) {
                    prop_assert!((r - family.ratio()).abs() < 1e-10 * (1.0 + family.ratio().abs()));
                }
            }
        }
    }
}
