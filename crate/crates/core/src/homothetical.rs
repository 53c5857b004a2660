//! Minimal homothetical surfaces `z = (a u + b) h(v)`.
//!
//! The non-linear factor is `h = Psi^{-1}(v)` with
//! `Psi(h) = (1/c2) int_0^h (P + a^2 tau^(2m/(2m-1)))^(-(2m-1)/m) dtau`
//! and `P = a^((2m-2)/(2m-1))`. The integrand decays like `tau^-2`, so `Psi`
//! has a bounded range.

use crate::curvature::{PatchSample, SurfacePatch};
use crate::error::{Error, Result};
use crate::geometry::{odd_root, slope_power, slope_weight, GraphJet2, NormOrder, Vec3};
use crate::numerics::{integrate, invert_monotone, Tolerances};
use crate::translation::CurveJet;

/// Parameters of a homothetical minimal surface.
///
/// `swapped` exchanges the roles of the parameters: the linear factor then
/// depends on `v` and `Psi^{-1}` on `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotheticalSpec {
    pub m: NormOrder,
    pub a: f64,
    pub b: f64,
    pub c2: f64,
    pub swapped: bool,
}

impl HomotheticalSpec {
    pub fn new(m: NormOrder, a: f64, b: f64, c2: f64, swapped: bool) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be finite and nonzero, got {a}")));
        }
        if c2 == 0.0 || !c2.is_finite() {
            return Err(Error::InvalidParameter(format!("c2 must be finite and nonzero, got {c2}")));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be finite, got {b}")));
        }
        Ok(Self { m, a, b, c2, swapped })
    }
}

/// `Psi`, its inverse and the surface, with the range bound cached.
#[derive(Debug, Clone)]
pub struct HomotheticalSurface {
    spec: HomotheticalSpec,
    tol: Tolerances,
    weight_a: f64,
    /// `sup |c2 Psi|`.
    scaled_sup: f64,
}

impl HomotheticalSurface {
    pub fn new(spec: HomotheticalSpec, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        let weight_a = slope_weight(spec.a, spec.m);
        let mut srf = Self { spec, tol, weight_a, scaled_sup: 0.0 };
        let head = srf.scaled_profile_abs(1.0)?;
        let tail = integrate(|s| srf.tail_integrand(s), 0.0, 1.0, &tol.quadrature)?;
        srf.scaled_sup = head + tail;
        Ok(srf)
    }

    pub fn spec(&self) -> HomotheticalSpec {
        self.spec
    }

    /// `sup |Psi|`; the range of `Psi` is the open interval of this radius.
    pub fn range_sup(&self) -> f64 {
        self.scaled_sup / self.spec.c2.abs()
    }

    fn exponent(&self) -> f64 {
        -self.spec.m.k() / f64::from(self.spec.m.m())
    }

    fn integrand(&self, tau: f64) -> f64 {
        let a = self.spec.a;
        (self.weight_a + a * a * slope_power(tau, self.spec.m)).powf(self.exponent())
    }

    // tau = 1/sigma maps [1, H] onto [1/H, 1] and removes the tau^-2 decay.
    fn tail_integrand(&self, sigma: f64) -> f64 {
        let a = self.spec.a;
        (self.weight_a * slope_power(sigma, self.spec.m) + a * a).powf(self.exponent())
    }

    /// `int_0^|h|` of the integrand, i.e. `|c2 Psi(h)|`.
    fn scaled_profile_abs(&self, h: f64) -> Result<f64> {
        let x = h.abs();
        let q = &self.tol.quadrature;
        if x <= 1.0 {
            integrate(|t| self.integrand(t), 0.0, x, q)
        } else {
            let head = integrate(|t| self.integrand(t), 0.0, 1.0, q)?;
            let tail = integrate(|s| self.tail_integrand(s), 1.0 / x, 1.0, q)?;
            Ok(head + tail)
        }
    }

    /// `Psi(h)`; odd, monotone with the sign of `c2`, `Psi(0) = 0`.
    pub fn psi(&self, h: f64) -> Result<f64> {
        if h.is_nan() {
            return Err(Error::NonFinite { x: h });
        }
        Ok(self.scaled_profile_abs(h)?.copysign(h) / self.spec.c2)
    }

    /// `Psi^{-1}(v)`; `OutOfRange` unless `|v| < sup |Psi|`.
    pub fn psi_inverse(&self, v: f64) -> Result<f64> {
        let y = self.spec.c2 * v;
        if !(y.abs() < self.scaled_sup) {
            return Err(Error::OutOfRange { value: v, bound: self.range_sup() });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let f = |h: f64| Ok(self.scaled_profile_abs(h)?.copysign(h));
        let h = invert_monotone(f, y, (-1.0, 1.0), &self.tol.inversion)?;
        let residual = f(h)? - y;
        let polished = h - residual / self.integrand(h);
        Ok(if polished.is_finite() { polished } else { h })
    }

    /// `h = Psi^{-1}(v)` with `h' = c2 (P + a^2 h^(2m/(2m-1)))^((2m-1)/m)` and
    /// `h'' = 2 a^2 h^(1/(2m-1)) h'^2 / (P + a^2 h^(2m/(2m-1)))`.
    pub fn factor_jet(&self, v: f64) -> Result<CurveJet> {
        let h = self.psi_inverse(v)?;
        Ok(self.factor_jet_at(h))
    }

    /// [`Self::factor_jet`] at a known value `h` of the factor.
    pub fn factor_jet_at(&self, h: f64) -> CurveJet {
        let (m, a) = (self.spec.m, self.spec.a);
        let base = self.weight_a + a * a * slope_power(h, m);
        let d1 = self.spec.c2 * base.powf(m.k() / f64::from(m.m()));
        let d2 = 2.0 * a * a * odd_root(h, m.odd_order()) * d1 * d1 / base;
        CurveJet { value: h, d1, d2 }
    }

    fn linear(&self, x: f64) -> CurveJet {
        CurveJet { value: self.spec.a * x + self.spec.b, d1: self.spec.a, d2: 0.0 }
    }

    /// Splits `(u, v)` into (linear parameter, `Psi` parameter).
    fn roles(&self, u: f64, v: f64) -> (f64, f64) {
        if self.spec.swapped {
            (v, u)
        } else {
            (u, v)
        }
    }

    /// `(u, v, (a u + b) Psi^{-1}(v))`, or the mirrored surface when swapped.
    pub fn point(&self, u: f64, v: f64) -> Result<Vec3> {
        let (x, y) = self.roles(u, v);
        let h = self.psi_inverse(y)?;
        Ok(Vec3::new(u, v, self.linear(x).value * h))
    }

    /// The `(u, h)` form `(u, Psi(h), (a u + b) h)` of the unswapped surface.
    pub fn point_uh(&self, u: f64, h: f64) -> Result<Vec3> {
        Ok(Vec3::new(u, self.psi(h)?, self.linear(u).value * h))
    }

    /// Jets of the two factors at `(u, v)`, in the order (linear, `Psi^{-1}`).
    pub fn factor_jets(&self, u: f64, v: f64) -> Result<(CurveJet, CurveJet)> {
        let (x, y) = self.roles(u, v);
        Ok((self.linear(x), self.factor_jet(y)?))
    }

    /// Graph 2-jet of `z(u, v)`.
    pub fn jet(&self, u: f64, v: f64) -> Result<GraphJet2> {
        let (g, h) = self.factor_jets(u, v)?;
        let along_linear = g.d1 * h.value;
        let along_psi = g.value * h.d1;
        let mixed = g.d1 * h.d1;
        let (f_u, f_v, f_uu, f_vv) = if self.spec.swapped {
            (along_psi, along_linear, g.value * h.d2, 0.0)
        } else {
            (along_linear, along_psi, 0.0, g.value * h.d2)
        };
        Ok(GraphJet2 { f_u, f_v, f_uu, f_uv: mixed, f_vv })
    }
}

impl SurfacePatch for HomotheticalSurface {
    fn sample(&self, u: f64, v: f64) -> Result<PatchSample> {
        let (x, y) = self.roles(u, v);
        let g = self.linear(x);
        let h = self.factor_jet(y)?;
        let (fu, fv) = if self.spec.swapped {
            (g.value * h.d1, g.d1 * h.value)
        } else {
            (g.d1 * h.value, g.value * h.d1)
        };
        Ok(PatchSample {
            point: Vec3::new(u, v, g.value * h.value),
            du: Vec3::new(1.0, 0.0, fu),
            dv: Vec3::new(0.0, 1.0, fv),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{mean_curvature_graph, mean_curvature_homothetical, mean_curvature_numeric};
    use crate::numerics::simpson;
    use proptest::prelude::*;

    fn surface(k: u32, a: f64, b: f64, c2: f64, swapped: bool) -> HomotheticalSurface {
        let spec = HomotheticalSpec::new(NormOrder::new(k).unwrap(), a, b, c2, swapped).unwrap();
        HomotheticalSurface::new(spec, Tolerances::default()).unwrap()
    }

    #[test]
    fn invalid_specs() {
        let m = NormOrder::new(2).unwrap();
        assert!(HomotheticalSpec::new(m, 0.0, 0.0, 1.0, false).is_err());
        assert!(HomotheticalSpec::new(m, 1.0, 0.0, 0.0, false).is_err());
    }

    #[test]
    fn anchored_and_monotone() {
        let srf = surface(2, 1.0, 0.0, 1.0, false);
        assert_eq!(srf.psi(0.0).unwrap(), 0.0);
        let mut prev = srf.psi(-2.0).unwrap();
        for i in 1..=80 {
            let h = -2.0 + f64::from(i) * 0.05;
            let cur = srf.psi(h).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
        let neg = surface(2, 1.0, 0.0, -1.5, false);
        assert!(neg.psi(0.5).unwrap() < 0.0);
    }

    #[test]
    fn psi_at_one_against_fixed_grid() {
        let srf = surface(2, 1.0, 0.0, 1.0, false);
        // m = 2, a = 1: integrand (1 + tau^(4/3))^(-3/2).
        let grid = simpson(|t: f64| (1.0 + t.cbrt().powi(4)).powf(-1.5), 0.0, 1.0, 1_000_000);
        assert!((srf.psi(1.0).unwrap() - grid).abs() < 1e-10);
    }

    #[test]
    fn range_against_truncated_fixed_grid() {
        // Truncating at T leaves a tail below int_T^oo tau^-2 = 1/T for a = 1.
        let srf = surface(2, 1.0, 0.0, 1.0, false);
        let big_t = 1e3;
        let grid = simpson(|t: f64| (1.0 + t.cbrt().powi(4)).powf(-1.5), 0.0, big_t, 4_000_000);
        let sup = srf.range_sup();
        assert!(sup > grid && sup - grid < 1.0 / big_t);
        assert!((srf.psi(1e8).unwrap() - sup).abs() < 1e-7);
    }

    #[test]
    fn inverse_examples() {
        let srf = surface(2, 1.0, 0.0, 1.0, false);
        assert_eq!(srf.psi_inverse(0.0).unwrap(), 0.0);
        let v = srf.psi(0.8).unwrap();
        assert!((srf.psi_inverse(v).unwrap() - 0.8).abs() < 1e-10);
        let out = srf.psi_inverse(1.0001 * srf.range_sup());
        assert!(matches!(out, Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn sections_and_uh_form() {
        let srf = surface(3, 1.2, 0.4, 0.7, false);
        assert_eq!(srf.point(2.0, 0.0).unwrap(), Vec3::new(2.0, 0.0, 0.0));
        for (u, h) in [(0.3, 0.5), (-1.0, -1.7), (2.0, 4.0)] {
            let p = srf.point_uh(u, h).unwrap();
            let q = srf.point(u, p.x2).unwrap();
            assert!((p - q).max_abs() < 1e-10, "{p:?} vs {q:?}");
        }
    }

    #[test]
    fn factor_slope_matches_differences() {
        let srf = surface(2, 1.0, 0.0, 1.0, false);
        let w = 0.9 * srf.range_sup();
        let step = 1e-3;
        let h = |v: f64| srf.psi_inverse(v).unwrap();
        for i in 0..20 {
            let v = -w + 2.0 * w * (f64::from(i) + 0.5) / 20.0;
            let d = (8.0 * (h(v + step) - h(v - step)) - (h(v + 2.0 * step) - h(v - 2.0 * step))) / (12.0 * step);
            let exact = srf.factor_jet(v).unwrap().d1;
            assert!((d - exact).abs() < 1e-7 * (1.0 + exact.abs()), "v = {v}: {d} vs {exact}");
        }
    }

    #[test]
    fn residual_vanishes_away_from_zero_factors() {
        for k in [2, 3] {
            let srf = surface(k, 1.0, 0.0, 1.0, false);
            let m = NormOrder::new(k).unwrap();
            let w = 0.9 * srf.range_sup();
            for i in 0..30 {
                for j in 0..30 {
                    let u = -2.0 + 4.0 * f64::from(i) / 29.0;
                    let v = -w + 2.0 * w * f64::from(j) / 29.0;
                    let (g, h) = srf.factor_jets(u, v).unwrap();
                    if g.value.abs() <= 0.1 || h.value.abs() <= 0.1 {
                        continue;
                    }
                    let hh = mean_curvature_homothetical(g.value, g.d1, g.d2, h.value, h.d1, h.d2, m).unwrap();
                    assert!(hh.abs() < 1e-7, "m={k} ({u}, {v}): {hh}");
                }
            }
        }
    }

    #[test]
    fn graph_formula_and_oracle_agree_on_the_surface() {
        for swapped in [false, true] {
            let srf = surface(2, 0.8, 0.3, 1.4, swapped);
            let m = NormOrder::new(2).unwrap();
            let w = 0.8 * srf.range_sup();
            for (x, y) in [(0.7, 0.4 * w), (-1.5, -0.6 * w), (2.0, 0.9 * w)] {
                let (u, v) = if swapped { (y, x) } else { (x, y) };
                let j = srf.jet(u, v).unwrap();
                assert!(mean_curvature_graph(&j, m).unwrap().abs() < 1e-6);
                let hn = mean_curvature_numeric(&srf, u, v, m, 1e-4).unwrap();
                assert!(hn.abs() < 1e-6, "swapped={swapped} ({u}, {v}): {hn}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn psi_is_odd(h in -30.0f64..30.0) {
            let srf = surface(3, -0.6, 0.0, 2.0, false);
            prop_assert!((srf.psi(h).unwrap() + srf.psi(-h).unwrap()).abs() < 1e-14);
        }

        #[test]
        fn round_trip(h in -5.0f64..5.0, k in 2u32..4, c2 in prop::sample::select(vec![1.0, -0.5, 3.0])) {
            let srf = surface(k, 1.0, 0.0, c2, false);
            let v = srf.psi(h).unwrap();
            let back = srf.psi_inverse(v).unwrap();
            let cond = 1.0 / srf.integrand(h);
            prop_assert!((back - h).abs() < 1e-12 * cond * (1.0 + v.abs()) + 1e-12, "{back} vs {h}");
        }
    }
}
