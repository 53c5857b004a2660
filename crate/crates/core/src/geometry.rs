//! The 2m-norm on R^3, its gauge function and the Birkhoff-Gauss map.
//!
//! The unit sphere is the level set `Phi(x) = x1^(2m) + x2^(2m) + x3^(2m) = 1`.
//! A direction is Birkhoff orthogonal to a plane when the tangent plane of the
//! unit sphere at that direction is parallel to the plane; equivalently,
//! `grad Phi` at the direction is a positive multiple of the plane normal.
//!
//! Every fractional exponent with denominator `2m - 1` is evaluated with
//! real odd-root semantics (see [`odd_root`] and [`odd_pow`]).

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// The integer `m >= 1` selecting the 2m-norm. `m = 1` is Euclidean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormOrder(u32);

impl NormOrder {
    pub const EUCLIDEAN: NormOrder = NormOrder(1);

    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("norm order m must be >= 1".into()));
        }
        Ok(Self(m))
    }

    pub fn m(self) -> u32 {
        self.0
    }

    /// The even exponent `2m`.
    pub fn exponent(self) -> i32 {
        2 * self.0 as i32
    }

    /// The odd root order `2m - 1`.
    pub fn odd_order(self) -> u32 {
        2 * self.0 - 1
    }

    /// `2m - 1` as a float, the ubiquitous scale factor.
    pub fn k(self) -> f64 {
        f64::from(self.odd_order())
    }
}

impl std::fmt::Display for NormOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.x2 * o.x3 - self.x3 * o.x2,
            self.x3 * o.x1 - self.x1 * o.x3,
            self.x1 * o.x2 - self.x2 * o.x1,
        )
    }

    pub fn euclidean_norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self * v.x1, self * v.x2, self * v.x3)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x1, -self.x2, -self.x3)
    }
}

/// First and second partials of a height function `f(u, v)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GraphJet2 {
    pub f_u: f64,
    pub f_v: f64,
    pub f_uu: f64,
    pub f_uv: f64,
    pub f_vv: f64,
}

impl GraphJet2 {
    /// Tangent vectors `(1, 0, f_u)` and `(0, 1, f_v)` of the graph.
    pub fn tangents(&self) -> (Vec3, Vec3) {
        (Vec3::new(1.0, 0.0, self.f_u), Vec3::new(0.0, 1.0, self.f_v))
    }
}

/// `x1^(2m) + x2^(2m) + x3^(2m)`.
pub fn phi(x: Vec3, m: NormOrder) -> f64 {
    let e = m.exponent();
    x.x1.powi(e) + x.x2.powi(e) + x.x3.powi(e)
}

pub fn norm_2m(x: Vec3, m: NormOrder) -> f64 {
    // Scale first so large or tiny components do not over/underflow in the
    // even power.
    let s = x.max_abs();
    if s == 0.0 {
        return 0.0;
    }
    let y = (1.0 / s) * x;
    s * phi(y, m).powf(1.0 / f64::from(m.exponent() as u32))
}

/// `(2m x1^(2m-1), 2m x2^(2m-1), 2m x3^(2m-1))`.
pub fn grad_phi(x: Vec3, m: NormOrder) -> Vec3 {
    let e = m.exponent();
    let c = f64::from(e);
    Vec3::new(
        c * x.x1.powi(e - 1),
        c * x.x2.powi(e - 1),
        c * x.x3.powi(e - 1),
    )
}

/// Sign-preserving real `k`-th root for odd `k`.
pub fn odd_root(x: f64, k: u32) -> f64 {
    debug_assert!(k % 2 == 1, "odd_root needs an odd order, got {k}");
    match k {
        1 => x,
        3 => x.cbrt(),
        _ => {
            if x == 0.0 || !x.is_finite() {
                return x;
            }
            let a = x.abs();
            let mut r = a.powf(1.0 / f64::from(k));
            // one Newton step tightens powf's last-bit error
            let rk1 = r.powi(k as i32 - 1);
            r -= (rk1 * r - a) / (f64::from(k) * rk1);
            r.copysign(x)
        }
    }
}

/// `t^(num / (2m-1))` with odd-root semantics.
///
/// Even `num` yields a nonnegative value whatever the sign of `t`.
pub fn odd_pow(t: f64, num: i32, m: NormOrder) -> f64 {
    odd_root(t, m.odd_order()).powi(num)
}

/// `t^((2m-2)/(2m-1))`, the weight appearing throughout the curvature
/// formulas. Always nonnegative; identically 1 for `m = 1`.
pub fn slope_weight(t: f64, m: NormOrder) -> f64 {
    odd_pow(t, m.exponent() - 2, m)
}

/// `t^(2m/(2m-1))`, nonnegative.
pub fn slope_power(t: f64, m: NormOrder) -> f64 {
    odd_pow(t, m.exponent(), m)
}

/// Birkhoff-Gauss map of the graph `(u, v, f(u, v))`.
///
/// `grad Phi(eta)` is a positive multiple of `X_u x X_v = (-f_u, -f_v, 1)`,
/// so the third component is always positive.
pub fn birkhoff_gauss_graph(j: &GraphJet2, m: NormOrder) -> Vec3 {
    let k = m.odd_order();
    let ru = odd_root(j.f_u, k);
    let rv = odd_root(j.f_v, k);
    let e = m.exponent();
    let a = 1.0 + ru.powi(e) + rv.powi(e);
    let scale = a.powf(-1.0 / f64::from(e));
    Vec3::new(-ru * scale, -rv * scale, scale)
}

/// Birkhoff-Gauss map of a surface whose normal direction (any positive
/// multiple) is `(fp, gp, hp)`, e.g. the gradient of `f(x1) + g(x2) + h(x3)`.
pub fn birkhoff_gauss_implicit(fp: f64, gp: f64, hp: f64, m: NormOrder) -> Result<Vec3> {
    if fp == 0.0 && gp == 0.0 && hp == 0.0 {
        return Err(Error::DegenerateGradient);
    }
    // Dividing by the largest magnitude keeps the even powers in range and
    // does not change the direction.
    let s = fp.abs().max(gp.abs()).max(hp.abs());
    let k = m.odd_order();
    let r = Vec3::new(odd_root(fp / s, k), odd_root(gp / s, k), odd_root(hp / s, k));
    let a = phi(r, m);
    Ok(a.powf(-1.0 / f64::from(m.exponent())) * r)
}

/// Birkhoff-Gauss map oriented by the cross product of two tangent vectors.
pub fn birkhoff_gauss_tangents(xu: Vec3, xv: Vec3, m: NormOrder) -> Result<Vec3> {
    let n = xu.cross(xv);
    birkhoff_gauss_implicit(n.x1, n.x2, n.x3, m)
}
