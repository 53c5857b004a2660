//! Shared numerical kernels: finite-interval quadrature and inversion of
//! strictly increasing scalar functions.
//!
//! Both are pure functions of their arguments. Semi-infinite integrals are
//! never passed in directly; call sites either truncate with a documented
//! tail bound or map the tail onto a finite interval.

mod inversion;
mod quadrature;

pub use inversion::{invert_monotone, InversionConfig};
pub use quadrature::{integrate, integrate_accepting, integrate_with_error, QuadratureConfig};

/// Tolerances bundle carried by the surface generators.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tolerances {
    pub quadrature: QuadratureConfig,
    pub inversion: InversionConfig,
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        self.quadrature.validate()?;
        self.inversion.validate()
    }
}

/// Composite Simpson rule on `n` (even) panels.
///
/// Fixed-grid reference used to cross-check the adaptive integrator.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_endpoint_matches_substituted_fixed_grid() {
        // x = cosh(p^2) removes the (x^2-1)^(-3/4) singularity at x = 1:
        // dx (x^2-1)^(-3/4) = 2p sinh(p^2)^(-1/2) dp, smooth with value 2 at p = 0.
        let upper = 2f64.acosh().sqrt();
        let smooth = |p: f64| {
            if p == 0.0 {
                2.0
            } else {
                2.0 * p / (p * p).sinh().sqrt()
            }
        };
        let reference = simpson(smooth, 0.0, upper, 1_000_000);
        let integrand = |x: f64| ((x - 1.0) * (x + 1.0)).powf(-0.75);
        let (got, err) = match integrate_with_error(integrand, 1.0, 2.0, &QuadratureConfig::default()) {
            Ok(pair) => pair,
            Err(crate::Error::NonConvergence { estimate, abs_error, .. }) => (estimate, abs_error),
            Err(e) => panic!("{e}"),
        };
        assert!(got.is_finite());
        assert!(err < 1e-10, "error estimate {err}");
        assert!((got - reference).abs() < 1e-10, "{got} vs {reference}");
        let accepted = integrate_accepting(integrand, 1.0, 2.0, &QuadratureConfig::default(), 1e-8).unwrap();
        assert_eq!(accepted, got);
    }

    #[test]
    fn additivity() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| (3.0 * x).cos() * (-x * x).exp();
        let whole = integrate(f, -1.0, 2.5, &cfg).unwrap();
        let left = integrate(f, -1.0, 0.4, &cfg).unwrap();
        let right = integrate(f, 0.4, 2.5, &cfg).unwrap();
        assert!((whole - left - right).abs() < 3e-12);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let r = simpson(|x| x * x * x - x, 0.0, 2.0, 2);
        assert!((r - 2.0).abs() < 1e-14);
    }
}
