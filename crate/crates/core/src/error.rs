use thiserror::Error;

/// Errors raised by the numerical kernels and surface generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence: estimate {estimate:e} with error {abs_error:e} after {iterations} steps")]
    NonConvergence {
        estimate: f64,
        abs_error: f64,
        iterations: usize,
    },

    #[error("integrand is not finite at x = {x:e}")]
    NonFinite { x: f64 },

    #[error("value {value:e} is outside the attainable range (bound {bound:e})")]
    OutOfRange { value: f64, bound: f64 },

    #[error("vanishing first derivative ({0})")]
    DegenerateSlope(&'static str),

    #[error("vanishing factor ({0})")]
    DegenerateFactor(&'static str),

    #[error("gradient direction is zero")]
    DegenerateGradient,

    #[error("tangent vectors are nearly parallel (condition number {condition:e})")]
    DegenerateTangent { condition: f64 },

    #[error("prescribed modulus squared is negative: {0}")]
    InfeasibleModuli(String),

    #[error("integration path leaves the positivity domain on the {axis} axis near {at:e}")]
    DomainViolation { axis: &'static str, at: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
