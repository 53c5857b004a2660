use crate::error::{Error, Result};

/// Stopping rule and bracket search for [`invert_monotone`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub bracket_growth: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iterations: 200,
            bracket_growth: 2.0,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inversion tolerance must be positive, got {}",
                self.tol
            )));
        }
        if !(self.bracket_growth > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "bracket growth must exceed 1, got {}",
                self.bracket_growth
            )));
        }
        Ok(())
    }
}

// Bracket expansion gives up after this many steps, or once the bracket
// stops being finite.
const MAX_EXPANSIONS: usize = 2000;

/// Solves `f(x) = y` for a strictly increasing `f`.
///
/// The seed bracket `[lo, hi]` is widened geometrically until it straddles
/// `y`; failure to straddle means `y` is outside the range of `f` and is
/// reported as [`Error::OutOfRange`]. Inside the bracket, secant steps are
/// interleaved with bisection whenever the bracket fails to halve.
///
/// Returns `x` with `|f(x) - y| <= tol * (1 + |y|)`, or the midpoint of a
/// bracket that has collapsed to adjacent floating-point numbers.
pub fn invert_monotone<F>(f: F, y: f64, seed_bracket: (f64, f64), cfg: &InversionConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("target {y} is not finite")));
    }
    let (mut lo, mut hi) = seed_bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "seed bracket [{lo}, {hi}] is empty"
        )));
    }
    let target_tol = cfg.tol * (1.0 + y.abs());

    let mut g_lo = f(lo)? - y;
    let mut g_hi = f(hi)? - y;
    let mut width = hi - lo;
    let mut expansions = 0;
    while g_lo > 0.0 || g_hi < 0.0 {
        expansions += 1;
        width *= cfg.bracket_growth;
        if g_lo > 0.0 {
            hi = lo;
            g_hi = g_lo;
            lo -= width;
            if !lo.is_finite() || expansions > MAX_EXPANSIONS {
                return Err(Error::OutOfRange { value: y, bound: f(hi)? });
            }
            g_lo = f(lo)? - y;
        } else {
            lo = hi;
            g_lo = g_hi;
            hi += width;
            if !hi.is_finite() || expansions > MAX_EXPANSIONS {
                return Err(Error::OutOfRange { value: y, bound: f(lo)? });
            }
            g_hi = f(hi)? - y;
        }
    }
    if g_lo.abs() <= target_tol && g_lo.abs() <= g_hi.abs() {
        return Ok(lo);
    }
    if g_hi.abs() <= target_tol {
        return Ok(hi);
    }

    let mut last_width = hi - lo;
    let mut bisect_next = false;
    for _ in 0..cfg.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let x = if bisect_next || g_hi == g_lo {
            mid
        } else {
            let s = lo - g_lo * (hi - lo) / (g_hi - g_lo);
            if s > lo && s < hi {
                s
            } else {
                mid
            }
        };
        let g = f(x)? - y;
        if g.abs() <= target_tol {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
            g_lo = g;
        } else {
            hi = x;
            g_hi = g;
        }
        let w = hi - lo;
        bisect_next = w > 0.5 * last_width;
        last_width = w;
    }
    Err(Error::NonConvergence {
        estimate: 0.5 * (lo + hi),
        abs_error: hi - lo,
        iterations: cfg.max_iterations,
    })
}
