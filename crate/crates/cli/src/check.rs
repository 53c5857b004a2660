//! `check`: constraint residuals and positivity verdict of a coefficient set.

use std::fmt::Write as _;

use normsurf_core::separable::{build_xyz, check_constraints, positivity_domain, DEFAULT_POSITIVITY_MARGIN};
use normsurf_core::CoefficientSet;

use crate::gen::{default_window, Window};

/// Residuals at or above this fail the check.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub residuals: [f64; 6],
    pub residuals_ok: bool,
    pub domain_points: usize,
    pub empty_reason: Option<String>,
}

impl CheckOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.residuals_ok && self.empty_reason.is_none() {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.residuals.iter().enumerate() {
            let _ = writeln!(s, "residual[{}] = {r:.3e}", i + 1);
        }
        let verdict = if self.residuals_ok { "ok" } else { "FAILED" };
        let _ = writeln!(s, "constraints: {verdict} (tolerance {RESIDUAL_TOLERANCE:e})");
        match &self.empty_reason {
            None => {
                let _ = writeln!(s, "positivity: ok ({} grid points)", self.domain_points);
            }
            Some(reason) => {
                let _ = writeln!(s, "positivity: FAILED, positivity domain empty: {reason}");
            }
        }
        s
    }
}

/// Evaluates the constraints and samples the positivity domain.
pub fn check(c: &CoefficientSet, window: Option<Window>, grid: usize) -> Result<CheckOutcome, String> {
    let (u, v) = match window {
        None => default_window(c),
        Some(Window::Box { u, v }) => (u, v),
        Some(Window::Fraction(_)) => return Err("check needs an explicit window u0,u1,v0,v1".into()),
    };
    let residuals = check_constraints(c).0;
    let t = build_xyz(*c);
    let domain = positivity_domain(&t, u, v, grid, DEFAULT_POSITIVITY_MARGIN).map_err(|e| e.to_string())?;
    Ok(CheckOutcome {
        residuals,
        residuals_ok: residuals.iter().all(|r| r.abs() < RESIDUAL_TOLERANCE),
        domain_points: domain.count(),
        empty_reason: domain.empty_reason(&t),
    })
}
