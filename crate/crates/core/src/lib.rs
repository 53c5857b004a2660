//! Minimal surfaces in R^3 equipped with the 2m-norm.
//!
//! Generators for the three classes of surfaces that admit explicit
//! constructions (translation graphs, homothetical graphs and separable
//! implicit surfaces) together with the curvature machinery that certifies
//! them: closed-form mean curvature and an independent finite-difference
//! oracle based on the Birkhoff-Gauss map.

// Negated comparisons also reject NaN; the Gauss-Kronrod tables keep their
// published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod curvature;
pub mod error;
pub mod geometry;
pub mod homothetical;
pub mod numerics;
pub mod separable;
pub mod translation;

pub use curvature::{CurvatureSample, PatchSample, SurfacePatch};
pub use error::{Error, Result};
pub use geometry::{GraphJet2, NormOrder, Vec3};
pub use numerics::{InversionConfig, QuadratureConfig, Tolerances};
pub use homothetical::{HomotheticalSpec, HomotheticalSurface};
pub use separable::{CoefficientSet, Family, SeparableSurface, Signs, XyzTriple};
pub use translation::{TranslationSpec, TranslationSurface};
