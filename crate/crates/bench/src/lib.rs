//! Fixtures shared by the criterion benchmarks in `benches/`.

use normsurf_core::separable::{build_xyz, preset};
use normsurf_core::{
    NormOrder, QuadratureConfig, SeparableSurface, Signs, Tolerances, TranslationSpec, TranslationSurface,
};

/// Translation surface with `a = 1`.
pub fn translation(m: u32) -> TranslationSurface {
    let m = NormOrder::new(m).expect("m >= 1");
    TranslationSurface::new(TranslationSpec::new(m, 1.0).expect("a != 0"), Tolerances::default())
        .expect("default tolerances are valid")
}

/// The trigonometric worked example anchored at the origin.
pub fn separable(m: u32) -> SeparableSurface {
    let t = build_xyz(preset("example6.4").expect("preset exists").coeffs);
    let m = NormOrder::new(m).expect("m >= 1");
    SeparableSurface::new(t, m, (0.0, 0.0), Signs::default(), QuadratureConfig::default())
        .expect("origin lies in the positivity domain")
}
