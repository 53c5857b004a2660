//! Grid generation for the three surface classes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use normsurf_core::curvature::{
    mean_curvature_graph, mean_curvature_homothetical, mean_curvature_numeric, mean_curvature_translation,
};
use normsurf_core::separable::{build_xyz, check_constraints, positivity_domain, Axis, DEFAULT_POSITIVITY_MARGIN};
use normsurf_core::{
    CoefficientSet, Family, HomotheticalSpec, HomotheticalSurface, NormOrder, SeparableSurface, Signs,
    SurfacePatch, Tolerances, TranslationSpec, TranslationSurface, Vec3,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::mesh::{SurfaceMesh, Vertex};
use crate::report::RunReport;

/// Default clip of the translation strip: `|a u| <= (1 - eps) sup F_m`.
pub const STRIP_CLIP: f64 = 1e-3;
/// Homothetical vertices with `|g|` or `|h|` at most this are not evaluated.
pub const FACTOR_CLIP: f64 = 0.1;
/// Separable vertices where a factor is below this fraction of its window
/// maximum are clipped from the mesh.
pub const BOUNDARY_CLIP: f64 = 1e-3;
/// Default window of the linear factor of a homothetical surface.
pub const LINEAR_WINDOW: (f64, f64) = (-2.0, 2.0);
/// Default fraction of the `Psi` range used by homothetical grids.
pub const PSI_FRACTION: f64 = 0.9;

/// Failure of a generator, mapped onto the documented exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    Invalid(String),
    EmptyDomain(String),
    Io(String),
}

impl GenError {
    pub fn exit_code(&self) -> u8 {
        match self {
            GenError::Invalid(_) => 2,
            GenError::EmptyDomain(_) => 3,
            GenError::Io(_) => 4,
        }
    }
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::Invalid(msg) => write!(f, "invalid parameters: {msg}"),
            GenError::EmptyDomain(reason) => write!(f, "positivity domain empty: {reason}"),
            GenError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for GenError {}

impl From<normsurf_core::Error> for GenError {
    fn from(e: normsurf_core::Error) -> Self {
        GenError::Invalid(e.to_string())
    }
}

/// Parameter window: a fraction of the natural range, or explicit bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Fraction(f64),
    Box { u: (f64, f64), v: (f64, f64) },
}

impl FromStr for Window {
    type Err = String;

    /// `"0.9"` or `"u0,u1,v0,v1"`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad window {s:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [f] if f > 0.0 && f < 1.0 => Ok(Window::Fraction(f)),
            [f] => Err(format!("window fraction must lie in (0, 1), got {f}")),
            [u0, u1, v0, v1] if u0 < u1 && v0 < v1 && parts.iter().all(|x| x.is_finite()) => {
                Ok(Window::Box { u: (u0, u1), v: (v0, v1) })
            }
            [_, _, _, _] => Err(format!("window {s:?} must satisfy u0 < u1 and v0 < v1")),
            _ => Err(format!("window {s:?} must be a fraction or u0,u1,v0,v1")),
        }
    }
}

/// Options shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub m: u32,
    pub grid: usize,
    pub window: Option<Window>,
    pub oracle: bool,
    pub step: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { m: 2, grid: 40, window: None, oracle: false, step: normsurf_core::curvature::DEFAULT_ORACLE_STEP }
    }
}

impl GridOptions {
    fn validate(&self) -> Result<NormOrder, GenError> {
        if self.grid < 2 {
            return Err(GenError::Invalid(format!("grid must be at least 2, got {}", self.grid)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(GenError::Invalid(format!("step must be positive, got {}", self.step)));
        }
        Ok(NormOrder::new(self.m)?)
    }

    fn base_params(&self) -> Map<String, Value> {
        let mut p = Map::new();
        p.insert("oracle".into(), json!(self.oracle));
        if self.oracle {
            p.insert("step".into(), json!(self.step));
        }
        p
    }
}

/// Mesh plus report of one run; `wall_ms` is left for the caller to fill.
#[derive(Debug, Clone)]
pub struct GenOutput {
    pub mesh: SurfaceMesh,
    pub report: RunReport,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn numeric<P: SurfacePatch + ?Sized>(on: bool, p: &P, u: f64, v: f64, m: NormOrder, step: f64) -> Option<f64> {
    if on {
        mean_curvature_numeric(p, u, v, m, step).ok()
    } else {
        None
    }
}

fn finish(
    family: &str,
    opts: &GridOptions,
    params: Map<String, Value>,
    grid: Vec<Option<Vertex>>,
    extra_skipped: usize,
    constraint_residuals: Option<[f64; 6]>,
) -> GenOutput {
    let mesh = SurfaceMesh::from_grid(opts.grid, opts.grid, grid);
    let report = RunReport {
        family: family.into(),
        m: opts.m,
        params,
        grid: [opts.grid, opts.grid],
        max_abs_h_analytic: mesh.max_abs_h_analytic(),
        max_abs_h_numeric: mesh.max_abs_h_numeric(),
        constraint_residuals,
        skipped_vertices: mesh.skipped() + extra_skipped,
        domain_nonempty: !mesh.vertices.is_empty(),
        wall_ms: None,
    };
    GenOutput { mesh, report }
}

/// Translation surface over `|a u|, |a v| <= (1 - eps) sup F_m` by default.
pub fn translation(a: f64, opts: &GridOptions) -> Result<GenOutput, GenError> {
    let m = opts.validate()?;
    let srf = TranslationSurface::new(TranslationSpec::new(m, a)?, Tolerances::default())?;
    let w = srf.half_width();
    let (u_win, v_win) = match opts.window.unwrap_or(Window::Fraction(1.0 - STRIP_CLIP)) {
        Window::Fraction(f) => ((-f * w, f * w), (-f * w, f * w)),
        Window::Box { u, v } => (u, v),
    };
    for (lo, hi) in [u_win, v_win] {
        if !(lo.abs() < w && hi.abs() < w) {
            return Err(GenError::Invalid(format!(
                "window [{lo}, {hi}] leaves the strip of half-width {w}"
            )));
        }
    }
    let us = linspace(u_win.0, u_win.1, opts.grid);
    let vs = linspace(v_win.0, v_win.1, opts.grid);
    let g_jets = us.par_iter().map(|&u| srf.g_jet(u)).collect::<Result<Vec<_>, _>>()?;
    let h_jets = vs.par_iter().map(|&v| srf.h_jet(v)).collect::<Result<Vec<_>, _>>()?;
    let grid: Vec<Option<Vertex>> = (0..opts.grid * opts.grid)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % opts.grid, k / opts.grid);
            let (g, h) = (g_jets[i], h_jets[j]);
            let (u, v) = (us[i], vs[j]);
            Some(Vertex {
                u,
                v,
                point: Vec3::new(u, v, g.value + h.value),
                h_analytic: mean_curvature_translation(g.d1, g.d2, h.d1, h.d2, m).ok(),
                h_numeric: numeric(opts.oracle, &srf, u, v, m, opts.step),
            })
        })
        .collect();
    let mut params = opts.base_params();
    params.insert("a".into(), json!(a));
    params.insert("window".into(), json!([u_win.0, u_win.1, v_win.0, v_win.1]));
    Ok(finish("translation", opts, params, grid, 0, None))
}

/// Parameters of a homothetical run beyond the grid options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotheticalParams {
    pub a: f64,
    pub b: f64,
    pub c2: f64,
    pub swapped: bool,
    pub factor_clip: f64,
}

/// Homothetical surface; vertices near `g = 0` or `h = 0` are emitted but
/// not evaluated.
pub fn homothetical(hp: &HomotheticalParams, opts: &GridOptions) -> Result<GenOutput, GenError> {
    let m = opts.validate()?;
    let spec = HomotheticalSpec::new(m, hp.a, hp.b, hp.c2, hp.swapped)?;
    let srf = HomotheticalSurface::new(spec, Tolerances::default())?;
    let sup = srf.range_sup();
    let (lin, psi) = match opts.window {
        None => (LINEAR_WINDOW, (-PSI_FRACTION * sup, PSI_FRACTION * sup)),
        Some(Window::Fraction(f)) => (LINEAR_WINDOW, (-f * sup, f * sup)),
        Some(Window::Box { u, v }) => {
            if hp.swapped {
                (v, u)
            } else {
                (u, v)
            }
        }
    };
    if !(psi.0.abs() < sup && psi.1.abs() < sup) {
        return Err(GenError::Invalid(format!("window [{}, {}] leaves the range of Psi (radius {sup})", psi.0, psi.1)));
    }
    let (u_win, v_win) = if hp.swapped { (psi, lin) } else { (lin, psi) };
    let us = linspace(u_win.0, u_win.1, opts.grid);
    let vs = linspace(v_win.0, v_win.1, opts.grid);
    let grid = (0..opts.grid * opts.grid)
        .into_par_iter()
        .map(|k| {
            let (u, v) = (us[k % opts.grid], vs[k / opts.grid]);
            let (lin_jet, psi_jet) = srf.factor_jets(u, v)?;
            let (gu, hv) = if hp.swapped { (psi_jet, lin_jet) } else { (lin_jet, psi_jet) };
            let clipped = gu.value.abs() <= hp.factor_clip || hv.value.abs() <= hp.factor_clip;
            let h_analytic = if clipped {
                None
            } else {
                mean_curvature_homothetical(gu.value, gu.d1, gu.d2, hv.value, hv.d1, hv.d2, m).ok()
            };
            Ok(Some(Vertex {
                u,
                v,
                point: Vec3::new(u, v, gu.value * hv.value),
                h_analytic,
                h_numeric: numeric(opts.oracle && !clipped, &srf, u, v, m, opts.step),
            }))
        })
        .collect::<Result<Vec<_>, normsurf_core::Error>>()?;
    let mut params = opts.base_params();
    params.insert("a".into(), json!(hp.a));
    params.insert("b".into(), json!(hp.b));
    params.insert("c2".into(), json!(hp.c2));
    params.insert("swapped".into(), json!(hp.swapped));
    params.insert("factor_clip".into(), json!(hp.factor_clip));
    params.insert("window".into(), json!([u_win.0, u_win.1, v_win.0, v_win.1]));
    Ok(finish("homothetical", opts, params, grid, 0, None))
}

/// Default `(u, v)` window for a coefficient set: one period for trig sets.
pub fn default_window(c: &CoefficientSet) -> ((f64, f64), (f64, f64)) {
    match c.family {
        Family::Trig { b } => ((-PI / b, PI / b), (-PI / b, PI / b)),
        _ => ((-3.0, 3.0), (-3.0, 3.0)),
    }
}

/// Parameters of a separable run beyond the grid options.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableParams {
    pub coeffs: CoefficientSet,
    /// Preset name echoed into the report.
    pub preset: Option<String>,
    /// One anchor for the whole grid; by default each connected component
    /// of the positivity domain gets its own.
    pub anchor: Option<(f64, f64)>,
    pub signs: Signs,
    pub boundary_clip: f64,
}

/// Separable surface reconstructed over the sampled positivity domain.
pub fn separable(sp: &SeparableParams, opts: &GridOptions) -> Result<GenOutput, GenError> {
    let m = opts.validate()?;
    let (u_win, v_win) = match opts.window {
        None => default_window(&sp.coeffs),
        Some(Window::Box { u, v }) => (u, v),
        Some(Window::Fraction(_)) => {
            return Err(GenError::Invalid("separable runs need an explicit window u0,u1,v0,v1".into()))
        }
    };
    let t = build_xyz(sp.coeffs);
    let residuals = check_constraints(&sp.coeffs).0;
    let domain = positivity_domain(&t, u_win, v_win, opts.grid, DEFAULT_POSITIVITY_MARGIN)?;
    if let Some(reason) = domain.empty_reason(&t) {
        return Err(GenError::EmptyDomain(reason));
    }
    let quad = Tolerances::default().quadrature;
    let (us, vs) = (&domain.u, &domain.v);
    let x_max = us.iter().map(|&u| t.value(Axis::U, u)).fold(f64::MIN, f64::max);
    let y_max = vs.iter().map(|&v| t.value(Axis::V, v)).fold(f64::MIN, f64::max);
    let z_max = vs
        .iter()
        .flat_map(|&v| us.iter().map(move |&u| t.value(Axis::W, -u - v)))
        .fold(f64::MIN, f64::max);
    let kept = |i: usize, j: usize| {
        let (u, v) = (us[i], vs[j]);
        domain.contains(i, j)
            && t.value(Axis::U, u) >= sp.boundary_clip * x_max
            && t.value(Axis::V, v) >= sp.boundary_clip * y_max
            && t.value(Axis::W, -u - v) >= sp.boundary_clip * z_max
    };

    let n = opts.grid;
    let mut owner = vec![usize::MAX; n * n];
    let mut anchors = Vec::new();
    match sp.anchor {
        Some(a) => {
            anchors.push(a);
            owner.iter_mut().for_each(|o| *o = 0);
        }
        None => {
            for comp in domain.components() {
                let a = domain.anchor_of(&comp).expect("components are non-empty");
                for &(i, j) in &comp {
                    owner[j * n + i] = anchors.len();
                }
                anchors.push(a);
            }
        }
    }
    let surfaces = anchors
        .iter()
        .map(|&a| SeparableSurface::new(t, m, a, sp.signs, quad))
        .collect::<Result<Vec<_>, _>>()?;

    let cells: Vec<(Option<Vertex>, bool)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            if !kept(i, j) {
                return (None, false);
            }
            let srf = &surfaces[owner[k]];
            let (u, v) = (us[i], vs[j]);
            let Ok(point) = srf.point(u, v) else {
                return (None, true);
            };
            let h_analytic = srf.jet(u, v).ok().and_then(|jet| mean_curvature_graph(&jet.graph_jet(), m).ok());
            let vertex = Vertex { u, v, point, h_analytic, h_numeric: numeric(opts.oracle, srf, u, v, m, opts.step) };
            (Some(vertex), false)
        })
        .collect();
    let failed = cells.iter().filter(|c| c.1).count();
    let grid = cells.into_iter().map(|c| c.0).collect();

    let mut params = opts.base_params();
    let c = &sp.coeffs;
    params.insert("case".into(), json!(c.family.name()));
    if let Some(b) = c.family.b() {
        params.insert("b".into(), json!(b));
    }
    params.insert("p".into(), json!(c.p));
    params.insert("q".into(), json!(c.q));
    params.insert("r".into(), json!(c.r));
    if let Some(name) = &sp.preset {
        params.insert("preset".into(), json!(name));
    }
    params.insert("window".into(), json!([u_win.0, u_win.1, v_win.0, v_win.1]));
    params.insert("anchors".into(), json!(anchors.iter().map(|a| [a.0, a.1]).collect::<Vec<_>>()));
    params.insert("signs".into(), json!(sp.signs.to_string()));
    params.insert("boundary_clip".into(), json!(sp.boundary_clip));
    params.insert("domain_points".into(), json!(domain.count()));
    Ok(finish("separable", opts, params, grid, failed, Some(residuals)))
}
