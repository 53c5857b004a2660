//! The invariant suite behind `normsurf verify`.
//!
//! Each check returns a one-line detail string. Checks tagged with a
//! criterion number run at the stated sizes in the full tier; the fast tier
//! shrinks grids and sample counts.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use normsurf_core::curvature::{
    mean_curvature_graph, mean_curvature_homothetical, mean_curvature_numeric, separable_minimality_residual,
    GraphPatch,
};
use normsurf_core::geometry::{birkhoff_gauss_graph, grad_phi, norm_2m, phi};
use normsurf_core::numerics::{integrate, integrate_accepting, invert_monotone, simpson};
use normsurf_core::separable::{
    b_residual, build_xyz, check_constraints, positivity_domain, preset, solve_trig_coeffs, third_derivative_ratio,
    Axis, DEFAULT_POSITIVITY_MARGIN,
};
use normsurf_core::translation::{slope_integral, slope_integral_m2_elementary};
use normsurf_core::{
    CoefficientSet, Family, GraphJet2, HomotheticalSpec, HomotheticalSurface, InversionConfig, NormOrder,
    QuadratureConfig, SeparableSurface, Signs, Tolerances, TranslationSpec, TranslationSurface, Vec3, XyzTriple,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::check;
use crate::gen::{self, linspace, GridOptions, SeparableParams, BOUNDARY_CLIP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tier: Tier,
    /// Scales every second derivative fed to the curvature formulas by
    /// `1 + 1e-3`; the suite must then fail.
    pub inject_fault: bool,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(tier: Tier) -> Self {
        Self { tier, inject_fault: false, seed: 0x5eed_2024 }
    }

    fn pick<T>(&self, fast: T, full: T) -> T {
        match self.tier {
            Tier::Fast => fast,
            Tier::Full => full,
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn second(&self, x: f64) -> f64 {
        if self.inject_fault {
            x * (1.0 + 1e-3)
        } else {
            x
        }
    }

    fn jet(&self, j: GraphJet2) -> GraphJet2 {
        GraphJet2 { f_uu: self.second(j.f_uu), f_uv: self.second(j.f_uv), f_vv: self.second(j.f_vv), ..j }
    }
}

type CheckFn = fn(&VerifyOptions) -> Result<String, String>;

/// A named check, optionally tied to an acceptance criterion.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub criterion: Option<u8>,
    run: CheckFn,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub criterion: Option<u8>,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn run(&self, opts: &VerifyOptions) -> CheckResult {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(|| (self.run)(opts))
            .unwrap_or_else(|_| Err("check panicked".to_string()));
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        CheckResult { name: self.name, criterion: self.criterion, passed, detail, elapsed }
    }
}

pub fn checks() -> Vec<Check> {
    let c = |name, criterion, run| Check { name, criterion, run };
    vec![
        c("geometry: norm homogeneity and Birkhoff orthogonality", None, geometry_invariants as CheckFn),
        c("numerics: quadrature reference integrals", None, quadrature_references),
        c("numerics: monotone inversion round trip", None, inversion_round_trip),
        c("translation: F_2 against its elementary form", Some(1), f2_closed_form),
        c("curvature: Euclidean reduction of the graph formula", Some(2), euclidean_graph_formula),
        c("translation: Scherk surface at m = 1", Some(2), scherk_surface),
        c("translation: minimality of generated grids", Some(3), translation_minimality),
        c("translation: separated ODE by finite differences", None, translation_separated_ode),
        c("translation: parametrization equivalence", Some(4), parametrization_equivalence),
        c("homothetical: minimality and Psi round trips", Some(5), homothetical_minimality),
        c("separable: worked examples and end-to-end rejection", Some(6), worked_examples),
        c("separable: B vanishes exactly when constraints hold", Some(7), functional_equation),
        c("separable: third-derivative ratios", Some(8), derivative_ratios),
        c("separable: reconstructed surfaces are minimal", Some(9), reconstruction),
        c("curvature: oracle converges at second order", Some(10), oracle_convergence),
        c("cli: generated meshes are deterministic", None, gen_determinism),
    ]
}

pub fn run_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    checks().iter().map(|c| c.run(opts)).collect()
}

/// Pass/fail table, one line per check.
pub fn render(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let tag = r.criterion.map(|c| format!("[{c:>2}]")).unwrap_or_else(|| "    ".into());
        out.push_str(&format!(
            "{} {tag} {:<55} {:>8.2}s  {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed.as_secs_f64(),
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {failed} failed\n", results.len()));
    out
}

fn order(m: u32) -> NormOrder {
    NormOrder::new(m).expect("valid norm order")
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn uniform_nonzero(rng: &mut ChaCha8Rng, bound: f64, gap: f64) -> f64 {
    loop {
        let x: f64 = rng.random_range(-bound..bound);
        if x.abs() >= gap {
            return x;
        }
    }
}

fn geometry_invariants(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(1);
    let mut worst_phi = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut worst_scale = 0.0f64;
    for _ in 0..o.pick(200, 2000) {
        let m = order(rng.random_range(1..=5));
        let x = Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lambda: f64 = rng.random_range(-4.0..4.0);
        let n = norm_2m(x, m);
        worst_scale = worst_scale.max((norm_2m(lambda * x, m) - lambda.abs() * n).abs() / (1.0 + n));
        let j = GraphJet2 { f_u: uniform_nonzero(&mut rng, 5.0, 1e-3), f_v: uniform_nonzero(&mut rng, 5.0, 1e-3), ..Default::default() };
        let eta = birkhoff_gauss_graph(&j, m);
        worst_phi = worst_phi.max((phi(eta, m) - 1.0).abs());
        let g = grad_phi(eta, m);
        let (xu, xv) = j.tangents();
        let rel = |t: Vec3| g.dot(t).abs() / (g.euclidean_norm() * t.euclidean_norm());
        worst_orth = worst_orth.max(rel(xu)).max(rel(xv));
    }
    ensure(
        worst_phi < 1e-12 && worst_orth < 1e-10 && worst_scale < 1e-12,
        format!("|phi(eta)-1| {worst_phi:.1e}, orthogonality {worst_orth:.1e}, homogeneity {worst_scale:.1e}"),
    )
}

fn quadrature_references(_: &VerifyOptions) -> Result<String, String> {
    let cfg = QuadratureConfig::default();
    let smooth = (integrate(f64::exp, 0.0, 1.0, &cfg).map_err(err)? - (1f64.exp() - 1.0)).abs();
    let sqrt = (integrate_accepting(|x| x.powf(-0.5), 0.0, 1.0, &cfg, 1e-8).map_err(err)? - 2.0).abs();
    let quartic = integrate(|x| 1.0 / (1.0 + x.powi(4)), 0.0, 1e6, &cfg).map_err(err)?;
    let quartic = (quartic - PI / (2.0 * 2f64.sqrt())).abs();
    // (x^2 - 1)^(-3/4) on [1, 2]; x = 1 + y^4 turns it into 4 (y^4 + 2)^(-3/4) on [0, 1].
    let singular = integrate_accepting(|x| (x * x - 1.0).powf(-0.75), 1.0, 2.0, &cfg, 1e-8).map_err(err)?;
    let reference = simpson(|y| 4.0 * (y.powi(4) + 2.0).powf(-0.75), 0.0, 1.0, 20_000);
    let singular = (singular - reference).abs();
    ensure(
        smooth < 1e-13 && sqrt < 1e-10 && quartic < 1e-10 && singular < 1e-10,
        format!("exp {smooth:.1e}, x^-1/2 {sqrt:.1e}, quartic {quartic:.1e}, singular {singular:.1e}"),
    )
}

fn inversion_round_trip(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(2);
    let cfg = InversionConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..o.pick(200, 1000) {
        let x: f64 = rng.random_range(-50.0..50.0);
        let f = |t: f64| Ok(t * t * t + t + t.atan());
        let y = f(x).map_err(|e: normsurf_core::Error| e.to_string())?;
        let back = invert_monotone(f, y, (-1.0, 1.0), &cfg).map_err(err)?;
        worst = worst.max((back - x).abs() / (1.0 + x.abs()));
    }
    ensure(worst < 1e-12, format!("max relative error {worst:.1e}"))
}

fn f2_closed_form(_: &VerifyOptions) -> Result<String, String> {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for s in -3..=3 {
        let s = f64::from(s);
        worst = worst.max((slope_integral(s, order(2), &cfg).map_err(err)? - slope_integral_m2_elementary(s)).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(worst < 1e-10 && elapsed < 1.0, format!("max |delta| {worst:.1e} in {elapsed:.3}s"))
}

fn euclidean_graph_formula(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let j = GraphJet2 {
            f_u: uniform_nonzero(&mut rng, 3.0, 1e-3),
            f_v: uniform_nonzero(&mut rng, 3.0, 1e-3),
            f_uu: rng.random_range(-3.0..3.0),
            f_uv: rng.random_range(-3.0..3.0),
            f_vv: rng.random_range(-3.0..3.0),
        };
        let h = mean_curvature_graph(&o.jet(j), NormOrder::EUCLIDEAN).map_err(err)?;
        let (p, q) = (j.f_u, j.f_v);
        let pre = -0.5 * (1.0 + p * p + q * q).powf(-1.5);
        let terms = [(1.0 + q * q) * j.f_uu, -2.0 * p * q * j.f_uv, (1.0 + p * p) * j.f_vv];
        let classical = pre * terms.iter().sum::<f64>();
        let scale = pre.abs() * terms.iter().map(|t| t.abs()).sum::<f64>();
        worst = worst.max((h - classical).abs() / scale);
    }
    ensure(worst < 1e-13, format!("1000 jets, max relative error {worst:.1e}"))
}

fn scherk_surface(o: &VerifyOptions) -> Result<String, String> {
    let n = o.pick(15, 30);
    let mut worst = 0.0f64;
    for a in [1.0, 0.7, -1.3] {
        let srf = TranslationSurface::new(TranslationSpec::new(NormOrder::EUCLIDEAN, a).map_err(err)?, Tolerances::default())
            .map_err(err)?;
        let w = 0.95 * FRAC_PI_2 / a.abs();
        for &u in &linspace(-w, w, n) {
            for &v in &linspace(-w, w, n) {
                let z = srf.point_uv(u, v).map_err(err)?.x3;
                let scherk = ((a * v).cos() / (a * u).cos()).ln() / a;
                worst = worst.max((z - scherk).abs());
            }
        }
    }
    ensure(worst < 1e-10, format!("max |z - scherk| {worst:.1e}"))
}

fn translation_minimality(o: &VerifyOptions) -> Result<String, String> {
    let start = Instant::now();
    let n = o.pick(20, 50);
    let spots: Vec<usize> = o.pick(vec![1, 10, 18], vec![2, 13, 25, 36, 47]);
    let mut worst = 0.0f64;
    let mut worst_numeric = 0.0f64;
    let mut spot_count = 0;
    for m in [2, 3] {
        for a in [1.0, -0.5] {
            let m = order(m);
            let srf = TranslationSurface::new(TranslationSpec::new(m, a).map_err(err)?, Tolerances::default())
                .map_err(err)?;
            let w = 0.9 * srf.half_width();
            let grid = linspace(-w, w, n);
            for &u in &grid {
                for &v in &grid {
                    let j = o.jet(srf.jet(u, v).map_err(err)?);
                    worst = worst.max(mean_curvature_graph(&j, m).map_err(err)?.abs());
                }
            }
            for &i in &spots {
                for &k in &spots {
                    let h = mean_curvature_numeric(&srf, grid[i], grid[k], m, 1e-4).map_err(err)?;
                    worst_numeric = worst_numeric.max(h.abs());
                    spot_count += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(
        worst < 1e-8 && worst_numeric < 1e-6 && elapsed < 30.0,
        format!(
            "{n}x{n} grids: max |H| {worst:.1e}; oracle at {spot_count} spots {worst_numeric:.1e}; {elapsed:.2}s"
        ),
    )
}

fn translation_separated_ode(o: &VerifyOptions) -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut worst_slope = 0.0f64;
    let h = 1e-3;
    for (m, a) in [(2, 1.0), (3, -0.5)] {
        let m = order(m);
        let srf = TranslationSurface::new(TranslationSpec::new(m, a).map_err(err)?, Tolerances::default())
            .map_err(err)?;
        let w = 0.8 * srf.half_width();
        // Near u = 0 both sides of the equation vanish to high order.
        for u in linspace(0.25 * w, w, o.pick(4, 11)).into_iter().flat_map(|u| [u, -u]) {
            let jet = |x: f64| srf.g_jet(x).map_err(err);
            let (m2, m1, p1, p2) = (jet(u - 2.0 * h)?, jet(u - h)?, jet(u + h)?, jet(u + 2.0 * h)?);
            let stencil = |f: fn(&normsurf_core::translation::CurveJet) -> f64| {
                (f(&m2) - 8.0 * f(&m1) + 8.0 * f(&p1) - f(&p2)) / (12.0 * h)
            };
            let g1 = jet(u)?.d1;
            // g' from differences of g, g'' from differences of g'.
            worst_slope = worst_slope.max((stencil(|j| j.value) - g1).abs() / g1.abs().max(1.0));
            let g2 = o.second(stencil(|j| j.d1));
            let lhs = g2 / (normsurf_core::geometry::slope_weight(g1, m) + g1 * g1);
            worst = worst.max((lhs - a).abs() / a.abs());
        }
    }
    ensure(
        worst < 1e-7 && worst_slope < 1e-7,
        format!("g' from g: {worst_slope:.1e}; max relative deviation of g''/(g'^w + g'^2) from a: {worst:.1e}"),
    )
}

fn parametrization_equivalence(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(4);
    let mut worst = 0.0f64;
    let per = o.pick(25, 100);
    for (m, a) in [(2, 1.0), (3, 1.0), (2, -0.5), (3, -0.5)] {
        let srf = TranslationSurface::new(TranslationSpec::new(order(m), a).map_err(err)?, Tolerances::default())
            .map_err(err)?;
        for _ in 0..per {
            let s: f64 = rng.random_range(-5.0..5.0);
            let t: f64 = rng.random_range(-5.0..5.0);
            let st = srf.point_st(s, t).map_err(err)?;
            let u = srf.slope_integral(s).map_err(err)? / a;
            let v = -srf.slope_integral(t).map_err(err)? / a;
            let uv = srf.point_uv(u, v).map_err(err)?;
            worst = worst.max((st - uv).max_abs());
        }
    }
    ensure(worst < 1e-10, format!("{} samples, max |delta| {worst:.1e}", 4 * per))
}

fn homothetical_minimality(o: &VerifyOptions) -> Result<String, String> {
    let n = o.pick(20, 50);
    let mut worst = 0.0f64;
    let mut worst_trip = 0.0f64;
    let mut evaluated = 0;
    for m in [2, 3] {
        let m = order(m);
        let spec = HomotheticalSpec::new(m, 1.0, 0.0, 1.0, false).map_err(err)?;
        let srf = HomotheticalSurface::new(spec, Tolerances::default()).map_err(err)?;
        let sup = srf.range_sup();
        for &v in &linspace(-0.9 * sup, 0.9 * sup, n) {
            let h = srf.factor_jet(v).map_err(err)?;
            for &u in &linspace(-2.0, 2.0, n) {
                let g = u;
                if g.abs() <= gen::FACTOR_CLIP || h.value.abs() <= gen::FACTOR_CLIP {
                    continue;
                }
                let r = mean_curvature_homothetical(g, 1.0, 0.0, h.value, h.d1, o.second(h.d2), m).map_err(err)?;
                worst = worst.max(r.abs());
                evaluated += 1;
            }
        }
        for &h in &linspace(-5.0, 5.0, o.pick(21, 81)) {
            worst_trip = worst_trip.max((srf.psi_inverse(srf.psi(h).map_err(err)?).map_err(err)? - h).abs());
        }
        for &v in &linspace(-0.99 * sup, 0.99 * sup, o.pick(21, 81)) {
            worst_trip = worst_trip.max((srf.psi(srf.psi_inverse(v).map_err(err)?).map_err(err)? - v).abs());
        }
    }
    ensure(
        worst < 1e-7 && worst_trip < 1e-10,
        format!("{evaluated} vertices, max residual {worst:.1e}; Psi round trips {worst_trip:.1e}"),
    )
}

fn worked_examples(_: &VerifyOptions) -> Result<String, String> {
    let mut worst = 0.0f64;
    for name in ["example6.1", "example6.2", "example6.3", "example6.4"] {
        worst = worst.max(check_constraints(&preset(name).unwrap().coeffs).max_abs());
    }
    let p = preset("example6.3").unwrap();
    let outcome = check(&p.coeffs, None, 200).map_err(err)?;
    let params = SeparableParams {
        coeffs: p.coeffs,
        preset: Some(p.name.into()),
        anchor: None,
        signs: Signs::default(),
        boundary_clip: BOUNDARY_CLIP,
    };
    let gen_code = match gen::separable(&params, &GridOptions::default()) {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    };
    let t = build_xyz(p.coeffs);
    let refuses = SeparableSurface::new(t, order(2), (0.0, 0.0), Signs::default(), QuadratureConfig::default()).is_err();
    ensure(
        worst < 1e-13 && outcome.exit_code() == 1 && outcome.residuals_ok && gen_code == 3 && refuses,
        format!(
            "max residual {worst:.1e}; example6.3: check exit {}, gen exit {gen_code}, {:?}",
            outcome.exit_code(),
            outcome.empty_reason.unwrap_or_default()
        ),
    )
}

fn max_b(t: &XyzTriple, n: usize) -> f64 {
    let grid = linspace(-2.0, 2.0, n);
    grid.iter()
        .flat_map(|&u| grid.iter().map(move |&v| (u, v)))
        .map(|(u, v)| b_residual(u, v, t).abs())
        .fold(0.0, f64::max)
}

fn random_trig_set(rng: &mut ChaCha8Rng) -> Result<CoefficientSet, String> {
    let p: [f64; 3] = [rng.random_range(-0.5..2.0), rng.random_range(0.2..2.0), rng.random_range(0.2..2.0)];
    let p = [p[0].max(-0.9 * p[1].min(p[2])), p[1], p[2]];
    let b = rng.random_range(0.5..2.0);
    let sol = solve_trig_coeffs(p, rng.random_range(-PI..PI), rng.random_range(-PI..PI), b).map_err(err)?;
    Ok(sol.coeffs)
}

fn functional_equation(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(5);
    let mut sets: Vec<CoefficientSet> = ["example6.1", "example6.2", "example6.3", "example6.4"]
        .iter()
        .map(|n| preset(n).unwrap().coeffs)
        .collect();
    let examples = sets.clone();
    for _ in 0..20 {
        sets.push(random_trig_set(&mut rng)?);
    }
    let worst = sets.iter().map(|c| max_b(&build_xyz(*c), 20)).fold(0.0, f64::max);

    let mut weakest = f64::INFINITY;
    let mut violated = 0;
    for c in &examples {
        for k in 0..9 {
            let mut bad = *c;
            let slot = match k / 3 {
                0 => &mut bad.p,
                1 => &mut bad.q,
                _ => &mut bad.r,
            };
            slot[k % 3] += 0.1;
            if check_constraints(&bad).max_abs() < 1e-2 {
                continue;
            }
            violated += 1;
            weakest = weakest.min(max_b(&build_xyz(bad), 20));
        }
    }
    ensure(
        worst < 1e-10 && weakest > 1e-3 && violated > 0,
        format!("{} valid sets max |B| {worst:.1e}; {violated} violated sets min max|B| {weakest:.1e}", sets.len()),
    )
}

fn derivative_ratios(o: &VerifyOptions) -> Result<String, String> {
    let mut rng = o.rng(6);
    let mut sets = vec![
        (preset("example6.2").unwrap().coeffs, (-3.0, 3.0)),
        (preset("example6.4").unwrap().coeffs, (-PI, PI)),
        (preset("example6.1").unwrap().coeffs, (-3.0, 3.0)),
    ];
    let mut exp_b = preset("example6.2").unwrap().coeffs;
    exp_b.family = Family::Exp { b: 0.7 };
    sets.push((exp_b, (-3.0, 3.0)));
    let trig = random_trig_set(&mut rng)?;
    let period = PI / trig.family.b().unwrap();
    sets.push((trig, (-period, period)));

    let wanted = o.pick(30, 100);
    let mut worst = 0.0f64;
    for (c, win) in &sets {
        let t = build_xyz(*c);
        let mut accepted = 0;
        let mut tries = 0;
        while accepted < wanted && tries < 200_000 {
            tries += 1;
            let (u, v) = (rng.random_range(win.0..win.1), rng.random_range(win.0..win.1));
            let args = [(Axis::U, u), (Axis::V, v), (Axis::W, -u - v)];
            let admissible = args.iter().all(|&(ax, x)| {
                let d = t.eval(ax, x);
                d.value > DEFAULT_POSITIVITY_MARGIN && d.d1.abs() >= 1e-6
            });
            if !admissible {
                continue;
            }
            accepted += 1;
            for (ax, x) in args {
                let r = third_derivative_ratio(&t, ax, x).map_err(err)?;
                worst = worst.max((o.second(r) - c.family.ratio()).abs());
            }
        }
        if accepted < wanted {
            return Err(format!("only {accepted} admissible points for a {} set", c.family.name()));
        }
    }
    ensure(worst < 1e-10, format!("{} sets x {wanted} points, max |ratio - b^2 sign| {worst:.1e}", sets.len()))
}

fn reconstruction(o: &VerifyOptions) -> Result<String, String> {
    let n = o.pick(14, 30);
    let mut worst = 0.0f64;
    let mut worst_slope = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut evaluated = 0;
    for name in ["example6.1", "example6.2", "example6.4"] {
        let p = preset(name).unwrap();
        let t = build_xyz(p.coeffs);
        let domain = positivity_domain(&t, p.u_window, p.v_window, n, DEFAULT_POSITIVITY_MARGIN).map_err(err)?;
        let max_of = |ax: Axis, xs: &[f64]| xs.iter().map(|&x| t.value(ax, x)).fold(f64::MIN, f64::max);
        let (xm, ym) = (max_of(Axis::U, &domain.u), max_of(Axis::V, &domain.v));
        let zm = domain.u.iter().flat_map(|&u| domain.v.iter().map(move |&v| -u - v)).map(|w| t.value(Axis::W, w)).fold(f64::MIN, f64::max);
        for m in [2, 3] {
            let m = order(m);
            for comp in domain.components() {
                let anchor = domain.anchor_of(&comp).unwrap();
                let srf = SeparableSurface::new(t, m, anchor, Signs::default(), QuadratureConfig::default())
                    .map_err(err)?;
                for (k, &(i, j)) in comp.iter().enumerate() {
                    let (u, v) = (domain.u[i], domain.v[j]);
                    let interior = t.value(Axis::U, u) >= BOUNDARY_CLIP * xm
                        && t.value(Axis::V, v) >= BOUNDARY_CLIP * ym
                        && t.value(Axis::W, -u - v) >= BOUNDARY_CLIP * zm;
                    if !interior {
                        continue;
                    }
                    let jet = srf.jet(u, v).map_err(err)?;
                    let r = separable_minimality_residual(
                        jet.fp,
                        o.second(jet.fpp),
                        jet.gp,
                        jet.gpp,
                        jet.hp,
                        jet.hpp,
                        m,
                    )
                    .map_err(err)?;
                    worst = worst.max(r.abs());
                    evaluated += 1;
                    if k % o.pick(40, 15) == 0 {
                        // The reconstructed coordinates must have the slopes the jet assumes.
                        let h = 1e-4;
                        let diff = (1.0 / (2.0 * h)) * (srf.point(u + h, v).map_err(err)? - srf.point(u - h, v).map_err(err)?);
                        let du = Vec3::new(srf.coordinate_slope(Axis::U, u), 0.0, -srf.coordinate_slope(Axis::W, -u - v));
                        worst_slope = worst_slope.max((diff - du).max_abs() / du.max_abs());
                        if o.tier == Tier::Full {
                            let hn = mean_curvature_numeric(&srf, u, v, m, 1e-4).map_err(err)?;
                            worst_oracle = worst_oracle.max(hn.abs());
                        }
                    }
                }
            }
        }
    }
    let b_anchor = b_residual(2.0, -3.0, &build_xyz(preset("example6.1").unwrap().coeffs));
    ensure(
        worst < 1e-8 && worst_slope < 1e-6 && worst_oracle < 1e-6 && b_anchor == 0.0,
        format!(
            "{evaluated} vertices, max residual {worst:.1e}; slopes {worst_slope:.1e}; oracle {worst_oracle:.1e}; B(2,-3) = {b_anchor}"
        ),
    )
}

fn oracle_convergence(o: &VerifyOptions) -> Result<String, String> {
    // f = 0.3 sin u cos 2v + 0.2 u v + 0.5 u + 0.7 v, with exact jets.
    let f = |u: f64, v: f64| {
        let (su, cu) = u.sin_cos();
        let (s2, c2) = (2.0 * v).sin_cos();
        let value = 0.3 * su * c2 + 0.2 * u * v + 0.5 * u + 0.7 * v;
        let jet = GraphJet2 {
            f_u: 0.3 * cu * c2 + 0.2 * v + 0.5,
            f_v: -0.6 * su * s2 + 0.2 * u + 0.7,
            f_uu: -0.3 * su * c2,
            f_uv: -0.6 * cu * s2 + 0.2,
            f_vv: -1.2 * su * c2,
        };
        (value, jet)
    };
    let patch = GraphPatch(|u: f64, v: f64| {
        let (value, j) = f(u, v);
        (value, j.f_u, j.f_v)
    });
    let points: Vec<(f64, f64)> = o.pick(vec![(0.3, 0.2), (-0.4, 0.5)], vec![(0.3, 0.2), (-0.4, 0.5), (0.8, -0.3), (1.1, 0.9)]);
    let steps = [1e-2, 5e-3, 2.5e-3];
    let mut orders = Vec::new();
    for m in [2, 3] {
        let m = order(m);
        for &(u, v) in &points {
            let exact = mean_curvature_graph(&o.jet(f(u, v).1), m).map_err(err)?;
            let errs: Vec<f64> = steps
                .iter()
                .map(|&h| mean_curvature_numeric(&patch, u, v, m, h).map(|hn| (hn - exact).abs()))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            orders.push((errs[0] / errs[1]).log2());
            orders.push((errs[1] / errs[2]).log2());
        }
    }
    let lo = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure((lo - 2.0).abs() <= 0.3 && (hi - 2.0).abs() <= 0.3, format!("observed orders in [{lo:.3}, {hi:.3}]"))
}

fn gen_determinism(o: &VerifyOptions) -> Result<String, String> {
    let opts = GridOptions { grid: o.pick(12, 24), oracle: true, ..GridOptions::default() };
    let render = || -> Result<(Vec<u8>, Vec<u8>, serde_json::Value), String> {
        let out = gen::translation(-0.5, &opts).map_err(err)?;
        let (mut obj, mut csv) = (Vec::new(), Vec::new());
        out.mesh.write_obj(&mut obj).map_err(err)?;
        out.mesh.write_csv(&mut csv).map_err(err)?;
        Ok((obj, csv, out.report.comparable()))
    };
    let first = render()?;
    let second = render()?;
    ensure(first == second, format!("{} OBJ bytes, {} CSV bytes", first.0.len(), first.1.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_tier_passes() {
        let results = run_suite(&VerifyOptions::new(Tier::Fast));
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| (r.name, r.detail.clone())).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn injected_fault_is_caught() {
        let opts = VerifyOptions { inject_fault: true, ..VerifyOptions::new(Tier::Fast) };
        let results = run_suite(&opts);
        let caught: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        assert!(caught.len() >= 5, "{caught:?}");
    }

    #[test]
    fn every_criterion_is_covered() {
        let mut seen: Vec<u8> = checks().iter().filter_map(|c| c.criterion).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen, (1..=10).collect::<Vec<_>>());
    }
}
