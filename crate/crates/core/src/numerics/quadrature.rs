//! Globally adaptive Gauss-Kronrod quadrature with epsilon-algorithm
//! extrapolation, after QUADPACK's `qags`.
//!
//! The 21-point Kronrod rule never samples the interval endpoints, so
//! integrands with integrable power-type singularities at either end can be
//! passed in as they are. The extrapolation step recovers the mass of the
//! region next to the singular point that cannot be resolved by bisection in
//! double precision.

use crate::error::{Error, Result};

/// Error control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208649006590,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy)]
struct RuleEstimate {
    result: f64,
    abs_error: f64,
    result_abs: f64,
    result_asc: f64,
}

fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * result_abs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<RuleEstimate> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(f, center)?;

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();

    for (j, wg) in WG.iter().enumerate() {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[k] = f1;
        fv2[k] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[k] = f1;
        fv2[k] = f2;
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let result_abs = res_abs * half.abs();
    let result_asc = res_asc * half.abs();
    Ok(RuleEstimate {
        result: res_kronrod * half,
        abs_error: rescale_error(err, result_abs, result_asc),
        result_abs,
        result_asc,
    })
}

/// Wynn epsilon table used to extrapolate the sequence of partial sums.
struct EpsilonTable {
    entries: [f64; 52],
    n: usize,
    last3: [f64; 3],
    nres: usize,
}

impl EpsilonTable {
    fn new() -> Self {
        Self {
            entries: [0.0; 52],
            n: 0,
            last3: [0.0; 3],
            nres: 0,
        }
    }

    fn push(&mut self, y: f64) {
        if self.n < 50 {
            self.entries[self.n] = y;
            self.n += 1;
        }
    }

    /// Returns the extrapolated limit and an error estimate.
    fn extrapolate(&mut self) -> (f64, f64) {
        let eps = f64::EPSILON;
        let tab = &mut self.entries;
        let n = self.n - 1;
        let current = tab[n];
        let mut result = current;
        let mut abserr = f64::MAX;

        if n < 2 {
            return (current, f64::MAX);
        }

        tab[n + 2] = tab[n];
        tab[n] = f64::MAX;
        let newelm = n / 2;
        let mut n_final = n;

        for i in 0..newelm {
            let mut res = tab[n - 2 * i + 2];
            let e0 = tab[n - 2 * i - 2];
            let e1 = tab[n - 2 * i - 1];
            let e2 = res;
            let e1abs = e1.abs();
            let delta2 = e2 - e1;
            let err2 = delta2.abs();
            let tol2 = e2.abs().max(e1abs) * eps;
            let delta3 = e1 - e0;
            let err3 = delta3.abs();
            let tol3 = e1abs.max(e0.abs()) * eps;

            if err2 < tol2 && err3 < tol3 {
                // e0, e1, e2 agree to machine precision
                let absolute = err2 + err3;
                let relative = 5.0 * eps * res.abs();
                return (res, absolute.max(relative));
            }

            let e3 = tab[n - 2 * i];
            tab[n - 2 * i] = e1;
            let delta1 = e1 - e3;
            let err1 = delta1.abs();
            let tol1 = e1abs.max(e3.abs()) * eps;

            if err1 < tol1 || err2 < tol2 || err3 < tol3 {
                n_final = 2 * i;
                break;
            }

            let ss = (1.0 / delta1 + 1.0 / delta2) - 1.0 / delta3;
            if (ss * e1).abs() <= 1e-4 {
                n_final = 2 * i;
                break;
            }

            res = e1 + 1.0 / ss;
            tab[n - 2 * i] = res;
            let error = err2 + (res - e2).abs() + err3;
            if error <= abserr {
                abserr = error;
                result = res;
            }
        }

        const LIMEXP: usize = 49;
        if n_final == LIMEXP {
            n_final = 2 * (LIMEXP / 2);
        }

        if n % 2 == 1 {
            for i in 0..=newelm {
                tab[1 + 2 * i] = tab[2 * i + 3];
            }
        } else {
            for i in 0..=newelm {
                tab[2 * i] = tab[2 * i + 2];
            }
        }
        if n != n_final {
            for i in 0..=n_final {
                tab[i] = tab[n - n_final + i];
            }
        }
        self.n = n_final + 1;

        if self.nres < 3 {
            self.last3[self.nres] = result;
            abserr = f64::MAX;
        } else {
            abserr = (result - self.last3[2]).abs()
                + (result - self.last3[1]).abs()
                + (result - self.last3[0]).abs();
            self.last3 = [self.last3[1], self.last3[2], result];
        }
        self.nres += 1;
        (result, abserr.max(5.0 * eps * result.abs()))
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    /// Integral of `|f|` over the segment.
    abs: f64,
    level: usize,
}

/// Subintervals ordered by decreasing error estimate.
struct Workspace {
    segments: Vec<Segment>,
    order: Vec<usize>,
    nrmax: usize,
    current: usize,
    max_level: usize,
    limit: usize,
}

impl Workspace {
    fn from_segments(segments: Vec<Segment>, limit: usize) -> Self {
        let mut ws = Self {
            segments,
            order: Vec::new(),
            nrmax: 0,
            current: 0,
            max_level: 0,
            limit,
        };
        ws.sort();
        ws
    }

    fn sort(&mut self) {
        let segs = &self.segments;
        self.order = (0..segs.len()).collect();
        self.order
            .sort_by(|&i, &j| segs[j].error.total_cmp(&segs[i].error).then(i.cmp(&j)));
        if self.nrmax >= self.order.len() {
            self.nrmax = self.order.len() - 1;
        }
        self.current = self.order[self.nrmax];
    }

    fn split(&mut self, left: Segment, right: Segment) {
        let i = self.current;
        let level = self.segments[i].level + 1;
        let (keep, push) = if right.error > left.error {
            (right, left)
        } else {
            (left, right)
        };
        self.segments[i] = Segment { level, ..keep };
        self.segments.push(Segment { level, ..push });
        self.max_level = self.max_level.max(level);
        self.sort();
    }

    fn reset_nrmax(&mut self) {
        self.nrmax = 0;
        self.current = self.order[0];
    }

    fn large_interval(&self) -> bool {
        self.segments[self.current].level < self.max_level
    }

    fn increase_nrmax(&mut self) -> bool {
        let last = self.segments.len() - 1;
        let limit = self.limit;
        let jupbnd = if last > 1 + limit / 2 { limit + 1 - last } else { last };
        let mut k = self.nrmax;
        while k <= jupbnd && self.nrmax < self.order.len() {
            self.current = self.order[self.nrmax];
            if self.segments[self.current].level < self.max_level {
                return true;
            }
            self.nrmax += 1;
            k += 1;
        }
        if self.nrmax >= self.order.len() {
            self.nrmax = self.order.len() - 1;
        }
        false
    }

    fn sum(&self) -> f64 {
        self.segments.iter().map(|s| s.result).sum()
    }
}

// Levels of geometric grading applied at each end of the interval.
const GRADING_LEVELS: i32 = 12;

fn graded_breakpoints(a: f64, b: f64) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a];
    for j in (1..=GRADING_LEVELS).rev() {
        pts.push(a + len * 0.5f64.powi(j));
    }
    for j in 2..=GRADING_LEVELS {
        pts.push(b - len * 0.5f64.powi(j));
    }
    pts.push(b);
    pts
}

fn subinterval_too_small(a1: f64, a2: f64, b2: f64) -> bool {
    let tmp = (1.0 + 100.0 * f64::EPSILON) * (a2.abs() + 1000.0 * f64::MIN_POSITIVE);
    a1.abs() <= tmp && b2.abs() <= tmp
}

/// Integrates `f` over the finite interval `[lower, upper]`.
///
/// Converges when the estimated absolute error is at most
/// `max(abs_tol, rel_tol * |result|)`. `f` is never evaluated at the
/// endpoints, so integrable endpoint singularities need no special casing.
/// Reversed bounds give the negated integral.
pub fn integrate<F>(f: F, lower: f64, upper: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_with_error(f, lower, upper, cfg).map(|(r, _)| r)
}

/// Like [`integrate`], but accepts an unconverged estimate whose error
/// estimate is at most `accept * max(1, |estimate|)`.
///
/// Endpoint singularities with fractional exponents often stall the
/// extrapolation a little above a `1e-12` request; this keeps such results
/// usable with an explicit, looser bound.
pub fn integrate_accepting<F>(
    f: F,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
    accept: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    match integrate_with_error(f, lower, upper, cfg) {
        Ok((r, _)) => Ok(r),
        Err(Error::NonConvergence { estimate, abs_error, .. })
            if estimate.is_finite() && abs_error <= accept * estimate.abs().max(1.0) =>
        {
            Ok(estimate)
        }
        Err(e) => Err(e),
    }
}

/// Like [`integrate`], also returning the final error estimate.
pub fn integrate_with_error<F>(
    f: F,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite, got [{lower}, {upper}]"
        )));
    }
    if lower == upper {
        return Ok((0.0, 0.0));
    }
    let limit = cfg.max_subdivisions;
    let tolerance_for = |area: f64| cfg.abs_tol.max(cfg.rel_tol * area.abs());

    let first = kronrod21(&f, lower, upper)?;
    let tolerance = tolerance_for(first.result);
    let round_off_first = 100.0 * f64::EPSILON * first.result_abs;

    if first.abs_error <= round_off_first && first.abs_error > tolerance {
        return Err(Error::NonConvergence {
            estimate: first.result,
            abs_error: first.abs_error,
            iterations: 1,
        });
    }
    if (first.abs_error <= tolerance && first.abs_error != first.result_asc)
        || first.abs_error == 0.0
    {
        return Ok((first.result, first.abs_error));
    }
    if limit == 1 {
        return Err(Error::NonConvergence {
            estimate: first.result,
            abs_error: first.abs_error,
            iterations: 1,
        });
    }

    // The single-panel estimate is not trusted. Bisection from one panel is
    // blind to mass that no node of the first rule sees (a truncated tail
    // whose integrand lives near one end), while a partition graded towards
    // both ends sees it but slows the extrapolation at endpoint
    // singularities. Run both and reconcile.
    let plain = run_qags(&f, &[lower, upper], cfg)?;
    let graded = run_qags(&f, &graded_breakpoints(lower, upper), cfg)?;
    reconcile(plain, graded, tolerance_for)
}

/// Outcome of one adaptive run.
#[derive(Debug, Clone, Copy)]
struct Run {
    result: f64,
    abs_error: f64,
    converged: bool,
    /// Estimated integral of `|f|` over the final partition.
    mass: f64,
    iterations: usize,
}

impl Run {
    fn into_result(self) -> Result<(f64, f64)> {
        if self.converged {
            Ok((self.result, self.abs_error))
        } else {
            Err(Error::NonConvergence {
                estimate: self.result,
                abs_error: self.abs_error,
                iterations: self.iterations,
            })
        }
    }
}

fn reconcile(plain: Run, graded: Run, tolerance_for: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let gap = (plain.result - graded.result).abs();
    let slack = plain.abs_error + graded.abs_error + tolerance_for(plain.result) + tolerance_for(graded.result);
    if gap <= slack {
        let best = match (plain.converged, graded.converged) {
            (true, false) => plain,
            (false, true) => graded,
            _ if plain.abs_error <= graded.abs_error => plain,
            _ => graded,
        };
        return best.into_result();
    }
    // The runs contradict each other. A run that has seen clearly more of
    // |f| wins; otherwise the smaller error estimate does.
    let seen_more = |a: &Run, b: &Run| a.mass > 1.01 * b.mass;
    if seen_more(&plain, &graded) {
        plain.into_result()
    } else if seen_more(&graded, &plain) || graded.abs_error < plain.abs_error {
        graded.into_result()
    } else {
        plain.into_result()
    }
}

/// QAGS main loop started from the partition `breaks`.
fn run_qags<F>(f: &F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Run>
where
    F: Fn(f64) -> f64,
{
    let limit = cfg.max_subdivisions;
    let tolerance_for = |area: f64| cfg.abs_tol.max(cfg.rel_tol * area.abs());
    let mut segments = Vec::with_capacity(limit.max(breaks.len()));
    let mut resabs0 = 0.0;
    for w in breaks.windows(2) {
        let est = kronrod21(&f, w[0], w[1])?;
        resabs0 += est.result_abs;
        segments.push(Segment {
            a: w[0],
            b: w[1],
            result: est.result,
            error: est.abs_error,
            abs: est.result_abs,
            level: 0,
        });
    }
    let mut ws = Workspace::from_segments(segments, limit);
    let mut area = ws.sum();
    let mut errsum: f64 = ws.segments.iter().map(|s| s.error).sum();
    let mut mass = resabs0;
    let mut tolerance = tolerance_for(area);
    if errsum <= tolerance {
        return Ok(Run { result: area, abs_error: errsum, converged: true, mass, iterations: ws.segments.len() });
    }

    let mut table = EpsilonTable::new();
    table.push(area);

    let mut res_ext = area;
    let mut err_ext = f64::MAX;
    let mut correction = 0.0;
    let mut ertest = tolerance;
    let mut error_over_large = errsum;
    let mut ktmin = 0usize;
    let mut extrapolate = false;
    let mut disallow_extrapolation = false;
    let mut error_type = 0u8;
    let mut error_type2 = false;
    let (mut roundoff1, mut roundoff2, mut roundoff3) = (0usize, 0usize, 0usize);
    let positive_integrand = area.abs() >= (1.0 - 50.0 * f64::EPSILON) * resabs0;
    let mut iteration = ws.segments.len();
    let mut converged_plain = false;

    while iteration < limit {
        let seg = ws.segments[ws.current];
        let current_level = seg.level + 1;
        let a1 = seg.a;
        let b1 = 0.5 * (seg.a + seg.b);
        let a2 = b1;
        let b2 = seg.b;
        iteration += 1;

        let left = kronrod21(&f, a1, b1)?;
        let right = kronrod21(&f, a2, b2)?;
        let area12 = left.result + right.result;
        let error12 = left.abs_error + right.abs_error;
        let last_e = seg.error;

        errsum += error12 - seg.error;
        mass += left.result_abs + right.result_abs - seg.abs;
        area += area12 - seg.result;
        tolerance = tolerance_for(area);

        if left.result_asc != left.abs_error && right.result_asc != right.abs_error {
            let delta = seg.result - area12;
            if delta.abs() <= 1e-5 * area12.abs() && error12 >= 0.99 * seg.error {
                if extrapolate {
                    roundoff2 += 1;
                } else {
                    roundoff1 += 1;
                }
            }
            if iteration > 10 && error12 > seg.error {
                roundoff3 += 1;
            }
        }
        if roundoff1 + roundoff2 >= 10 || roundoff3 >= 20 {
            error_type = 2;
        }
        if roundoff2 >= 5 {
            error_type2 = true;
        }
        if subinterval_too_small(a1, a2, b2) {
            error_type = 4;
        }

        ws.split(
            Segment {
                a: a1,
                b: b1,
                result: left.result,
                error: left.abs_error,
                abs: left.result_abs,
                level: 0,
            },
            Segment {
                a: a2,
                b: b2,
                result: right.result,
                error: right.abs_error,
                abs: right.result_abs,
                level: 0,
            },
        );

        if errsum <= tolerance {
            converged_plain = true;
            break;
        }
        if error_type != 0 {
            break;
        }
        if iteration >= limit - 1 {
            error_type = 1;
            break;
        }
        if disallow_extrapolation {
            continue;
        }

        error_over_large -= last_e;
        if current_level < ws.max_level {
            error_over_large += error12;
        }

        if !extrapolate {
            if ws.large_interval() {
                continue;
            }
            extrapolate = true;
            ws.nrmax = 1;
        }

        if !error_type2 && error_over_large > ertest && ws.increase_nrmax() {
            continue;
        }

        table.push(area);
        let (r, e) = table.extrapolate();
        ktmin += 1;
        if ktmin > 5 && err_ext < 1e-3 * errsum {
            error_type = 5;
        }
        if e < err_ext {
            ktmin = 0;
            err_ext = e;
            res_ext = r;
            correction = error_over_large;
            ertest = tolerance_for(r);
            if err_ext <= ertest {
                break;
            }
        }
        if table.n == 1 {
            disallow_extrapolation = true;
        }
        if error_type == 5 {
            break;
        }

        ws.reset_nrmax();
        extrapolate = false;
        error_over_large = errsum;
    }

    let plain = |ws: &Workspace| (ws.sum(), errsum);
    let finish = |(result, abserr): (f64, f64), tolerance: f64| -> Result<Run> {
        Ok(Run { result, abs_error: abserr, converged: abserr <= tolerance, mass, iterations: iteration })
    };

    if converged_plain || err_ext == f64::MAX {
        let (r, e) = plain(&ws);
        return finish((r, e), tolerance_for(r));
    }

    let mut result = res_ext;
    let mut abserr = err_ext;
    if error_type != 0 || error_type2 {
        if error_type2 {
            abserr += correction;
        }
        let use_plain = if result != 0.0 && area != 0.0 {
            abserr / result.abs() > errsum / area.abs()
        } else {
            abserr > errsum
        };
        if use_plain {
            let (r, e) = plain(&ws);
            return finish((r, e), tolerance_for(r));
        }
    }

    // divergence test
    let max_area = res_ext.abs().max(area.abs());
    if !positive_integrand && max_area < 0.01 * resabs0 {
        return finish((result, abserr), tolerance_for(result));
    }
    let ratio = res_ext / area;
    if !(0.01..=100.0).contains(&ratio) || errsum > area.abs() {
        return Ok(Run { result, abs_error: abserr, converged: false, mass, iterations: iteration });
    }
    if abserr > tolerance_for(result) && errsum <= tolerance_for(area) {
        result = ws.sum();
        abserr = errsum;
    }
    finish((result, abserr), tolerance_for(result))
}
