//! Empirical likelihood for the zero-mean constraint on a finite point set.
//!
//! Given points `T_1, ..., T_m` in `R^d`, the EL ratio for the constraint
//! `sum p_i T_i = 0` is `prod_i 1 / (1 + lambda' T_i)` where `lambda` minimizes
//! the strictly convex dual objective `-sum_i log(1 + a' T_i)` over the open set
//! `{a : 1 + a' T_i > 0 for all i}`. The same solver backs the expansive block
//! statistics, the overlapping block baseline and the limit-law simulation.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for deciding that the origin sits on the hull boundary.
const HULL_TOL: f64 = 1e-12;
/// Allowed deviation of the implied probabilities' total from one.
const MASS_TOL: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;
/// Squared Newton decrement below which the objective can no longer be
/// improved in double precision.
const DECREMENT_FLOOR: f64 = 1e-20;
/// The objective is a sum of log barriers, hence self-concordant: a full
/// Newton step is feasible and quadratically convergent once the squared
/// decrement is below (1/4)^2. Armijo tests cannot resolve the tiny decreases
/// of that phase, so they are only applied outside it.
const PURE_NEWTON_DECREMENT: f64 = 1.0 / 16.0;
/// Full Newton steps taken after the gradient tolerance is met.
const MAX_POLISH: usize = 3;

/// An ordered collection of `m` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
}

impl PointSet {
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("point dimension must be >= 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("point set must be non-empty".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("point set contains a non-finite coordinate".into()));
        }
        Ok(Self { coords, dim })
    }

    /// One-dimensional point set.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map(|p| p.as_ref().len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(coords, dim)
    }

    /// Skips validation; callers guarantee finite coordinates.
    pub(crate) fn from_raw(coords: Vec<f64>, dim: usize) -> Self {
        debug_assert!(dim > 0 && coords.len().is_multiple_of(dim));
        Self { coords, dim }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }

    /// Largest Euclidean norm among the points.
    pub fn max_norm(&self) -> f64 {
        self.points()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Concatenates two point sets of equal dimension.
    pub fn concat(mut self, other: &PointSet) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.coords.extend_from_slice(&other.coords);
        Ok(self)
    }
}

/// Solver controls for the damped Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Gradient-norm tolerance, relative to the largest point norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100,
        }
    }
}

/// Multiplier, log ratio and implied probabilities at the EL optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ElSolution {
    pub lambda: Vec<f64>,
    /// `log R = -sum_i log(1 + lambda' T_i)`, always `<= 0`.
    pub log_ratio: f64,
    /// `p_i = 1 / (m (1 + lambda' T_i))`.
    pub probabilities: Vec<f64>,
    pub iterations: usize,
    /// `|| sum_i T_i / (1 + lambda' T_i) ||` at the returned multiplier.
    pub gradient_norm: f64,
}

/// Multiplier-only result used on hot paths that do not need probabilities.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Multiplier {
    pub lambda: Vec<f64>,
    pub log_ratio: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// True iff the origin lies in the interior of the convex hull of the points.
///
/// For `d = 1` this is a sign check. For `d > 1` the points must span `R^d`
/// and the linear program `max t` subject to `sum p_i T_i = 0`, `sum p_i = 1`,
/// `p_i >= t` must have a strictly positive optimum, i.e. the origin is a
/// strictly positive combination of all points.
pub fn contains_origin_interior(ps: &PointSet) -> bool {
    let scale = ps.max_norm();
    if scale == 0.0 {
        return false;
    }
    if ps.dim == 1 {
        let (lo, hi) = ps
            .coords
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        return lo < -HULL_TOL * scale && hi > HULL_TOL * scale;
    }
    spans_space(ps, scale) && positive_combination_margin(ps, scale) > HULL_TOL
}

fn spans_space(ps: &PointSet, scale: f64) -> bool {
    let d = ps.dim;
    let mut gram = DMatrix::<f64>::zeros(d, d);
    for p in ps.points() {
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] += (p[i] / scale) * (p[j] / scale);
            }
        }
    }
    let eig = gram.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    max > 0.0 && min > HULL_TOL * max
}

/// Optimal `m * t` of the positive-combination LP; `<= 0` when infeasible.
fn positive_combination_margin(ps: &PointSet, scale: f64) -> f64 {
    let m = ps.len();
    let d = ps.dim;
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    // p_i = q_i + t with q_i >= 0.
    let t = lp.add_var(1.0, (0.0, 1.0 / m as f64));
    let q: Vec<_> = (0..m)
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    for k in 0..d {
        let col_sum: f64 = ps.points().map(|p| p[k] / scale).sum();
        let mut expr: Vec<_> = q
            .iter()
            .zip(ps.points())
            .map(|(&v, p)| (v, p[k] / scale))
            .collect();
        expr.push((t, col_sum));
        lp.add_constraint(expr, ComparisonOp::Eq, 0.0);
    }
    let mut total: Vec<_> = q.iter().map(|&v| (v, 1.0)).collect();
    total.push((t, m as f64));
    lp.add_constraint(total, ComparisonOp::Eq, 1.0);
    match lp.solve() {
        Ok(sol) => sol[t] * m as f64,
        Err(_) => 0.0,
    }
}

/// Dual objective `-sum_i log(1 + a' T_i)`; `+inf` outside the feasible set.
pub fn el_objective(ps: &PointSet, a: &[f64]) -> f64 {
    let mut f = 0.0;
    for p in ps.points() {
        let z = dot(a, p);
        if z <= -1.0 {
            return f64::INFINITY;
        }
        f -= z.ln_1p();
    }
    f
}

/// Gradient of [`el_objective`]: `-sum_i T_i / (1 + a' T_i)`.
pub fn el_gradient(ps: &PointSet, a: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; ps.dim];
    for p in ps.points() {
        let z = 1.0 + dot(a, p);
        for (gk, pk) in g.iter_mut().zip(p) {
            *gk -= pk / z;
        }
    }
    g
}

/// Solves the EL program, returning the multiplier, log ratio and the implied
/// probabilities.
pub fn solve_el(ps: &PointSet, opts: SolverOptions) -> Result<ElSolution> {
    let sol = solve_multiplier(ps, opts)?;
    let m = ps.len() as f64;
    let probabilities = ps
        .points()
        .map(|p| 1.0 / (m * (1.0 + dot(&sol.lambda, p))))
        .collect();
    Ok(ElSolution {
        lambda: sol.lambda,
        log_ratio: sol.log_ratio,
        probabilities,
        iterations: sol.iterations,
        gradient_norm: sol.gradient_norm,
    })
}

/// `log R` for the point set, or `-inf` when the origin is not interior to
/// the hull (the constrained likelihood is then zero).
pub fn log_el_ratio(ps: &PointSet) -> Result<f64> {
    log_el_ratio_with(ps, SolverOptions::default())
}

pub fn log_el_ratio_with(ps: &PointSet, opts: SolverOptions) -> Result<f64> {
    match solve_multiplier(ps, opts) {
        Ok(sol) => Ok(sol.log_ratio),
        Err(Error::HullViolation) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

pub(crate) fn solve_multiplier(ps: &PointSet, opts: SolverOptions) -> Result<Multiplier> {
    let scale = ps.max_norm();
    let tol = opts.tol * scale;
    if ps.dim == 1 {
        if !contains_origin_interior(ps) {
            return Err(Error::HullViolation);
        }
        return newton_scalar(&ps.coords, tol, opts.max_iter);
    }
    if scale == 0.0 || !spans_space(ps, scale) {
        return Err(Error::HullViolation);
    }
    // At a stationary point sum_i 1/z_i = m, so the weights p_i = 1/(m z_i)
    // form a strictly positive combination summing the points to zero. When
    // the origin is outside the hull the iterates diverge and the gradient
    // still decays, but the weights no longer sum to one. A converged iterate
    // passing that check is a certificate; anything else goes to the LP.
    match newton_vector(ps, tol, opts.max_iter) {
        Ok(sol) if (implied_mass(ps, &sol.lambda) - 1.0).abs() <= MASS_TOL => Ok(sol),
        Ok(sol) => {
            if positive_combination_margin(ps, scale) > HULL_TOL {
                Ok(sol)
            } else {
                Err(Error::HullViolation)
            }
        }
        Err(e) => {
            if positive_combination_margin(ps, scale) > HULL_TOL {
                Err(e)
            } else {
                Err(Error::HullViolation)
            }
        }
    }
}

/// `sum_i 1 / (m (1 + a' T_i))`.
fn implied_mass(ps: &PointSet, a: &[f64]) -> f64 {
    let m = ps.len() as f64;
    ps.points().map(|p| 1.0 / (m * (1.0 + dot(a, p)))).sum()
}

/// Minimizes `-sum_i log(1 + a t_i)` over the closed interval `[lo, hi]`,
/// where `lo < 0 < hi` and every `1 + a t_i` stays positive on `[lo, hi]`.
///
/// By convexity the minimizer is an endpoint when the derivative there points
/// outward, and otherwise the unconstrained minimizer, which then exists.
pub(crate) fn solve_scalar_on_interval(t: &[f64], lo: f64, hi: f64, opts: SolverOptions) -> Result<Multiplier> {
    debug_assert!(lo < 0.0 && hi > 0.0);
    let derivative = |a: f64| -> f64 { -t.iter().map(|&ti| ti / (1.0 + a * ti)).sum::<f64>() };
    let at = |a: f64, gradient_norm: f64| Multiplier {
        lambda: vec![a],
        log_ratio: scalar_objective(t, a).min(0.0),
        iterations: 0,
        gradient_norm,
    };
    let g_hi = derivative(hi);
    if g_hi <= 0.0 {
        return Ok(at(hi, g_hi.abs()));
    }
    let g_lo = derivative(lo);
    if g_lo >= 0.0 {
        return Ok(at(lo, g_lo.abs()));
    }
    let scale = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    newton_scalar(t, opts.tol * scale, opts.max_iter)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn newton_scalar(t: &[f64], tol: f64, max_iter: usize) -> Result<Multiplier> {
    let mut a = 0.0f64;
    let mut f = 0.0f64;
    let mut iterations = 0;
    let mut polish = 0;
    let mut last_step = f64::INFINITY;
    loop {
        // Gradient and Hessian of -sum log(1 + a t).
        let (mut g, mut h) = (0.0, 0.0);
        for &ti in t {
            let r = ti / (1.0 + a * ti);
            g -= r;
            h += r * r;
        }
        let step = -g / h;
        let decrement = g * g / h;
        if g.abs() <= tol || polish > 0 {
            // Full steps square the remaining error. Objective changes are
            // below rounding here, so steps are kept while they shrink.
            let cand = a + step;
            let fc = scalar_objective(t, cand);
            if polish < MAX_POLISH && step.abs() < last_step && step != 0.0 && fc.is_finite() {
                a = cand;
                f = fc;
                polish += 1;
                last_step = step.abs();
                continue;
            }
            return Ok(scalar_result(a, f, iterations, g.abs()));
        }
        if decrement <= DECREMENT_FLOOR {
            return Ok(scalar_result(a, f, iterations, g.abs()));
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                gradient_norm: g.abs(),
            });
        }
        let slope = g * step;
        let pure = decrement < PURE_NEWTON_DECREMENT;
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = a + s * step;
            let fc = scalar_objective(t, cand);
            if fc.is_finite() && (pure || fc <= f + ARMIJO * s * slope) {
                accepted = Some((cand, fc));
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((cand, fc)) => {
                a = cand;
                f = fc;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    gradient_norm: g.abs(),
                })
            }
        }
    }
}

fn scalar_objective(t: &[f64], a: f64) -> f64 {
    let mut f = 0.0;
    for &ti in t {
        let z = a * ti;
        if z <= -1.0 {
            return f64::INFINITY;
        }
        f -= z.ln_1p();
    }
    f
}

fn scalar_result(a: f64, f: f64, iterations: usize, gradient_norm: f64) -> Multiplier {
    Multiplier {
        lambda: vec![a],
        // f is the minimized objective, i.e. -sum log(1 + a t) = log R.
        log_ratio: f.min(0.0),
        iterations,
        gradient_norm,
    }
}

fn newton_vector(ps: &PointSet, tol: f64, max_iter: usize) -> Result<Multiplier> {
    let d = ps.dim;
    let mut a = vec![0.0; d];
    let mut f = 0.0f64;
    let mut iterations = 0;
    let mut polish = 0;
    let mut last_step = f64::INFINITY;
    let mut cand = vec![0.0; d];
    loop {
        let mut g = DVector::<f64>::zeros(d);
        let mut h = DMatrix::<f64>::zeros(d, d);
        for p in ps.points() {
            let z = 1.0 + dot(&a, p);
            for i in 0..d {
                let ri = p[i] / z;
                g[i] -= ri;
                for j in 0..=i {
                    h[(i, j)] += ri * p[j] / z;
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                h[(j, i)] = h[(i, j)];
            }
        }
        let gnorm = g.norm();
        let converged = gnorm <= tol || polish > 0;
        let done = |a: Vec<f64>, f: f64| Multiplier {
            lambda: a,
            log_ratio: f.min(0.0),
            iterations,
            gradient_norm: gnorm,
        };
        if iterations >= max_iter && !converged {
            return Err(Error::NonConvergence {
                iterations,
                gradient_norm: gnorm,
            });
        }
        let chol = match h.cholesky() {
            Some(c) => c,
            None if converged => return Ok(done(a, f)),
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    gradient_norm: gnorm,
                })
            }
        };
        let step = -chol.solve(&g);
        let slope = g.dot(&step);
        let decrement = -slope;
        if converged {
            // Full steps square the remaining error. Objective changes are
            // below rounding here, so steps are kept while they shrink.
            let len = step.norm();
            for k in 0..d {
                cand[k] = a[k] + step[k];
            }
            let fc = el_objective(ps, &cand);
            if polish < MAX_POLISH && len < last_step && len > 0.0 && fc.is_finite() {
                a.copy_from_slice(&cand);
                f = fc;
                polish += 1;
                last_step = len;
                continue;
            }
            return Ok(done(a, f));
        }
        if decrement <= DECREMENT_FLOOR {
            return Ok(done(a, f));
        }
        let pure = decrement < PURE_NEWTON_DECREMENT;
        let mut s = 1.0;
        let mut accepted = false;
        let mut fc = f;
        for _ in 0..MAX_HALVINGS {
            for k in 0..d {
                cand[k] = a[k] + s * step[k];
            }
            fc = el_objective(ps, &cand);
            if fc.is_finite() && (pure || fc <= f + ARMIJO * s * slope) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if accepted {
            a.copy_from_slice(&cand);
            f = fc;
        } else {
            return Err(Error::NonConvergence {
                iterations,
                gradient_norm: gnorm,
            });
        }
    }
}
