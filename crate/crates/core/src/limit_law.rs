//! Simulation of the distribution-free limit laws of the expansive block
//! statistics.
//!
//! The limit of `-(1/n) log R_n(mu_0)` is `-g(Y)` where `Y` minimizes
//! `-int_0^1 log(1 + a' f(t)) dt` over the closure of
//! `K = {a : inf_t (1 + a' f(t)) > 0}`, with `f(t) = w(t) B(t)` for a
//! standard Brownian path `B`. The two-scan variant adds
//! `w(t) [B(1) - B(1 - t)]`.
//!
//! The integral is replaced by its Riemann sum on `t_i = i/m`, which is a
//! finite EL problem on the points `f(t_i)`. The constraint set needs more
//! care: a discretized path keeps one sign on the whole grid with
//! probability of order `m^{-1/2}` although the continuous path crosses zero
//! immediately. [`Discretization::Continuous`] (the default, `d = 1`) draws
//! the exact minimum and maximum of the Brownian bridge between grid points,
//! so the feasible interval is that of the continuous path, and minimizes
//! the Riemann sum over its closure, boundary included.
//! [`Discretization::Grid`] uses the grid points alone and reports `+inf`
//! when they miss the hull, which is the law of the finite-sample statistic
//! on Gaussian data with `n = m`. For `d > 1` both modes use the grid.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::blocking::{BlockScheme, WeightFn};
use crate::el::{solve_multiplier, solve_scalar_on_interval, PointSet, SolverOptions};
use crate::error::{Error, Result};
use crate::rng::{par_replicates, replicate_rng, BOOTSTRAP_STREAM};
use crate::stats::{bootstrap_quantile_se, quantile_sorted, sort_draws};

pub const DEFAULT_GRID: usize = 1000;
pub const DEFAULT_REPLICATES: usize = 50_000;
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// A discretized `d`-dimensional standard Brownian path at `t_i = i/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: usize,
    dim: usize,
    /// Row `i - 1` holds `B(i/m)`.
    values: Vec<f64>,
}

impl BrownianPath {
    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `B(i/m)` for `i` in `0..=m`; `B(0) = 0`.
    pub fn at(&self, i: usize) -> Vec<f64> {
        if i == 0 {
            vec![0.0; self.dim]
        } else {
            self.values[(i - 1) * self.dim..i * self.dim].to_vec()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Cumulative sums of `m` i.i.d. `N(0, I_d / m)` increments.
pub fn simulate_brownian_path<R: Rng>(m: usize, d: usize, rng: &mut R) -> Result<BrownianPath> {
    if m < 2 || d < 1 {
        return Err(Error::InvalidInput(format!("Brownian path needs m >= 2 and d >= 1, got m={m}, d={d}")));
    }
    let sd = (1.0 / m as f64).sqrt();
    let mut values = Vec::with_capacity(m * d);
    let mut acc = vec![0.0; d];
    for _ in 0..m {
        for a in acc.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *a += sd * z;
        }
        values.extend_from_slice(&acc);
    }
    Ok(BrownianPath { grid: m, dim: d, values })
}

fn check_scheme(scheme: BlockScheme) -> Result<bool> {
    match scheme {
        BlockScheme::Ebel1 => Ok(false),
        BlockScheme::Ebel2 => Ok(true),
        BlockScheme::Bel(_) => Err(Error::InvalidInput(
            "the Brownian limit law applies to the expansive schemes only".into(),
        )),
    }
}

/// Limit-law points for one path: `w(t_i) [B(t_i) + t_i c]` and, for the
/// two-scan scheme, `w(t_i) [B(1) - B(1 - t_i) + t_i c]`.
fn limit_points(path: &BrownianPath, weights: &[f64], backward: bool, shift: Option<&[f64]>) -> PointSet {
    let (m, d) = (path.grid, path.dim);
    let mut out = Vec::with_capacity(if backward { 2 * m * d } else { m * d });
    let drift = |i: usize, k: usize| shift.map_or(0.0, |c| (i as f64 / m as f64) * c[k]);
    for i in 1..=m {
        let b = &path.values[(i - 1) * d..i * d];
        for (k, bk) in b.iter().enumerate() {
            out.push(weights[i - 1] * (bk + drift(i, k)));
        }
    }
    if backward {
        let end = &path.values[(m - 1) * d..m * d];
        for i in 1..=m {
            for (k, ek) in end.iter().enumerate() {
                let start = if i == m { 0.0 } else { path.values[(m - i - 1) * d + k] };
                out.push(weights[i - 1] * (ek - start + drift(i, k)));
            }
        }
    }
    PointSet::from_raw(out, d)
}

/// How the limit program is discretized on the grid `t_i = i/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    /// Feasible set from the exact between-grid extremes of the path
    /// (`d = 1`); falls back to [`Discretization::Grid`] for `d > 1`.
    #[default]
    Continuous,
    /// Grid points only; draws missing the hull are `+inf`.
    Grid,
}

impl Discretization {
    pub fn name(self) -> &'static str {
        match self {
            Discretization::Continuous => "continuous",
            Discretization::Grid => "grid",
        }
    }
}

/// Weights `w(t_i)` for `i = 0..=m`.
fn weight_grid(w: &WeightFn, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(w.eval(0.0).unwrap_or(0.0));
    out.extend(w.grid(m));
    out
}

/// Minimum and maximum of a Brownian bridge from `x` to `y` over a time step
/// `dt`, drawn from their exact marginal laws.
fn bridge_extremes(x: f64, y: f64, dt: f64, rng: &mut impl Rng) -> (f64, f64) {
    let spread = |rng: &mut dyn rand::RngCore| {
        let u: f64 = 1.0 - rng.gen::<f64>();
        ((x - y) * (x - y) - 2.0 * dt * u.ln()).sqrt()
    };
    let lo = 0.5 * (x + y - spread(rng));
    let hi = 0.5 * (x + y + spread(rng));
    (lo, hi)
}

/// Range of `f` over `[0, 1]` for a scalar path `x` (with `x_0 = 0`) given
/// on the grid, using bridge extremes between grid points. `weights` has
/// length `m + 1`.
fn continuous_range(x: &[f64], weights: &[f64], backward: bool, rng: &mut impl Rng) -> (f64, f64) {
    let m = x.len() - 1;
    let dt = 1.0 / m as f64;
    let extremes: Vec<(f64, f64)> = (1..=m).map(|i| bridge_extremes(x[i - 1], x[i], dt, rng)).collect();
    let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 1..=m {
        let omega = weights[i - 1].max(weights[i]);
        let (lo, hi) = extremes[i - 1];
        fmin = fmin.min(omega * lo);
        fmax = fmax.max(omega * hi);
        if backward {
            // x(1) - x(1 - s) over the mirrored interval.
            let (lo, hi) = extremes[m - i];
            fmin = fmin.min(omega * (x[m] - hi));
            fmax = fmax.max(omega * (x[m] - lo));
        }
    }
    (fmin, fmax)
}

fn draw_with(
    scheme: BlockScheme,
    weights: &[f64],
    d: usize,
    shift: Option<&[f64]>,
    disc: Discretization,
    rng: &mut impl Rng,
) -> Result<f64> {
    let backward = check_scheme(scheme)?;
    let m = weights.len() - 1;
    let path = simulate_brownian_path(m, d, rng)?;
    let points = limit_points(&path, &weights[1..], backward, shift);
    if d == 1 && disc == Discretization::Continuous {
        let c = shift.map_or(0.0, |c| c[0]);
        let mut x = Vec::with_capacity(m + 1);
        x.push(0.0);
        x.extend(path.values.iter().enumerate().map(|(i, b)| b + c * (i + 1) as f64 / m as f64));
        let (fmin, fmax) = continuous_range(&x, weights, backward, rng);
        if !(fmin < 0.0 && fmax > 0.0) {
            return Ok(f64::INFINITY);
        }
        let sol = solve_scalar_on_interval(points.as_slice(), -1.0 / fmax, -1.0 / fmin, SolverOptions::default())?;
        return Ok(-sol.log_ratio / m as f64);
    }
    match solve_multiplier(&points, SolverOptions::default()) {
        Ok(sol) => Ok(-sol.log_ratio / m as f64),
        Err(Error::HullViolation) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn check_grid(m: usize) -> Result<()> {
    if m < 100 {
        return Err(Error::InvalidInput(format!("limit-law grid must have m >= 100, got {m}")));
    }
    Ok(())
}

/// One draw of the approximated limit variable `-g_d(Y_d)` (or its two-scan
/// analogue) with the default discretization.
pub fn limit_draw<R: Rng>(scheme: BlockScheme, w: &WeightFn, d: usize, m: usize, rng: &mut R) -> Result<f64> {
    limit_draw_with(scheme, w, d, m, Discretization::default(), None, rng)
}

/// Draw under the local alternative `f_c(t) = w(t) [B(t) + t c]`, where
/// `shift = Sigma^{-1/2} c`.
pub fn limit_draw_local_alternative<R: Rng>(
    scheme: BlockScheme,
    w: &WeightFn,
    d: usize,
    m: usize,
    shift: &[f64],
    rng: &mut R,
) -> Result<f64> {
    limit_draw_with(scheme, w, d, m, Discretization::default(), Some(shift), rng)
}

/// One draw with an explicit discretization and optional drift.
pub fn limit_draw_with<R: Rng>(
    scheme: BlockScheme,
    w: &WeightFn,
    d: usize,
    m: usize,
    disc: Discretization,
    shift: Option<&[f64]>,
    rng: &mut R,
) -> Result<f64> {
    check_args(scheme, d, m, shift)?;
    draw_with(scheme, &weight_grid(w, m), d, shift, disc, rng)
}

fn check_args(scheme: BlockScheme, d: usize, m: usize, shift: Option<&[f64]>) -> Result<()> {
    check_grid(m)?;
    check_scheme(scheme)?;
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if let Some(c) = shift {
        if c.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: c.len() });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("drift must be finite".into()));
        }
    }
    Ok(())
}

/// `replicates` draws with replicate `i` using stream `(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_draws(
    scheme: BlockScheme,
    w: &WeightFn,
    d: usize,
    m: usize,
    replicates: usize,
    seed: u64,
    shift: Option<&[f64]>,
    disc: Discretization,
) -> Result<Vec<f64>> {
    check_args(scheme, d, m, shift)?;
    let weights = weight_grid(w, m);
    par_replicates(replicates, |i| {
        let mut rng = replicate_rng(seed, i as u64);
        draw_with(scheme, &weights, d, shift, disc, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Estimated quantiles of a limit law with Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    pub scheme: BlockScheme,
    pub weight: WeightFn,
    pub dim: usize,
    pub levels: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub mc_stderr: Vec<f64>,
    pub replicates: usize,
    /// Grid size `m`; 0 when unknown.
    pub grid: usize,
    pub seed: u64,
    pub discretization: Discretization,
    /// Draws reported as `+inf`.
    pub hull_failures: usize,
}

impl QuantileTable {
    /// Quantile at `level`, if tabulated.
    pub fn quantile_at(&self, level: f64) -> Option<f64> {
        self.levels
            .iter()
            .position(|&l| (l - level).abs() < 1e-12)
            .map(|i| self.quantiles[i])
    }

    /// Reference 90th percentiles for `d = 1` (50,000 simulations). The
    /// tabulated uncertainties are 95% half-widths; they are stored here as
    /// standard errors.
    pub fn reference(scheme: BlockScheme, weight: &WeightFn) -> Result<Self> {
        use crate::blocking::WeightKind;
        let (q, half_width) = match (scheme, weight.kind()) {
            (BlockScheme::Ebel1, WeightKind::Constant) => (2.51, 0.03),
            (BlockScheme::Ebel2, WeightKind::Constant) => (2.50, 0.03),
            (BlockScheme::Ebel1, WeightKind::Linear) => (5.64, 0.09),
            (BlockScheme::Ebel2, WeightKind::Linear) => (4.37, 0.06),
            (BlockScheme::Ebel1, WeightKind::CosineBell) => (7.00, 0.15),
            (BlockScheme::Ebel2, WeightKind::CosineBell) => (3.42, 0.09),
            _ => {
                return Err(Error::Calibration(format!(
                    "no reference quantile for {} with {} weight",
                    scheme.name(),
                    weight.name()
                )))
            }
        };
        Ok(Self {
            scheme,
            weight: weight.clone(),
            dim: 1,
            levels: vec![0.9],
            quantiles: vec![q],
            mc_stderr: vec![half_width / 1.96],
            replicates: DEFAULT_REPLICATES,
            grid: 0,
            seed: 0,
            discretization: Discretization::Continuous,
            hull_failures: 0,
        })
    }
}

/// Empirical quantiles of `replicates` limit draws at each level, with
/// bootstrap standard errors over the pooled draws.
pub fn estimate_quantiles(
    scheme: BlockScheme,
    w: &WeightFn,
    d: usize,
    levels: &[f64],
    replicates: usize,
    m: usize,
    seed: u64,
) -> Result<QuantileTable> {
    estimate_quantiles_with(scheme, w, d, levels, replicates, m, seed, Discretization::default())
}

/// [`estimate_quantiles`] with an explicit discretization.
#[allow(clippy::too_many_arguments)]
pub fn estimate_quantiles_with(
    scheme: BlockScheme,
    w: &WeightFn,
    d: usize,
    levels: &[f64],
    replicates: usize,
    m: usize,
    seed: u64,
    disc: Discretization,
) -> Result<QuantileTable> {
    if replicates < 1000 {
        return Err(Error::InvalidInput(format!("need at least 1000 replicates, got {replicates}")));
    }
    if levels.is_empty() || levels.iter().any(|&p| !(0.0 < p && p < 1.0)) {
        return Err(Error::InvalidInput("levels must lie in (0, 1)".into()));
    }
    let mut draws = simulate_draws(scheme, w, d, m, replicates, seed, None, disc)?;
    let hull_failures = draws.iter().filter(|v| v.is_infinite()).count();
    sort_draws(&mut draws);
    let quantiles: Vec<f64> = levels.iter().map(|&p| quantile_sorted(&draws, p)).collect();
    let mut boot_rng = replicate_rng(seed, BOOTSTRAP_STREAM);
    let mc_stderr = bootstrap_quantile_se(&draws, levels, BOOTSTRAP_RESAMPLES, &mut boot_rng);
    Ok(QuantileTable {
        scheme,
        weight: w.clone(),
        dim: d,
        levels: levels.to_vec(),
        quantiles,
        mc_stderr,
        replicates,
        grid: m,
        seed,
        discretization: disc,
        hull_failures,
    })
}
