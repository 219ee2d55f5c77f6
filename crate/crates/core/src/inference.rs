//! Expansive-block EL statistics, confidence regions for means, smooth
//! functions of means and estimating-equation parameters.

use std::fmt;
use std::sync::Arc;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};

use crate::blocking::{block_sums, centered, expansive_points, BlockScheme, WeightFn};
use crate::el::{log_el_ratio, PointSet};
use crate::error::{Error, Result};
use crate::interval::{affine_centroid, invert_statistic, Interval};
use crate::limit_law::QuantileTable;
use crate::series::{mean_std, TimeSeries};

/// Scheme, weight and calibration of an expansive-block EL procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct EbelConfig {
    pub scheme: BlockScheme,
    pub weight: WeightFn,
    pub calibration: QuantileTable,
    pub level: f64,
}

impl EbelConfig {
    /// Checks that `calibration` was tabulated for `scheme` and the weight
    /// shape (the scale of `w` is irrelevant) and contains `level`.
    pub fn new(scheme: BlockScheme, weight: WeightFn, calibration: QuantileTable, level: f64) -> Result<Self> {
        if matches!(scheme, BlockScheme::Bel(_)) {
            return Err(Error::InvalidInput("EBEL requires an expansive scheme".into()));
        }
        if calibration.scheme != scheme || calibration.weight.kind() != weight.kind() {
            return Err(Error::Calibration(format!(
                "calibration table is for {} with {} weight, not {} with {} weight",
                calibration.scheme.name(),
                calibration.weight.name(),
                scheme.name(),
                weight.name()
            )));
        }
        match calibration.quantile_at(level) {
            Some(q) if q.is_finite() && q > 0.0 => {}
            _ => return Err(Error::Calibration(format!("calibration table has no usable quantile at level {level}"))),
        }
        Ok(Self { scheme, weight, calibration, level })
    }

    /// Calibrated by the reference 90% quantiles for scalar parameters.
    pub fn reference(scheme: BlockScheme, weight: WeightFn) -> Result<Self> {
        let table = QuantileTable::reference(scheme, &weight)?;
        Self::new(scheme, weight, table, 0.9)
    }

    /// The critical value `a` of the region `{statistic <= a}`.
    pub fn threshold(&self) -> f64 {
        self.calibration.quantile_at(self.level).expect("checked at construction")
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.calibration.dim != d {
            return Err(Error::Calibration(format!(
                "calibration table has dimension {}, statistic has dimension {d}",
                self.calibration.dim
            )));
        }
        Ok(())
    }
}

/// `-(1/n) log R` on the expansive block sums, for either scan scheme; `+inf`
/// when the origin is outside their hull.
pub fn expansive_statistic(x: &TimeSeries, mu: &[f64], scheme: BlockScheme, w: &WeightFn) -> Result<f64> {
    if matches!(scheme, BlockScheme::Bel(_)) {
        return Err(Error::InvalidInput("expected an expansive scheme".into()));
    }
    let points = block_sums(x, mu, scheme, w)?;
    Ok(-log_el_ratio(&points)? / x.len() as f64)
}

/// [`expansive_statistic`] with the scheme and weight of `cfg`.
pub fn ebel_statistic(x: &TimeSeries, mu: &[f64], cfg: &EbelConfig) -> Result<f64> {
    expansive_statistic(x, mu, cfg.scheme, &cfg.weight)
}

/// `{mu : statistic(mu) <= a}` for a scalar series.
pub fn ebel_ci_mean(x: &TimeSeries, cfg: &EbelConfig) -> Result<Interval> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: x.dim() });
    }
    cfg.check_dim(1)?;
    let (m, sd) = mean_std(x.as_slice());
    let h = if sd > 0.0 { sd } else { 1.0 };
    let center = affine_centroid(
        &expansive_block_points(x, &[m], cfg.scheme, &cfg.weight)?,
        &expansive_block_points(x, &[m + h], cfg.scheme, &cfg.weight)?,
        m,
        h,
    );
    invert_statistic(x.as_slice(), center, cfg.threshold(), |mu| ebel_statistic(x, &[mu], cfg))
}

/// Whether `mu` lies in the calibrated confidence region.
pub fn ebel_region_member(x: &TimeSeries, mu: &[f64], cfg: &EbelConfig) -> Result<bool> {
    cfg.check_dim(x.dim())?;
    Ok(ebel_statistic(x, mu, cfg)? <= cfg.threshold())
}

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
enum ModelKind {
    Identity,
    General { h: MapFn, jacobian: Option<JacobianFn> },
}

/// A parameter `theta = H(mu)` with `H: R^d -> R^p`, `p <= d`.
#[derive(Clone)]
pub struct SmoothFunctionModel {
    d: usize,
    p: usize,
    kind: ModelKind,
}

impl fmt::Debug for SmoothFunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunctionModel").field("d", &self.d).field("p", &self.p).finish()
    }
}

/// Smallest singular value accepted for the Jacobian of `H`.
const MIN_SINGULAR_VALUE: f64 = 1e-8;
const PROJECTION_ITERS: usize = 100;
const PROFILE_RESTARTS: usize = 3;
const PROFILE_TOL: f64 = 1e-7;
const PROFILE_MAX_ITERS: u64 = 2000;

impl SmoothFunctionModel {
    /// `H` with Jacobians by central differences.
    pub fn new<H>(d: usize, p: usize, h: H) -> Result<Self>
    where
        H: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if p == 0 || p > d {
            return Err(Error::InvalidInput(format!("need 1 <= p <= d, got p={p}, d={d}")));
        }
        Ok(Self { d, p, kind: ModelKind::General { h: Arc::new(h), jacobian: None } })
    }

    /// Supplies an analytic `p x d` Jacobian.
    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if let ModelKind::General { jacobian: j, .. } = &mut self.kind {
            *j = Some(Arc::new(jacobian));
        }
        self
    }

    /// `H(mu) = mu`.
    pub fn identity(d: usize) -> Self {
        Self { d, p: d, kind: ModelKind::Identity }
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn output_dim(&self) -> usize {
        self.p
    }

    pub fn eval(&self, mu: &[f64]) -> Vec<f64> {
        match &self.kind {
            ModelKind::Identity => mu.to_vec(),
            ModelKind::General { h, .. } => h(mu),
        }
    }

    pub fn jacobian(&self, mu: &[f64]) -> DMatrix<f64> {
        match &self.kind {
            ModelKind::Identity => DMatrix::identity(self.d, self.d),
            ModelKind::General { jacobian: Some(j), .. } => j(mu),
            ModelKind::General { h, jacobian: None } => {
                let mut jac = DMatrix::zeros(self.p, self.d);
                let mut x = mu.to_vec();
                for k in 0..self.d {
                    let step = 1e-6 * mu[k].abs().max(1.0);
                    x[k] = mu[k] + step;
                    let up = h(&x);
                    x[k] = mu[k] - step;
                    let down = h(&x);
                    x[k] = mu[k];
                    for i in 0..self.p {
                        jac[(i, k)] = match (up.get(i), down.get(i)) {
                            (Some(u), Some(v)) => (u - v) / (2.0 * step),
                            _ => f64::NAN,
                        };
                    }
                }
                jac
            }
        }
    }

    fn full_rank_jacobian(&self, mu: &[f64]) -> Result<DMatrix<f64>> {
        let j = self.jacobian(mu);
        if j.nrows() != self.p || j.ncols() != self.d || j.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("Jacobian of H is malformed or not finite".into()));
        }
        let smallest = j.singular_values().min();
        if smallest <= MIN_SINGULAR_VALUE {
            return Err(Error::Domain(format!("Jacobian of H is rank deficient (singular value {smallest:e})")));
        }
        Ok(j)
    }

    /// Gauss-Newton projection of `start` onto `{H(mu) = theta}`.
    fn project(&self, start: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        let mut mu = start.to_vec();
        let scale = 1.0 + theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..PROJECTION_ITERS {
            let hv = self.eval(&mu);
            if hv.len() != self.p || hv.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("H is not finite on the search path".into()));
            }
            let r = DVector::from_iterator(self.p, hv.iter().zip(theta).map(|(a, b)| a - b));
            if r.amax() <= 1e-12 * scale {
                return Ok(mu);
            }
            let j = self.full_rank_jacobian(&mu)?;
            let jjt = &j * j.transpose();
            let y = jjt
                .cholesky()
                .ok_or_else(|| Error::Domain("Jacobian of H is rank deficient".into()))?
                .solve(&r);
            let step = j.transpose() * y;
            for (m, s) in mu.iter_mut().zip(step.iter()) {
                *m -= s;
            }
        }
        Err(Error::ProfileNonConvergence("projection onto the constraint set did not converge".into()))
    }
}

struct ProfileCost<'a> {
    x: &'a TimeSeries,
    model: &'a SmoothFunctionModel,
    theta: &'a [f64],
    cfg: &'a EbelConfig,
    base: Vec<f64>,
    chart: DMatrix<f64>,
}

impl ProfileCost<'_> {
    fn point(&self, z: &[f64]) -> Result<Vec<f64>> {
        let shifted: Vec<f64> = (0..self.base.len())
            .map(|i| self.base[i] + (0..z.len()).map(|k| self.chart[(i, k)] * z[k]).sum::<f64>())
            .collect();
        self.model.project(&shifted, self.theta)
    }

    fn value(&self, z: &[f64]) -> f64 {
        match self.point(z) {
            Ok(mu) => ebel_statistic(self.x, &mu, self.cfg).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }
}

impl CostFunction for &ProfileCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, z: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.value(z))
    }
}

fn nelder_mead(cost: &ProfileCost<'_>, start: &[f64], steps: &[f64]) -> Result<(Vec<f64>, f64)> {
    let k = start.len();
    let mut simplex = vec![start.to_vec()];
    for i in 0..k {
        let mut v = start.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(PROFILE_TOL)
        .map_err(|e| Error::ProfileNonConvergence(e.to_string()))?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.max_iters(PROFILE_MAX_ITERS))
        .run()
        .map_err(|e| Error::ProfileNonConvergence(e.to_string()))?;
    let state = res.state();
    let best = state
        .best_param
        .clone()
        .ok_or_else(|| Error::ProfileNonConvergence("simplex search returned no point".into()))?;
    Ok((best, state.best_cost))
}

/// Profile statistic `min {-(1/n) log R(mu) : H(mu) = theta}`.
///
/// When `p = d` the constraint pins `mu` and the statistic is evaluated at
/// the solution of `H(mu) = theta`. Otherwise the minimum is sought by a
/// simplex search in null-space coordinates of the Jacobian at the sample
/// mean projected onto the constraint set, with restarts from perturbed
/// points.
pub fn ebel_statistic_smooth(x: &TimeSeries, model: &SmoothFunctionModel, theta: &[f64], cfg: &EbelConfig) -> Result<f64> {
    if x.dim() != model.d {
        return Err(Error::DimensionMismatch { expected: model.d, found: x.dim() });
    }
    if theta.len() != model.p {
        return Err(Error::DimensionMismatch { expected: model.p, found: theta.len() });
    }
    if let ModelKind::Identity = model.kind {
        return ebel_statistic(x, theta, cfg);
    }
    let mean = x.mean();
    let base = model.project(&mean, theta)?;
    if model.p == model.d {
        return ebel_statistic(x, &base, cfg);
    }
    let j = model.full_rank_jacobian(&base)?;
    let chart = null_space(&j);
    let steps = chart_steps(x, &chart);
    let cost = ProfileCost { x, model, theta, cfg, base, chart };
    let origin = vec![0.0; steps.len()];
    let (mut best_z, mut best) = nelder_mead(&cost, &origin, &steps)?;
    for r in 0..PROFILE_RESTARTS {
        let mut start = best_z.clone();
        for (i, s) in start.iter_mut().enumerate() {
            let sign = if (i + r) % 2 == 0 { 1.0 } else { -1.0 };
            *s += sign * steps[i];
        }
        let (z, v) = nelder_mead(&cost, &start, &steps)?;
        if v < best {
            best = v;
            best_z = z;
        }
    }
    if best.is_nan() {
        return Err(Error::ProfileNonConvergence("profile statistic is undefined".into()));
    }
    Ok(best)
}

/// Orthonormal basis (columns) of the null space of the full-rank `p x d`
/// matrix `j`.
fn null_space(j: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, d) = j.shape();
    // The Q factor of [J' | I] is orthogonal; its first p columns span the
    // row space of J, the remaining ones its complement.
    let mut aug = DMatrix::zeros(d, p + d);
    aug.view_mut((0, 0), (d, p)).copy_from(&j.transpose());
    aug.view_mut((0, p), (d, d)).fill_with_identity();
    aug.qr().q().columns(p, d - p).into_owned()
}

/// Initial simplex edge lengths: two standard errors of the mean along each
/// chart direction, from the sample covariance.
fn chart_steps(x: &TimeSeries, chart: &DMatrix<f64>) -> Vec<f64> {
    let (n, d) = (x.len(), x.dim());
    let mean = x.mean();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for row in x.rows() {
        for a in 0..d {
            for b in 0..d {
                cov[(a, b)] += (row[a] - mean[a]) * (row[b] - mean[b]) / n as f64;
            }
        }
    }
    (0..chart.ncols())
        .map(|k| {
            let v = chart.column(k);
            let s = (v.transpose() * &cov * v)[(0, 0)].max(0.0).sqrt();
            if s > 0.0 {
                2.0 * s / (n as f64).sqrt()
            } else {
                1e-3
            }
        })
        .collect()
}

type EstimatingFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// `G(x; theta)` with values in `R^p`, unbiased at the true parameter.
#[derive(Clone)]
pub struct EstimatingFunction {
    p: usize,
    g: EstimatingFn,
}

impl fmt::Debug for EstimatingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EstimatingFunction").field("p", &self.p).finish()
    }
}

impl EstimatingFunction {
    pub fn new<G>(p: usize, g: G) -> Result<Self>
    where
        G: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if p == 0 {
            return Err(Error::InvalidInput("estimating function must have p >= 1".into()));
        }
        Ok(Self { p, g: Arc::new(g) })
    }

    /// `G(x; mu) = x - mu`.
    pub fn mean(d: usize) -> Self {
        Self { p: d, g: Arc::new(|x: &[f64], mu: &[f64]| x.iter().zip(mu).map(|(a, b)| a - b).collect()) }
    }

    pub fn output_dim(&self) -> usize {
        self.p
    }

    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        (self.g)(x, theta)
    }
}

/// Expansive-block statistic with `G(X_j; theta)` in place of `X_j - mu`.
/// An estimating function that vanishes on the whole sample is reported as
/// a hull violation.
pub fn ebel_statistic_ef(x: &TimeSeries, g: &EstimatingFunction, theta: &[f64], cfg: &EbelConfig) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 observations, got {n}")));
    }
    let mut increments = Vec::with_capacity(n * g.p);
    for row in x.rows() {
        let v = g.eval(row, theta);
        if v.len() != g.p {
            return Err(Error::DimensionMismatch { expected: g.p, found: v.len() });
        }
        if v.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("estimating function is not finite".into()));
        }
        increments.extend(v);
    }
    if increments.iter().all(|&v| v == 0.0) {
        return Err(Error::HullViolation);
    }
    let backward = match cfg.scheme {
        BlockScheme::Ebel1 => false,
        BlockScheme::Ebel2 => true,
        BlockScheme::Bel(_) => return Err(Error::InvalidInput("expected an expansive scheme".into())),
    };
    let points = expansive_points(increments, g.p, &cfg.weight, backward);
    Ok(-log_el_ratio(&points)? / n as f64)
}

/// Centered expansive block sums of a series, exposed for diagnostics.
pub fn expansive_block_points(x: &TimeSeries, mu: &[f64], scheme: BlockScheme, w: &WeightFn) -> Result<PointSet> {
    if mu.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: mu.len() });
    }
    let backward = matches!(scheme, BlockScheme::Ebel2);
    Ok(expansive_points(centered(x, mu), x.dim(), w, backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use rand::Rng;

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::univariate(v).unwrap()
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = replicate_rng(seed, 0);
        (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
    }

    #[test]
    fn last_forward_point_vanishes_at_the_mean() {
        let x = series(noise(50, 1));
        let m = x.mean();
        let pts = block_sums(&x, &m, BlockScheme::Ebel1, &WeightFn::constant()).unwrap();
        assert!(pts.point(49)[0].abs() < 1e-12);
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
        let s = ebel_statistic(&x, &m, &cfg).unwrap();
        assert!(s.is_finite() && s >= 0.0);
    }

    #[test]
    fn two_scan_uses_one_over_n() {
        let v = noise(40, 2);
        let x = series(v);
        let mu = [0.01];
        let w = WeightFn::linear();
        let pts = block_sums(&x, &mu, BlockScheme::Ebel2, &w).unwrap();
        let expected = -log_el_ratio(&pts).unwrap() / 40.0;
        assert_eq!(expansive_statistic(&x, &mu, BlockScheme::Ebel2, &w).unwrap(), expected);
    }

    #[test]
    fn palindrome_scans_coincide() {
        let mut v = noise(20, 3);
        let mut r = v.clone();
        r.reverse();
        v.extend(r);
        let x = series(v);
        let m = x.mean();
        let w = WeightFn::constant();
        let fwd = block_sums(&x, &m, BlockScheme::Ebel1, &w).unwrap();
        let both = block_sums(&x, &m, BlockScheme::Ebel2, &w).unwrap();
        assert_eq!(&both.as_slice()[..40], fwd.as_slice());
        assert_eq!(&both.as_slice()[40..], fwd.as_slice());
        let doubled = fwd.clone().concat(&fwd).unwrap();
        let s2 = expansive_statistic(&x, &m, BlockScheme::Ebel2, &w).unwrap();
        assert_eq!(s2, -log_el_ratio(&doubled).unwrap() / 40.0);
    }

    #[test]
    fn config_checks_calibration() {
        let table = QuantileTable::reference(BlockScheme::Ebel1, &WeightFn::constant()).unwrap();
        assert!(EbelConfig::new(BlockScheme::Ebel2, WeightFn::constant(), table.clone(), 0.9).is_err());
        assert!(EbelConfig::new(BlockScheme::Ebel1, WeightFn::linear(), table.clone(), 0.9).is_err());
        assert!(EbelConfig::new(BlockScheme::Ebel1, WeightFn::constant(), table.clone(), 0.95).is_err());
        let scaled = WeightFn::constant().scaled(3.0).unwrap();
        assert!(EbelConfig::new(BlockScheme::Ebel1, scaled, table, 0.9).is_ok());
    }

    #[test]
    fn interval_contains_mean_and_hits_threshold() {
        let x = series(noise(200, 4));
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::linear()).unwrap();
        let ci = ebel_ci_mean(&x, &cfg).unwrap();
        let m = x.mean()[0];
        assert!(ci.lower < m && m < ci.upper);
        let at = ebel_statistic(&x, &[ci.lower], &cfg).unwrap();
        assert!((at - cfg.threshold()).abs() < 1e-6, "{at}");
    }

    #[test]
    fn constant_series_interval_is_degenerate() {
        let cfg = EbelConfig::reference(BlockScheme::Ebel2, WeightFn::constant()).unwrap();
        let ci = ebel_ci_mean(&series(vec![2.5; 30]), &cfg).unwrap();
        assert!(ci.degenerate && ci.lower == 2.5);
    }

    #[test]
    fn identity_model_matches_mean_statistic() {
        let x = series(noise(80, 5));
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
        let model = SmoothFunctionModel::identity(1);
        for theta in [-0.05, 0.0, 0.03] {
            assert_eq!(
                ebel_statistic_smooth(&x, &model, &[theta], &cfg).unwrap(),
                ebel_statistic(&x, &[theta], &cfg).unwrap()
            );
        }
    }

    #[test]
    fn square_model_pins_the_mean() {
        // H(mu) = mu^3 is invertible, so the profile is the statistic at the
        // cube root.
        let x = series(noise(80, 6).iter().map(|v| v + 1.0).collect());
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
        let model = SmoothFunctionModel::new(1, 1, |m: &[f64]| vec![m[0] * m[0] * m[0]]).unwrap();
        let s = ebel_statistic_smooth(&x, &model, &[1.0], &cfg).unwrap();
        let direct = ebel_statistic(&x, &[1.0], &cfg).unwrap();
        assert!((s - direct).abs() < 1e-9 * (1.0 + direct));
    }

    #[test]
    fn null_space_is_orthogonal() {
        let j = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, -1.0]);
        let n = null_space(&j);
        assert_eq!(n.shape(), (3, 2));
        assert!((&j * &n).amax() < 1e-12);
        assert!((n.transpose() * &n - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn mean_estimating_function_matches() {
        let x = series(noise(60, 7));
        for scheme in [BlockScheme::Ebel1, BlockScheme::Ebel2] {
            let cfg = EbelConfig::reference(scheme, WeightFn::cosine_bell()).unwrap();
            let ef = EstimatingFunction::mean(1);
            assert_eq!(
                ebel_statistic_ef(&x, &ef, &[0.02], &cfg).unwrap(),
                ebel_statistic(&x, &[0.02], &cfg).unwrap()
            );
        }
    }

    #[test]
    fn zero_estimating_function_is_a_hull_violation() {
        let x = series(noise(30, 8));
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
        let zero = EstimatingFunction::new(1, |_: &[f64], _: &[f64]| vec![0.0]).unwrap();
        assert_eq!(ebel_statistic_ef(&x, &zero, &[0.0], &cfg), Err(Error::HullViolation));
    }

    #[test]
    fn far_mean_is_rejected() {
        let x = series(noise(100, 9));
        let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
        assert!(!ebel_region_member(&x, &[10.0], &cfg).unwrap());
        assert!(ebel_region_member(&x, &x.mean(), &cfg).unwrap());
    }
}
