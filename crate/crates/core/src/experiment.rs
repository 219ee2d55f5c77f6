//! Monte Carlo coverage and power studies for confidence intervals of a
//! process mean.

use std::fmt;

use crate::bel::{bel_statistic, select_block, BlockRule};
use crate::blocking::{BlockScheme, WeightFn};
use crate::error::{Error, Result};
use crate::inference::expansive_statistic;
use crate::limit_law::QuantileTable;
use crate::processes::Process;
use crate::rng::{par_replicates, replicate_rng};
use crate::series::TimeSeries;
use crate::stats::{binomial_se, chi_square_quantile};

/// An interval procedure for a scalar mean.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Expansive blocks calibrated by a limit-law quantile table.
    Ebel {
        scheme: BlockScheme,
        weight: WeightFn,
        calibration: QuantileTable,
    },
    /// Overlapping blocks calibrated by chi-square(1).
    Bel(BlockRule),
}

impl Method {
    /// EBEL calibrated by the reference 90% quantiles.
    pub fn ebel_reference(scheme: BlockScheme, weight: WeightFn) -> Result<Self> {
        let calibration = QuantileTable::reference(scheme, &weight)?;
        Ok(Method::Ebel { scheme, weight, calibration })
    }

    /// Critical value at `level`.
    pub fn threshold(&self, level: f64) -> Result<f64> {
        match self {
            Method::Ebel { scheme, weight, calibration } => {
                if calibration.scheme != *scheme || calibration.weight.kind() != weight.kind() || calibration.dim != 1 {
                    return Err(Error::Calibration(format!("calibration table does not match {self}")));
                }
                calibration
                    .quantile_at(level)
                    .filter(|q| q.is_finite() && *q > 0.0)
                    .ok_or_else(|| Error::Calibration(format!("no calibration quantile at level {level} for {self}")))
            }
            Method::Bel(_) => chi_square_quantile(1, level),
        }
    }

    /// Statistic at each of `mus` for one series, with the block length used
    /// (BEL only).
    fn statistics(&self, x: &TimeSeries, mus: &[f64]) -> Result<(Vec<f64>, Option<usize>)> {
        match self {
            Method::Ebel { scheme, weight, .. } => {
                let v = mus.iter().map(|&m| expansive_statistic(x, &[m], *scheme, weight)).collect::<Result<_>>()?;
                Ok((v, None))
            }
            Method::Bel(rule) => {
                let b = select_block(x, *rule)?.chosen_b;
                let v = mus.iter().map(|&m| bel_statistic(x, &[m], b)).collect::<Result<_>>()?;
                Ok((v, Some(b)))
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ebel { scheme, weight, .. } => write!(f, "{}:{}", scheme.name(), weight.name()),
            Method::Bel(rule) => write!(f, "bel:{rule}"),
        }
    }
}

/// Coverage of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub method: String,
    /// Percentage of replicates whose region contains the true mean.
    pub coverage: f64,
    /// Binomial standard error, in percentage points.
    pub stderr: f64,
    /// Replicates whose statistic at the true mean was infinite.
    pub hull_failures: usize,
    /// Average block length (BEL only).
    pub mean_block: Option<f64>,
}

/// Coverage of several methods on one process and sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub process: String,
    pub n: usize,
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    pub rows: Vec<CoverageRow>,
}

fn check_study(n: usize, level: f64, replicates: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("sample size must be at least 2, got {n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("level {level} must lie in (0, 1)")));
    }
    if replicates == 0 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    Ok(())
}

/// Per-replicate statistics at the shifted means `mu0 - shift_k`.
fn replicate_statistics(
    process: &Process,
    n: usize,
    method: &Method,
    shifts: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Option<usize>)>> {
    let mu0 = process.mean();
    let mus: Vec<f64> = shifts.iter().map(|s| mu0 - s).collect();
    par_replicates(replicates, |i| {
        let mut rng = replicate_rng(seed, i as u64);
        let x = process.simulate(n, &mut rng)?;
        method.statistics(&x, &mus)
    })
    .into_iter()
    .collect()
}

/// Coverage of `method`: the fraction of replicates (stream `(seed, i)`)
/// whose statistic at the true mean is at most the critical value.
pub fn coverage_row(process: &Process, n: usize, method: &Method, level: f64, replicates: usize, seed: u64) -> Result<CoverageRow> {
    check_study(n, level, replicates)?;
    let threshold = method.threshold(level)?;
    let stats = replicate_statistics(process, n, method, &[0.0], replicates, seed)?;
    let covered = stats.iter().filter(|(s, _)| s[0] <= threshold).count();
    let hull_failures = stats.iter().filter(|(s, _)| s[0].is_infinite()).count();
    let blocks: Vec<usize> = stats.iter().filter_map(|(_, b)| *b).collect();
    let mean_block = (!blocks.is_empty()).then(|| blocks.iter().sum::<usize>() as f64 / blocks.len() as f64);
    let p = covered as f64 / replicates as f64;
    Ok(CoverageRow {
        method: method.to_string(),
        coverage: 100.0 * p,
        stderr: 100.0 * binomial_se(p, replicates),
        hull_failures,
        mean_block,
    })
}

/// [`coverage_row`] for each method, all on the same simulated series.
pub fn coverage_experiment(
    process: &Process,
    n: usize,
    methods: &[Method],
    level: f64,
    replicates: usize,
    seed: u64,
) -> Result<CoverageReport> {
    let rows = methods
        .iter()
        .map(|m| coverage_row(process, n, m, level, replicates, seed))
        .collect::<Result<_>>()?;
    Ok(CoverageReport { process: process.to_string(), n, level, replicates, seed, rows })
}

/// Rejection rates along local alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub method: String,
    pub c: Vec<f64>,
    /// Percentage of replicates rejecting the true mean under the shift.
    pub raw: Vec<f64>,
    /// `raw` shifted so that the size equals the nominal `100 (1 - level)`.
    pub adjusted: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Raw rejection rate at `c = 0`.
    pub size: f64,
}

/// Power of `method` against `mu_n = mu_0 + n^{-1/2} Sigma^{1/2} c` for each
/// `c` in `c_grid`. Each replicate draws one series with the true mean and
/// tests `mu_0` on the series translated by `mu_n - mu_0`, so all `c` share
/// the same draws and `c = 0` reproduces the coverage study.
#[allow(clippy::too_many_arguments)]
pub fn power_curve(
    process: &Process,
    n: usize,
    c_grid: &[f64],
    method: &Method,
    level: f64,
    replicates: usize,
    seed: u64,
) -> Result<PowerCurve> {
    check_study(n, level, replicates)?;
    if c_grid.is_empty() || c_grid.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("c grid must be nonempty and finite".into()));
    }
    let sigma2 = process.long_run_variance()?;
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::DegenerateSample(format!(
            "long-run variance of {process} is {sigma2}; local alternatives are undefined"
        )));
    }
    let threshold = method.threshold(level)?;
    let scale = (sigma2 / n as f64).sqrt();
    let mut shifts: Vec<f64> = c_grid.iter().map(|c| c * scale).collect();
    shifts.push(0.0);
    let stats = replicate_statistics(process, n, method, &shifts, replicates, seed)?;
    let rate = |k: usize| {
        let p = stats.iter().filter(|(s, _)| s[k] > threshold).count() as f64 / replicates as f64;
        (100.0 * p, 100.0 * binomial_se(p, replicates))
    };
    let size = rate(c_grid.len()).0;
    // Written so that c = 0 gives the nominal size exactly.
    let nominal = 100.0 - 100.0 * level;
    let (raw, stderr): (Vec<f64>, Vec<f64>) = (0..c_grid.len()).map(rate).unzip();
    let adjusted = raw.iter().map(|r| nominal + (r - size)).collect();
    Ok(PowerCurve { method: method.to_string(), c: c_grid.to_vec(), raw, adjusted, stderr, size })
}

/// Evenly spaced grid `0, step, ..., max`.
pub fn c_grid(max: f64, step: f64) -> Vec<f64> {
    let k = (max / step + 1e-9).floor() as usize;
    (0..=k).map(|i| i as f64 * step).collect()
}
