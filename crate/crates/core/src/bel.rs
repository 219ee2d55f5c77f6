//! Blockwise EL with fixed-length overlapping blocks, chi-square calibration
//! and two data-driven block-length rules.

use std::fmt;

use crate::blocking::ol_block_sums;
use crate::el::log_el_ratio;
use crate::error::{Error, Result};
use crate::interval::{affine_centroid, invert_statistic, Interval};
use crate::series::{mean_std, sample_autocorrelation, TimeSeries};
use crate::stats::chi_square_quantile;

/// Minimum series length for the data-driven rules.
pub const MIN_SELECTION_LEN: usize = 20;

/// Constant of the Bartlett-kernel AR(1) plug-in bandwidth.
const AAR_CONSTANT: f64 = 1.1447;

/// `-(2/b) log R` on the overlapping block sums of length `b`; `+inf` when
/// the origin is outside their convex hull, 0 when every block sum is zero.
pub fn bel_statistic(x: &TimeSeries, mu: &[f64], b: usize) -> Result<f64> {
    let points = ol_block_sums(x, mu, b)?;
    if points.as_slice().iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    Ok(-2.0 / b as f64 * log_el_ratio(&points)?)
}

/// BEL interval `{mu : bel_statistic(mu) <= chi2_{1, level}}` for a scalar
/// series. A constant series gives a degenerate interval at its value.
pub fn bel_ci_mean(x: &TimeSeries, b: usize, level: f64) -> Result<Interval> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: x.dim() });
    }
    if b == 0 || b > x.len() {
        return Err(Error::BlockLength { b, n: x.len() });
    }
    let threshold = chi_square_quantile(1, level)?;
    let (m, sd) = mean_std(x.as_slice());
    let h = if sd > 0.0 { sd } else { 1.0 };
    let center = affine_centroid(&ol_block_sums(x, &[m], b)?, &ol_block_sums(x, &[m + h], b)?, m, h);
    invert_statistic(x.as_slice(), center, threshold, |mu| bel_statistic(x, &[mu], b))
}

/// How a block length is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRule {
    /// Flat-top kernel plug-in.
    Ftk,
    /// Bartlett-kernel AR(1) plug-in.
    Aar,
    Fixed(usize),
}

impl fmt::Display for BlockRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockRule::Ftk => f.write_str("ftk"),
            BlockRule::Aar => f.write_str("aar"),
            BlockRule::Fixed(b) => write!(f, "{b}"),
        }
    }
}

/// A chosen block length with the intermediate estimates behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSelection {
    pub rule: BlockRule,
    pub chosen_b: usize,
    pub diagnostics: Vec<(&'static str, f64)>,
}

impl BlockSelection {
    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }
}

/// Applies `rule` to a scalar series.
pub fn select_block(x: &TimeSeries, rule: BlockRule) -> Result<BlockSelection> {
    match rule {
        BlockRule::Ftk => select_block_ftk(x),
        BlockRule::Aar => select_block_aar(x),
        BlockRule::Fixed(b) => {
            if b == 0 || b > x.len() {
                return Err(Error::BlockLength { b, n: x.len() });
            }
            Ok(BlockSelection { rule, chosen_b: b, diagnostics: Vec::new() })
        }
    }
}

fn check_selection_input(x: &TimeSeries) -> Result<&[f64]> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: x.dim() });
    }
    if x.len() < MIN_SELECTION_LEN {
        return Err(Error::InvalidInput(format!(
            "block selection needs at least {MIN_SELECTION_LEN} observations, got {}",
            x.len()
        )));
    }
    let v = x.as_slice();
    let (_, sd) = mean_std(v);
    let scale = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if sd <= 1e3 * f64::EPSILON * scale || sd == 0.0 {
        return Err(Error::DegenerateSample("series has (numerically) zero variance".into()));
    }
    Ok(v)
}

/// `round(c n^{1/3})` with ties rounded up, clamped to `[1, n/2]`.
fn clamp_block(c: f64, n: usize) -> usize {
    let upper = (n / 2).max(1);
    let raw = (c * (n as f64).cbrt() + 0.5).floor();
    if !raw.is_finite() || raw >= upper as f64 {
        upper
    } else {
        (raw as usize).clamp(1, upper)
    }
}

/// Trapezoidal flat-top taper: 1 on `[0, 1/2]`, linear down to 0 at 1.
fn flat_top(x: f64) -> f64 {
    let x = x.abs();
    if x <= 0.5 {
        1.0
    } else if x <= 1.0 {
        2.0 * (1.0 - x)
    } else {
        0.0
    }
}

fn autocovariances(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let (mean, _) = mean_std(x);
    (0..=max_lag)
        .map(|k| {
            x[k..]
                .iter()
                .zip(&x[..n - k])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Flat-top kernel plug-in rule for the overlapping-block variance estimator.
///
/// With bandwidth `M = n^{1/5}` and taper `lambda`,
/// `g = sum_{|k| <= M} lambda(k/M) gamma(k)` and
/// `G = sum_{|k| <= M} lambda(k/M) |k| gamma(k)`, and
/// `b = (2 G^2 / ((4/3) g^2))^{1/3} n^{1/3}`.
pub fn select_block_ftk(x: &TimeSeries) -> Result<BlockSelection> {
    let v = check_selection_input(x)?;
    let n = v.len();
    let bandwidth = (n as f64).powf(0.2);
    let max_lag = (bandwidth.floor() as usize).min(n - 1);
    let gamma = autocovariances(v, max_lag);
    let mut g = gamma[0];
    let mut g1 = 0.0;
    for (k, &gk) in gamma.iter().enumerate().skip(1) {
        let taper = flat_top(k as f64 / bandwidth);
        g += 2.0 * taper * gk;
        g1 += 2.0 * taper * k as f64 * gk;
    }
    let coef = if g > 0.0 {
        (2.0 * g1 * g1 / (4.0 / 3.0 * g * g)).cbrt()
    } else {
        f64::INFINITY
    };
    Ok(BlockSelection {
        rule: BlockRule::Ftk,
        chosen_b: clamp_block(coef, n),
        diagnostics: vec![
            ("bandwidth", bandwidth),
            ("g_hat", g / gamma[0]),
            ("g1_hat", g1 / gamma[0]),
            ("coefficient", coef),
        ],
    })
}

/// AR(1)-approximation plug-in rule with the Bartlett kernel:
/// `b = 1.1447 (alpha n)^{1/3}`, `alpha = 4 rho^2 / ((1 - rho)^2 (1 + rho)^2)`.
pub fn select_block_aar(x: &TimeSeries) -> Result<BlockSelection> {
    let v = check_selection_input(x)?;
    let n = v.len();
    let rho = sample_autocorrelation(v, 1);
    let alpha = 4.0 * rho * rho / ((1.0 - rho).powi(2) * (1.0 + rho).powi(2));
    let coef = AAR_CONSTANT * alpha.cbrt();
    Ok(BlockSelection {
        rule: BlockRule::Aar,
        chosen_b: clamp_block(coef, n),
        diagnostics: vec![("rho_hat", rho), ("alpha_hat", alpha), ("coefficient", coef)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::el::{log_el_ratio, PointSet};

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::univariate(v).unwrap()
    }

    #[test]
    fn unit_block_is_plain_el() {
        let v = vec![0.3, -1.2, 0.8, 2.1, -0.4, 0.05];
        let stat = bel_statistic(&series(v.clone()), &[0.2], 1).unwrap();
        let raw = PointSet::scalar(v.iter().map(|x| x - 0.2).collect()).unwrap();
        assert_eq!(stat, -2.0 * log_el_ratio(&raw).unwrap());
    }

    #[test]
    fn constant_series_at_its_value() {
        let x = series(vec![4.0; 30]);
        assert_eq!(bel_statistic(&x, &[4.0], 3).unwrap(), 0.0);
        let ci = bel_ci_mean(&x, 3, 0.9).unwrap();
        assert!(ci.degenerate && ci.lower == 4.0 && ci.upper == 4.0);
    }

    #[test]
    fn rejects_bad_block_lengths() {
        let x = series(vec![1.0, 2.0, 3.0]);
        assert!(matches!(bel_statistic(&x, &[2.0], 0), Err(Error::BlockLength { .. })));
        assert!(matches!(bel_statistic(&x, &[2.0], 4), Err(Error::BlockLength { .. })));
    }

    #[test]
    fn hull_failure_is_infinite() {
        let x = series(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(bel_statistic(&x, &[10.0], 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn interval_contains_sample_mean() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let x = series(v);
        let m = x.mean()[0];
        let ci = bel_ci_mean(&x, 5, 0.9).unwrap();
        assert!(ci.lower < m && m < ci.upper);
        let q = chi_square_quantile(1, 0.9).unwrap();
        assert!((bel_statistic(&x, &[ci.upper], 5).unwrap() - q).abs() < 1e-6);
    }

    #[test]
    fn aar_small_correlation_gives_one() {
        let v: Vec<f64> = (0..40).map(|i| if i % 4 < 2 { 1.0 } else { -1.0 }).collect();
        assert!(sample_autocorrelation(&v, 1).abs() < 0.05);
        assert_eq!(select_block_aar(&series(v)).unwrap().chosen_b, 1);
    }

    #[test]
    fn clamp_rounds_half_up() {
        assert_eq!(clamp_block(1.5 / 1000f64.cbrt(), 1000), 2);
        assert_eq!(clamp_block(0.0, 100), 1);
        assert_eq!(clamp_block(f64::INFINITY, 100), 50);
        assert_eq!(clamp_block(1e9, 101), 50);
    }

    #[test]
    fn selection_rejects_short_and_constant() {
        assert!(select_block_ftk(&series(vec![1.0; 10])).is_err());
        assert!(matches!(select_block_aar(&series(vec![2.0; 40])), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn flat_top_shape() {
        assert_eq!(flat_top(0.3), 1.0);
        assert_eq!(flat_top(0.75), 0.5);
        assert_eq!(flat_top(1.2), 0.0);
    }
}
