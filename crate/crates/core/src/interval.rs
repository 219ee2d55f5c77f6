//! Confidence intervals obtained by inverting a scalar test statistic.

use std::fmt;

use crate::el::PointSet;
use crate::error::{Error, Result};
use crate::series::mean_std;

/// Outward steps per sample standard error before switching to doubling.
const LINEAR_STEPS: usize = 400;
const STEP_FRACTION: f64 = 0.25;
const BISECTIONS: usize = 60;

/// A closed interval for a scalar mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    /// Set when the sample is constant and the interval collapses to a point.
    pub degenerate: bool,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// `{mu : stat(mu) <= threshold}` for the connected piece around `center`,
/// a point where the statistic is minimal.
///
/// Each side is bracketed by stepping outward from `center` in units of
/// `s / sqrt(n)` (doubling after a while) until the statistic exceeds the
/// threshold or is infinite, then bisected. A constant sample gives a
/// degenerate interval at its value.
pub(crate) fn invert_statistic<F>(x: &[f64], center: f64, threshold: f64, stat: F) -> Result<Interval>
where
    F: Fn(f64) -> Result<f64>,
{
    if x.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 observations".into()));
    }
    let (mean, sd) = mean_std(x);
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sd <= f64::EPSILON * scale || sd == 0.0 {
        return Ok(Interval { lower: mean, upper: mean, degenerate: true });
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidInput(format!("threshold {threshold} must be nonnegative")));
    }
    let outside = |mu: f64| -> Result<bool> {
        let v = stat(mu)?;
        Ok(v.is_nan() || v > threshold)
    };
    if !center.is_finite() || outside(center)? {
        return Err(Error::DegenerateSample(format!("statistic exceeds the threshold at its minimizer {center}")));
    }
    let step = STEP_FRACTION * sd / (x.len() as f64).sqrt();
    let mut ends = [0.0; 2];
    for (k, dir) in [-1.0, 1.0].into_iter().enumerate() {
        let mut inside = 0.0;
        let mut delta = step;
        let mut steps = 0;
        let out = loop {
            let cand = inside + delta;
            if outside(center + dir * cand)? {
                break cand;
            }
            inside = cand;
            steps += 1;
            if steps >= LINEAR_STEPS {
                delta *= 2.0;
            }
            if !cand.is_finite() || cand > 1e12 * sd {
                return Err(Error::Domain("confidence interval is unbounded".into()));
            }
        };
        let (mut lo, mut hi) = (inside, out);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if outside(center + dir * mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ends[k] = center + dir * lo;
    }
    Ok(Interval { lower: ends[0], upper: ends[1], degenerate: false })
}

/// Root of `mu -> sum_i T_i(mu)` for block sums that are affine in a scalar
/// `mu`, given the point sets at `m` and `m + h`. With all points summing to
/// zero the EL multiplier is zero, so the statistic vanishes there.
pub(crate) fn affine_centroid(at_m: &PointSet, at_m_plus_h: &PointSet, m: f64, h: f64) -> f64 {
    let s0: f64 = at_m.as_slice().iter().sum();
    let s1: f64 = at_m_plus_h.as_slice().iter().sum();
    m + h * s0 / (s0 - s1)
}
