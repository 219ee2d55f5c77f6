//! Small statistical helpers: empirical quantiles, bootstrap standard errors
//! and chi-square quantiles.

use rand::Rng;
use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF};

use crate::error::{Error, Result};

/// Linear-interpolation quantile (type 7) of an ascending slice. Infinite
/// values sort last and propagate when the interpolation touches them.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let a = sorted[lo];
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return a;
    }
    let b = sorted[lo + 1];
    if b.is_infinite() {
        return b;
    }
    a + frac * (b - a)
}

pub(crate) fn sort_draws(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| a.total_cmp(b));
}

/// Bootstrap standard errors of the quantiles at `levels`.
pub fn bootstrap_quantile_se<R: Rng>(draws: &[f64], levels: &[f64], resamples: usize, rng: &mut R) -> Vec<f64> {
    let n = draws.len();
    let mut acc = vec![Vec::with_capacity(resamples); levels.len()];
    let mut buf = vec![0.0; n];
    for _ in 0..resamples {
        for v in buf.iter_mut() {
            *v = draws[rng.gen_range(0..n)];
        }
        sort_draws(&mut buf);
        for (a, &p) in acc.iter_mut().zip(levels) {
            a.push(quantile_sorted(&buf, p));
        }
    }
    acc.iter()
        .map(|q| {
            if q.iter().any(|v| !v.is_finite()) {
                return f64::INFINITY;
            }
            let m = q.iter().sum::<f64>() / q.len() as f64;
            (q.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (q.len() - 1) as f64).sqrt()
        })
        .collect()
}

/// Lower `p` quantile of the chi-square distribution with `df` degrees of
/// freedom, polished by Newton steps on the CDF.
pub fn chi_square_quantile(df: usize, p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) || df == 0 {
        return Err(Error::Domain(format!("chi-square quantile needs df >= 1 and 0 < p < 1, got df={df}, p={p}")));
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    let mut x = dist.inverse_cdf(p);
    for _ in 0..8 {
        let step = (dist.cdf(x) - p) / dist.pdf(x);
        let next = (x - step).max(x / 2.0);
        if (next - x).abs() <= 1e-15 * x {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

pub fn chi_square_cdf(df: usize, x: f64) -> f64 {
    ChiSquared::new(df as f64).map(|d| d.cdf(x)).unwrap_or(f64::NAN)
}

/// Binomial standard error of a proportion estimated from `n` trials.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
