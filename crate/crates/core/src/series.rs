//! Multivariate time series stored row-major.

use crate::error::{Error, Result};

/// An `n x d` sample `X_1, ..., X_n`, one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    data: Vec<f64>,
    dim: usize,
}

impl TimeSeries {
    /// Builds a series from row-major data with `dim` columns.
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("series dimension must be >= 1".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.len() % dim,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("series contains a non-finite value".into()));
        }
        Ok(Self { data, dim })
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(data, dim)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + DoubleEndedIterator {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (acc, v) in m.iter_mut().zip(r) {
                *acc += v;
            }
        }
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Applies `x -> A x + v` to every row; `a` is row-major `d x d`.
    pub fn affine(&self, a: &[f64], v: &[f64]) -> Self {
        let d = self.dim;
        let mut data = Vec::with_capacity(self.data.len());
        for r in self.rows() {
            for i in 0..d {
                let s: f64 = (0..d).map(|j| a[i * d + j] * r[j]).sum();
                data.push(s + v[i]);
            }
        }
        Self { data, dim: d }
    }
}

/// Sample mean and (biased) standard deviation of a univariate slice.
pub(crate) fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Sample autocorrelation at `lag` using the usual `1/n` autocovariance.
pub fn sample_autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    if lag >= n {
        return 0.0;
    }
    let (mean, _) = mean_std(x);
    let c0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if c0 == 0.0 {
        return 0.0;
    }
    let ck: f64 = x[lag..]
        .iter()
        .zip(&x[..n - lag])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    ck / c0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(TimeSeries::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(TimeSeries::univariate(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn mean_and_rows() {
        let x = TimeSeries::from_rows(&[[1.0, 2.0], [3.0, 6.0]]).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.row(1), &[3.0, 6.0]);
        assert_eq!(x.mean(), vec![2.0, 4.0]);
    }
}
