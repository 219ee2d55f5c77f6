//! Weight functions and the block-sum constructions fed to the EL solver.

use std::f64::consts::PI;
use std::fmt;

use crate::el::PointSet;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Grid used to check that a weight is positive just to the right of zero.
const VALIDATION_GRID: usize = 1024;

/// Shape of a weight function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `w(t) = 1`
    Constant,
    /// `w(t) = t`
    Linear,
    /// `w(t) = (1 - cos(2 pi t)) / 2`
    CosineBell,
    /// Piecewise linear through `(t, w(t))` knots spanning `[0, 1]`.
    Tabulated(Vec<(f64, f64)>),
}

/// A nonnegative, continuous weight on `[0, 1]` that is strictly positive on
/// some interval `(0, c)`. Construct through [`WeightFn::new`] or the named
/// shapes so the conditions are checked once.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFn {
    kind: WeightKind,
    scale: f64,
}

impl WeightFn {
    pub fn new(kind: WeightKind) -> Result<Self> {
        let w = Self { kind, scale: 1.0 };
        w.validate()?;
        Ok(w)
    }

    pub fn constant() -> Self {
        Self { kind: WeightKind::Constant, scale: 1.0 }
    }

    pub fn linear() -> Self {
        Self { kind: WeightKind::Linear, scale: 1.0 }
    }

    pub fn cosine_bell() -> Self {
        Self { kind: WeightKind::CosineBell, scale: 1.0 }
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(WeightKind::Tabulated(knots))
    }

    /// `c * w` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidWeight(format!("scale factor {c} must be positive")));
        }
        Ok(Self {
            kind: self.kind.clone(),
            scale: self.scale * c,
        })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Short name used in reports and calibration lookups.
    pub fn name(&self) -> &'static str {
        match self.kind {
            WeightKind::Constant => "constant",
            WeightKind::Linear => "linear",
            WeightKind::CosineBell => "cosine_bell",
            WeightKind::Tabulated(_) => "tabulated",
        }
    }

    fn validate(&self) -> Result<()> {
        if let WeightKind::Tabulated(knots) = &self.kind {
            if knots.len() < 2 {
                return Err(Error::InvalidWeight("need at least two knots".into()));
            }
            if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                return Err(Error::InvalidWeight("knots must be finite".into()));
            }
            if knots.windows(2).any(|k| k[1].0 <= k[0].0) {
                return Err(Error::InvalidWeight("knot positions must increase strictly".into()));
            }
            if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
                return Err(Error::InvalidWeight("knots must span [0, 1]".into()));
            }
            if knots.iter().any(|&(_, v)| v < 0.0) {
                return Err(Error::InvalidWeight("weights must be nonnegative".into()));
            }
        }
        let positive_near_zero = (1..=2).all(|j| self.raw(j as f64 / VALIDATION_GRID as f64) > 0.0);
        if !positive_near_zero {
            return Err(Error::InvalidWeight(
                "weight must be strictly positive on an interval (0, c)".into(),
            ));
        }
        Ok(())
    }

    fn raw(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant => 1.0,
            WeightKind::Linear => t,
            WeightKind::CosineBell => (1.0 - (2.0 * PI * t).cos()) / 2.0,
            WeightKind::Tabulated(knots) => interpolate(knots, t),
        }
    }

    /// `w(t)` for `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("weight argument {t} outside [0, 1]")));
        }
        Ok(self.scale * self.raw(t))
    }

    /// `w(i / n)` for `i = 1..=n`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| self.scale * self.raw(i as f64 / n as f64))
            .collect()
    }
}

/// Writes the parseable spec, e.g. `linear`, `tabulated:0:0,1:1` or
/// `constant*2`.
impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        if let WeightKind::Tabulated(knots) = &self.kind {
            let parts: Vec<String> = knots.iter().map(|(t, w)| format!("{t}:{w}")).collect();
            write!(f, ":{}", parts.join(","))?;
        }
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        Ok(())
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|&(x, _)| x <= t);
    if idx == 0 {
        return knots[0].1;
    }
    if idx == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (x0, y0) = knots[idx - 1];
    let (x1, y1) = knots[idx];
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

/// `w(t)` for `t` in `[0, 1]`.
pub fn weight_eval(w: &WeightFn, t: f64) -> Result<f64> {
    w.eval(t)
}

/// Blocking rule for an EL statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockScheme {
    /// Forward expansive blocks `(X_1), (X_1, X_2), ..., (X_1..X_n)`.
    Ebel1,
    /// Forward expansive blocks plus the reversed scan from `X_n`.
    Ebel2,
    /// Maximally overlapping blocks of fixed length `b`.
    Bel(usize),
}

impl BlockScheme {
    pub fn name(&self) -> String {
        match self {
            BlockScheme::Ebel1 => "ebel1".into(),
            BlockScheme::Ebel2 => "ebel2".into(),
            BlockScheme::Bel(b) => format!("bel{b}"),
        }
    }
}

fn check_dims(x: &TimeSeries, mu: &[f64]) -> Result<()> {
    if mu.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: mu.len(),
        });
    }
    Ok(())
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 observations, got {n}")));
    }
    Ok(())
}

/// Centered observations `X_j - mu`, row-major.
pub(crate) fn centered(x: &TimeSeries, mu: &[f64]) -> Vec<f64> {
    x.rows()
        .flat_map(|r| r.iter().zip(mu).map(|(v, m)| v - m))
        .collect()
}

/// Weighted partial sums of row-major `increments`: `w_i * sum_{j <= i} g_j`,
/// scanning forward, or backward from the last row when `reverse` is set.
pub(crate) fn expansive_sums(increments: &[f64], dim: usize, weights: &[f64], reverse: bool, out: &mut Vec<f64>) {
    let n = increments.len() / dim;
    let mut acc = vec![0.0; dim];
    for (i, &wi) in weights.iter().enumerate().take(n) {
        let j = if reverse { n - 1 - i } else { i };
        let row = &increments[j * dim..(j + 1) * dim];
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
        out.extend(acc.iter().map(|a| wi * a));
    }
}

/// Expansive block sums of `increments` under `scheme` (EBEL1 or EBEL2).
pub(crate) fn expansive_points(increments: Vec<f64>, dim: usize, w: &WeightFn, backward: bool) -> PointSet {
    let n = increments.len() / dim;
    let weights = w.grid(n);
    let mut out = Vec::with_capacity(if backward { 2 } else { 1 } * increments.len());
    expansive_sums(&increments, dim, &weights, false, &mut out);
    if backward {
        expansive_sums(&increments, dim, &weights, true, &mut out);
    }
    PointSet::from_raw(out, dim)
}

/// `T_i = w(i/n) sum_{j<=i} (X_j - mu)` for `i = 1..n`.
pub fn forward_block_sums(x: &TimeSeries, mu: &[f64], w: &WeightFn) -> Result<PointSet> {
    check_dims(x, mu)?;
    check_len(x.len())?;
    Ok(expansive_points(centered(x, mu), x.dim(), w, false))
}

/// The `n` forward sums followed by `T_{n+i} = w(i/n) sum_{j<=i} (X_{n-j+1} - mu)`.
pub fn forward_backward_block_sums(x: &TimeSeries, mu: &[f64], w: &WeightFn) -> Result<PointSet> {
    check_dims(x, mu)?;
    check_len(x.len())?;
    Ok(expansive_points(centered(x, mu), x.dim(), w, true))
}

/// Overlapping block sums `B_i = sum_{j=i}^{i+b-1} (X_j - mu)`, `i = 1..n-b+1`.
pub fn ol_block_sums(x: &TimeSeries, mu: &[f64], b: usize) -> Result<PointSet> {
    check_dims(x, mu)?;
    let n = x.len();
    if b == 0 || b > n {
        return Err(Error::BlockLength { b, n });
    }
    let d = x.dim();
    let c = centered(x, mu);
    let blocks = n - b + 1;
    let mut out = vec![0.0; blocks * d];
    for i in 0..blocks {
        let dst = &mut out[i * d..(i + 1) * d];
        for row in c[i * d..(i + b) * d].chunks_exact(d) {
            for (o, v) in dst.iter_mut().zip(row) {
                *o += v;
            }
        }
    }
    Ok(PointSet::from_raw(out, d))
}

/// Block sums for any scheme.
pub fn block_sums(x: &TimeSeries, mu: &[f64], scheme: BlockScheme, w: &WeightFn) -> Result<PointSet> {
    match scheme {
        BlockScheme::Ebel1 => forward_block_sums(x, mu, w),
        BlockScheme::Ebel2 => forward_backward_block_sums(x, mu, w),
        BlockScheme::Bel(b) => ol_block_sums(x, mu, b),
    }
}
