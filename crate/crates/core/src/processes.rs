//! Stationary test processes with known means and long-run variances.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Pareto, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats::{chi_square_cdf, chi_square_quantile};

pub const DEFAULT_BURN_IN: usize = 1000;

/// Smallest admissible modulus of an AR polynomial root.
const CAUSAL_MARGIN: f64 = 1.0 + 1e-10;

/// I.i.d. innovation law, each centered to mean zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Innovation {
    /// `Z^2 - 1` with `Z ~ N(0, 1)`.
    #[default]
    CenteredChiSquare,
    StandardNormal,
    /// `B - 1/2` with `B ~ Bernoulli(1/2)`.
    CenteredBernoulli,
    /// Pareto with scale 1 and shape 3, minus its mean 3/2.
    CenteredPareto,
}

impl Innovation {
    pub const ALL: [Innovation; 4] = [
        Innovation::CenteredChiSquare,
        Innovation::StandardNormal,
        Innovation::CenteredBernoulli,
        Innovation::CenteredPareto,
    ];

    pub fn variance(self) -> f64 {
        match self {
            Innovation::CenteredChiSquare => 2.0,
            Innovation::StandardNormal => 1.0,
            Innovation::CenteredBernoulli => 0.25,
            Innovation::CenteredPareto => 0.75,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Innovation::CenteredChiSquare => "chisq",
            Innovation::StandardNormal => "normal",
            Innovation::CenteredBernoulli => "bernoulli",
            Innovation::CenteredPareto => "pareto",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Innovation::CenteredChiSquare => {
                let z: f64 = rng.sample(StandardNormal);
                z * z - 1.0
            }
            Innovation::StandardNormal => rng.sample(StandardNormal),
            Innovation::CenteredBernoulli => {
                if rng.gen_bool(0.5) {
                    0.5
                } else {
                    -0.5
                }
            }
            Innovation::CenteredPareto => {
                let p = Pareto::new(1.0, 3.0).expect("valid Pareto parameters");
                p.sample(rng) - 1.5
            }
        }
    }
}

/// `X_t = sum_i phi_i X_{t-i} + e_t + sum_j theta_j e_{t-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaSpec {
    phi: Vec<f64>,
    theta: Vec<f64>,
    innovation: Innovation,
    burn_in: usize,
}

impl ArmaSpec {
    /// Validates finiteness and causality.
    pub fn new(phi: Vec<f64>, theta: Vec<f64>, innovation: Innovation) -> Result<Self> {
        if phi.iter().chain(&theta).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("ARMA coefficients must be finite".into()));
        }
        let min_root_modulus = min_ar_root_modulus(&phi);
        if min_root_modulus < CAUSAL_MARGIN {
            return Err(Error::NonCausal { min_root_modulus });
        }
        Ok(Self { phi, theta, innovation, burn_in: DEFAULT_BURN_IN })
    }

    pub fn white_noise(innovation: Innovation) -> Self {
        Self { phi: Vec::new(), theta: Vec::new(), innovation, burn_in: DEFAULT_BURN_IN }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_innovation(mut self, innovation: Innovation) -> Self {
        self.innovation = innovation;
        self
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn innovation(&self) -> Innovation {
        self.innovation
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }
}

impl fmt::Display for ArmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match (self.phi.is_empty(), self.theta.is_empty()) {
            (true, true) => write!(f, "wn"),
            (false, true) => write!(f, "ar:{}", join(&self.phi)),
            (true, false) => write!(f, "ma:{}", join(&self.theta)),
            (false, false) => write!(f, "arma:{}|{}", join(&self.phi), join(&self.theta)),
        }?;
        write!(f, "@{}", self.innovation.name())
    }
}

/// Smallest modulus among the roots of `1 - phi_1 z - ... - phi_p z^p`
/// (`+inf` when `p = 0`), via the eigenvalues of the companion matrix.
pub fn min_ar_root_modulus(phi: &[f64]) -> f64 {
    let p = phi.len();
    if p == 0 || phi.iter().all(|&c| c == 0.0) {
        return f64::INFINITY;
    }
    let mut c = DMatrix::<f64>::zeros(p, p);
    for (j, &v) in phi.iter().enumerate() {
        c[(0, j)] = v;
    }
    for i in 1..p {
        c[(i, i - 1)] = 1.0;
    }
    let largest = c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if largest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest
    }
}

/// A path of length `n` after discarding `burn_in` values started from a
/// zero state.
pub fn simulate_arma<R: Rng + ?Sized>(spec: &ArmaSpec, n: usize, rng: &mut R) -> Result<TimeSeries> {
    let min_root_modulus = min_ar_root_modulus(&spec.phi);
    if min_root_modulus < CAUSAL_MARGIN {
        return Err(Error::NonCausal { min_root_modulus });
    }
    if n == 0 {
        return Err(Error::InvalidInput("series length must be positive".into()));
    }
    let (p, q) = (spec.phi.len(), spec.theta.len());
    let total = spec.burn_in + n;
    let mut x = vec![0.0; total + p];
    let mut e = vec![0.0; total + q];
    for t in 0..total {
        let te = t + q;
        e[te] = spec.innovation.sample(rng);
        let mut v = e[te];
        for (j, th) in spec.theta.iter().enumerate() {
            v += th * e[te - j - 1];
        }
        let tx = t + p;
        for (i, ph) in spec.phi.iter().enumerate() {
            v += ph * x[tx - i - 1];
        }
        x[tx] = v;
    }
    TimeSeries::univariate(x.split_off(p + spec.burn_in))
}

/// `sigma^2 (1 + sum theta)^2 / (1 - sum phi)^2`.
pub fn long_run_variance(spec: &ArmaSpec) -> Result<f64> {
    let min_root_modulus = min_ar_root_modulus(&spec.phi);
    if min_root_modulus < CAUSAL_MARGIN {
        return Err(Error::NonCausal { min_root_modulus });
    }
    let ma: f64 = 1.0 + spec.theta.iter().sum::<f64>();
    let ar: f64 = 1.0 - spec.phi.iter().sum::<f64>();
    Ok(spec.innovation.variance() * ma * ma / (ar * ar))
}

/// Threshold of the MA(1)* process: the 0.8 quantile of chi-square(1).
pub fn ma1_star_threshold() -> f64 {
    chi_square_quantile(1, 0.8).expect("valid chi-square quantile")
}

/// `X_t = e_t + 0.5 I(e_{t-1} < q) - 1.4`, `e_t ~ chi-square(1)` i.i.d.
pub fn simulate_ma1_star<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidInput("series length must be positive".into()));
    }
    let q = ma1_star_threshold();
    let draw = |rng: &mut R| {
        let z: f64 = rng.sample(StandardNormal);
        z * z
    };
    let mut prev = draw(rng);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let e = draw(rng);
        out.push(e + if prev < q { 0.5 } else { 0.0 } - 1.4);
        prev = e;
    }
    TimeSeries::univariate(out)
}

/// Long-run variance of MA(1)*: `Var X + 2 Cov(X_t, X_{t+1})` with
/// `Var X = 2 + 0.25 * 0.16` and `Cov = 0.5 (E[e; e < q] - 0.8)`, where
/// `E[e; e < q]` for chi-square(1) equals the chi-square(3) cdf at `q`.
pub fn ma1_star_long_run_variance() -> f64 {
    let q = ma1_star_threshold();
    2.04 + chi_square_cdf(3, q) - 0.8
}

/// A scalar test process with analytic mean and long-run variance.
#[derive(Debug, Clone, PartialEq)]
pub enum Process {
    Arma(ArmaSpec),
    Ma1Star,
}

impl Process {
    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<TimeSeries> {
        match self {
            Process::Arma(spec) => simulate_arma(spec, n, rng),
            Process::Ma1Star => simulate_ma1_star(n, rng),
        }
    }

    /// The true mean, zero for every process here.
    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn long_run_variance(&self) -> Result<f64> {
        match self {
            Process::Arma(spec) => long_run_variance(spec),
            Process::Ma1Star => Ok(ma1_star_long_run_variance()),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Arma(spec) => spec.fmt(f),
            Process::Ma1Star => f.write_str("ma1star"),
        }
    }
}

/// The coverage-study processes, all driven by centered chi-square(1)
/// innovations, with display labels.
pub fn coverage_study_processes() -> Vec<(&'static str, Process)> {
    let arma = |phi: &[f64], theta: &[f64]| {
        Process::Arma(ArmaSpec::new(phi.to_vec(), theta.to_vec(), Innovation::CenteredChiSquare).expect("causal"))
    };
    vec![
        ("MA(2) 0.4,-0.6", arma(&[], &[0.4, -0.6])),
        ("MA(1)*", Process::Ma1Star),
        ("MA(3) -1,-1,-1", arma(&[], &[-1.0, -1.0, -1.0])),
        ("ARMA(1,2) 0.9,-0.6,-0.3", arma(&[0.9], &[-0.6, -0.3])),
        ("AR(1) -0.7", arma(&[-0.7], &[])),
        ("AR(1) 0.9", arma(&[0.9], &[])),
        ("ARMA(1,1) 0.7,-0.5", arma(&[0.7], &[-0.5])),
        ("ARMA(2,2) 0.3,0.3,-0.3,-0.1", arma(&[0.3, 0.3], &[-0.3, -0.1])),
        ("ARMA(2,2) 0.5,0.3,0.3,-0.9", arma(&[0.5, 0.3], &[0.3, -0.9])),
        ("MA(2) 0.1,2", arma(&[], &[0.1, 2.0])),
    ]
}

/// `X_t = Z_t + 0.5 Z_{t-1} + 0.3 Z_{t-2}` with standard normal `Z_t`, the
/// block-length sensitivity example.
pub fn block_sensitivity_process() -> Process {
    Process::Arma(ArmaSpec::new(Vec::new(), vec![0.5, 0.3], Innovation::StandardNormal).expect("causal"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use crate::series::sample_autocorrelation;

    #[test]
    fn causality_check() {
        assert!(ArmaSpec::new(vec![0.9], vec![], Innovation::StandardNormal).is_ok());
        assert!(matches!(
            ArmaSpec::new(vec![1.0], vec![], Innovation::StandardNormal),
            Err(Error::NonCausal { .. })
        ));
        // 1 - 0.5 z - 0.5 z^2 has a unit root.
        assert!(ArmaSpec::new(vec![0.5, 0.5], vec![], Innovation::StandardNormal).is_err());
        assert!((min_ar_root_modulus(&[0.5]) - 2.0).abs() < 1e-12);
        assert_eq!(min_ar_root_modulus(&[]), f64::INFINITY);
    }

    #[test]
    fn closed_form_long_run_variances() {
        let lrv = |phi: Vec<f64>, theta: Vec<f64>| {
            long_run_variance(&ArmaSpec::new(phi, theta, Innovation::StandardNormal).unwrap()).unwrap()
        };
        assert_eq!(lrv(vec![], vec![]), 1.0);
        assert_eq!(lrv(vec![], vec![-1.0]), 0.0);
        assert!((lrv(vec![0.5], vec![]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn white_noise_is_uncorrelated() {
        let x = simulate_arma(&ArmaSpec::white_noise(Innovation::StandardNormal), 2000, &mut replicate_rng(1, 0)).unwrap();
        assert!(sample_autocorrelation(x.as_slice(), 1).abs() < 0.05);
    }

    #[test]
    fn ar1_autocorrelation() {
        let spec = ArmaSpec::new(vec![0.9], vec![], Innovation::StandardNormal).unwrap();
        let x = simulate_arma(&spec, 5000, &mut replicate_rng(2, 0)).unwrap();
        assert!((sample_autocorrelation(x.as_slice(), 1) - 0.9).abs() < 0.03);
    }

    #[test]
    fn ma2_cuts_off() {
        let spec = ArmaSpec::new(vec![], vec![0.4, -0.6], Innovation::CenteredChiSquare).unwrap();
        let x = simulate_arma(&spec, 5000, &mut replicate_rng(3, 0)).unwrap();
        assert!(sample_autocorrelation(x.as_slice(), 3).abs() < 0.04);
    }

    #[test]
    fn determinism() {
        let spec = ArmaSpec::new(vec![0.3, 0.3], vec![-0.3, -0.1], Innovation::CenteredPareto).unwrap();
        let a = simulate_arma(&spec, 300, &mut replicate_rng(4, 7)).unwrap();
        let b = simulate_arma(&spec, 300, &mut replicate_rng(4, 7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 300);
    }

    #[test]
    fn innovation_moments() {
        let mut rng = replicate_rng(5, 0);
        for inn in Innovation::ALL {
            let n = 100_000;
            let v: Vec<f64> = (0..n).map(|_| inn.sample(&mut rng)).collect();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            assert!(mean.abs() < 0.02, "{inn:?} mean {mean}");
            // Pareto(3) has infinite fourth moment, so its sample variance is noisy.
            let tol = if inn == Innovation::CenteredPareto { 0.25 } else { 0.05 };
            assert!((var / inn.variance() - 1.0).abs() < tol, "{inn:?} var {var}");
        }
    }

    #[test]
    fn ma1_star_threshold_inverts_cdf() {
        let q = ma1_star_threshold();
        assert!((chi_square_cdf(1, q) - 0.8).abs() < 1e-10);
    }

    #[test]
    fn ma1_star_mean_and_memory() {
        let x = simulate_ma1_star(50_000, &mut replicate_rng(6, 0)).unwrap();
        assert!(x.mean()[0].abs() < 0.03);
        assert!(sample_autocorrelation(x.as_slice(), 2).abs() < 0.03);
    }

    #[test]
    fn process_labels() {
        let all = coverage_study_processes();
        assert_eq!(all.len(), 10);
        assert_eq!(all[1].1.to_string(), "ma1star");
        assert_eq!(all[0].1.to_string(), "ma:0.4,-0.6@chisq");
    }
}
