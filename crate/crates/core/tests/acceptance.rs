//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! with a nonzero status if any criterion fails.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use ebel::bel::{bel_statistic, select_block_aar, select_block_ftk, BlockRule};
use ebel::blocking::{BlockScheme, WeightFn};
use ebel::el::{solve_el, PointSet, SolverOptions};
use ebel::experiment::{coverage_row, Method};
use ebel::inference::{ebel_ci_mean, expansive_statistic, EbelConfig};
use ebel::limit_law::{estimate_quantiles, limit_draw, simulate_draws, Discretization};
use ebel::processes::{block_sensitivity_process, Process};
use ebel::rng::replicate_rng;
use ebel::series::TimeSeries;
use ebel::stats::{bootstrap_quantile_se, chi_square_quantile, quantile_sorted};
use ebel::Error;

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn normal_series(n: usize, seed: u64, index: u64) -> TimeSeries {
    let mut rng = replicate_rng(seed, index);
    TimeSeries::univariate((0..n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

/// Limit-law 90th percentiles at m = 1000 from 50,000 draws.
fn table1() -> Outcome {
    let cases = [
        (BlockScheme::Ebel1, WeightFn::constant(), 2.51, 0.10),
        (BlockScheme::Ebel2, WeightFn::constant(), 2.50, 0.10),
        (BlockScheme::Ebel1, WeightFn::linear(), 5.64, 0.20),
        (BlockScheme::Ebel2, WeightFn::linear(), 4.37, 0.15),
        (BlockScheme::Ebel1, WeightFn::cosine_bell(), 7.00, 0.35),
        (BlockScheme::Ebel2, WeightFn::cosine_bell(), 3.42, 0.20),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, (scheme, w, target, tol)) in cases.into_iter().enumerate() {
        let t = estimate_quantiles(scheme, &w, 1, &[0.9], 50_000, 1000, SEED + k as u64).unwrap();
        let q = t.quantiles[0];
        let ok = (q - target).abs() <= tol;
        pass &= ok;
        parts.push(format!("{}/{} {:.3}(se {:.3}) vs {target}±{tol}", scheme.name(), w.name(), q, t.mc_stderr[0]));
    }
    outcome(pass, parts.join("; "))
}

/// Coverage of 90% intervals at n = 250, 1000 replicates.
fn table2() -> Outcome {
    let ma2: Process = "ma:0.4,-0.6".parse().unwrap();
    let ar_neg: Process = "ar:-0.7".parse().unwrap();
    let ar_pos: Process = "ar:0.9".parse().unwrap();
    let cases = [
        (&ma2, BlockScheme::Ebel1, WeightFn::constant(), 90.6, 2.5),
        (&ma2, BlockScheme::Ebel2, WeightFn::linear(), 91.4, 2.5),
        (&ar_neg, BlockScheme::Ebel1, WeightFn::constant(), 89.2, 2.5),
        (&ar_pos, BlockScheme::Ebel1, WeightFn::constant(), 67.0, 4.0),
        (&ar_pos, BlockScheme::Ebel2, WeightFn::constant(), 79.0, 4.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, scheme, w, target, tol) in cases {
        let m = Method::ebel_reference(scheme, w).unwrap();
        let row = coverage_row(p, 250, &m, 0.9, 1000, SEED).unwrap();
        let ok = (row.coverage - target).abs() <= tol;
        pass &= ok;
        parts.push(format!("{p} {m} {:.1} vs {target}±{tol}", row.coverage));
    }
    outcome(pass, parts.join("; "))
}

/// Golden-section minimization of `-sum log(1 + a t)` over the open
/// feasible interval. Probe points are compared through
/// `f(x1) - f(x2) = -sum log1p((x1 - x2) t / (1 + x2 t))`, which keeps full
/// relative precision where `f` is flat.
fn golden_section(t: &[f64]) -> (f64, f64) {
    let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (-1.0 / max, -1.0 / min);
    let f = |a: f64| -> f64 { -t.iter().map(|&ti| (a * ti).ln_1p()).sum::<f64>() };
    let below = |x1: f64, x2: f64| -> bool {
        let diff: f64 = -t.iter().map(|&ti| ((x1 - x2) * ti / (1.0 + x2 * ti)).ln_1p()).sum::<f64>();
        diff <= 0.0 || diff.is_nan()
    };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    for _ in 0..2000 {
        if below(x1, x2) {
            hi = x2;
            x2 = x1;
            x1 = hi - r * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + r * (hi - lo);
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, f(a))
}

fn oracle() -> Outcome {
    let mut rng = replicate_rng(SEED, 3);
    let (mut worst_lambda, mut worst_ratio) = (0.0f64, 0.0f64);
    let mut mismatched_hull = 0;
    for _ in 0..1000 {
        let size = rng.gen_range(2..=6);
        let t: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
        let has_both = t.iter().any(|&v| v > 0.0) && t.iter().any(|&v| v < 0.0);
        match solve_el(&PointSet::scalar(t.clone()).unwrap(), SolverOptions::default()) {
            Ok(sol) if has_both => {
                let (a, f) = golden_section(&t);
                worst_lambda = worst_lambda.max((sol.lambda[0] - a).abs());
                worst_ratio = worst_ratio.max((sol.log_ratio - f).abs());
            }
            Err(Error::HullViolation) if !has_both => {}
            _ => mismatched_hull += 1,
        }
    }
    let pass = worst_lambda <= 1e-6 && worst_ratio <= 1e-8 && mismatched_hull == 0;
    outcome(
        pass,
        format!("max |dlambda| {worst_lambda:.2e} (<=1e-6), max |dlogR| {worst_ratio:.2e} (<=1e-8), hull mismatches {mismatched_hull}"),
    )
}

fn chi_square_sanity() -> Outcome {
    let q = chi_square_quantile(1, 0.9).unwrap();
    let stats: Vec<f64> = (0..2000)
        .into_par_iter()
        .map(|i| bel_statistic(&normal_series(1000, SEED, i as u64), &[0.0], 1).unwrap())
        .collect();
    let mean = stats.iter().sum::<f64>() / stats.len() as f64;
    let exceed = stats.iter().filter(|&&s| s > q).count() as f64 / stats.len() as f64;
    let pass = (mean - 1.0).abs() <= 0.1 && (exceed - 0.10).abs() <= 0.02;
    outcome(pass, format!("mean {mean:.4} (1±0.1), P(stat > chi2_1,0.9) {:.2}% (10±2)", 100.0 * exceed))
}

fn self_consistency() -> Outcome {
    let levels = [0.5, 0.9, 0.95];
    let reps = 20_000;
    let finite = sorted(
        (0..reps)
            .into_par_iter()
            .map(|i| {
                let x = normal_series(1000, SEED + 5, i as u64);
                expansive_statistic(&x, &[0.0], BlockScheme::Ebel1, &WeightFn::constant()).unwrap()
            })
            .collect(),
    );
    let limit = sorted(
        (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = replicate_rng(SEED + 6, i as u64);
                limit_draw(BlockScheme::Ebel1, &WeightFn::constant(), 1, 1000, &mut rng).unwrap()
            })
            .collect(),
    );
    let grid = sorted(
        simulate_draws(BlockScheme::Ebel1, &WeightFn::constant(), 1, 1000, reps, SEED + 6, None, Discretization::Grid)
            .unwrap(),
    );
    let se = |v: &[f64], s: u64| bootstrap_quantile_se(v, &levels, 200, &mut replicate_rng(s, u64::MAX));
    let (se_f, se_l, se_g) = (se(&finite, 1), se(&limit, 2), se(&grid, 3));
    let mut pass = true;
    let mut parts = Vec::new();
    let mut grid_parts = Vec::new();
    for (k, &p) in levels.iter().enumerate() {
        let (qf, ql, qg) = (quantile_sorted(&finite, p), quantile_sorted(&limit, p), quantile_sorted(&grid, p));
        let z = (qf - ql).abs() / se_f[k].hypot(se_l[k]);
        let zg = (qf - qg).abs() / se_f[k].hypot(se_g[k]);
        pass &= z <= 3.0;
        parts.push(format!("q{p}: stat {qf:.3} limit {ql:.3} ({z:.1} se)"));
        grid_parts.push(format!("{qg:.3} ({zg:.1} se)"));
    }
    let inf = finite.iter().filter(|v| v.is_infinite()).count();
    outcome(
        pass,
        format!(
            "{}; statistic infinite in {:.2}% of samples; grid-discretized limit: {}",
            parts.join(", "),
            100.0 * inf as f64 / reps as f64,
            grid_parts.join(", ")
        ),
    )
}

fn invariances() -> Outcome {
    let mut rng = replicate_rng(SEED, 6);
    let mut failures = Vec::new();
    let weights = [WeightFn::constant(), WeightFn::linear(), WeightFn::cosine_bell()];
    let schemes = [BlockScheme::Ebel1, BlockScheme::Ebel2];
    let (mut worst_scale, mut worst_affine) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let n = rng.gen_range(20..200);
        let x = normal_series(n, SEED + 7, i);
        let mu = [rng.gen_range(-0.3..0.3)];
        let w = &weights[i as usize % 3];
        let scheme = schemes[i as usize % 2];
        let base = expansive_statistic(&x, &mu, scheme, w).unwrap();
        let pow2 = 2f64.powi(rng.gen_range(-8..=8));
        if expansive_statistic(&x, &mu, scheme, &w.scaled(pow2).unwrap()).unwrap().to_bits() != base.to_bits() {
            failures.push(format!("scale {pow2} instance {i}"));
        }
        let c = rng.gen_range(0.01..100.0);
        let scaled = expansive_statistic(&x, &mu, scheme, &w.scaled(c).unwrap()).unwrap();
        if base.is_finite() {
            worst_scale = worst_scale.max((scaled - base).abs() / base.abs().max(1e-300));
        } else if scaled != base {
            failures.push(format!("scale {c} instance {i}"));
        }
    }
    for i in 0..200 {
        let n = rng.gen_range(30..200);
        let mut r = replicate_rng(SEED + 8, i);
        let data: Vec<f64> = (0..2 * n).map(|_| r.sample(StandardNormal)).collect();
        let x = TimeSeries::new(data, 2).unwrap();
        let a = loop {
            let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let det = a[0] * a[3] - a[1] * a[2];
            if det.abs() > 0.2 {
                break a;
            }
        };
        let v = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let mu = [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)];
        let mu_t = [a[0] * mu[0] + a[1] * mu[1] + v[0], a[2] * mu[0] + a[3] * mu[1] + v[1]];
        let scheme = schemes[i as usize % 2];
        let w = &weights[i as usize % 3];
        let s0 = expansive_statistic(&x, &mu, scheme, w).unwrap();
        let s1 = expansive_statistic(&x.affine(&a, &v), &mu_t, scheme, w).unwrap();
        if s0.is_finite() {
            worst_affine = worst_affine.max((s0 - s1).abs());
        } else if s1.is_finite() {
            failures.push(format!("affine hull instance {i}"));
        }
    }
    let mut selection_mismatch = 0;
    for i in 0..200 {
        let phi = rng.gen_range(-0.8..0.9);
        let p: Process = format!("ar:{phi}@normal").parse().unwrap();
        let x = p.simulate(rng.gen_range(50..600), &mut replicate_rng(SEED + 9, i)).unwrap();
        let (a, v) = (rng.gen_range(0.1..50.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, rng.gen_range(-100.0..100.0));
        let y = x.affine(&[a], &[v]);
        for f in [select_block_ftk, select_block_aar] {
            if f(&x).unwrap().chosen_b != f(&y).unwrap().chosen_b {
                selection_mismatch += 1;
            }
        }
    }
    let pass = failures.is_empty() && worst_scale <= 1e-12 && worst_affine <= 1e-8 && selection_mismatch == 0;
    outcome(
        pass,
        format!(
            "power-of-two weight scalings bitwise equal ({} failures), other scalings max rel diff {worst_scale:.1e}; affine max |diff| {worst_affine:.1e} (<=1e-8); block-rule mismatches {selection_mismatch}",
            failures.len()
        ),
    )
}

fn root_n_shrinkage() -> Outcome {
    let p: Process = "ar:0.5".parse().unwrap();
    let cfg = EbelConfig::reference(BlockScheme::Ebel1, WeightFn::constant()).unwrap();
    let median_width = |n: usize| {
        let widths = sorted(
            (0..500)
                .into_par_iter()
                .map(|i| {
                    let x = p.simulate(n, &mut replicate_rng(SEED + n as u64, i)).unwrap();
                    ebel_ci_mean(&x, &cfg).unwrap().width()
                })
                .collect(),
        );
        quantile_sorted(&widths, 0.5)
    };
    let (w500, w2000) = (median_width(500), median_width(2000));
    let ratio = w2000 / w500;
    outcome((0.40..=0.60).contains(&ratio), format!("median width n=2000 {w2000:.4} / n=500 {w500:.4} = {ratio:.3} (in [0.40, 0.60])"))
}

fn block_sensitivity() -> Outcome {
    let p = block_sensitivity_process();
    let rows: Vec<(usize, f64, f64)> = (2..=30)
        .map(|b| {
            let r = coverage_row(&p, 100, &Method::Bel(BlockRule::Fixed(b)), 0.9, 2000, SEED).unwrap();
            (b, r.coverage, r.stderr)
        })
        .collect();
    let hi = rows.iter().cloned().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let lo = rows.iter().cloned().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let se = hi.2.hypot(lo.2);
    let spread = hi.1 - lo.1;
    outcome(
        spread > 3.0 * se,
        format!("coverage b={} {:.1}% vs b={} {:.1}%, spread {spread:.1}pp > 3 x {se:.2}pp", hi.0, hi.1, lo.0, lo.1),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 limit-law 90th percentiles", table1),
        ("2 coverage of 90% intervals", table2),
        ("3 solver vs golden-section oracle", oracle),
        ("4 chi-square calibration of BEL with b = 1", chi_square_sanity),
        ("5 finite-sample vs limit-law quantiles", self_consistency),
        ("6 invariance suite", invariances),
        ("7 root-n interval shrinkage", root_n_shrinkage),
        ("8 coverage sensitivity to block length", block_sensitivity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
