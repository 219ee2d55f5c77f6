//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ebel::bel::{bel_ci_mean, select_block, BlockRule};
use ebel::blocking::{BlockScheme, WeightFn};
use ebel::experiment::{c_grid, coverage_row, power_curve, CoverageReport, Method, PowerCurve};
use ebel::inference::{ebel_ci_mean, EbelConfig};
use ebel::io::{read_quantile_csv, read_series_csv, sig6, write_coverage_csv, write_power_csv, write_quantile_csv, MethodSpec};
use ebel::limit_law::{estimate_quantiles_with, Discretization, QuantileTable, DEFAULT_GRID};
use ebel::processes::Process;
use ebel::series::TimeSeries;

use crate::config::Params;
use crate::CliError;

/// Settings of one invocation: the file and flag layers and their merge.
#[derive(Debug, Clone)]
pub struct Context {
    pub command: &'static str,
    pub config_path: Option<PathBuf>,
    pub file: Params,
    pub flags: Params,
    pub params: Params,
}

impl Context {
    /// Header lines for emitted files. The effective block, with defaults
    /// filled in, is a valid config file that reproduces the output.
    fn preamble(&self, resolved: &Params) -> Vec<String> {
        let inline = |p: &Params| {
            let lines = p.echo();
            if lines.is_empty() {
                "(none)".to_string()
            } else {
                lines.join("; ")
            }
        };
        let mut out = vec![
            format!("ebel {} {}", env!("CARGO_PKG_VERSION"), self.command),
            format!(
                "config file: {}",
                self.config_path.as_deref().map_or_else(|| "(none)".to_string(), |p| p.display().to_string())
            ),
            format!("config file values: {}", inline(&self.file)),
            format!("command-line values: {}", inline(&self.flags)),
            "effective configuration:".to_string(),
        ];
        out.extend(resolved.echo());
        out
    }
}

fn config<T>(r: Result<T, ebel::Error>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn need_seed(p: &Params) -> Result<u64, CliError> {
    p.seed.ok_or_else(|| CliError::Config("an explicit `seed` is required".into()))
}

/// Destination of a CSV report.
struct Output {
    path: Option<PathBuf>,
}

impl Output {
    /// Refuses an existing file unless overwriting was requested.
    fn new(p: &Params) -> Result<Self, CliError> {
        if let Some(path) = &p.output {
            if path.exists() && !p.overwrite.unwrap_or(false) {
                return Err(CliError::Config(format!(
                    "output {} exists; pass --overwrite to replace it",
                    path.display()
                )));
            }
        }
        Ok(Self { path: p.output.clone() })
    }

    fn is_file(&self) -> bool {
        self.path.is_some()
    }

    /// Writes a whole report, replacing earlier contents.
    fn emit<F>(&self, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), ebel::Error>,
    {
        match &self.path {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path).map_err(|e| io_error(path, e))?);
                write(&mut w).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                w.flush().map_err(|e| io_error(path, e))
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write(&mut lock).map_err(|e| CliError::Config(format!("standard output: {e}")))?;
                lock.flush().map_err(|e| CliError::Config(format!("standard output: {e}")))
            }
        }
    }
}

fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let x = read_series_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if x.dim() != 1 {
        return Err(CliError::Config(format!(
            "{}: expected one numeric column, found {}",
            path.display(),
            x.dim()
        )));
    }
    Ok(x)
}

fn read_tables(p: &Params) -> Result<Vec<QuantileTable>, CliError> {
    p.calibration
        .iter()
        .flatten()
        .map(|path| {
            let file = File::open(path).map_err(|e| io_error(path, e))?;
            read_quantile_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Expands a bare `ebel1`, `ebel2` or `bel` with the `weight` or `block`
/// setting; complete specs such as `ebel2:linear` are parsed as they are.
fn method_specs(p: &Params) -> Result<Vec<MethodSpec>, CliError> {
    let names = p.method.clone().unwrap_or_default();
    if names.is_empty() {
        return Err(CliError::Config("missing required setting `method`".into()));
    }
    let (mut used_weight, mut used_block) = (false, false);
    let mut specs = Vec::with_capacity(names.len());
    for name in &names {
        let name = name.trim();
        let full = match name {
            "ebel1" | "ebel2" => {
                used_weight = true;
                format!("{name}:{}", p.weight.as_deref().unwrap_or("constant"))
            }
            "bel" => {
                used_block = true;
                let block = p
                    .block
                    .as_deref()
                    .ok_or_else(|| CliError::Config("method `bel` needs a `block` rule (ftk, aar or a length)".into()))?;
                format!("bel:{block}")
            }
            _ => name.to_string(),
        };
        specs.push(config(full.parse())?);
    }
    if p.weight.is_some() && !used_weight {
        return Err(CliError::Config("`weight` only applies to a bare ebel1 or ebel2 method".into()));
    }
    if p.block.is_some() && !used_block {
        return Err(CliError::Config("`block` only applies to a bare bel method".into()));
    }
    Ok(specs)
}

/// Attaches a calibration: a supplied table for the same scheme, weight
/// shape and d = 1 if one exists, else the reference one.
fn calibrate(spec: MethodSpec, tables: &[QuantileTable]) -> Result<Method, CliError> {
    if let MethodSpec::Ebel { scheme, weight } = &spec {
        if let Some(t) = tables
            .iter()
            .find(|t| t.scheme == *scheme && t.weight.kind() == weight.kind() && t.dim == 1)
        {
            return config(spec.clone().with_calibration(t.clone()));
        }
    }
    config(spec.with_reference_calibration())
}

fn methods(p: &Params, level: f64) -> Result<Vec<Method>, CliError> {
    let tables = read_tables(p)?;
    let methods: Vec<Method> = method_specs(p)?
        .into_iter()
        .map(|s| calibrate(s, &tables))
        .collect::<Result<_, _>>()?;
    for m in &methods {
        config(m.threshold(level))?;
    }
    Ok(methods)
}

fn parse_process(p: &Params) -> Result<Process, CliError> {
    config(Params::require(&p.process, "process")?.parse())
}

const QUANTILES_KEYS: [&str; 9] = ["scheme", "weight", "d", "levels", "reps", "grid", "discretization", "seed", "output"];

pub fn quantiles(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.params;
    p.check_keys(ctx.command, &QUANTILES_KEYS)?;
    let seed = need_seed(p)?;
    let scheme: BlockScheme = config(Params::require(&p.scheme, "scheme")?.parse())?;
    if !matches!(scheme, BlockScheme::Ebel1 | BlockScheme::Ebel2) {
        return Err(CliError::Config("scheme must be ebel1 or ebel2".into()));
    }
    let mut r = p.clone();
    let weight: WeightFn = config(r.weight.get_or_insert_with(|| "constant".into()).parse())?;
    let disc: Discretization = config(r.discretization.get_or_insert_with(|| "continuous".into()).parse())?;
    let d = *r.d.get_or_insert(1);
    let levels = r.levels.get_or_insert_with(|| vec![0.9]).clone();
    let reps = *r.reps.get_or_insert(ebel::limit_law::DEFAULT_REPLICATES);
    let grid = *r.grid.get_or_insert(DEFAULT_GRID);
    let out = Output::new(p)?;
    let table = estimate_quantiles_with(scheme, &weight, d, &levels, reps, grid, seed, disc)?;
    if table.hull_failures > 0 {
        eprintln!("warning: {} of {reps} draws were hull failures (+inf)", table.hull_failures);
    }
    let preamble = ctx.preamble(&r);
    out.emit(|w| write_quantile_csv(&table, &preamble, w))?;
    if out.is_file() {
        for ((level, q), se) in table.levels.iter().zip(&table.quantiles).zip(&table.mc_stderr) {
            println!("level {level}: quantile {} (mc stderr {})", sig6(*q), sig6(*se));
        }
    }
    Ok(())
}

const CI_KEYS: [&str; 7] = ["input", "method", "weight", "block", "level", "calibration", "output"];

pub fn ci(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.params;
    p.check_keys(ctx.command, &CI_KEYS)?;
    let input = Params::require(&p.input, "input")?;
    let mut r = p.clone();
    let level = *r.level.get_or_insert(0.9);
    let specs = method_specs(p)?;
    let [spec] = specs.as_slice() else {
        return Err(CliError::Config("ci takes exactly one method".into()));
    };
    let out = Output::new(p)?;
    let x = read_series(&input)?;
    let values = x.as_slice();
    let constant = values.iter().all(|&v| v == values[0]);
    if constant {
        eprintln!("warning: the series is constant; the interval is degenerate");
    }
    let mut report: Vec<(String, String)> = vec![("method".into(), spec.to_string()), ("level".into(), level.to_string())];
    let interval = match spec {
        MethodSpec::Ebel { scheme, weight } => {
            let method = calibrate(spec.clone(), &read_tables(p)?)?;
            let Method::Ebel { calibration, .. } = method else { unreachable!("EBEL spec") };
            let cfg = config(EbelConfig::new(*scheme, weight.clone(), calibration, level))?;
            report.push(("critical_value".into(), sig6(cfg.threshold())));
            ebel_ci_mean(&x, &cfg)?
        }
        MethodSpec::Bel(rule) => {
            let b = if constant {
                1
            } else {
                let sel = select_block(&x, *rule)?;
                for (name, value) in &sel.diagnostics {
                    report.push(((*name).to_string(), sig6(*value)));
                }
                sel.chosen_b
            };
            report.push(("chosen_b".into(), b.to_string()));
            report.push(("critical_value".into(), sig6(ebel::stats::chi_square_quantile(1, level)?)));
            bel_ci_mean(&x, b, level)?
        }
    };
    report.push(("lower".into(), sig6(interval.lower)));
    report.push(("upper".into(), sig6(interval.upper)));
    report.push(("degenerate".into(), interval.degenerate.to_string()));
    for (k, v) in &report {
        println!("{k}: {v}");
    }
    if out.is_file() {
        let preamble = ctx.preamble(&r);
        let mut keys: Vec<String> = report.iter().map(|(k, _)| k.clone()).collect();
        let mut vals: Vec<String> = report.iter().map(|(_, v)| v.clone()).collect();
        keys.extend(["lower_full".into(), "upper_full".into()]);
        vals.extend([interval.lower.to_string(), interval.upper.to_string()]);
        out.emit(|w| write_record_csv(&preamble, &keys, &[vals], w))?;
    }
    Ok(())
}

/// Plain CSV with `#` preamble lines.
fn write_record_csv(preamble: &[String], header: &[String], rows: &[Vec<String>], w: &mut dyn Write) -> Result<(), ebel::Error> {
    let err = |e: String| ebel::Error::InvalidInput(e);
    for line in preamble {
        writeln!(w, "# {line}").map_err(|e| err(e.to_string()))?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(|e| err(e.to_string()))?;
    for row in rows {
        out.write_record(row).map_err(|e| err(e.to_string()))?;
    }
    out.flush().map_err(|e| err(e.to_string()))
}

const COVERAGE_KEYS: [&str; 10] = ["process", "n", "method", "weight", "block", "level", "reps", "seed", "calibration", "output"];

pub fn coverage(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.params;
    p.check_keys(ctx.command, &COVERAGE_KEYS)?;
    let seed = need_seed(p)?;
    let process = parse_process(p)?;
    let n = Params::require(&p.n, "n")?;
    let mut r = p.clone();
    let level = *r.level.get_or_insert(0.9);
    let reps = *r.reps.get_or_insert(1000);
    let methods = methods(p, level)?;
    let out = Output::new(p)?;
    let preamble = ctx.preamble(&r);
    let mut report = CoverageReport { process: process.to_string(), n, level, replicates: reps, seed, rows: Vec::new() };
    for (k, m) in methods.iter().enumerate() {
        match coverage_row(&process, n, m, level, reps, seed) {
            Ok(row) => {
                if row.hull_failures > 0 {
                    eprintln!("note: {m}: statistic infinite at the true mean in {} of {reps} replicates", row.hull_failures);
                }
                report.rows.push(row);
                if out.is_file() && k + 1 < methods.len() {
                    let mut pre = preamble.clone();
                    pre.push(format!("status: partial, {} of {} methods", k + 1, methods.len()));
                    out.emit(|w| write_coverage_csv(&report, &pre, w))?;
                }
            }
            Err(e) => return fail_partial(&out, &preamble, e, k, methods.len(), |pre, w| write_coverage_csv(&report, pre, w)),
        }
    }
    out.emit(|w| write_coverage_csv(&report, &preamble, w))
}

/// Writes what finished so far, marked incomplete, then reports `e`.
fn fail_partial<F>(out: &Output, preamble: &[String], e: ebel::Error, done: usize, total: usize, write: F) -> Result<(), CliError>
where
    F: FnOnce(&[String], &mut dyn Write) -> Result<(), ebel::Error>,
{
    let err = CliError::from(e);
    let mut pre = preamble.to_vec();
    pre.push(format!("status: incomplete, {done} of {total} methods finished; error: {err}"));
    out.emit(|w| write(&pre, w))?;
    Err(err)
}

const POWER_KEYS: [&str; 12] =
    ["process", "n", "method", "weight", "block", "level", "reps", "seed", "calibration", "c_max", "c_step", "output"];

pub fn power(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.params;
    p.check_keys(ctx.command, &POWER_KEYS)?;
    let seed = need_seed(p)?;
    let process = parse_process(p)?;
    let n = Params::require(&p.n, "n")?;
    let mut r = p.clone();
    let level = *r.level.get_or_insert(0.9);
    let reps = *r.reps.get_or_insert(1000);
    let c_max = *r.c_max.get_or_insert(5.0);
    let c_step = *r.c_step.get_or_insert(0.25);
    if !(c_max >= 0.0 && c_max.is_finite() && c_step > 0.0 && c_step.is_finite()) || c_max / c_step > 1e6 {
        return Err(CliError::Config("need c_max >= 0 and a positive c_step".into()));
    }
    let grid = c_grid(c_max, c_step);
    let methods = methods(p, level)?;
    let out = Output::new(p)?;
    let preamble = ctx.preamble(&r);
    let name = process.to_string();
    let mut curves: Vec<PowerCurve> = Vec::new();
    for (k, m) in methods.iter().enumerate() {
        match power_curve(&process, n, &grid, m, level, reps, seed) {
            Ok(curve) => {
                curves.push(curve);
                if out.is_file() && k + 1 < methods.len() {
                    let mut pre = preamble.clone();
                    pre.push(format!("status: partial, {} of {} methods", k + 1, methods.len()));
                    out.emit(|w| write_power_csv(&name, n, &curves, &pre, w))?;
                }
            }
            Err(e) => {
                return fail_partial(&out, &preamble, e, k, methods.len(), |pre, w| write_power_csv(&name, n, &curves, pre, w))
            }
        }
    }
    out.emit(|w| write_power_csv(&name, n, &curves, &preamble, w))
}

const SELECT_KEYS: [&str; 3] = ["input", "block", "output"];

pub fn select_block_report(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.params;
    p.check_keys(ctx.command, &SELECT_KEYS)?;
    let input = Params::require(&p.input, "input")?;
    let rule: BlockRule = config(Params::require(&p.block, "block")?.parse())?;
    let out = Output::new(p)?;
    let x = read_series(&input)?;
    let sel = select_block(&x, rule)?;
    let mut header = vec!["rule".to_string(), "n".to_string(), "chosen_b".to_string()];
    let mut row = vec![rule.to_string(), x.len().to_string(), sel.chosen_b.to_string()];
    println!("rule: {rule}");
    println!("n: {}", x.len());
    println!("chosen_b: {}", sel.chosen_b);
    for (name, value) in &sel.diagnostics {
        println!("{name}: {}", sig6(*value));
        header.push((*name).to_string());
        row.push(value.to_string());
    }
    if out.is_file() {
        let preamble = ctx.preamble(p);
        out.emit(|w| write_record_csv(&preamble, &header, &[row], w))?;
    }
    Ok(())
}
