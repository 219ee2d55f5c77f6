//! Text formats: specs for weights, processes and methods, and CSV input
//! and output.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::bel::BlockRule;
use crate::blocking::{BlockScheme, WeightFn};
use crate::error::{Error, Result};
use crate::experiment::{CoverageReport, Method, PowerCurve};
use crate::limit_law::{Discretization, QuantileTable};
use crate::processes::{ArmaSpec, Innovation, Process};
use crate::series::TimeSeries;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| invalid(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(invalid(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

/// `constant`, `linear`, `cosine_bell` or `tabulated:t0:w0,t1:w1,...`,
/// optionally followed by `*scale`.
impl FromStr for WeightFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, scale) = match s.rsplit_once('*') {
            Some((b, c)) => (b, Some(parse_f64(c)?)),
            None => (s, None),
        };
        let w = match body {
            "constant" | "const" => WeightFn::constant(),
            "linear" => WeightFn::linear(),
            "cosine_bell" | "cosine-bell" | "cosine" => WeightFn::cosine_bell(),
            _ => {
                let knots = body
                    .strip_prefix("tabulated:")
                    .ok_or_else(|| invalid(format!("unknown weight {body:?}")))?;
                let knots = knots
                    .split(',')
                    .map(|k| {
                        let (t, w) = k
                            .split_once(':')
                            .ok_or_else(|| invalid(format!("knot {k:?} is not t:w")))?;
                        Ok((parse_f64(t)?, parse_f64(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                WeightFn::tabulated(knots)?
            }
        };
        match scale {
            Some(c) => w.scaled(c),
            None => Ok(w),
        }
    }
}

/// `wn`, `ar:phi,...`, `ma:theta,...`, `arma:phi,...|theta,...` or
/// `ma1star`, with an optional `@chisq|@normal|@bernoulli|@pareto`
/// innovation suffix (default chisq).
impl FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, innovation) = match s.split_once('@') {
            Some((b, i)) => (
                b,
                Innovation::from_name(i.trim()).ok_or_else(|| invalid(format!("unknown innovation {i:?}")))?,
            ),
            None => (s, Innovation::default()),
        };
        if body == "ma1star" {
            if s.contains('@') {
                return Err(invalid("ma1star has fixed chi-square innovations"));
            }
            return Ok(Process::Ma1Star);
        }
        let (phi, theta) = if body == "wn" {
            (Vec::new(), Vec::new())
        } else if let Some(rest) = body.strip_prefix("ar:") {
            (parse_list(rest)?, Vec::new())
        } else if let Some(rest) = body.strip_prefix("ma:") {
            (Vec::new(), parse_list(rest)?)
        } else if let Some(rest) = body.strip_prefix("arma:") {
            let (a, m) = rest
                .split_once('|')
                .ok_or_else(|| invalid("arma spec needs phi|theta"))?;
            (parse_list(a)?, parse_list(m)?)
        } else {
            return Err(invalid(format!("unknown process {body:?}")));
        };
        Ok(Process::Arma(ArmaSpec::new(phi, theta, innovation)?))
    }
}

/// A method before calibration is attached.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Ebel { scheme: BlockScheme, weight: WeightFn },
    Bel(BlockRule),
}

impl MethodSpec {
    /// Attaches the reference calibration to EBEL methods.
    pub fn with_reference_calibration(self) -> Result<Method> {
        match self {
            MethodSpec::Ebel { scheme, weight } => Method::ebel_reference(scheme, weight),
            MethodSpec::Bel(rule) => Ok(Method::Bel(rule)),
        }
    }

    /// Attaches `table` to an EBEL method.
    pub fn with_calibration(self, table: QuantileTable) -> Result<Method> {
        match self {
            MethodSpec::Ebel { scheme, weight } => Ok(Method::Ebel { scheme, weight, calibration: table }),
            MethodSpec::Bel(rule) => Ok(Method::Bel(rule)),
        }
    }
}

/// `ebel1:<weight>`, `ebel2:<weight>`, `bel:ftk`, `bel:aar` or `bel:<b>`.
impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| invalid(format!("method {s:?} must look like ebel1:constant or bel:ftk")))?;
        match head {
            "ebel1" | "ebel2" => Ok(MethodSpec::Ebel {
                scheme: if head == "ebel1" { BlockScheme::Ebel1 } else { BlockScheme::Ebel2 },
                weight: rest.parse()?,
            }),
            "bel" => Ok(MethodSpec::Bel(rest.parse()?)),
            _ => Err(invalid(format!("unknown method {head:?}"))),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Ebel { scheme, weight } => write!(f, "{}:{weight}", scheme.name()),
            MethodSpec::Bel(rule) => write!(f, "bel:{rule}"),
        }
    }
}

impl FromStr for BlockRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ftk" => Ok(BlockRule::Ftk),
            "aar" => Ok(BlockRule::Aar),
            other => match other.parse::<usize>() {
                Ok(b) if b >= 1 => Ok(BlockRule::Fixed(b)),
                _ => Err(invalid(format!("block rule {other:?} must be ftk, aar or a positive integer"))),
            },
        }
    }
}

impl FromStr for BlockScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ebel1" => Ok(BlockScheme::Ebel1),
            "ebel2" => Ok(BlockScheme::Ebel2),
            other => match other.strip_prefix("bel").map(str::parse::<usize>) {
                Some(Ok(b)) if b >= 1 => Ok(BlockScheme::Bel(b)),
                _ => Err(invalid(format!("unknown scheme {other:?}"))),
            },
        }
    }
}

impl FromStr for Discretization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "continuous" => Ok(Discretization::Continuous),
            "grid" => Ok(Discretization::Grid),
            other => Err(invalid(format!("unknown discretization {other:?}"))),
        }
    }
}

fn csv_reader<R: Read>(r: R, headers: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn csv_error(e: csv::Error) -> Error {
    invalid(format!("malformed CSV: {e}"))
}

/// A series from CSV: one column per coordinate, an optional header row,
/// `#` comment lines ignored.
pub fn read_series_csv<R: Read>(r: R) -> Result<TimeSeries> {
    let mut reader = csv_reader(r, false);
    let mut data = Vec::new();
    let mut dim = None;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if i == 0 && data.is_empty() => continue,
            Err(_) => return Err(invalid(format!("row {} is not numeric", i + 1))),
        };
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(invalid(format!("row {} has {} columns, expected {d}", i + 1, row.len())))
            }
            _ => {}
        }
        data.extend(row);
    }
    let dim = dim.ok_or_else(|| invalid("series file has no numeric rows"))?;
    TimeSeries::new(data, dim)
}

/// Rounds to 6 significant digits and prints the shortest representation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return x.to_string();
    }
    let r: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    r.to_string()
}

const QUANTILE_HEADER: [&str; 11] = [
    "scheme", "weight", "d", "level", "quantile", "stderr", "replicates", "grid", "seed", "quantile_full", "stderr_full",
];

/// One row per level. `preamble` lines are written as `#` comments first.
pub fn write_quantile_csv<W: Write>(table: &QuantileTable, preamble: &[String], w: W) -> Result<()> {
    let mut out = csv_writer(preamble, w)?;
    out.write_record(QUANTILE_HEADER).map_err(csv_error)?;
    for ((level, q), se) in table.levels.iter().zip(&table.quantiles).zip(&table.mc_stderr) {
        out.write_record([
            table.scheme.name(),
            table.weight.to_string(),
            table.dim.to_string(),
            level.to_string(),
            sig6(*q),
            sig6(*se),
            table.replicates.to_string(),
            table.grid.to_string(),
            table.seed.to_string(),
            q.to_string(),
            se.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(|e| invalid(e.to_string()))
}

/// Reads a table written by [`write_quantile_csv`]; the `_full` columns are
/// preferred when present. All rows must share scheme, weight, dimension
/// and run settings, and levels must increase.
pub fn read_quantile_csv<R: Read>(r: R) -> Result<QuantileTable> {
    let mut reader = csv_reader(r, true);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| invalid(format!("missing column {name:?}")));
    let (c_scheme, c_weight, c_d, c_level) = (need("scheme")?, need("weight")?, need("d")?, need("level")?);
    let (c_q, c_se, c_reps, c_grid, c_seed) =
        (need("quantile")?, need("stderr")?, need("replicates")?, need("grid")?, need("seed")?);
    let c_q = col("quantile_full").unwrap_or(c_q);
    let c_se = col("stderr_full").unwrap_or(c_se);
    let mut table: Option<QuantileTable> = None;
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let field = |i: usize| rec.get(i).ok_or_else(|| invalid("short row"));
        let scheme: BlockScheme = field(c_scheme)?.parse()?;
        let weight: WeightFn = field(c_weight)?.parse()?;
        let dim: usize = field(c_d)?.parse().map_err(|_| invalid("bad dimension"))?;
        let replicates: usize = field(c_reps)?.parse().map_err(|_| invalid("bad replicate count"))?;
        let grid: usize = field(c_grid)?.parse().map_err(|_| invalid("bad grid size"))?;
        let seed: u64 = field(c_seed)?.parse().map_err(|_| invalid("bad seed"))?;
        let level = parse_f64(field(c_level)?)?;
        let q: f64 = field(c_q)?.parse().map_err(|_| invalid("bad quantile"))?;
        let se: f64 = field(c_se)?.parse().map_err(|_| invalid("bad stderr"))?;
        if !(0.0 < level && level < 1.0) || q.is_nan() || se.is_nan() || dim == 0 {
            return Err(invalid("quantile row out of range"));
        }
        let t = table.get_or_insert_with(|| QuantileTable {
            scheme,
            weight: weight.clone(),
            dim,
            levels: Vec::new(),
            quantiles: Vec::new(),
            mc_stderr: Vec::new(),
            replicates,
            grid,
            seed,
            discretization: Discretization::default(),
            hull_failures: 0,
        });
        if t.scheme != scheme || t.weight != weight || t.dim != dim || t.replicates != replicates || t.grid != grid || t.seed != seed {
            return Err(invalid("rows of a quantile table must share scheme, weight, d and run settings"));
        }
        if t.levels.last().is_some_and(|&l| l >= level) || t.quantiles.last().is_some_and(|&l| l > q) {
            return Err(invalid("levels must increase and quantiles must not decrease"));
        }
        t.levels.push(level);
        t.quantiles.push(q);
        t.mc_stderr.push(se);
    }
    table.ok_or_else(|| invalid("quantile table has no rows"))
}

fn csv_writer<W: Write>(preamble: &[String], mut w: W) -> Result<csv::Writer<W>> {
    for line in preamble {
        for l in line.lines() {
            writeln!(w, "# {l}").map_err(|e| invalid(e.to_string()))?;
        }
    }
    Ok(csv::Writer::from_writer(w))
}

pub const COVERAGE_HEADER: [&str; 10] = [
    "process",
    "n",
    "method",
    "coverage",
    "stderr",
    "level",
    "replicates",
    "mean_block",
    "coverage_full",
    "stderr_full",
];

/// One row per method.
pub fn write_coverage_csv<W: Write>(report: &CoverageReport, preamble: &[String], w: W) -> Result<()> {
    let mut out = csv_writer(preamble, w)?;
    out.write_record(COVERAGE_HEADER).map_err(csv_error)?;
    for row in &report.rows {
        out.write_record([
            report.process.clone(),
            report.n.to_string(),
            row.method.clone(),
            sig6(row.coverage),
            sig6(row.stderr),
            report.level.to_string(),
            report.replicates.to_string(),
            row.mean_block.map(sig6).unwrap_or_default(),
            row.coverage.to_string(),
            row.stderr.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(|e| invalid(e.to_string()))
}

pub const POWER_HEADER: [&str; 10] =
    ["process", "n", "method", "c", "power", "adjusted_power", "stderr", "power_full", "adjusted_power_full", "stderr_full"];

/// One row per `(method, c)`.
pub fn write_power_csv<W: Write>(process: &str, n: usize, curves: &[PowerCurve], preamble: &[String], w: W) -> Result<()> {
    let mut out = csv_writer(preamble, w)?;
    out.write_record(POWER_HEADER).map_err(csv_error)?;
    for curve in curves {
        for k in 0..curve.c.len() {
            out.write_record([
                process.to_string(),
                n.to_string(),
                curve.method.clone(),
                curve.c[k].to_string(),
                sig6(curve.raw[k]),
                sig6(curve.adjusted[k]),
                sig6(curve.stderr[k]),
                curve.raw[k].to_string(),
                curve.adjusted[k].to_string(),
                curve.stderr[k].to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    out.flush().map_err(|e| invalid(e.to_string()))
}
