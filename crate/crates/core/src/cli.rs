//! Command-line front end. Parsing lives here so the binary stays a thin shim and every
//! subcommand can be driven from tests.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covers::{build_table, count_covers, CountKey, Method, WorkBound};
use crate::error::{Error, Result};
use crate::graph::{aut_order, enumerate_graphs, FeynmanGraph, GraphClassVariant};
use crate::integrals::{
    f_gamma_coefficient, integral_coefficient, numeric_contour_check, series_shell, truncated_series,
};
use crate::partition::{graph_sum, verify_boson, verify_fermion, BosonReport, FermionReport};
use crate::perm::Composition;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "hurwitz-cx",
    version,
    about = "Count simply ramified covers of C^x and check them against graph-sum integrals",
    after_help = "Feasible ranges at the default work bound: brute force d <= 6, b <= 5; \
                  fast counting d <= 8, b <= 6."
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Cap on the estimated number of elementary group operations.
    #[arg(long, global = true, default_value_t = 1_000_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub work_bound: u64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "HURWITZ_CX_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Count n_{b;d;e} for one key.
    Count(CountArgs),
    /// List G_{b,k,l} with automorphism orders.
    Graphs(GraphArgs),
    /// Per-graph integral coefficients at one degree pair.
    Integral(IntegralArgs),
    /// Compare the boson graph sum with brute-force counts over a range of keys.
    VerifyBoson(VerifyBosonArgs),
    /// Compare the fermionic formula with n_{b;(d);(d)}.
    VerifyFermion(VerifyFermionArgs),
    /// Tabulate F_{b,k,l} up to a total degree.
    Table(TableArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CountArgs {
    #[arg(long, default_value_t = 0)]
    pub b: usize,
    /// Degrees over 0, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    /// Degrees over infinity, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub e: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
    pub method: MethodArg,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    #[arg(long, default_value_t = 0)]
    pub b: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub l: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
}

#[derive(Args, Debug, Clone)]
pub struct IntegralArgs {
    #[arg(long, default_value_t = 0)]
    pub b: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub e: Vec<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
    /// Also evaluate each integral by quadrature and compare with the truncated exact series.
    #[arg(long)]
    pub numeric_check: bool,
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(64..))]
    pub quadrature_points: u64,
    /// Sample values of z_i for the numeric check (defaults to 0.2 each).
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<f64>,
    /// Sample values of w_j for the numeric check (defaults to 1.0 each).
    #[arg(long, value_delimiter = ',')]
    pub w: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyBosonArgs {
    #[arg(long, default_value_t = 4)]
    pub b_max: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub l_max: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub d_max: u64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyFermionArgs {
    #[arg(long, default_value_t = 4)]
    pub b_max: usize,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub d_max: u64,
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    #[arg(long, default_value_t = 0)]
    pub b: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub l: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub d_max: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
    pub method: MethodArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Brute,
    Fast,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => Method::BruteForce,
            MethodArg::Fast => Method::Fast,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    Standard,
    Extended,
}

impl From<VariantArg> for GraphClassVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => GraphClassVariant::Standard,
            VariantArg::Extended => GraphClassVariant::Extended,
        }
    }
}

/// One coefficient of a generating function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub key: CountKey,
    #[serde(with = "crate::decimal")]
    pub n: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub b: usize,
    pub k: usize,
    pub l: usize,
    pub d_max: usize,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRow {
    pub graph: String,
    #[serde(with = "crate::decimal")]
    pub aut: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphsReport {
    pub b: usize,
    pub k: usize,
    pub l: usize,
    pub graphs: Vec<GraphRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericComparison {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub quadrature_points: usize,
    pub truncation: usize,
    pub numeric: [f64; 2],
    pub series: [f64; 2],
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralRow {
    pub graph: String,
    #[serde(with = "crate::decimal")]
    pub aut: BigUint,
    #[serde(with = "crate::decimal")]
    pub integral: BigUint,
    /// `integral / aut` as an exact fraction.
    pub f_gamma: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numeric: Option<NumericComparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub key: CountKey,
    pub rows: Vec<IntegralRow>,
    #[serde(with = "crate::decimal")]
    pub graph_sum: BigUint,
}

/// What a run produced: the serialized report and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    pub output: String,
}

fn composition(parts: &[usize], name: &str) -> Result<Composition> {
    Composition::new(parts.to_vec()).map_err(|e| Error::InvalidArgument(format!("--{name}: {e}")))
}

/// Runs one command. Library errors (bad input, exceeded work bound) are returned as
/// `Err` and map to exit status 2.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> Result<Outcome> {
    let bound = WorkBound(u128::from(config.work_bound));
    let format = config.format;
    match &config.command {
        Command::Count(args) => {
            let key = CountKey::new(args.b, composition(&args.d, "d")?, composition(&args.e, "e")?);
            let n = count_covers(&key, args.method.into(), bound)?;
            let row = TableRow { key, n };
            let output = match format {
                OutputFormat::Text => format!("{}\n", row.n),
                OutputFormat::Json => json(&row)?,
                OutputFormat::Csv => table_csv(std::slice::from_ref(&row))?,
            };
            Ok(Outcome { status: EXIT_OK, output })
        }
        Command::Table(args) => {
            let (k, l, d_max) = (args.k as usize, args.l as usize, args.d_max as usize);
            let table = build_table(args.b, k, l, d_max, args.method.into(), bound)?;
            let rows: Vec<TableRow> = table
                .entries()
                .iter()
                .map(|(key, n)| TableRow {
                    key: key.clone(),
                    n: n.clone(),
                })
                .collect();
            let output = match format {
                OutputFormat::Text => rows
                    .iter()
                    .map(|r| format!("{}\t{}\n", r.key, r.n))
                    .collect(),
                OutputFormat::Json => json(&TableReport {
                    b: args.b,
                    k,
                    l,
                    d_max,
                    rows,
                })?,
                OutputFormat::Csv => table_csv(&rows)?,
            };
            Ok(Outcome { status: EXIT_OK, output })
        }
        Command::Graphs(args) => {
            let (k, l) = (args.k as usize, args.l as usize);
            let graphs: Vec<GraphRow> = enumerate_graphs(args.b, k, l, args.variant.into())
                .iter()
                .map(|g| GraphRow {
                    graph: g.to_string(),
                    aut: aut_order(g),
                })
                .collect();
            let output = match format {
                OutputFormat::Text => {
                    let mut s = String::new();
                    for g in &graphs {
                        let _ = writeln!(s, "{}\taut={}", g.graph, g.aut);
                    }
                    let _ = writeln!(s, "{} graph(s) in G_{{{},{},{}}}", graphs.len(), args.b, k, l);
                    s
                }
                OutputFormat::Json => json(&GraphsReport {
                    b: args.b,
                    k,
                    l,
                    graphs,
                })?,
                OutputFormat::Csv => csv_rows(&graphs)?,
            };
            Ok(Outcome { status: EXIT_OK, output })
        }
        Command::Integral(args) => integral_command(args, format),
        Command::VerifyBoson(args) => {
            let report = verify_boson(
                args.b_max,
                args.k_max as usize,
                args.l_max as usize,
                args.d_max as usize,
                bound,
            )?;
            let status = if report.all_match() { EXIT_OK } else { EXIT_MISMATCH };
            let output = match format {
                OutputFormat::Text => boson_text(&report),
                OutputFormat::Json => json(&report)?,
                OutputFormat::Csv => boson_csv(&report)?,
            };
            Ok(Outcome { status, output })
        }
        Command::VerifyFermion(args) => {
            let report = verify_fermion(args.b_max, args.d_max as usize, bound)?;
            let status = if report.all_match() { EXIT_OK } else { EXIT_MISMATCH };
            let output = match format {
                OutputFormat::Text => fermion_text(&report),
                OutputFormat::Json => json(&report)?,
                OutputFormat::Csv => csv_rows(&report.rows)?,
            };
            Ok(Outcome { status, output })
        }
    }
}

fn integral_command(args: &IntegralArgs, format: OutputFormat) -> Result<Outcome> {
    let d = composition(&args.d, "d")?;
    let e = composition(&args.e, "e")?;
    let (k, l) = (d.len(), e.len());
    let graphs = enumerate_graphs(args.b, k, l, args.variant.into());
    let sample = |given: &[f64], n: usize, default: f64, name: &str| -> Result<Vec<f64>> {
        match given.len() {
            0 => Ok(vec![default; n]),
            m if m == n => Ok(given.to_vec()),
            m => Err(Error::InvalidArgument(format!("--{name} has {m} values, expected {n}"))),
        }
    };
    let z = sample(&args.z, k, 0.2, "z")?;
    let w = sample(&args.w, l, 1.0, "w")?;
    let zc: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let wc: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();

    let mut rows = Vec::with_capacity(graphs.len());
    for g in &graphs {
        rows.push(IntegralRow {
            graph: g.to_string(),
            aut: aut_order(g),
            integral: integral_coefficient(g, &d, &e)?,
            f_gamma: f_gamma_coefficient(g, &d, &e)?.to_string(),
            numeric: if args.numeric_check {
                Some(numeric_row(g, &z, &w, &zc, &wc, args.quadrature_points as usize)?)
            } else {
                None
            },
        });
    }
    let report = IntegralReport {
        graph_sum: graph_sum(&graphs, &d, &e)?,
        key: CountKey::new(args.b, d, e),
        rows,
    };
    let output = match format {
        OutputFormat::Text => {
            let mut s = String::new();
            for r in &report.rows {
                let _ = write!(s, "{}\taut={}\tI={}\tF={}", r.graph, r.aut, r.integral, r.f_gamma);
                if let Some(n) = &r.numeric {
                    let _ = write!(s, "\tnumeric={:.12e}\tseries={:.12e}\t|diff|={:.3e}", n.numeric[0], n.series[0], n.abs_error);
                }
                s.push('\n');
            }
            let _ = writeln!(s, "sum over graphs: {}", report.graph_sum);
            s
        }
        OutputFormat::Json => json(&report)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["graph", "aut", "integral", "f_gamma", "numeric_re", "numeric_im", "series_re", "series_im", "abs_error"])
                .map_err(io_error)?;
            for r in &report.rows {
                let mut record = vec![r.graph.clone(), r.aut.to_string(), r.integral.to_string(), r.f_gamma.clone()];
                match &r.numeric {
                    Some(n) => record.extend(
                        [n.numeric[0], n.numeric[1], n.series[0], n.series[1], n.abs_error].map(|x| x.to_string()),
                    ),
                    None => record.extend(std::iter::repeat_n(String::new(), 5)),
                }
                w.write_record(&record).map_err(io_error)?;
            }
            finish_csv(w)?
        }
    };
    Ok(Outcome { status: EXIT_OK, output })
}

const MAX_TRUNCATION: usize = 200;

fn numeric_row(
    g: &FeynmanGraph,
    z: &[f64],
    w: &[f64],
    zc: &[Complex64],
    wc: &[Complex64],
    points: usize,
) -> Result<NumericComparison> {
    let numeric = numeric_contour_check(g, zc, wc, None, points)?;
    let ratio = z.iter().fold(0.0f64, |m, x| m.max(x.abs())) / w.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    // At least the smallest D with ratio^D < 1e-10; coefficients grow polynomially in the
    // degree, so keep adding shells until the newest one is negligible.
    let mut truncation = ((-10.0f64 * std::f64::consts::LN_10) / ratio.ln()).floor() as usize + 1;
    let mut series = truncated_series(g, zc, wc, truncation)?;
    while truncation < MAX_TRUNCATION {
        let shell = series_shell(g, zc, wc, truncation + 1)?;
        series += shell;
        truncation += 1;
        if shell.norm() <= 1e-15 * series.norm().max(1.0) {
            break;
        }
    }
    Ok(NumericComparison {
        z: z.to_vec(),
        w: w.to_vec(),
        quadrature_points: points,
        truncation,
        numeric: [numeric.re, numeric.im],
        series: [series.re, series.im],
        abs_error: (numeric - series).norm(),
    })
}

fn io_error<E: std::fmt::Display>(e: E) -> Error {
    Error::InvalidArgument(format!("serialization failed: {e}"))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(io_error)?;
    s.push('\n');
    Ok(s)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(io_error)?;
    String::from_utf8(bytes).map_err(io_error)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(io_error)?;
    }
    finish_csv(w)
}

fn joined(c: &Composition) -> String {
    c.parts().iter().join(";")
}

fn table_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b", "k", "l", "d", "e", "n"]).map_err(io_error)?;
    for r in rows {
        w.write_record([
            r.key.b.to_string(),
            r.key.d.len().to_string(),
            r.key.e.len().to_string(),
            joined(&r.key.d),
            joined(&r.key.e),
            r.n.to_string(),
        ])
        .map_err(io_error)?;
    }
    finish_csv(w)
}

fn boson_csv(report: &BosonReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b", "k", "l", "d", "e", "oracle", "graph_sum", "match"])
        .map_err(io_error)?;
    for r in &report.rows {
        w.write_record([
            r.key.b.to_string(),
            r.key.d.len().to_string(),
            r.key.e.len().to_string(),
            joined(&r.key.d),
            joined(&r.key.e),
            r.oracle.to_string(),
            r.graph_sum.to_string(),
            r.matched.to_string(),
        ])
        .map_err(io_error)?;
    }
    finish_csv(w)
}

fn boson_text(report: &BosonReport) -> String {
    let mut s = String::new();
    for r in &report.rows {
        let flag = if r.matched { "ok" } else { "MISMATCH" };
        let _ = writeln!(s, "{}\toracle={}\tgraph_sum={}\t{flag}", r.key, r.oracle, r.graph_sum);
    }
    let _ = writeln!(s, "{} keys, {} mismatches", report.rows.len(), report.mismatches.len());
    s
}

fn fermion_text(report: &FermionReport) -> String {
    let mut s = String::new();
    for r in &report.rows {
        let flag = if r.matched { "ok" } else { "MISMATCH" };
        let _ = writeln!(s, "b={} d={}\tcovers={}\tfermion={}\t{flag}", r.b, r.d, r.lhs, r.rhs);
    }
    let bad = report.rows.iter().filter(|r| !r.matched).count();
    let _ = writeln!(s, "{} pairs, {bad} mismatches", report.rows.len());
    s
}
