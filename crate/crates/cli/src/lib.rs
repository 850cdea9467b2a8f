//! The `dpcount` command line: counts, predictions, ratio tables, the
//! boundary classification, the `F_p` census and point clouds for plotting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpcount_core::census::{census_row, CensusRow};
use dpcount_core::constants::polytope::q;
use dpcount_core::constants::{alpha, c_infinity, exponent_b, prediction, tau_face, PredictionReport};
use dpcount_core::picard::{classify_boundaries, log_anticanonical};
use dpcount_core::surface::{direct_points, enumerate_direct};
use dpcount_core::torsor::{chart_coordinates, enumerate_torsor, project, torsor_points, Chart};
use dpcount_core::{
    BoundaryCase, CensusError, ConstantsError, SurfaceError, SurfacePoint, TorsorError,
};
use serde::Serialize;
use thiserror::Error;

/// Version tag written into every CSV header comment; bump when a column changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Point sets are materialized to locate a disagreement only up to this bound.
pub const DIFF_BOUND_LIMIT: i64 = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("torsor count {torsor} and direct count {direct} differ for case {case} at B = {bound}{}",
        first.as_ref().map(|p| format!("; first differing point {p}")).unwrap_or_default())]
    MethodDisagreement { case: usize, bound: i64, torsor: u64, direct: u64, first: Option<String> },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 3 for a disagreement between counting methods, 1 for everything else
    /// (clap itself uses 2 for usage errors).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::MethodDisagreement { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Torsor,
    Direct,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartArg {
    /// x = η7 η5² η6 / (η1 η2 η3), y = η8 / (η1 η3 η4 η5 η6)
    F,
    /// (1/x, x/y)
    G1,
    /// (x, 1/(x y))
    G2,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Self {
        match c {
            ChartArg::F => Chart::F,
            ChartArg::G1 => Chart::GPrime,
            ChartArg::G2 => Chart::GDoublePrime,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dpcount", version, about = "Integral points of bounded height on an A1+A3 quartic del Pezzo surface")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; `predict` and `constants` default to json, the rest to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "DPCOUNT_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
}

#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    /// Boundary cases 1..=6, comma separated; all six when omitted.
    #[arg(long = "case", value_delimiter = ',', value_parser = clap::value_parser!(i64).range(1..=6))]
    pub cases: Vec<i64>,
}

impl CaseArgs {
    pub fn resolve(&self) -> Vec<BoundaryCase> {
        if self.cases.is_empty() {
            return BoundaryCase::ALL.to_vec();
        }
        self.cases.iter().map(|&i| BoundaryCase::from_index(i).expect("range checked by clap")).collect()
    }
}

const COUNT_HELP: &str = "Columns: case, bound, method, count. \
With --method both the count is reported once after both methods agree; \
their runtimes go to stderr so the report stays reproducible.";
const PREDICT_HELP: &str = "Fields: i (case), c_inf (exact fraction), b (log exponent), \
c_fin (truncated Euler product), tail_bound (bound on the neglected tail of c_fin), \
prime_bound, and with --bound also bound and predicted.";
const COMPARE_HELP: &str = "Columns: case, bound, count, predicted, ratio (count / predicted). \
Bounds run from --from up to --bound, multiplying by --factor.";
const CLASSIFY_HELP: &str = "Columns: boundary (components E1..E7), components (count), \
self_intersection ((-K-D)^2), case (matching boundary case, empty for the trivial boundary).";
const FP_HELP: &str = "Columns: p, i (case), surface (#S(F_p)), resolution (#S~(F_p)), \
open (#U~_i(F_p)), p2_tau (p^2 tau_p, exact), match (open == p2_tau).";
const POINTS_HELP: &str = "Without --chart the columns are case, x0, x1, x2, x3, x4, height \
with x primitive and x2 > 0. With --chart they are case, x, y, height; points where \
the chart is undefined are skipped.";
const CONSTANTS_HELP: &str = "Fields: i (case), face (maximal face of the Clemens complex), \
dimension, alpha (exact), tau (archimedean density), contribution (alpha * tau), \
c_inf (sum over faces), b.";

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count integral points of height at most B.
    #[command(after_long_help = COUNT_HELP)]
    Count {
        #[command(flatten)]
        cases: CaseArgs,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
        #[arg(long, value_enum, default_value = "torsor")]
        method: Method,
    },
    /// Leading constants and the predicted count.
    #[command(after_long_help = PREDICT_HELP)]
    Predict {
        #[command(flatten)]
        cases: CaseArgs,
        #[arg(long, value_parser = clap::value_parser!(i64).range(3..))]
        bound: Option<i64>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
        prime_bound: u64,
    },
    /// Counts against predictions over a geometric ladder of bounds.
    #[command(after_long_help = COMPARE_HELP)]
    Compare {
        #[command(flatten)]
        cases: CaseArgs,
        /// Largest bound of the ladder.
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(i64).range(3..))]
        bound: i64,
        /// Smallest bound of the ladder.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(i64).range(3..))]
        from: i64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(i64).range(2..))]
        factor: i64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
        prime_bound: u64,
        #[arg(long, value_enum, default_value = "torsor")]
        method: Method,
    },
    /// Boundaries D for which -K - D is big and nef.
    #[command(after_long_help = CLASSIFY_HELP)]
    Classify,
    /// Point counts over F_p against p^2 tau_p.
    #[command(after_long_help = FP_HELP)]
    Fp {
        #[command(flatten)]
        cases: CaseArgs,
        #[arg(long, default_value_t = 2)]
        p_min: u64,
        #[arg(long, default_value_t = 13)]
        p_max: u64,
    },
    /// Integral points of height at most B, for plotting.
    #[command(after_long_help = POINTS_HELP)]
    Points {
        #[arg(long = "case", value_parser = clap::value_parser!(i64).range(1..=6))]
        case: i64,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
        #[arg(long, value_enum)]
        chart: Option<ChartArg>,
    },
    /// The volumes alpha per maximal face and the constants c_inf.
    #[command(after_long_help = CONSTANTS_HELP)]
    Constants {
        #[command(flatten)]
        cases: CaseArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Predict { .. } => "predict",
            Command::Compare { .. } => "compare",
            Command::Classify => "classify",
            Command::Fp { .. } => "fp",
            Command::Points { .. } => "points",
            Command::Constants { .. } => "constants",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Predict { .. } | Command::Constants { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub case: usize,
    pub bound: i64,
    pub method: Method,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub case: usize,
    pub bound: i64,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyRow {
    pub boundary: String,
    pub components: usize,
    pub self_intersection: i64,
    pub case: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub case: usize,
    pub x0: i64,
    pub x1: i64,
    pub x2: i64,
    pub x3: i64,
    pub x4: i64,
    pub height: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartRow {
    pub case: usize,
    pub x: f64,
    pub y: f64,
    pub height: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceRow {
    pub i: usize,
    pub face: String,
    pub dimension: usize,
    pub alpha: String,
    pub tau: i64,
    pub contribution: String,
    pub c_inf: String,
    pub b: u32,
}

/// Count with one method, or with both and insist that they agree.
pub fn count(case: BoundaryCase, bound: i64, method: Method) -> Result<CountRow> {
    let timed = |f: &dyn Fn() -> Result<u64>, label: &str| -> Result<u64> {
        let start = Instant::now();
        let n = f()?;
        if method == Method::Both {
            eprintln!("case {case} B={bound} {label}: {n} in {:.3?}", start.elapsed());
        }
        Ok(n)
    };
    let torsor = || Ok(enumerate_torsor(case, bound)?);
    let direct = || Ok(enumerate_direct(case, bound)?);
    let n = match method {
        Method::Torsor => torsor()?,
        Method::Direct => direct()?,
        Method::Both => {
            let t = timed(&torsor, "torsor")?;
            let d = timed(&direct, "direct")?;
            if t != d {
                let first = if bound <= DIFF_BOUND_LIMIT { first_difference_at(case, bound)? } else { None };
                return Err(CliError::MethodDisagreement { case: case.index(), bound, torsor: t, direct: d, first });
            }
            t
        }
    };
    Ok(CountRow { case: case.index(), bound, method, count: n })
}

fn first_difference_at(case: BoundaryCase, bound: i64) -> Result<Option<String>> {
    let mut from_torsor = torsor_points(case, bound)?
        .iter()
        .map(project)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    from_torsor.sort();
    let direct = direct_points(case, bound)?;
    Ok(first_difference(&from_torsor, &direct).map(|(p, side)| format!("{:?} only in {side}", p.coords())))
}

/// First point of the merged order present in one sorted list but not the other.
pub fn first_difference(torsor: &[SurfacePoint], direct: &[SurfacePoint]) -> Option<(SurfacePoint, &'static str)> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (torsor.get(i), direct.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => return Some((*a, "torsor")),
            (_, Some(b)) => return Some((*b, "direct")),
            (Some(a), None) => return Some((*a, "torsor")),
            (None, None) => return None,
        }
    }
}

/// `from, from·factor, …` up to `bound`, always ending at `bound`.
pub fn ladder(from: i64, bound: i64, factor: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut b = from;
    while b < bound {
        out.push(b);
        b = b.saturating_mul(factor);
    }
    out.push(bound);
    out
}

pub fn compare(case: BoundaryCase, bounds: &[i64], prime_bound: u64, method: Method) -> Result<Vec<CompareRow>> {
    let p = prediction(case, prime_bound)?;
    bounds
        .iter()
        .map(|&bound| {
            let n = count(case, bound, method)?.count;
            let predicted = p.at(bound)?;
            Ok(CompareRow { case: case.index(), bound, count: n, predicted, ratio: n as f64 / predicted })
        })
        .collect()
}

pub fn classify() -> Vec<ClassifyRow> {
    classify_boundaries()
        .into_iter()
        .map(|d| ClassifyRow {
            boundary: d.to_string(),
            components: d.len(),
            self_intersection: log_anticanonical(d).self_intersection(),
            case: BoundaryCase::ALL.iter().find(|c| c.components() == d).map(|c| c.index()),
        })
        .collect()
}

pub fn fp(cases: &[BoundaryCase], p_min: u64, p_max: u64) -> Result<Vec<CensusRow>> {
    let primes = dpcount_core::arith::primes_up_to(p_max);
    let mut rows = Vec::new();
    for p in primes.into_iter().filter(|&p| p >= p_min) {
        for &case in cases {
            rows.push(census_row(case, p)?);
        }
    }
    Ok(rows)
}

pub fn points(case: BoundaryCase, bound: i64) -> Result<Vec<PointRow>> {
    Ok(direct_points(case, bound)?
        .iter()
        .map(|p| {
            let [x0, x1, x2, x3, x4] = p.coords();
            PointRow { case: case.index(), x0, x1, x2, x3, x4, height: case.height(p) }
        })
        .collect())
}

/// Chart coordinates of each integral point, ordered like [`points`].
pub fn chart_points(case: BoundaryCase, bound: i64, chart: Chart) -> Result<Vec<ChartRow>> {
    let mut keyed = Vec::new();
    for t in torsor_points(case, bound)? {
        let p = project(&t)?;
        if let Some((x, y)) = chart_coordinates(&t, chart) {
            keyed.push((p, ChartRow { case: case.index(), x, y, height: case.height(&p) }));
        }
    }
    keyed.sort_by_key(|a| a.0);
    Ok(keyed.into_iter().map(|(_, row)| row).collect())
}

pub fn constants(cases: &[BoundaryCase]) -> Result<Vec<FaceRow>> {
    let mut rows = Vec::new();
    for &case in cases {
        let c_inf = c_infinity(case)?.to_string();
        for face in case.clemens_faces() {
            let a = alpha(case, &face)?;
            let tau = tau_face(&face);
            rows.push(FaceRow {
                i: case.index(),
                face: face.to_string(),
                dimension: face.dimension(),
                contribution: (a.clone() * q(tau)).to_string(),
                alpha: a.to_string(),
                tau,
                c_inf: c_inf.clone(),
                b: exponent_b(case),
            });
        }
    }
    Ok(rows)
}

pub fn predict(cases: &[BoundaryCase], bound: Option<i64>, prime_bound: u64) -> Result<Vec<PredictionReport>> {
    cases.iter().map(|&c| Ok(prediction(c, prime_bound)?.report(bound)?)).collect()
}

/// Write `rows` as CSV (with a versioned header comment) or as a JSON array.
pub fn emit<T: Serialize>(rows: &[T], command: &str, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# dpcount {command} schema v{SCHEMA_VERSION}")?;
            let mut w = csv::Writer::from_writer(&mut *out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn dispatch(command: &Command, format: Format, out: &mut dyn Write) -> Result<()> {
    let name = command.name();
    match command {
        Command::Count { cases, bound, method } => {
            let rows = cases.resolve().into_iter().map(|c| count(c, *bound, *method)).collect::<Result<Vec<_>>>()?;
            emit(&rows, name, format, out)
        }
        Command::Predict { cases, bound, prime_bound } => emit(&predict(&cases.resolve(), *bound, *prime_bound)?, name, format, out),
        Command::Compare { cases, bound, from, factor, prime_bound, method } => {
            if from > bound {
                return Err(CliError::Config(format!("--from {from} exceeds --bound {bound}")));
            }
            let bounds = ladder(*from, *bound, *factor);
            let mut rows = Vec::new();
            for case in cases.resolve() {
                rows.extend(compare(case, &bounds, *prime_bound, *method)?);
            }
            emit(&rows, name, format, out)
        }
        Command::Classify => emit(&classify(), name, format, out),
        Command::Fp { cases, p_min, p_max } => emit(&fp(&cases.resolve(), *p_min, *p_max)?, name, format, out),
        Command::Points { case, bound, chart } => {
            let case = BoundaryCase::from_index(*case)?;
            match chart {
                None => emit(&points(case, *bound)?, name, format, out),
                Some(c) => emit(&chart_points(case, *bound, (*c).into())?, name, format, out),
            }
        }
        Command::Constants { cases } => emit(&constants(&cases.resolve())?, name, format, out),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let format = cli.output.format.unwrap_or_else(|| cli.command.default_format());
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.output.workers {
        builder = builder.num_threads(n as usize);
    }
    let pool = builder.build()?;
    // Render into memory first so a failed run leaves no partial file behind.
    let mut buf = Vec::new();
    pool.install(|| dispatch(&cli.command, format, &mut buf))?;
    match &cli.output.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
