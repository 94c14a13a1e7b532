//! Command-line surface: `estimate`, `losscurve`, `trace`, `certify` and
//! `synth`.
//!
//! Settings resolve as flag, then the TOML file named by `PSEUDOMODE_CONFIG`,
//! then the built-in default. Exit status is 0 for certified results, 1 for
//! input or usage errors and 2 for uncertified results or failed checks.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    self, EstimateReport, EstimatorConfig, Method, OptimizerMode, OptimizerTrace, DEFAULT_EPSILON, DEFAULT_GRID,
    DEFAULT_K, DEFAULT_M,
};
use crate::io::{self, ColumnSelector};
use crate::loss::SmoothedHammingLoss;
use crate::numeric::Grid;
use crate::objective::{
    certificate_bound, unimodality_check, Aggregation, CheckOutcome, Objective, ObjectiveConfig, SampleSet,
    UnimodalityOutcome,
};
use crate::synth::{self, Mixture};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;

pub const CONFIG_ENV: &str = "PSEUDOMODE_CONFIG";

const LOSSCURVE_GRID: usize = 1001;
const CERTIFY_GRID: usize = 10_001;

#[derive(Debug, Parser)]
#[command(name = "pseudomode", version, about = "Robust location estimates with the smoothed Hamming loss")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a location for each selected column.
    Estimate(Common),
    /// Tabulate the loss, its derivatives and region labels on a symmetric grid.
    Losscurve {
        #[command(flatten)]
        common: Common,
        /// Grid spans [-w, w]; defaults to 5/k.
        #[arg(long, allow_hyphen_values = true)]
        half_width: Option<f64>,
    },
    /// Export the optimizer's iteration records for one column.
    Trace(Common),
    /// Grid diagnostics of quasi-convexity for one column (m = 2).
    Certify(Common),
    /// Generate a seeded point-mass-plus-uniform mixture.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        mass: f64,
        #[arg(long, default_value_t = 0.8)]
        fraction: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        low: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        high: f64,
        /// Append one extra sample with this value.
        #[arg(long, allow_hyphen_values = true)]
        outlier: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    /// Pseudo-mode with the optimizer chosen from k and m.
    Pseudo,
    Mean,
    Median,
    Mode,
    #[value(alias = "lipschitz")]
    PseudoLipschitz,
    #[value(alias = "quasi")]
    PseudoQuasi,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand; unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Input file; standard input when absent or `-`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column name or 0-based index, a comma-separated list, or `all`/`both`.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `,`, `;`, `tab` or any single character; detected when absent.
    #[arg(long)]
    pub delimiter: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum objective evaluations.
    #[arg(long)]
    pub budget: Option<usize>,
}

/// Contents of the optional TOML config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub method: Option<MethodArg>,
    pub k: Option<f64>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub grid: Option<usize>,
    pub format: Option<Format>,
    pub delimiter: Option<String>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Input(format!("config file: {e}")))
    }

    /// Reads the file named by `PSEUDOMODE_CONFIG`, if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Input(format!("cannot read config {}: {e}", PathBuf::from(&path).display())))?;
                Self::parse(&text)
            }
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub column: ColumnSelector,
    pub method: MethodArg,
    pub k: f64,
    pub m: f64,
    pub epsilon: f64,
    pub grid: usize,
    pub format: Format,
    pub delimiter: Option<u8>,
    pub seed: u64,
    pub budget: Option<usize>,
}

impl RunConfig {
    pub fn resolve(flags: &Common, file: &FileConfig, grid: usize, format: Format) -> Result<Self> {
        let delimiter = flags.delimiter.clone().or_else(|| file.delimiter.clone());
        Ok(Self {
            input: flags.input.clone().or_else(|| file.input.clone()),
            column: flags
                .column
                .as_deref()
                .or(file.column.as_deref())
                .map_or(ColumnSelector::First, ColumnSelector::parse),
            method: flags.method.or(file.method).unwrap_or(MethodArg::Pseudo),
            k: flags.k.or(file.k).unwrap_or(DEFAULT_K),
            m: flags.m.or(file.m).unwrap_or(DEFAULT_M),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON),
            grid: flags.grid.or(file.grid).unwrap_or(grid),
            format: flags.format.or(file.format).unwrap_or(format),
            delimiter: delimiter.as_deref().map(io::parse_delimiter).transpose()?,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            budget: flags.budget.or(file.budget),
        })
    }

    pub fn estimator(&self) -> Result<EstimatorConfig> {
        let mode = match self.method {
            MethodArg::PseudoLipschitz => OptimizerMode::Lipschitz,
            MethodArg::PseudoQuasi => OptimizerMode::QuasiConvex,
            _ => OptimizerMode::Auto,
        };
        let config = EstimatorConfig::new(self.k, self.m, mode, self.epsilon)?;
        Ok(match self.budget {
            Some(b) => config.with_max_evals(b),
            None => config,
        })
    }
}

/// One estimate, tagged with the column it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub column: String,
    pub rows: usize,
    pub skipped: usize,
    #[serde(flatten)]
    pub report: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossCurveRow {
    pub x: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub column: String,
    pub k: f64,
    pub samples: usize,
    pub grid: usize,
    pub max_certificate_x: f64,
    pub max_certificate: f64,
    pub bound: f64,
    /// Grid maximum of the certificate stays below 4.
    pub certificate_below_four: bool,
    pub quasiconvexity: CheckOutcome,
    pub unimodality: UnimodalityOutcome,
    /// All samples coincide, so the objective is a single shifted loss.
    pub single_location: bool,
    pub passed: bool,
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = run(std::env::args_os(), &mut std::io::stdin(), &mut out, &mut std::io::stderr());
    if out.flush().is_err() {
        return EXIT_INPUT;
    }
    code
}

fn dispatch(command: Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = FileConfig::from_env()?;
    match command {
        Command::Estimate(flags) => {
            let cfg = RunConfig::resolve(&flags, &file, DEFAULT_GRID, Format::Json)?;
            estimate(&cfg, stdin, out, err)
        }
        Command::Losscurve { common, half_width } => {
            let cfg = RunConfig::resolve(&common, &file, LOSSCURVE_GRID, Format::Csv)?;
            losscurve(&cfg, half_width, out)
        }
        Command::Trace(flags) => {
            let cfg = RunConfig::resolve(&flags, &file, DEFAULT_GRID, Format::Csv)?;
            trace(&cfg, stdin, out, err)
        }
        Command::Certify(flags) => {
            let cfg = RunConfig::resolve(&flags, &file, CERTIFY_GRID, Format::Json)?;
            certify(&cfg, stdin, out, err)
        }
        Command::Synth {
            common,
            n,
            mass,
            fraction,
            low,
            high,
            outlier,
        } => {
            let cfg = RunConfig::resolve(&common, &file, DEFAULT_GRID, Format::Csv)?;
            let mixture = Mixture {
                n,
                mass,
                fraction,
                low,
                high,
            };
            let mut data = mixture.sample(&mut synth::rng(cfg.seed))?;
            data.extend(outlier);
            match cfg.format {
                Format::Json => write_json(out, &data)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = data.iter().map(|v| vec![v.to_string()]).collect();
                    write_csv(out, &["x"], rows)?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn read_input(cfg: &RunConfig, stdin: &mut dyn Read) -> Result<String> {
    match &cfg.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display()))),
        _ => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Error::Input(format!("cannot read standard input: {e}")))?;
            Ok(text)
        }
    }
}

fn load_columns(cfg: &RunConfig, stdin: &mut dyn Read, err: &mut dyn Write) -> Result<Vec<io::Column>> {
    let text = read_input(cfg, stdin)?;
    let table = io::read_table(&text, cfg.delimiter)?;
    let columns: Vec<io::Column> = table.select(&cfg.column)?.into_iter().cloned().collect();
    for c in &columns {
        if c.skipped > 0 {
            let _ = writeln!(
                err,
                "warning: column {:?}: skipped {} of {} cells that are not numeric",
                c.name, c.skipped, c.rows
            );
        }
    }
    Ok(columns)
}

fn single_column(cfg: &RunConfig, stdin: &mut dyn Read, err: &mut dyn Write) -> Result<io::Column> {
    let mut columns = load_columns(cfg, stdin, err)?;
    if columns.len() > 1 {
        let _ = writeln!(err, "warning: using only the first of {} selected columns", columns.len());
    }
    Ok(columns.swap_remove(0))
}

fn estimate_column(cfg: &RunConfig, values: &[f64]) -> Result<EstimateReport> {
    let est = cfg.estimator()?;
    match cfg.method {
        MethodArg::Mean => estimator::baseline_report(values, Method::Mean, &est),
        MethodArg::Median => estimator::baseline_report(values, Method::Median, &est),
        MethodArg::Mode => estimator::baseline_report(values, Method::ExactMode, &est),
        MethodArg::Oracle => estimator::oracle_report(&SampleSet::normalize(values)?, &est, cfg.grid),
        MethodArg::Pseudo | MethodArg::PseudoLipschitz | MethodArg::PseudoQuasi => {
            estimator::pseudo_mode(&SampleSet::normalize(values)?, &est)
        }
    }
}

fn estimate(cfg: &RunConfig, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let columns = load_columns(cfg, stdin, err)?;
    let mut reports = Vec::with_capacity(columns.len());
    for c in columns {
        reports.push(ColumnReport {
            report: estimate_column(cfg, &c.values)?,
            column: c.name,
            rows: c.rows,
            skipped: c.skipped,
        });
    }
    match cfg.format {
        Format::Json => write_json(out, &reports)?,
        Format::Csv => {
            let header = [
                "column",
                "rows",
                "skipped",
                "method",
                "location_raw",
                "location_normalized",
                "objective_value",
                "evaluations",
                "certified",
                "k",
                "m",
                "epsilon",
            ];
            let rows = reports
                .iter()
                .map(|c| {
                    let r = &c.report;
                    vec![
                        c.column.clone(),
                        c.rows.to_string(),
                        c.skipped.to_string(),
                        method_name(r.method),
                        r.location_raw.to_string(),
                        r.location_normalized.to_string(),
                        r.objective_value.to_string(),
                        r.evaluations.to_string(),
                        r.certified.to_string(),
                        r.parameters.k.to_string(),
                        r.parameters.m.to_string(),
                        r.parameters.epsilon.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &header, rows)?;
        }
    }
    Ok(if reports.iter().all(|c| c.report.certified) {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    })
}

fn losscurve(cfg: &RunConfig, half_width: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let loss = SmoothedHammingLoss::new(cfg.k, cfg.m)?;
    let half = half_width.unwrap_or(5.0 / cfg.k);
    if !(half.is_finite() && half > 0.0) {
        return Err(Error::InvalidParameter {
            name: "half_width",
            value: half,
            reason: "must be finite and positive",
        });
    }
    if cfg.grid < 2 {
        return Err(Error::Input("grid needs at least 2 points".into()));
    }
    let last = (cfg.grid - 1) as f64;
    // symmetric by construction: the middle row of an odd grid is exactly 0
    let rows: Vec<LossCurveRow> = (0..cfg.grid)
        .map(|i| {
            let x = half * (2.0 * i as f64 - last) / last;
            LossCurveRow {
                x,
                value: loss.value(x),
                d1: loss.d1(x),
                d2: loss.d2(x),
                region: loss.region(x).to_string(),
            }
        })
        .collect();
    match cfg.format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.x.to_string(),
                        r.value.to_string(),
                        r.d1.to_string(),
                        r.d2.to_string(),
                        r.region.clone(),
                    ]
                })
                .collect();
            write_csv(out, &["x", "value", "d1", "d2", "region"], table)?;
        }
    }
    Ok(EXIT_OK)
}

fn trace(cfg: &RunConfig, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if !matches!(
        cfg.method,
        MethodArg::Pseudo | MethodArg::PseudoLipschitz | MethodArg::PseudoQuasi
    ) {
        return Err(Error::Input("trace needs a pseudo-mode method".into()));
    }
    let column = single_column(cfg, stdin, err)?;
    let est = cfg.estimator()?;
    let (report, records) = estimator::pseudo_mode_traced(&SampleSet::normalize(&column.values)?, &est)?;
    match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Traced<'a> {
                report: &'a EstimateReport,
                trace: &'a OptimizerTrace,
            }
            write_json(
                out,
                &Traced {
                    report: &report,
                    trace: &records,
                },
            )?;
        }
        Format::Csv => write_trace_csv(out, &report, &records)?,
    }
    Ok(if report.certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn write_trace_csv(out: &mut dyn Write, report: &EstimateReport, records: &OptimizerTrace) -> Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    let lipschitz_header = ["iteration", "kind", "x", "value", "score", "gap", "evaluations"];
    let quasi_header = [
        "iteration",
        "low",
        "high",
        "width",
        "minimizers",
        "contiguous",
        "queried",
        "evaluations",
    ];
    match records {
        OptimizerTrace::Lipschitz(recs) => {
            let rows = recs
                .iter()
                .map(|r| {
                    vec![
                        r.iteration.to_string(),
                        serde_json::to_value(r.kind)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_string))
                            .unwrap_or_default(),
                        r.x.to_string(),
                        opt(r.value),
                        opt(r.score),
                        r.gap.to_string(),
                        r.evaluations.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &lipschitz_header, rows)
        }
        OptimizerTrace::QuasiConvex(recs) => {
            let rows = recs
                .iter()
                .map(|r| {
                    let queried: Vec<String> = r.queried.iter().map(f64::to_string).collect();
                    vec![
                        r.iteration.to_string(),
                        r.low.to_string(),
                        r.high.to_string(),
                        (r.high - r.low).to_string(),
                        r.minimizers.to_string(),
                        r.contiguous.to_string(),
                        queried.join(" "),
                        r.evaluations.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &quasi_header, rows)
        }
        OptimizerTrace::None => match report.method {
            Method::PseudoModeQuasiConvex => write_csv(out, &quasi_header, Vec::new()),
            _ => write_csv(out, &lipschitz_header, Vec::new()),
        },
    }
}

fn certify(cfg: &RunConfig, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if cfg.m != 2.0 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: cfg.m,
            reason: "certificate diagnostics require m = 2",
        });
    }
    if cfg.grid < 2 {
        return Err(Error::Input("grid needs at least 2 points".into()));
    }
    let column = single_column(cfg, stdin, err)?;
    let samples = SampleSet::normalize(&column.values)?;
    let objective = Objective::new(ObjectiveConfig::new(cfg.k, Aggregation::Average)?, &samples);
    let grid = Grid::unit(cfg.grid);
    let (max_x, max_f) = objective.max_certificate(grid);
    let quasiconvexity = objective.quasiconvexity_check(objective.default_delta(), grid);
    let unimodality = unimodality_check(|x| objective.value(x), grid);
    let below_four = max_f < 4.0;
    let single_location = samples.is_degenerate();
    let report = CertifyReport {
        column: column.name,
        k: cfg.k,
        samples: samples.len(),
        grid: cfg.grid,
        max_certificate_x: max_x,
        max_certificate: max_f,
        bound: certificate_bound(cfg.k),
        certificate_below_four: below_four,
        quasiconvexity,
        unimodality,
        single_location,
        passed: single_location || (below_four && quasiconvexity.passed && unimodality.passed),
    };
    match cfg.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
            let rows = vec![
                vec!["max_certificate".into(), report.max_certificate.to_string(), max_x.to_string()],
                vec!["bound".into(), report.bound.to_string(), String::new()],
                vec!["certificate_below_four".into(), below_four.to_string(), String::new()],
                vec![
                    "quasiconvexity".into(),
                    quasiconvexity.passed.to_string(),
                    opt(quasiconvexity.first_violation),
                ],
                vec!["unimodality".into(), unimodality.passed.to_string(), opt(unimodality.first_violation)],
                vec!["passed".into(), report.passed.to_string(), String::new()],
            ];
            write_csv(out, &["check", "value", "location"], rows)?;
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn method_name(method: Method) -> String {
    serde_json::to_value(method)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Input(format!("cannot write output: {e}")))
}

fn write_csv(out: &mut dyn Write, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::Input(format!("cannot write output: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Input(format!("cannot write output: {e}")))
}
