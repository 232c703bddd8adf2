//! The `longrun` command line.
//!
//! Exit codes: 0 on success, 1 when `test --fail-on-reject` rejects, 2 for
//! input errors, 3 for configuration errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use longrun_core::alternative_power::{power_with_null, CriticalRegion, POrigin};
use longrun_core::brute_oracle::{enumerate_joint, DEFAULT_CAP};
use longrun_core::rational::{parse_rational, to_decimal};
use longrun_core::{
    convergence_report, null_table_riordan, AlternativeSpec, BigRational, Convention,
    DiscrepancyReport, ProbabilityTable, Tail, ZeroPolicy,
};
use serde::Serialize;

use crate::cache::TableCache;
use crate::ingest::{read_series, read_series_path};
use crate::render::{csv_cells, json, text_lines, Format, Prob, DEFAULT_PRECISION, SCHEMA_VERSION};
use crate::report::{convention_name, run_test, tail_name, Decision, TestConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "longrun",
    version,
    about = "Longest-run lack-of-fit test for univariate regression"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Significant digits in decimal renderings.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
    /// Handling of residuals that are exactly zero.
    #[arg(long, global = true, value_enum, default_value_t = ZeroPolicyArg::Error)]
    pub zero_policy: ZeroPolicyArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroPolicyArg {
    Error,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailArg {
    Unilateral,
    Bilateral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullEngineArg {
    Counting,
    Riordan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountEngineArg {
    Dp,
    Proposition1,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::Unilateral => Tail::Unilateral,
            TailArg::Bilateral => Tail::Bilateral,
        }
    }
}

impl From<ZeroPolicyArg> for ZeroPolicy {
    fn from(z: ZeroPolicyArg) -> Self {
        match z {
            ZeroPolicyArg::Error => ZeroPolicy::Error,
            ZeroPolicyArg::Drop => ZeroPolicy::Drop,
        }
    }
}

fn convention(conservative: bool) -> Convention {
    if conservative {
        Convention::Conservative
    } else {
        Convention::Standard
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the test on a CSV of (x, y, fitted) or (x, residual); `-` reads stdin.
    Test {
        input: PathBuf,
        #[arg(long, default_value = "0.05")]
        alpha: String,
        #[arg(long, value_enum, default_value_t = TailArg::Unilateral)]
        tail: TailArg,
        /// Use the smallest c with Pr(L_n > c) <= alpha.
        #[arg(long)]
        conservative: bool,
        /// Exit with code 1 when the test rejects.
        #[arg(long)]
        fail_on_reject: bool,
    },
    /// Null pmf and cdf of L_n.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = NullEngineArg::Counting)]
        engine: NullEngineArg,
    },
    /// Critical value c_{n,alpha}.
    Critical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        conservative: bool,
    },
    /// Exact power against a constant-shift alternative.
    #[command(group(ArgGroup::new("alternative").required(true).args(["p", "shift"])))]
    Power {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0.05")]
        alpha: String,
        /// Probability that a residual is positive.
        #[arg(long)]
        p: Option<String>,
        /// Shift c of the regression function (Gaussian errors).
        #[arg(long, requires = "sigma", allow_hyphen_values = true)]
        shift: Option<f64>,
        /// Error standard deviation for --shift.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, value_enum, default_value_t = TailArg::Unilateral)]
        tail: TailArg,
        #[arg(long)]
        conservative: bool,
    },
    /// Counts S_n^(k)(x) of sequences with k positives and no run above x.
    Snk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: usize,
        #[arg(long, value_enum, default_value_t = CountEngineArg::Dp)]
        engine: CountEngineArg,
    },
    /// Gap between Pr(L_n <= k) and Pr(L_n^+ <= k) over a grid of lengths.
    Converge {
        #[arg(long)]
        p: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        n_grid: Vec<usize>,
    },
    /// Joint (k, L_n) counts by exhaustive enumeration (n <= 24).
    Oracle {
        #[arg(long)]
        n: usize,
    },
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            exit_code: 0,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
///
/// Returns `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                (code, String::new(), rendered)
            } else {
                (code, rendered, String::new())
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => (outcome.exit_code, outcome.stdout, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("longrun: {e}\n")),
    }
}

fn config_value(name: &str, text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(|_| CliError::Config(format!("--{name}: cannot parse {text:?}")))
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.precision == 0 || cli.precision > 1000 {
        return Err(CliError::Config(format!(
            "--precision must be in 1..=1000, got {}",
            cli.precision
        )));
    }
    let digits = cli.precision;
    let cache = TableCache::global();
    match &cli.command {
        Command::Test {
            input,
            alpha,
            tail,
            conservative,
            fail_on_reject,
        } => {
            let config = TestConfig {
                alpha: config_value("alpha", alpha)?,
                tail: (*tail).into(),
                convention: convention(*conservative),
                zero_policy: cli.zero_policy.into(),
            };
            check_alpha(&config.alpha)?;
            let series = if input.as_os_str() == "-" {
                let mut buffer = Vec::new();
                std::io::stdin()
                    .read_to_end(&mut buffer)
                    .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
                read_series(buffer.as_slice())?
            } else {
                read_series_path(input)?
            };
            let report = run_test(&series, &config)?;
            let stdout = match cli.format {
                Format::Json => json(&report.to_json_value(digits)),
                Format::Csv => report.to_csv(digits),
                Format::Text => report.to_text(digits),
            };
            let exit_code = if *fail_on_reject && report.decision == Decision::Reject {
                1
            } else {
                0
            };
            Ok(Outcome { stdout, exit_code })
        }
        Command::Table { n, engine } => {
            let (table, report) = match engine {
                NullEngineArg::Counting => ((*cache.null_table(*n)?).clone(), None),
                NullEngineArg::Riordan => {
                    let r = null_table_riordan(*n)?;
                    (r.table, Some(r.report))
                }
            };
            let name = match engine {
                NullEngineArg::Counting => "counting",
                NullEngineArg::Riordan => "riordan",
            };
            Ok(Outcome::ok(render_table(
                &table,
                name,
                report.as_ref(),
                cli.format,
                digits,
            )))
        }
        Command::Critical {
            n,
            alpha,
            conservative,
        } => {
            let alpha = config_value("alpha", alpha)?;
            let table = cache.null_table(*n)?;
            let cv = table.critical_value(&alpha, convention(*conservative))?;
            let stdout = match cli.format {
                Format::Json => json(&CriticalJson {
                    schema: SCHEMA_VERSION,
                    command: "critical",
                    n: cv.n,
                    alpha: Prob::new(&cv.alpha, digits),
                    convention: cv.convention,
                    c: cv.c,
                    attained_level: Prob::new(&cv.attained_level, digits),
                }),
                Format::Csv => format!(
                    "n,alpha,convention,c,attained_num,attained_den,attained\n{},{},{},{},{}\n",
                    cv.n,
                    to_decimal(&cv.alpha, digits),
                    convention_name(cv.convention),
                    cv.c,
                    csv_cells(&cv.attained_level, digits)
                ),
                Format::Text => text_lines(&[
                    ("n", cv.n.to_string()),
                    ("alpha", to_decimal(&cv.alpha, digits)),
                    ("convention", convention_name(cv.convention).to_string()),
                    ("critical value", cv.c.to_string()),
                    ("Pr(L_n > c)", to_decimal(&cv.attained_level, digits)),
                ]),
            };
            Ok(Outcome::ok(stdout))
        }
        Command::Power {
            n,
            alpha,
            p,
            shift,
            sigma,
            tail,
            conservative,
        } => {
            let alpha = config_value("alpha", alpha)?;
            let spec = match (p, shift, sigma) {
                (Some(p), _, _) => AlternativeSpec::direct(config_value("p", p)?)?,
                (None, Some(c), Some(s)) => AlternativeSpec::gaussian_shift(*c, *s)?,
                _ => return Err(CliError::Config("need --p or --shift with --sigma".into())),
            };
            let null = cache.null_table(*n)?;
            let result = power_with_null(
                &null,
                &alpha,
                (*tail).into(),
                convention(*conservative),
                &spec,
            )?;
            Ok(Outcome::ok(render_power(&result, cli.format, digits)))
        }
        Command::Snk { n, x, engine } => {
            let (table, report) = match engine {
                CountEngineArg::Dp => ((*cache.counts(*n, *x)?).clone(), None),
                CountEngineArg::Proposition1 => {
                    let engine = cache.proposition1()?;
                    (engine.counts(*n, *x)?, Some(engine.report().clone()))
                }
            };
            let stdout = match cli.format {
                Format::Json => json(&SnkJson {
                    schema: SCHEMA_VERSION,
                    command: "snk",
                    n: table.n(),
                    x: table.x(),
                    engine: table.engine(),
                    counts: table
                        .counts()
                        .iter()
                        .enumerate()
                        .map(|(k, c)| CountRow {
                            k,
                            count: c.to_string(),
                        })
                        .collect(),
                    total: table.total().to_string(),
                    report,
                }),
                Format::Csv => {
                    let mut out = String::from("k,count\n");
                    for (k, c) in table.counts().iter().enumerate() {
                        let _ = writeln!(out, "{k},{c}");
                    }
                    out
                }
                Format::Text => {
                    let mut out = format!(
                        "S_{}^(k)({}) by {:?}\n",
                        table.n(),
                        table.x(),
                        table.engine()
                    );
                    for (k, c) in table.counts().iter().enumerate() {
                        let _ = writeln!(out, "{k:>6}  {c}");
                    }
                    let _ = writeln!(out, " total  {}", table.total());
                    out
                }
            };
            Ok(Outcome::ok(stdout))
        }
        Command::Converge { p, k, n_grid } => {
            let p = config_value("p", p)?;
            let report = convergence_report(*k, &p, n_grid)?;
            let stdout = match cli.format {
                Format::Json => json(&ConvergeJson {
                    schema: SCHEMA_VERSION,
                    command: "converge",
                    k: report.k,
                    p: Prob::new(&report.p, digits),
                    uses_negative_runs: report.uses_negative_runs,
                    rows: report
                        .rows
                        .iter()
                        .map(|r| ConvergeRow {
                            n: r.n,
                            longest_cdf: Prob::new(&r.longest, digits),
                            one_sided_cdf: Prob::new(&r.one_sided, digits),
                            diff: Prob::new(&r.difference, digits),
                        })
                        .collect(),
                    strictly_decreasing: report.strictly_decreasing(),
                    shrink_factor: report.shrink_factor().map(|f| Prob::new(&f, digits)),
                }),
                Format::Csv => {
                    let mut out = String::from("n,diff\n");
                    for r in &report.rows {
                        let _ = writeln!(out, "{},{}", r.n, to_decimal(&r.difference, digits));
                    }
                    out
                }
                Format::Text => {
                    let side = if report.uses_negative_runs {
                        "L_n^-"
                    } else {
                        "L_n^+"
                    };
                    let mut out = format!(
                        "|Pr(L_n <= {k}) - Pr({side} <= {k})| at p = {}\n",
                        to_decimal(&report.p, digits)
                    );
                    for r in &report.rows {
                        let _ = writeln!(out, "{:>8}  {}", r.n, to_decimal(&r.difference, digits));
                    }
                    out
                }
            };
            Ok(Outcome::ok(stdout))
        }
        Command::Oracle { n } => {
            let joint = enumerate_joint(*n)?;
            let stdout = match cli.format {
                Format::Json => json(&OracleJson {
                    schema: SCHEMA_VERSION,
                    command: "oracle",
                    n: joint.n(),
                    cap: DEFAULT_CAP,
                    total: joint.total(),
                    cells: joint
                        .cells()
                        .map(|(k, l, count)| OracleCell { k, l, count })
                        .collect(),
                }),
                Format::Csv | Format::Text => {
                    let mut out = String::from("k,l,count\n");
                    for (k, l, count) in joint.cells() {
                        let _ = writeln!(out, "{k},{l},{count}");
                    }
                    out
                }
            };
            Ok(Outcome::ok(stdout))
        }
    }
}

fn check_alpha(alpha: &BigRational) -> Result<(), CliError> {
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if *alpha <= zero || *alpha >= one {
        return Err(CliError::Config(
            "--alpha must lie strictly between 0 and 1".into(),
        ));
    }
    Ok(())
}

fn render_table(
    table: &ProbabilityTable,
    engine: &'static str,
    report: Option<&DiscrepancyReport>,
    format: Format,
    digits: usize,
) -> String {
    match format {
        Format::Json => json(&TableJson {
            schema: SCHEMA_VERSION,
            command: "table",
            n: table.n(),
            engine,
            regime: "null",
            rows: table
                .rows()
                .map(|(k, pmf, cdf)| TableRow {
                    k,
                    pmf: Prob::new(pmf, digits),
                    cdf: Prob::new(cdf, digits),
                })
                .collect(),
            report,
        }),
        Format::Csv => {
            let mut out = String::from("k,pmf_num,pmf_den,pmf,cdf_num,cdf_den,cdf\n");
            for (k, pmf, cdf) in table.rows() {
                let _ = writeln!(
                    out,
                    "{k},{},{}",
                    csv_cells(pmf, digits),
                    csv_cells(cdf, digits)
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "null law of L_{} ({engine})\n{:>6}  {:>14}  {:>14}\n",
                table.n(),
                "k",
                "Pr(L=k)",
                "Pr(L<=k)"
            );
            for (k, pmf, cdf) in table.rows() {
                let _ = writeln!(
                    out,
                    "{k:>6}  {:>14}  {:>14}",
                    to_decimal(pmf, digits),
                    to_decimal(cdf, digits)
                );
            }
            out
        }
    }
}

fn render_power(result: &longrun_core::PowerResult, format: Format, digits: usize) -> String {
    let (c_lower, c) = match result.critical_region {
        CriticalRegion::Upper { upper } => (None, upper),
        CriticalRegion::TwoSided { lower, upper } => (Some(lower), upper),
    };
    let origin = match result.spec.origin() {
        POrigin::Direct => OriginJson {
            kind: "direct",
            shift: None,
            sigma: None,
        },
        POrigin::GaussianShift { c, sigma } => OriginJson {
            kind: "gaussian_shift",
            shift: Some(c),
            sigma: Some(sigma),
        },
    };
    match format {
        Format::Json => json(&PowerJson {
            schema: SCHEMA_VERSION,
            command: "power",
            n: result.n,
            alpha: Prob::new(&result.alpha, digits),
            tail: result.tail,
            convention: result.convention,
            p: Prob::new(result.spec.p(), digits),
            p_origin: origin,
            c,
            c_lower,
            critical_region: result.critical_region,
            size: Prob::new(&result.size, digits),
            power: Prob::new(&result.power, digits),
        }),
        Format::Csv => format!(
            "n,alpha,tail,convention,p,c_lower,c_upper,power_num,power_den,power\n{},{},{},{},{},{},{},{}\n",
            result.n,
            to_decimal(&result.alpha, digits),
            tail_name(result.tail),
            convention_name(result.convention),
            to_decimal(result.spec.p(), digits),
            c_lower.map(|c| c.to_string()).unwrap_or_default(),
            c,
            csv_cells(&result.power, digits)
        ),
        Format::Text => {
            let region = match result.critical_region {
                CriticalRegion::Upper { upper } => format!("L > {upper}"),
                CriticalRegion::TwoSided { lower, upper } => format!("L < {lower} or L > {upper}"),
            };
            text_lines(&[
                ("n", result.n.to_string()),
                ("alpha", to_decimal(&result.alpha, digits)),
                ("p", to_decimal(result.spec.p(), digits)),
                ("rejection region", format!("{region} ({} tail, {} convention)", tail_name(result.tail), convention_name(result.convention))),
                ("size", to_decimal(&result.size, digits)),
                ("power", to_decimal(&result.power, digits)),
            ])
        }
    }
}

#[derive(Serialize)]
struct TableRow {
    k: usize,
    pmf: Prob,
    cdf: Prob,
}

#[derive(Serialize)]
struct TableJson<'a> {
    schema: u32,
    command: &'static str,
    n: usize,
    engine: &'static str,
    regime: &'static str,
    rows: Vec<TableRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a DiscrepancyReport>,
}

#[derive(Serialize)]
struct CriticalJson {
    schema: u32,
    command: &'static str,
    n: usize,
    alpha: Prob,
    convention: Convention,
    c: usize,
    attained_level: Prob,
}

#[derive(Serialize)]
struct OriginJson {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
}

#[derive(Serialize)]
struct PowerJson {
    schema: u32,
    command: &'static str,
    n: usize,
    alpha: Prob,
    tail: Tail,
    convention: Convention,
    p: Prob,
    p_origin: OriginJson,
    /// Upper critical value.
    c: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_lower: Option<usize>,
    critical_region: CriticalRegion,
    size: Prob,
    power: Prob,
}

#[derive(Serialize)]
struct CountRow {
    k: usize,
    count: String,
}

#[derive(Serialize)]
struct SnkJson {
    schema: u32,
    command: &'static str,
    n: usize,
    x: usize,
    engine: longrun_core::CountEngine,
    counts: Vec<CountRow>,
    total: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<DiscrepancyReport>,
}

#[derive(Serialize)]
struct ConvergeRow {
    n: usize,
    longest_cdf: Prob,
    one_sided_cdf: Prob,
    diff: Prob,
}

#[derive(Serialize)]
struct ConvergeJson {
    schema: u32,
    command: &'static str,
    k: usize,
    p: Prob,
    uses_negative_runs: bool,
    rows: Vec<ConvergeRow>,
    strictly_decreasing: bool,
    shrink_factor: Option<Prob>,
}

#[derive(Serialize)]
struct OracleCell {
    k: usize,
    l: usize,
    count: u64,
}

#[derive(Serialize)]
struct OracleJson {
    schema: u32,
    command: &'static str,
    n: usize,
    cap: usize,
    total: u64,
    cells: Vec<OracleCell>,
}
