//! Command-line front end for `trf-core`: expansion, term census, closed-form
//! sub-series, method comparison, termination checks and evaluation.
//!
//! Exit codes: 0 success, 1 a module error, 2 a configuration error, 3 a check
//! that ran but failed (nonzero exact `compare` delta, failed `terminate`).

mod commands;
pub mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use trf_core::{census_cap_from_env, parse_rational, Execution, Rational, Scalar, ScalarMode};

pub use report::{csv_header, csv_records, ErrorRecord, Report, Row, RuleSummary, SeedSummary, SpecSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Expand,
    Census,
    Trf,
    Compare,
    Terminate,
    Eval,
    Catalog,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Census => "census",
            Command::Trf => "trf",
            Command::Compare => "compare",
            Command::Terminate => "terminate",
            Command::Eval => "eval",
            Command::Catalog => "catalog",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedChoice {
    Canonical,
    /// `c_0, c_1, ..., c_{arity-2}`.
    Explicit(Vec<Rational>),
}

/// Raw command-line arguments.
#[derive(Clone, Debug, Parser)]
#[command(name = "trf", version, about = "Series coefficients of m-term recurrences")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Catalog name, or inline rules such as `A=1; B=n-3`.
    #[arg(long)]
    pub equation: Option<String>,
    /// `name=p/q`, repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub c0: Option<String>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long = "N-max")]
    pub order_max: Option<usize>,
    /// Termination eigenvalue, repeatable, in order `beta_0, beta_1, ...`.
    #[arg(long = "beta")]
    pub betas: Vec<usize>,
    /// Evaluation point, a decimal or `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// `canonical` or `explicit:c0,c1,...`.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long, default_value = "exact")]
    pub mode: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Arity for `census` without an equation.
    #[arg(long)]
    pub arity: Option<usize>,
    /// List the symbolic terms in `census`.
    #[arg(long)]
    pub terms: bool,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub equation: Option<String>,
    pub params: BTreeMap<String, Rational>,
    pub lambda: Option<Rational>,
    pub c0: Option<Rational>,
    pub n_max: Option<usize>,
    pub k_max: Option<usize>,
    pub order_max: Option<usize>,
    pub betas: Vec<usize>,
    pub x: Option<f64>,
    pub seed: Option<SeedChoice>,
    pub mode: ScalarMode,
    pub format: Format,
    pub arity: Option<usize>,
    pub terms: bool,
    pub census_cap: usize,
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            equation: None,
            params: BTreeMap::new(),
            lambda: None,
            c0: None,
            n_max: None,
            k_max: None,
            order_max: None,
            betas: Vec::new(),
            x: None,
            seed: None,
            mode: ScalarMode::Exact,
            format: Format::Json,
            arity: None,
            terms: false,
            census_cap: census_cap_from_env(),
            execution: Execution::default(),
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, ErrorRecord> {
        let rational = |what: &str, s: &str| {
            parse_rational(s).map_err(|e| ErrorRecord::config(format!("--{what} `{s}`: {e}")))
        };
        let mut params = BTreeMap::new();
        for p in &cli.params {
            let (name, value) = p
                .split_once('=')
                .ok_or_else(|| ErrorRecord::config(format!("--param `{p}` is not name=p/q")))?;
            let name = name.trim();
            if name.is_empty() || params.insert(name.to_string(), rational("param", value.trim())?).is_some() {
                return Err(ErrorRecord::config(format!("--param `{p}`: empty or repeated name")));
            }
        }
        let seed = match cli.seed.as_deref().map(str::trim) {
            None => None,
            Some("canonical") => Some(SeedChoice::Canonical),
            Some(s) => {
                let list = s
                    .strip_prefix("explicit:")
                    .ok_or_else(|| ErrorRecord::config(format!("--seed `{s}`: expected canonical or explicit:c0,c1,...")))?;
                let values = list
                    .split(',')
                    .map(|v| rational("seed", v.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(SeedChoice::Explicit(values))
            }
        };
        let x = match cli.x.as_deref() {
            None => None,
            Some(s) if s.contains('/') => {
                let r = rational("x", s)?;
                Some(Scalar::to_f64(&r))
            }
            Some(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| ErrorRecord::config(format!("--x `{s}`: {e}")))?,
            ),
        };
        if x.is_some_and(|v| !v.is_finite()) {
            return Err(ErrorRecord::config("--x must be finite"));
        }
        let mode = cli
            .mode
            .parse::<ScalarMode>()
            .map_err(|e| ErrorRecord::config(format!("--mode: {e}")))?;
        Ok(Self {
            command: cli.command,
            equation: cli.equation.clone(),
            params,
            lambda: cli.lambda.as_deref().map(|s| rational("lambda", s)).transpose()?,
            c0: cli.c0.as_deref().map(|s| rational("c0", s)).transpose()?,
            n_max: cli.n_max,
            k_max: cli.k_max,
            order_max: cli.order_max,
            betas: cli.betas.clone(),
            x,
            seed,
            mode,
            format: cli.format,
            arity: cli.arity,
            terms: cli.terms,
            census_cap: census_cap_from_env(),
            execution: if cli.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command and renders its report.
pub fn run(config: &RunConfig) -> RunOutput {
    let (report, exit_code) = commands::execute(config);
    render(&report, config.format, exit_code)
}

/// Entry point shared by the binary and tests: parses nothing, writes nothing.
pub fn run_cli(cli: &Cli) -> RunOutput {
    match RunConfig::from_cli(cli) {
        Ok(config) => run(&config),
        Err(err) => {
            let report = Report {
                command: cli.command.as_str().into(),
                spec: None,
                results: Vec::new(),
                errors: vec![err],
            };
            render(&report, cli.format, EXIT_CONFIG)
        }
    }
}

fn render(report: &Report, format: Format, exit_code: i32) -> RunOutput {
    let mut stderr = String::new();
    let stdout = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            for e in &report.errors {
                let _ = writeln!(stderr, "{}", error_line(e));
            }
            let mut writer = csv::Writer::from_writer(Vec::new());
            let header = csv_header(&report.command);
            writer.write_record(header).expect("in-memory write");
            for record in csv_records(report) {
                writer.write_record(&record).expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        Format::Text => render_text(report),
    };
    RunOutput {
        exit_code,
        stdout,
        stderr,
    }
}

fn error_line(e: &ErrorRecord) -> String {
    let index = e.index.map(|i| format!(" at index {i}")).unwrap_or_default();
    format!("error[{}] {}::{}{}: {}", e.kind, e.module, e.operation, index, e.message)
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    if let Some(spec) = &report.spec {
        let _ = writeln!(out, "{} (arity {}, c0 = {}, lambda = {})", spec.name, spec.arity, spec.c0, spec.lambda);
        for r in &spec.rules {
            let _ = writeln!(out, "  {}_n = {}", r.label, r.rule);
        }
    }
    let header = csv_header(&report.command);
    for record in csv_records(report) {
        let fields: Vec<String> = header
            .iter()
            .zip(&record)
            .filter(|(_, v)| !v.is_empty())
            .map(|(h, v)| format!("{h}={v}"))
            .collect();
        let _ = writeln!(out, "{}", fields.join("  "));
    }
    for e in &report.errors {
        let _ = writeln!(out, "{}", error_line(e));
    }
    out
}

/// Runs a parsed command line, honouring `--out`. Returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let output = run_cli(cli);
    eprint!("{}", output.stderr);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.stdout) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_ERROR;
            }
        }
        None => print!("{}", output.stdout),
    }
    output.exit_code
}
