//! Report schema shared by every output format.

use serde::{Deserialize, Serialize};
use trf_core::{ScalarMode, TableKind, Verdict};

/// Top-level JSON document. Key names are stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub spec: Option<SpecSummary>,
    pub results: Vec<Row>,
    pub errors: Vec<ErrorRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub name: String,
    pub arity: usize,
    pub rules: Vec<RuleSummary>,
    pub seed: SeedSummary,
    pub lambda: String,
    pub c0: String,
    pub mode: ScalarMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSummary {
    pub label: String,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSummary {
    Canonical,
    /// `c_1 ..= c_{arity-2}`; `c_0` is reported separately.
    Explicit(Vec<String>),
}

/// One result row. Exact values are `"p/q"` strings, approximate values are
/// shortest round-trip decimals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "row", rename_all = "snake_case")]
pub enum Row {
    Coefficient {
        n: usize,
        value: String,
    },
    Census {
        n: usize,
        arity: usize,
        count: String,
        value: Option<String>,
        terms: Option<Vec<String>>,
    },
    Subseries {
        order: usize,
        power: usize,
        kind: TableKind,
        value: String,
    },
    Compare {
        k: usize,
        direct: String,
        census: Option<String>,
        trf: Option<String>,
        delta_census: Option<String>,
        delta_trf: Option<String>,
    },
    Termination {
        i: usize,
        beta: usize,
        index: usize,
        value: String,
        vanishes: bool,
    },
    TerminationSummary {
        monotone: bool,
        passed: bool,
    },
    PartialSum {
        x: f64,
        lambda: f64,
        k_max: usize,
        value: f64,
    },
    SubseriesSum {
        order: usize,
        value: f64,
    },
    SubseriesTotal {
        value: f64,
    },
    ScaledRatio {
        n: usize,
        value: Option<f64>,
    },
    Convergence {
        verdict: Verdict,
        last_term: Option<f64>,
        tail_decreasing: bool,
        undefined_ratios: usize,
    },
    CatalogEntry {
        name: String,
        summary: String,
        arity: Option<usize>,
        required: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub module: String,
    pub operation: String,
    pub index: Option<usize>,
    pub message: String,
}

impl ErrorRecord {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: "ConfigError".into(),
            module: "cli".into(),
            operation: "run".into(),
            index: None,
            message: message.into(),
        }
    }

    pub fn from_core(err: &trf_core::Error, module: &str, operation: &str) -> Self {
        Self {
            kind: err.kind().into(),
            module: module.into(),
            operation: operation.into(),
            index: err.index(),
            message: err.to_string(),
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Fixed CSV header for a command.
pub fn csv_header(command: &str) -> &'static [&'static str] {
    match command {
        "expand" => &["n", "value"],
        "census" => &["n", "arity", "count", "value", "terms"],
        "trf" => &["order", "power", "kind", "value"],
        "compare" => &["k", "direct", "census", "trf", "delta_census", "delta_trf"],
        "terminate" => &["i", "beta", "index", "value", "vanishes", "monotone", "passed"],
        "eval" => &["quantity", "order", "index", "value"],
        "catalog" => &["name", "arity", "required", "summary"],
        _ => &[],
    }
}

fn kind_str(kind: TableKind) -> &'static str {
    match kind {
        TableKind::Truncated => "truncated",
        TableKind::Polynomial => "polynomial",
    }
}

fn verdict_str(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::LikelyConvergent => "likely_convergent",
        Verdict::Divergent => "divergent",
        Verdict::Inconclusive => "inconclusive",
        Verdict::Undefined => "undefined",
    }
}

/// CSV records for the rows of one report, matching [`csv_header`].
pub fn csv_records(report: &Report) -> Vec<Vec<String>> {
    let summary = report.results.iter().find_map(|r| match r {
        Row::TerminationSummary { monotone, passed } => Some((*monotone, *passed)),
        _ => None,
    });
    let mut out = Vec::new();
    for row in &report.results {
        match row {
            Row::Coefficient { n, value } => out.push(vec![n.to_string(), value.clone()]),
            Row::Census {
                n,
                arity,
                count,
                value,
                terms,
            } => out.push(vec![
                n.to_string(),
                arity.to_string(),
                count.clone(),
                opt(value),
                terms.as_ref().map(|t| t.join(" + ")).unwrap_or_default(),
            ]),
            Row::Subseries {
                order,
                power,
                kind,
                value,
            } => out.push(vec![order.to_string(), power.to_string(), kind_str(*kind).into(), value.clone()]),
            Row::Compare {
                k,
                direct,
                census,
                trf,
                delta_census,
                delta_trf,
            } => out.push(vec![
                k.to_string(),
                direct.clone(),
                opt(census),
                opt(trf),
                opt(delta_census),
                opt(delta_trf),
            ]),
            Row::Termination {
                i,
                beta,
                index,
                value,
                vanishes,
            } => {
                let (monotone, passed) = summary.unwrap_or((false, false));
                out.push(vec![
                    i.to_string(),
                    beta.to_string(),
                    index.to_string(),
                    value.clone(),
                    vanishes.to_string(),
                    monotone.to_string(),
                    passed.to_string(),
                ]);
            }
            Row::TerminationSummary { .. } => {}
            Row::PartialSum { k_max, value, .. } => {
                out.push(vec!["partial_sum".into(), String::new(), k_max.to_string(), float(*value)])
            }
            Row::SubseriesSum { order, value } => {
                out.push(vec!["subseries_sum".into(), order.to_string(), String::new(), float(*value)])
            }
            Row::SubseriesTotal { value } => {
                out.push(vec!["subseries_total".into(), String::new(), String::new(), float(*value)])
            }
            Row::ScaledRatio { n, value } => {
                out.push(vec!["scaled_ratio".into(), String::new(), n.to_string(), opt_float(*value)])
            }
            Row::Convergence {
                verdict,
                last_term,
                tail_decreasing,
                undefined_ratios,
            } => {
                let blank = String::new;
                out.push(vec!["last_term".into(), blank(), blank(), opt_float(*last_term)]);
                out.push(vec!["tail_decreasing".into(), blank(), blank(), tail_decreasing.to_string()]);
                out.push(vec!["undefined_ratios".into(), blank(), blank(), undefined_ratios.to_string()]);
                out.push(vec!["verdict".into(), blank(), blank(), verdict_str(*verdict).into()]);
            }
            Row::CatalogEntry {
                name,
                summary,
                arity,
                required,
            } => out.push(vec![name.clone(), opt(arity), required.join(" "), summary.clone()]),
        }
    }
    out
}
