//! Series-solution engine for linear ODEs whose Frobenius coefficients obey
//! two- to five-term recurrences.
//!
//! The three-term case gets a closed form: the coefficients split into
//! sub-series `y_N` by the number of `A` factors per term, each given by
//! nested sums of products of the recurrence coefficients. Every route to the
//! coefficients (direct recursion, term census, closed form) is exposed so
//! they can be checked against each other exactly.

pub mod catalog;
pub mod census;
pub mod closed_form;
pub mod error;
pub mod exec;
pub mod expr;
pub mod recurrence;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use exec::Execution;
pub use recurrence::{
    direct_expand, direct_expand_capped, ratio_sequence, recurrence_residuals, seed_coefficients,
    CoefficientRule, CoefficientSequence, ConstantRule, FnRule, Method, RatioEntry,
    RecurrenceSpec, RuleLabel, RuleTable, SeedRule, SharedRule, Singularity,
};
pub use scalar::{format_rational, parse_rational, Rational, Scalar, ScalarMode};
pub use census::{
    census_cap_from_env, census_expand, count_terms, enumerate_terms, enumerate_terms_with, evaluate_terms,
    CensusOptions, Step, CENSUS_CAP_ENV, DEFAULT_CENSUS_CAP, SymbolicTerm, TermList,
};
pub use closed_form::{
    assemble_coefficients, closed_form_expand, subseries_infinite, subseries_infinite_with,
    subseries_limit_form, subseries_limit_form_with, subseries_polynomial,
    subseries_polynomial_with, subseries_by_recursion, subseries_small_order, subseries_tables, verify_termination,
    ClosedFormOptions, SubSeriesTable, TableKind, TerminationCheck, TerminationProfile,
    TerminationReport,
};
pub use catalog::{
    catalog_specs, generating_reference, lame_rules, lame_spec, lookup, taylor_coefficients,
    two_term_series, CatalogEntry, CatalogSpec, GeneratingKind, LameParams, TwoTermBound,
};
pub use expr::{parse_inline_rules, ExprRule};
pub use series::{
    convergence_report, eval_partial, eval_partial_exact, eval_subseries_split, ConvergenceReport, EvalMode,
    EvalRequest, RatioDiagnostic, SplitEvaluation, SubseriesValue, Verdict,
};
