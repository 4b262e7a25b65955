//! Recurrence specifications and direct forward expansion.
//!
//! An arity-`m` recurrence relates `m` consecutive coefficients,
//!
//! ```text
//! c_{n+1} = A_n c_n + B_n c_{n-1} + C_n c_{n-2} + D_n c_{n-3}
//! ```
//!
//! truncated to the first `m - 1` rules. Arity 2 is the two-term product
//! `c_{n+1} = A_n c_n`.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{integer, Rational, Scalar, ScalarMode};

pub const MIN_ARITY: usize = 2;
pub const MAX_ARITY: usize = 5;

/// Default bound on `n_max` for [`direct_expand`].
pub const DEFAULT_EXPANSION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleLabel {
    A,
    B,
    C,
    D,
}

impl RuleLabel {
    pub const ALL: [RuleLabel; 4] = [RuleLabel::A, RuleLabel::B, RuleLabel::C, RuleLabel::D];

    /// Label of the rule multiplying `c_{n-position}`.
    pub fn from_position(position: usize) -> Option<RuleLabel> {
        Self::ALL.get(position).copied()
    }

    pub fn position(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            RuleLabel::A => 'A',
            RuleLabel::B => 'B',
            RuleLabel::C => 'C',
            RuleLabel::D => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<RuleLabel> {
        match c.to_ascii_uppercase() {
            'A' => Some(RuleLabel::A),
            'B' => Some(RuleLabel::B),
            'C' => Some(RuleLabel::C),
            'D' => Some(RuleLabel::D),
            _ => None,
        }
    }
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Why a rule could not produce a value at some index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Singularity(pub String);

/// A coefficient rule `n -> A_n` (or `B_n`, ...). Must be deterministic.
pub trait CoefficientRule: Send + Sync {
    fn evaluate(&self, n: usize) -> Result<Rational, Singularity>;

    /// Short human-readable form, e.g. `1` or `(n-3)/(n+1)`.
    fn describe(&self) -> String;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantRule(pub Rational);

impl CoefficientRule for ConstantRule {
    fn evaluate(&self, _n: usize) -> Result<Rational, Singularity> {
        Ok(self.0.clone())
    }

    fn describe(&self) -> String {
        crate::scalar::format_rational(&self.0)
    }
}

/// Wraps a closure as a rule.
pub struct FnRule<F> {
    description: String,
    f: F,
}

impl<F> FnRule<F>
where
    F: Fn(usize) -> Result<Rational, Singularity> + Send + Sync,
{
    pub fn new(description: impl Into<String>, f: F) -> Self {
        Self {
            description: description.into(),
            f,
        }
    }
}

impl<F> CoefficientRule for FnRule<F>
where
    F: Fn(usize) -> Result<Rational, Singularity> + Send + Sync,
{
    fn evaluate(&self, n: usize) -> Result<Rational, Singularity> {
        (self.f)(n)
    }

    fn describe(&self) -> String {
        self.description.clone()
    }
}

pub type SharedRule = Arc<dyn CoefficientRule>;

/// How `c_1 .. c_{m-2}` are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum SeedRule {
    /// Run the recurrence from `c_0` treating negative indices as zero:
    /// `c_1 = A_0 c_0`, `c_2 = (A_0 A_1 + B_1) c_0`, ...
    Canonical,
    /// Caller-supplied `c_1 .. c_{m-2}`; `c_0` comes from the spec.
    Explicit(Vec<Rational>),
}

impl SeedRule {
    pub fn is_canonical(&self) -> bool {
        matches!(self, SeedRule::Canonical)
    }
}

#[derive(Clone)]
pub struct RecurrenceSpec {
    name: String,
    rules: Vec<SharedRule>,
    seed: SeedRule,
    lambda: Rational,
    c0: Rational,
    mode: ScalarMode,
}

impl fmt::Debug for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrenceSpec")
            .field("name", &self.name)
            .field("rules", &self.rule_descriptions())
            .field("seed", &self.seed)
            .field("lambda", &self.lambda)
            .field("c0", &self.c0)
            .field("mode", &self.mode)
            .finish()
    }
}

impl RecurrenceSpec {
    /// `rules[0]` is `A`, `rules[1]` is `B`, and so on; the arity is `rules.len() + 1`.
    ///
    /// Canonical seeds need `c0 != 0`. Explicit seeds may start from zero,
    /// as the k-nacci counting sequences do.
    pub fn new(rules: Vec<SharedRule>, seed: SeedRule, c0: Rational) -> Result<Self> {
        let arity = rules.len() + 1;
        if !(MIN_ARITY..=MAX_ARITY).contains(&arity) {
            return Err(Error::Arity {
                expected: format!("{MIN_ARITY}..={MAX_ARITY}"),
                found: arity,
            });
        }
        match &seed {
            SeedRule::Canonical if c0.is_zero() => {
                return Err(Error::InvalidSpec(
                    "c0 must be nonzero for canonical seeds".into(),
                ))
            }
            SeedRule::Explicit(values) if values.len() != arity - 2 => {
                return Err(Error::Seed(format!(
                    "arity {arity} needs {} explicit seeds after c0, got {}",
                    arity - 2,
                    values.len()
                )))
            }
            _ => {}
        }
        Ok(Self {
            name: String::from("custom"),
            rules,
            seed,
            lambda: Rational::zero(),
            c0,
            mode: ScalarMode::Exact,
        })
    }

    /// Canonical-seeded spec with `c0 = 1`.
    pub fn canonical(rules: Vec<SharedRule>) -> Result<Self> {
        Self::new(rules, SeedRule::Canonical, integer(1))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_lambda(mut self, lambda: Rational) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_mode(mut self, mode: ScalarMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_c0(self, c0: Rational) -> Result<Self> {
        let Self {
            name,
            rules,
            seed,
            lambda,
            mode,
            ..
        } = self;
        Ok(Self::new(rules, seed, c0)?
            .with_name(name)
            .with_lambda(lambda)
            .with_mode(mode))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.rules.len() + 1
    }

    pub fn rules(&self) -> &[SharedRule] {
        &self.rules
    }

    pub fn seed(&self) -> &SeedRule {
        &self.seed
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn c0(&self) -> &Rational {
        &self.c0
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn rule_descriptions(&self) -> Vec<(RuleLabel, String)> {
        self.rules
            .iter()
            .enumerate()
            .map(|(k, rule)| (RuleLabel::ALL[k], rule.describe()))
            .collect()
    }

    /// Evaluates the rule at `position` (0 = `A`) at index `n`.
    pub fn rule_value(&self, position: usize, n: usize) -> Result<Rational> {
        let label = RuleLabel::from_position(position).filter(|_| position < self.rules.len());
        let Some(label) = label else {
            return Err(Error::Arity {
                expected: format!("a rule at position {position}"),
                found: self.arity(),
            });
        };
        self.rules[position]
            .evaluate(n)
            .map_err(|Singularity(reason)| Error::RuleEvaluation {
                label,
                index: n,
                reason,
            })
    }

    pub(crate) fn require_arity(&self, arity: usize) -> Result<()> {
        if self.arity() == arity {
            Ok(())
        } else {
            Err(Error::Arity {
                expected: arity.to_string(),
                found: self.arity(),
            })
        }
    }

    pub(crate) fn require_canonical(&self) -> Result<()> {
        if self.seed.is_canonical() {
            Ok(())
        } else {
            Err(Error::Seed(
                "the closed-form expansion assumes canonical seeds (c_1 = A_0 c_0)".into(),
            ))
        }
    }
}

/// Rule values for indices `0..len`, evaluated once and shared read-only.
/// Failures are kept and reported only if the index is actually used.
pub struct RuleTable<S> {
    values: Vec<Vec<Result<S>>>,
}

impl<S: Scalar> RuleTable<S> {
    pub fn new(spec: &RecurrenceSpec, len: usize) -> Self {
        let values = (0..spec.rules.len())
            .map(|k| {
                (0..len)
                    .map(|n| spec.rule_value(k, n).map(|v| S::from_rational(&v)))
                    .collect()
            })
            .collect();
        Self { values }
    }

    pub fn get(&self, label: RuleLabel, n: usize) -> Result<&S> {
        match self.values.get(label.position()).and_then(|row| row.get(n)) {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::InvalidSpec(format!(
                "rule {label} requested at n = {n} outside the tabulated range"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Census,
    Trf,
    TwoTermProduct,
}

/// `c_0 ..= c_{n_max}` together with the method that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence<S> {
    pub values: Vec<S>,
    pub method: Method,
}

impl<S: Scalar> CoefficientSequence<S> {
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&S> {
        self.values.get(n)
    }
}

/// Returns `[c_0, ..., c_{m-2}]`.
pub fn seed_coefficients<S: Scalar>(spec: &RecurrenceSpec) -> Result<Vec<S>> {
    let arity = spec.arity();
    let mut seeds = Vec::with_capacity(arity - 1);
    seeds.push(S::from_rational(spec.c0()));
    match spec.seed() {
        SeedRule::Explicit(values) => {
            seeds.extend(values.iter().map(S::from_rational));
        }
        SeedRule::Canonical => {
            for j in 1..arity - 1 {
                let next = recurrence_step(spec, &seeds, j - 1)?;
                seeds.push(next);
            }
        }
    }
    Ok(seeds)
}

/// `sum_k rule_k(n) * c_{n-k}` over the terms whose `c` index is non-negative.
fn recurrence_step<S: Scalar>(spec: &RecurrenceSpec, values: &[S], n: usize) -> Result<S> {
    let mut acc = S::zero();
    for k in 0..spec.rules.len().min(n + 1) {
        let rule = S::from_rational(&spec.rule_value(k, n)?);
        acc = acc + rule * values[n - k].clone();
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite { index: n + 1 });
    }
    Ok(acc)
}

pub fn direct_expand<S: Scalar>(spec: &RecurrenceSpec, n_max: usize) -> Result<CoefficientSequence<S>> {
    direct_expand_capped(spec, n_max, DEFAULT_EXPANSION_CAP)
}

pub fn direct_expand_capped<S: Scalar>(
    spec: &RecurrenceSpec,
    n_max: usize,
    cap: usize,
) -> Result<CoefficientSequence<S>> {
    if n_max > cap {
        return Err(Error::CapExceeded {
            what: "n_max",
            requested: n_max,
            cap,
        });
    }
    let mut values = seed_coefficients::<S>(spec)?;
    values.truncate(n_max + 1);
    while values.len() <= n_max {
        let n = values.len() - 1;
        let next = recurrence_step(spec, &values, n)?;
        values.push(next);
    }
    Ok(CoefficientSequence {
        values,
        method: Method::Direct,
    })
}

/// `c_{n+1} - sum_k rule_k(n) c_{n-k}` for every `n` where the recurrence
/// applies (`n >= arity - 2`) and `c_{n+1}` is present.
pub fn recurrence_residuals<S: Scalar>(
    spec: &RecurrenceSpec,
    seq: &CoefficientSequence<S>,
) -> Result<Vec<(usize, S)>> {
    let start = spec.arity() - 2;
    let mut out = Vec::new();
    for n in start..seq.values.len().saturating_sub(1) {
        let mut rhs = S::zero();
        for k in 0..spec.rules.len() {
            let rule = S::from_rational(&spec.rule_value(k, n)?);
            rhs = rhs + rule * seq.values[n - k].clone();
        }
        out.push((n, seq.values[n + 1].clone() - rhs));
    }
    Ok(out)
}

/// One row of [`ratio_sequence`]. `None` marks an undefined entry.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioEntry<S> {
    pub index: usize,
    /// `K_n = c_{n+1} / c_n`.
    pub ratio: Option<S>,
    /// `K_n - (A_n + B_n / K_{n-1})`, from `n = 1` on.
    pub residual: Option<S>,
}

pub fn ratio_sequence<S: Scalar>(
    seq: &CoefficientSequence<S>,
    spec: &RecurrenceSpec,
) -> Result<Vec<RatioEntry<S>>> {
    spec.require_arity(3)?;
    let values = &seq.values;
    let mut out: Vec<RatioEntry<S>> = Vec::with_capacity(values.len().saturating_sub(1));
    for n in 0..values.len().saturating_sub(1) {
        let ratio = values[n + 1].checked_div(&values[n]);
        let residual = if n == 0 {
            None
        } else {
            match (&ratio, &out[n - 1].ratio) {
                (Some(k), Some(prev)) if !prev.is_zero() => {
                    let a = S::from_rational(&spec.rule_value(0, n)?);
                    let b = S::from_rational(&spec.rule_value(1, n)?);
                    Some(k.clone() - (a + b / prev.clone()))
                }
                _ => None,
            }
        };
        out.push(RatioEntry {
            index: n,
            ratio,
            residual,
        });
    }
    Ok(out)
}
