//! Symbolic expansion of `c_n` into products of recurrence coefficients.
//!
//! Unrolling `c_{n+1} = A_n c_n + B_n c_{n-1} + ...` down to `c_0` writes
//! `c_n / c_0` as a sum of products, one per composition of `n` into parts
//! `1 ..= arity - 1`. Read the composition left to right as a tiling of the
//! positions `0 .. n`: a part of size `s` ending at position `p` contributes
//! the factor `rule_{s-1}(p)`, i.e. `A_p`, `B_p`, `C_p` or `D_p`. For `n = 3`
//! and arity 3 this gives `A_0 A_1 A_2`, `A_0 B_2` and `B_1 A_2`.
//!
//! Term counts follow the k-nacci numbers: Fibonacci for arity 3,
//! Tribonacci for 4, Tetranacci for 5.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::recurrence::{CoefficientSequence, Method, RecurrenceSpec, RuleLabel, RuleTable};
use crate::scalar::Scalar;

pub const DEFAULT_CENSUS_CAP: usize = 30;

/// Environment variable overriding [`DEFAULT_CENSUS_CAP`].
pub const CENSUS_CAP_ENV: &str = "TRF_CENSUS_CAP";

/// Reads [`CENSUS_CAP_ENV`], falling back to the default when unset or unparsable.
pub fn census_cap_from_env() -> usize {
    std::env::var(CENSUS_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CENSUS_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub size: usize,
    /// Last position covered; the step spans `end + 1 - size ..= end`.
    pub end: usize,
}

impl Step {
    pub fn label(&self) -> RuleLabel {
        RuleLabel::ALL[self.size - 1]
    }

    pub fn start(&self) -> usize {
        self.end + 1 - self.size
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicTerm {
    steps: Vec<Step>,
}

impl SymbolicTerm {
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut pos = 0;
        let steps = sizes
            .iter()
            .map(|&size| {
                pos += size;
                Step { size, end: pos - 1 }
            })
            .collect();
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.size).collect()
    }

    /// `(label, index)` per factor, in position order.
    pub fn factors(&self) -> impl Iterator<Item = (RuleLabel, usize)> + '_ {
        self.steps.iter().map(|s| (s.label(), s.end))
    }

    pub fn count(&self, label: RuleLabel) -> usize {
        self.steps.iter().filter(|s| s.label() == label).count()
    }

    /// True when the steps tile `0 .. n` contiguously, each position once.
    pub fn tiles(&self, n: usize) -> bool {
        let mut next = 0;
        for step in &self.steps {
            if step.size == 0 || step.start() != next {
                return false;
            }
            next = step.end + 1;
        }
        next == n
    }

    /// Grouped shorthand, e.g. `A2,3*B1` for `A_2 A_3 B_1`; `1` for the empty product.
    pub fn compact(&self) -> String {
        let mut groups = Vec::new();
        for label in RuleLabel::ALL {
            let mut indices: Vec<usize> = self.factors().filter(|(l, _)| *l == label).map(|(_, i)| i).collect();
            if indices.is_empty() {
                continue;
            }
            indices.sort_unstable();
            let joined: Vec<String> = indices.iter().map(usize::to_string).collect();
            groups.push(format!("{label}{}", joined.join(",")));
        }
        if groups.is_empty() {
            "1".into()
        } else {
            groups.join("*")
        }
    }

    /// Factors grouped by label, ascending index, e.g. `A2*A3*B1`; `1` for the empty product.
    pub fn canonical(&self) -> String {
        let mut factors: Vec<(RuleLabel, usize)> = self.factors().collect();
        if factors.is_empty() {
            return "1".into();
        }
        factors.sort_unstable();
        let parts: Vec<String> = factors.iter().map(|(l, i)| format!("{l}{i}")).collect();
        parts.join("*")
    }

    pub fn evaluate<S: Scalar>(&self, table: &RuleTable<S>) -> Result<S> {
        let mut acc = S::one();
        for (label, index) in self.factors() {
            acc = acc * table.get(label, index)?.clone();
        }
        Ok(acc)
    }
}

/// Factors in position order, e.g. `A0*B2`; `1` for the empty product.
impl fmt::Display for SymbolicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors().map(|(l, i)| format!("{l}{i}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// All terms of `c_n / c_0`, ordered lexicographically by step-size string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermList {
    pub n: usize,
    pub arity: usize,
    pub terms: Vec<SymbolicTerm>,
}

impl TermList {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    /// Largest `n` that may be enumerated.
    pub cap: usize,
    pub execution: Execution,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CENSUS_CAP,
            execution: Execution::default(),
        }
    }
}

fn check_arity(arity: usize) -> Result<()> {
    if (2..=5).contains(&arity) {
        Ok(())
    } else {
        Err(Error::Arity {
            expected: "2..=5".into(),
            found: arity,
        })
    }
}

pub fn enumerate_terms(n: usize, arity: usize) -> Result<TermList> {
    enumerate_terms_with(n, arity, &CensusOptions::default())
}

pub fn enumerate_terms_with(n: usize, arity: usize, options: &CensusOptions) -> Result<TermList> {
    check_arity(arity)?;
    if n > options.cap {
        return Err(Error::CapExceeded {
            what: "census n",
            requested: n,
            cap: options.cap,
        });
    }
    let max_part = arity - 1;
    let terms = if n == 0 {
        vec![SymbolicTerm { steps: Vec::new() }]
    } else {
        // One branch per leading part; each branch is already in canonical order.
        let firsts: Vec<usize> = (1..=max_part.min(n)).collect();
        options
            .execution
            .map(firsts, |first| {
                let mut out = Vec::new();
                let mut prefix = vec![first];
                compositions(n - first, max_part, &mut prefix, &mut out);
                out
            })
            .into_iter()
            .flatten()
            .collect()
    };
    Ok(TermList { n, arity, terms })
}

fn compositions(rest: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<SymbolicTerm>) {
    if rest == 0 {
        out.push(SymbolicTerm::from_sizes(prefix));
        return;
    }
    for part in 1..=max_part.min(rest) {
        prefix.push(part);
        compositions(rest - part, max_part, prefix, out);
        prefix.pop();
    }
}

/// Number of terms of `c_n` by the k-nacci recurrence, without enumerating.
pub fn count_terms(n: usize, arity: usize) -> BigUint {
    let max_part = arity.saturating_sub(1);
    let mut counts: Vec<BigUint> = Vec::with_capacity(n + 1);
    counts.push(BigUint::one());
    for m in 1..=n {
        let total = (1..=max_part.min(m)).fold(BigUint::zero(), |acc, s| acc + &counts[m - s]);
        counts.push(total);
    }
    counts.swap_remove(n)
}

/// `c_0 * sum over terms of the product of their factors`.
pub fn evaluate_terms<S: Scalar>(terms: &TermList, spec: &RecurrenceSpec) -> Result<S> {
    spec.require_arity(terms.arity)?;
    spec.require_canonical()?;
    let table = RuleTable::<S>::new(spec, terms.n);
    let mut sum = S::zero();
    for term in &terms.terms {
        sum = sum + term.evaluate(&table)?;
    }
    Ok(sum * S::from_rational(spec.c0()))
}

/// `c_0 ..= c_{k_max}` by enumerating and evaluating every term.
pub fn census_expand<S: Scalar>(
    spec: &RecurrenceSpec,
    k_max: usize,
    options: &CensusOptions,
) -> Result<CoefficientSequence<S>> {
    let values = (0..=k_max)
        .map(|k| {
            let terms = enumerate_terms_with(k, spec.arity(), options)?;
            evaluate_terms(&terms, spec)
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(CoefficientSequence {
        values,
        method: Method::Census,
    })
}
