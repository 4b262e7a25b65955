//! Closed-form coefficients of three-term recurrences
//! `c_{n+1} = A_n c_n + B_n c_{n-1}` with canonical seed `c_1 = A_0 c_0`.
//!
//! Every term of `c_k` is a product of `A`s and `B`s. Grouping terms by their
//! number `N` of `A` factors splits the series into sub-series `y_N`, and
//! `y_N` only has powers `k = 2n + N`. With `i_0 = 0`, the coefficient of
//! `x^{2n+N}` in `y_N` is
//!
//! ```text
//! c_0 * sum_{i_0 <= i_1 <= ... <= i_N <= n}
//!         prod_{k=1..N} A_{2 i_k + k - 1}
//!       * prod_{l=0..N-1} prod_{j=i_l}^{i_{l+1}-1} B_{2j + l + 1}
//!       * prod_{j=i_N}^{n-1} B_{2j + N + 1}
//! ```
//!
//! Three independent evaluations are provided:
//!
//! * [`subseries_infinite`] fixes the power and walks the nested sums above.
//! * [`subseries_small_order`] hard-codes the `N = 0, 1, 2, 3` nestings.
//! * [`subseries_limit_form`] walks chains `t_0 <= ... <= t_N` with every
//!   level bounded by the truncation and scatters each chain into the power
//!   `2 t_N + N`. Bounding level `k` by `beta_k` instead gives the polynomial
//!   form [`subseries_polynomial`], valid when `B_{2 beta_k + k + 1} = 0`.
//!
//! All products over empty ranges are 1.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::recurrence::{CoefficientSequence, Method, RecurrenceSpec, RuleLabel, RuleTable};
use crate::scalar::{format_rational, Scalar};

/// Default bound on the number of nested-sum chains one call may walk.
pub const DEFAULT_CHAIN_CAP: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Entries up to `2 n_max + N`; higher powers are unknown.
    Truncated,
    /// Terminated polynomial; every missing power is exactly zero.
    Polynomial,
}

/// One sub-series `y_N`: power offset `k` (the exponent is `k + lambda`) to coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct SubSeriesTable<S> {
    pub order: usize,
    pub n_max: usize,
    pub kind: TableKind,
    pub entries: BTreeMap<usize, S>,
}

impl<S: Scalar> SubSeriesTable<S> {
    pub fn get(&self, power: usize) -> Option<&S> {
        self.entries.get(&power)
    }

    pub fn max_power(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// Coefficient of `x^power`, or `None` when the table does not determine it.
    pub fn coefficient(&self, power: usize) -> Option<S> {
        if power < self.order || (power - self.order) % 2 == 1 {
            return Some(S::zero());
        }
        match (self.entries.get(&power), self.kind) {
            (Some(v), _) => Some(v.clone()),
            (None, TableKind::Polynomial) => Some(S::zero()),
            (None, TableKind::Truncated) => None,
        }
    }
}

/// Termination eigenvalues `beta_0 <= beta_1 <= ...`: `B_{2 beta_i + i + 1} = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminationProfile {
    pub betas: Vec<usize>,
}

impl TerminationProfile {
    pub fn new(betas: Vec<usize>) -> Self {
        Self { betas }
    }

    /// Index of `B` that must vanish for chain `i`.
    pub fn termination_index(&self, i: usize) -> Option<usize> {
        self.betas.get(i).map(|beta| 2 * beta + i + 1)
    }

    /// First `i` with `beta_i > beta_{i+1}`, if any.
    pub fn first_order_violation(&self) -> Option<usize> {
        self.betas.windows(2).position(|w| w[0] > w[1]).map(|i| i + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationCheck {
    pub i: usize,
    pub beta: usize,
    pub index: usize,
    pub value: String,
    pub vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationReport {
    pub checks: Vec<TerminationCheck>,
    pub monotone: bool,
    /// All checked `B` values are exactly zero.
    pub passed: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ClosedFormOptions {
    pub execution: Execution,
    pub chain_cap: u128,
}

impl Default for ClosedFormOptions {
    fn default() -> Self {
        Self {
            execution: Execution::default(),
            chain_cap: DEFAULT_CHAIN_CAP,
        }
    }
}

fn check_three_term(spec: &RecurrenceSpec) -> Result<()> {
    spec.require_arity(3)?;
    spec.require_canonical()
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Chains walked for one order and `n = 0..=n_max`: `sum_n C(n + N, N)` = `C(n_max + N + 1, N + 1)`.
fn chain_count(order: usize, n_max: usize) -> u128 {
    binomial((n_max + order + 1) as u128, (order + 1) as u128)
}

fn check_chain_cap(total: u128, cap: u128) -> Result<()> {
    if total > cap {
        return Err(Error::CapExceeded {
            what: "nested-sum chains",
            requested: usize::try_from(total).unwrap_or(usize::MAX),
            cap: usize::try_from(cap).unwrap_or(usize::MAX),
        });
    }
    Ok(())
}

fn a<S: Scalar>(table: &RuleTable<S>, n: usize) -> Result<&S> {
    table.get(RuleLabel::A, n)
}

fn b<S: Scalar>(table: &RuleTable<S>, n: usize) -> Result<&S> {
    table.get(RuleLabel::B, n)
}

/// `prod_{j=from}^{to-1} B_{2j + offset}`; 1 when `from >= to`.
fn b_run<S: Scalar>(table: &RuleTable<S>, from: usize, to: usize, offset: usize) -> Result<S> {
    let mut acc = S::one();
    for j in from..to {
        acc = acc * b(table, 2 * j + offset)?.clone();
    }
    Ok(acc)
}

pub fn subseries_infinite<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    n_max: usize,
) -> Result<SubSeriesTable<S>> {
    subseries_infinite_with(spec, order, n_max, &ClosedFormOptions::default())
}

pub fn subseries_infinite_with<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    n_max: usize,
    options: &ClosedFormOptions,
) -> Result<SubSeriesTable<S>> {
    check_three_term(spec)?;
    check_chain_cap(chain_count(order, n_max), options.chain_cap)?;
    let table = RuleTable::<S>::new(spec, 2 * n_max + order);
    let c0 = S::from_rational(spec.c0());
    let cells: Vec<usize> = (0..=n_max).collect();
    let values = options
        .execution
        .try_map(cells, |n| general_cell(&table, order, n).map(|v| v * c0.clone()))?;
    Ok(SubSeriesTable {
        order,
        n_max,
        kind: TableKind::Truncated,
        entries: values.into_iter().enumerate().map(|(n, v)| (2 * n + order, v)).collect(),
    })
}

/// Coefficient of `x^{2n+N}` in `y_N / c_0`, by the nested sums over `i_1 ..= i_N`.
fn general_cell<S: Scalar>(table: &RuleTable<S>, order: usize, n: usize) -> Result<S> {
    nested_level(table, order, n, 1, 0)
}

/// Sum over `i_k` in `prev ..= n` of `A_{2 i_k + k - 1}` times the `B` run
/// `l = k - 1` from `prev` to `i_k`, times the deeper levels.
fn nested_level<S: Scalar>(table: &RuleTable<S>, order: usize, n: usize, k: usize, prev: usize) -> Result<S> {
    if k > order {
        return b_run(table, prev, n, order + 1);
    }
    let mut sum = S::zero();
    let mut run = S::one();
    for i in prev..=n {
        if i > prev {
            run = run * b(table, 2 * (i - 1) + k)?.clone();
        }
        if run.is_zero() {
            break;
        }
        let head = a(table, 2 * i + k - 1)?.clone() * run.clone();
        if head.is_zero() {
            continue;
        }
        sum = sum + head * nested_level(table, order, n, k + 1, i)?;
    }
    Ok(sum)
}

/// The `N = 0..=3` sub-series written out as explicit loops, independent of
/// the general nesting.
pub fn subseries_small_order<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    n_max: usize,
) -> Result<SubSeriesTable<S>> {
    check_three_term(spec)?;
    if order > 3 {
        return Err(Error::InvalidSpec(format!(
            "explicit sub-series forms exist for N <= 3, got N = {order}"
        )));
    }
    let t = RuleTable::<S>::new(spec, 2 * n_max + order);
    let c0 = S::from_rational(spec.c0());
    let mut entries = BTreeMap::new();
    for n in 0..=n_max {
        let value = match order {
            0 => b_run(&t, 0, n, 1)?,
            1 => {
                let mut s = S::zero();
                for i1 in 0..=n {
                    s = s + a(&t, 2 * i1)?.clone() * b_run(&t, 0, i1, 1)? * b_run(&t, i1, n, 2)?;
                }
                s
            }
            2 => {
                let mut s = S::zero();
                for i1 in 0..=n {
                    let mut inner = S::zero();
                    for i2 in i1..=n {
                        inner = inner
                            + a(&t, 2 * i2 + 1)?.clone()
                                * b_run(&t, 0, i1, 1)?
                                * b_run(&t, i1, i2, 2)?
                                * b_run(&t, i2, n, 3)?;
                    }
                    s = s + a(&t, 2 * i1)?.clone() * inner;
                }
                s
            }
            _ => {
                let mut s = S::zero();
                for i1 in 0..=n {
                    let mut middle = S::zero();
                    for i2 in i1..=n {
                        let mut inner = S::zero();
                        for i3 in i2..=n {
                            inner = inner
                                + a(&t, 2 * i3 + 2)?.clone()
                                    * b_run(&t, 0, i1, 1)?
                                    * b_run(&t, i1, i2, 2)?
                                    * b_run(&t, i2, i3, 3)?
                                    * b_run(&t, i3, n, 4)?;
                        }
                        middle = middle + a(&t, 2 * i2 + 1)?.clone() * inner;
                    }
                    s = s + a(&t, 2 * i1)?.clone() * middle;
                }
                s
            }
        };
        entries.insert(2 * n + order, value * c0.clone());
    }
    Ok(SubSeriesTable {
        order,
        n_max,
        kind: TableKind::Truncated,
        entries,
    })
}

/// Chain walk with every level bounded by `n_max`.
pub fn subseries_limit_form<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    n_max: usize,
) -> Result<SubSeriesTable<S>> {
    subseries_limit_form_with(spec, order, n_max, &ClosedFormOptions::default())
}

pub fn subseries_limit_form_with<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    n_max: usize,
    options: &ClosedFormOptions,
) -> Result<SubSeriesTable<S>> {
    check_three_term(spec)?;
    check_chain_cap(chain_count(order, n_max), options.chain_cap)?;
    let bounds = vec![n_max; order + 1];
    let entries = chain_walk(spec, order, &bounds, options.execution)?;
    Ok(SubSeriesTable {
        order,
        n_max,
        kind: TableKind::Truncated,
        entries,
    })
}

/// Sub-series of the terminated (polynomial) case. Requires a monotone
/// profile covering `0..=N` whose termination indices all vanish.
pub fn subseries_polynomial<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    profile: &TerminationProfile,
) -> Result<SubSeriesTable<S>> {
    subseries_polynomial_with(spec, order, profile, &ClosedFormOptions::default())
}

pub fn subseries_polynomial_with<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    profile: &TerminationProfile,
    options: &ClosedFormOptions,
) -> Result<SubSeriesTable<S>> {
    check_three_term(spec)?;
    if profile.betas.len() <= order {
        return Err(Error::ProfileTooShort {
            len: profile.betas.len(),
            order,
            needed: order + 1,
        });
    }
    let bounds = &profile.betas[..=order];
    if let Some(i) = TerminationProfile::new(bounds.to_vec()).first_order_violation() {
        return Err(Error::ProfileOrder { i });
    }
    for (i, &beta) in bounds.iter().enumerate() {
        let index = 2 * beta + i + 1;
        let value = spec.rule_value(1, index)?;
        if !value.is_zero() {
            return Err(Error::TerminationViolation {
                i,
                index,
                value: format_rational(&value),
            });
        }
    }
    check_chain_cap(chain_count(order, bounds[order]), options.chain_cap)?;
    let entries = chain_walk(spec, order, bounds, options.execution)?;
    Ok(SubSeriesTable {
        order,
        n_max: bounds[order],
        kind: TableKind::Polynomial,
        entries,
    })
}

/// Walks `t_0 <= t_1 <= ... <= t_N` with `t_k <= bounds[k]`. Level `k < N`
/// contributes `A_{2 t_k + k}` and the `B` run from `t_{k-1}` to `t_k`
/// (offset `k + 1`, `t_{-1} = 0`); level `N` contributes its run and lands
/// in power `2 t_N + N`. Branches on `t_0` run under `execution` and are
/// merged in `t_0` order.
fn chain_walk<S: Scalar>(
    spec: &RecurrenceSpec,
    order: usize,
    bounds: &[usize],
    execution: Execution,
) -> Result<BTreeMap<usize, S>> {
    let widest = bounds.iter().copied().max().unwrap_or(0);
    let table = RuleTable::<S>::new(spec, 2 * widest + order);
    let c0 = S::from_rational(spec.c0());
    let firsts: Vec<usize> = (0..=bounds[0]).collect();
    let partials = execution.try_map(firsts, |t0| {
        let mut out = BTreeMap::new();
        chain_step(&table, order, bounds, 0, 0, t0, S::one(), &mut out)?;
        Ok(out)
    })?;
    let mut entries: BTreeMap<usize, S> = BTreeMap::new();
    for partial in partials {
        for (power, value) in partial {
            let slot = entries.entry(power).or_insert_with(S::zero);
            *slot = slot.clone() + value;
        }
    }
    for value in entries.values_mut() {
        *value = value.clone() * c0.clone();
    }
    Ok(entries)
}

#[allow(clippy::too_many_arguments)]
fn chain_step<S: Scalar>(
    table: &RuleTable<S>,
    order: usize,
    bounds: &[usize],
    level: usize,
    prev: usize,
    t: usize,
    acc: S,
    out: &mut BTreeMap<usize, S>,
) -> Result<()> {
    let run = b_run(table, prev, t, level + 1)?;
    if level == order {
        let slot = out.entry(2 * t + order).or_insert_with(S::zero);
        *slot = slot.clone() + acc * run;
        return Ok(());
    }
    let acc = acc * run * a(table, 2 * t + level)?.clone();
    for next in t..=bounds[level + 1] {
        chain_step(table, order, bounds, level + 1, t, next, acc.clone(), out)?;
    }
    Ok(())
}

/// Evaluates `B_{2 beta_i + i + 1}` exactly for every profile entry.
pub fn verify_termination(spec: &RecurrenceSpec, profile: &TerminationProfile) -> Result<TerminationReport> {
    spec.require_arity(3)?;
    let mut checks = Vec::with_capacity(profile.betas.len());
    for (i, &beta) in profile.betas.iter().enumerate() {
        let index = 2 * beta + i + 1;
        let value = spec.rule_value(1, index)?;
        checks.push(TerminationCheck {
            i,
            beta,
            index,
            vanishes: value.is_zero(),
            value: format_rational(&value),
        });
    }
    let passed = !checks.is_empty() && checks.iter().all(|c| c.vanishes);
    Ok(TerminationReport {
        checks,
        monotone: profile.first_order_violation().is_none(),
        passed,
    })
}

/// `c_k = sum_N y_N[k]` for `k = 0..=k_max`.
pub fn assemble_coefficients<S: Scalar>(
    tables: &[SubSeriesTable<S>],
    k_max: usize,
) -> Result<CoefficientSequence<S>> {
    let mut by_order: BTreeMap<usize, &SubSeriesTable<S>> = BTreeMap::new();
    for t in tables {
        by_order.insert(t.order, t);
    }
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut sum = S::zero();
        for order in (k % 2..=k).step_by(2) {
            let coefficient = by_order
                .get(&order)
                .and_then(|t| t.coefficient(k))
                .ok_or(Error::IncompleteCoverage { order, power: k })?;
            sum = sum + coefficient;
        }
        values.push(sum);
    }
    Ok(CoefficientSequence {
        values,
        method: Method::Trf,
    })
}

/// Tables `y_0 ..= y_{k_max}`, each truncated just far enough to determine
/// every power up to `k_max`. All `(N, n)` cells are independent.
pub fn subseries_tables<S: Scalar>(
    spec: &RecurrenceSpec,
    k_max: usize,
    options: &ClosedFormOptions,
) -> Result<Vec<SubSeriesTable<S>>> {
    check_three_term(spec)?;
    let total: u128 = (0..=k_max).map(|order| chain_count(order, (k_max - order) / 2)).sum();
    check_chain_cap(total, options.chain_cap)?;
    let table = RuleTable::<S>::new(spec, k_max);
    let c0 = S::from_rational(spec.c0());
    let cells: Vec<(usize, usize)> = (0..=k_max)
        .flat_map(|order| (0..=(k_max - order) / 2).map(move |n| (order, n)))
        .collect();
    let values = options.execution.try_map(cells.clone(), |(order, n)| {
        general_cell(&table, order, n).map(|v| v * c0.clone())
    })?;
    let mut tables: Vec<SubSeriesTable<S>> = (0..=k_max)
        .map(|order| SubSeriesTable {
            order,
            n_max: (k_max - order) / 2,
            kind: TableKind::Truncated,
            entries: BTreeMap::new(),
        })
        .collect();
    for ((order, n), value) in cells.into_iter().zip(values) {
        tables[order].entries.insert(2 * n + order, value);
    }
    Ok(tables)
}

/// `c_0 ..= c_{k_max}` through the sub-series split.
pub fn closed_form_expand<S: Scalar>(
    spec: &RecurrenceSpec,
    k_max: usize,
    options: &ClosedFormOptions,
) -> Result<CoefficientSequence<S>> {
    assemble_coefficients(&subseries_tables(spec, k_max, options)?, k_max)
}

/// Same tables as [`subseries_tables`], by splitting the recurrence itself on
/// the number of `A` factors: `y_N[k+1] = A_k y_{N-1}[k] + B_k y_N[k-1]`.
/// Quadratic in `k_max`, so it reaches far beyond the nested sums.
pub fn subseries_by_recursion<S: Scalar>(spec: &RecurrenceSpec, k_max: usize) -> Result<Vec<SubSeriesTable<S>>> {
    check_three_term(spec)?;
    let table = RuleTable::<S>::new(spec, k_max);
    // cells[k][N] is the coefficient of x^k in y_N, zero unless k - N is even.
    let mut cells: Vec<Vec<S>> = Vec::with_capacity(k_max + 1);
    cells.push(vec![S::from_rational(spec.c0())]);
    for k in 1..=k_max {
        let mut row = vec![S::zero(); k + 1];
        for (order, slot) in row.iter_mut().enumerate() {
            if (k - order) % 2 == 1 {
                continue;
            }
            let mut value = S::zero();
            if order >= 1 {
                value = value + a(&table, k - 1)?.clone() * cells[k - 1][order - 1].clone();
            }
            if k >= 2 && order <= k - 2 {
                value = value + b(&table, k - 1)?.clone() * cells[k - 2][order].clone();
            }
            *slot = value;
        }
        cells.push(row);
    }
    Ok((0..=k_max)
        .map(|order| SubSeriesTable {
            order,
            n_max: (k_max - order) / 2,
            kind: TableKind::Truncated,
            entries: (order..=k_max).step_by(2).map(|k| (k, cells[k][order].clone())).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::recurrence::{direct_expand, ConstantRule, FnRule, SeedRule, SharedRule};
    use crate::scalar::{integer, rational, Rational};

    fn constant(v: i64) -> SharedRule {
        Arc::new(ConstantRule(integer(v)))
    }

    fn fibonacci() -> RecurrenceSpec {
        RecurrenceSpec::canonical(vec![constant(1), constant(1)]).unwrap()
    }

    /// A_n = n + 2, B_n = 10 n + 3: every factor is distinguishable.
    fn generic() -> RecurrenceSpec {
        let a: SharedRule = Arc::new(FnRule::new("n+2", |n| Ok(integer(n as i64 + 2))));
        let b: SharedRule = Arc::new(FnRule::new("10n+3", |n| Ok(integer(10 * n as i64 + 3))));
        RecurrenceSpec::canonical(vec![a, b]).unwrap()
    }

    #[test]
    fn constant_coefficients_order_zero() {
        let t: SubSeriesTable<Rational> = subseries_infinite(&fibonacci(), 0, 4).unwrap();
        let powers: Vec<usize> = t.entries.keys().copied().collect();
        assert_eq!(powers, [0, 2, 4, 6, 8]);
        assert!(t.entries.values().all(|v| *v == integer(1)));
    }

    #[test]
    fn order_one_second_entry() {
        // c_3 restricted to one A factor: A_0 B_2 + A_2 B_1 = 2*23 + 4*13.
        let t: SubSeriesTable<Rational> = subseries_infinite(&generic(), 1, 3).unwrap();
        assert_eq!(t.get(3), Some(&integer(2 * 23 + 4 * 13)));
        assert_eq!(t.get(1), Some(&integer(2)));
    }

    #[test]
    fn fibonacci_power_sums() {
        let spec = fibonacci();
        let k = 6;
        let mut sum = integer(0);
        for order in 0..=k {
            let t: SubSeriesTable<Rational> = subseries_infinite(&spec, order, 3).unwrap();
            sum += t.coefficient(k).unwrap();
        }
        assert_eq!(sum, integer(13));
    }

    #[test]
    fn parity_structure() {
        for order in 0..5 {
            let t: SubSeriesTable<Rational> = subseries_infinite(&generic(), order, 4).unwrap();
            assert!(t.entries.keys().all(|k| k % 2 == order % 2 && *k >= order));
        }
    }

    #[test]
    fn three_routes_agree_on_generic_spec() {
        let spec = generic();
        for order in 0..=3 {
            let general: SubSeriesTable<Rational> = subseries_infinite(&spec, order, 6).unwrap();
            let literal: SubSeriesTable<Rational> = subseries_small_order(&spec, order, 6).unwrap();
            let limit: SubSeriesTable<Rational> = subseries_limit_form(&spec, order, 6).unwrap();
            assert_eq!(general.entries, literal.entries, "N = {order}");
            assert_eq!(general.entries, limit.entries, "N = {order}");
        }
        assert!(subseries_small_order::<Rational>(&spec, 4, 2).is_err());
    }

    #[test]
    fn assembled_matches_direct() {
        let spec = generic().with_c0(rational(-2, 3)).unwrap();
        let direct = direct_expand::<Rational>(&spec, 12).unwrap();
        let trf = closed_form_expand::<Rational>(&spec, 12, &ClosedFormOptions::default()).unwrap();
        assert_eq!(trf.values, direct.values);
        assert_eq!(trf.method, Method::Trf);
    }

    #[test]
    fn recursion_split_matches_nested_sums() {
        let spec = generic().with_c0(rational(5, 7)).unwrap();
        let nested = subseries_tables::<Rational>(&spec, 11, &ClosedFormOptions::default()).unwrap();
        let split = subseries_by_recursion::<Rational>(&spec, 11).unwrap();
        assert_eq!(nested, split);
        let long = subseries_by_recursion::<Rational>(&fibonacci(), 60).unwrap();
        let direct = direct_expand::<Rational>(&fibonacci(), 60).unwrap();
        assert_eq!(assemble_coefficients(&long, 60).unwrap().values, direct.values);
    }

    #[test]
    fn vanishing_b_leaves_only_the_all_a_term() {
        let a: SharedRule = Arc::new(FnRule::new("1/(n+1)", |n| Ok(rational(1, n as i64 + 1))));
        let spec = RecurrenceSpec::canonical(vec![a, constant(0)]).unwrap();
        let tables = subseries_tables::<Rational>(&spec, 8, &ClosedFormOptions::default()).unwrap();
        for t in &tables {
            for (&k, v) in &t.entries {
                if k != t.order {
                    assert!(v.is_zero(), "N = {}, k = {k}", t.order);
                }
            }
        }
        let c = assemble_coefficients(&tables, 8).unwrap();
        assert_eq!(c.values[4], rational(1, 24));
    }

    #[test]
    fn missing_table_is_reported() {
        let spec = fibonacci();
        let tables: Vec<SubSeriesTable<Rational>> =
            (0..=3).map(|order| subseries_infinite(&spec, order, 1).unwrap()).collect();
        let err = assemble_coefficients(&tables, 4).unwrap_err();
        assert_eq!(err.kind(), "IncompleteCoverage");
        assert!(assemble_coefficients(&tables, 3).is_ok());
    }

    #[test]
    fn closed_forms_refuse_explicit_seeds_and_other_arities() {
        let lucas = RecurrenceSpec::new(vec![constant(1), constant(1)], SeedRule::Explicit(vec![integer(1)]), integer(2))
            .unwrap();
        assert_eq!(subseries_infinite::<Rational>(&lucas, 0, 3).unwrap_err().kind(), "SeedError");
        assert_eq!(subseries_limit_form::<Rational>(&lucas, 0, 3).unwrap_err().kind(), "SeedError");
        let four = RecurrenceSpec::canonical(vec![constant(1); 3]).unwrap();
        assert_eq!(subseries_infinite::<Rational>(&four, 0, 3).unwrap_err().kind(), "ArityError");
    }

    fn b_shifted(root: i64) -> RecurrenceSpec {
        let b: SharedRule = Arc::new(FnRule::new(format!("n-{root}"), move |n| Ok(integer(n as i64 - root))));
        RecurrenceSpec::canonical(vec![constant(1), b]).unwrap()
    }

    #[test]
    fn polynomial_first_cases() {
        // B_1 = 0: beta_0 = 0 leaves only c_0.
        let t: SubSeriesTable<Rational> =
            subseries_polynomial(&b_shifted(1), 0, &TerminationProfile::new(vec![0])).unwrap();
        assert_eq!(t.entries, BTreeMap::from([(0, integer(1))]));

        // B_3 = 0: beta_0 = 1 gives c_0 and B_1 c_0.
        let spec = b_shifted(3);
        let t: SubSeriesTable<Rational> = subseries_polynomial(&spec, 0, &TerminationProfile::new(vec![1])).unwrap();
        assert_eq!(t.entries, BTreeMap::from([(0, integer(1)), (2, integer(-2))]));
    }

    #[test]
    fn verify_termination_reports_each_index() {
        let report = verify_termination(&b_shifted(3), &TerminationProfile::new(vec![1])).unwrap();
        assert!(report.passed);
        assert_eq!(report.checks[0].index, 3);
        assert_eq!(report.checks[0].value, "0/1");

        let report = verify_termination(&fibonacci(), &TerminationProfile::new(vec![0, 1, 2])).unwrap();
        assert!(!report.passed);
        assert!(report.checks.iter().all(|c| !c.vanishes));
    }

    /// B_n = 0 for n >= 5, arbitrary below.
    fn b_cut_at_five() -> RecurrenceSpec {
        let a: SharedRule = Arc::new(FnRule::new("n+2", |n| Ok(integer(n as i64 + 2))));
        let b: SharedRule = Arc::new(FnRule::new("(n+1) [n<5]", |n| {
            Ok(if n < 5 { integer(n as i64 + 1) } else { integer(0) })
        }));
        RecurrenceSpec::canonical(vec![a, b]).unwrap()
    }

    #[test]
    fn polynomial_matches_truncated_infinite_form() {
        let spec = b_cut_at_five();
        let profile = TerminationProfile::new(vec![2, 2, 2, 3]);
        assert!(verify_termination(&spec, &profile).unwrap().passed);
        for order in 0..=3 {
            let poly: SubSeriesTable<Rational> = subseries_polynomial(&spec, order, &profile).unwrap();
            let beta = profile.betas[order];
            assert!(poly.max_power().unwrap() <= 2 * beta + order);
            let inf: SubSeriesTable<Rational> = subseries_infinite(&spec, order, beta + 3).unwrap();
            for (&k, v) in &inf.entries {
                assert_eq!(poly.coefficient(k).unwrap(), *v, "N = {order}, k = {k}");
            }
        }
    }

    #[test]
    fn polynomial_profile_errors() {
        let spec = b_cut_at_five();
        let err = subseries_polynomial::<Rational>(&spec, 1, &TerminationProfile::new(vec![3, 2])).unwrap_err();
        assert_eq!(err, Error::ProfileOrder { i: 1 });
        let err = subseries_polynomial::<Rational>(&spec, 1, &TerminationProfile::new(vec![2])).unwrap_err();
        assert_eq!(err.kind(), "ProfileOrderError");
        let err = subseries_polynomial::<Rational>(&spec, 0, &TerminationProfile::new(vec![1])).unwrap_err();
        assert_eq!(err.kind(), "TerminationViolation");
    }

    #[test]
    fn execution_policies_agree_bitwise_in_floats() {
        let spec = generic();
        let seq = ClosedFormOptions { execution: Execution::Sequential, ..Default::default() };
        let par = ClosedFormOptions { execution: Execution::Parallel, ..Default::default() };
        let a: Vec<SubSeriesTable<f64>> = subseries_tables(&spec, 14, &seq).unwrap();
        let b: Vec<SubSeriesTable<f64>> = subseries_tables(&spec, 14, &par).unwrap();
        assert_eq!(a, b);
        let a: SubSeriesTable<f64> = subseries_limit_form_with(&spec, 3, 6, &seq).unwrap();
        let b: SubSeriesTable<f64> = subseries_limit_form_with(&spec, 3, 6, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chain_cap_guards_blowup() {
        let opts = ClosedFormOptions { chain_cap: 100, ..Default::default() };
        let err = subseries_infinite_with::<Rational>(&fibonacci(), 6, 6, &opts).unwrap_err();
        assert_eq!(err.kind(), "CapExceeded");
        assert_eq!(chain_count(0, 4), 5);
        assert_eq!(chain_count(1, 2), 6);
    }
}
