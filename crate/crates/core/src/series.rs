//! Numerical evaluation of `y(x) = x^lambda * sum_k c_k x^k` and its
//! sub-series split, with truncation diagnostics.

use serde::{Deserialize, Serialize};

use crate::closed_form::SubSeriesTable;
use crate::error::{Error, Result};
use crate::recurrence::{ratio_sequence, CoefficientSequence, RecurrenceSpec};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    Total,
    PerSubseries,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRequest {
    pub x: f64,
    pub lambda: f64,
    pub k_max: usize,
    pub mode: EvalMode,
}

impl EvalRequest {
    pub fn new(x: f64, k_max: usize) -> Self {
        Self {
            x,
            lambda: 0.0,
            k_max,
            mode: EvalMode::Total,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// `x^lambda`; real powers need `x > 0`.
    pub fn prefactor(&self) -> Result<f64> {
        let (x, lambda) = (self.x, self.lambda);
        if !x.is_finite() || !lambda.is_finite() {
            return Err(Error::Domain(format!("x = {x} and lambda = {lambda} must be finite")));
        }
        if lambda == 0.0 {
            return Ok(1.0);
        }
        if lambda.fract() == 0.0 && lambda.abs() <= f64::from(i32::MAX) {
            if x == 0.0 && lambda < 0.0 {
                return Err(Error::Domain(format!("x = 0 with negative lambda = {lambda}")));
            }
            return Ok(x.powi(lambda as i32));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("x = {x} must be positive for non-integer lambda = {lambda}")));
        }
        Ok(x.powf(lambda))
    }
}

fn finite(value: f64, index: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { index })
    }
}

/// `x^lambda * sum_{k=0}^{k_max} c_k x^k`, summed in ascending `k`.
pub fn eval_partial<S: Scalar>(seq: &CoefficientSequence<S>, req: &EvalRequest) -> Result<f64> {
    if seq.values.len() <= req.k_max {
        return Err(Error::InvalidSpec(format!(
            "sequence has {} coefficients, k_max = {} needs {}",
            seq.values.len(),
            req.k_max,
            req.k_max + 1
        )));
    }
    let prefactor = req.prefactor()?;
    let mut sum = 0.0;
    let mut power = 1.0;
    for (k, c) in seq.values[..=req.k_max].iter().enumerate() {
        sum += c.to_f64() * power;
        power *= req.x;
        finite(sum, k)?;
    }
    finite(prefactor * sum, req.k_max)
}

/// `sum_{k=0}^{k_max} c_k x^k` in exact arithmetic (no `x^lambda` factor).
pub fn eval_partial_exact(values: &[Rational], x: &Rational, k_max: usize) -> Result<Rational> {
    if values.len() <= k_max {
        return Err(Error::InvalidSpec(format!("k_max = {k_max} exceeds the sequence length")));
    }
    let mut sum = Rational::from_integer(0.into());
    let mut power = Rational::from_integer(1.into());
    for c in &values[..=k_max] {
        sum += c * &power;
        power *= x;
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubseriesValue {
    pub order: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitEvaluation {
    pub parts: Vec<SubseriesValue>,
    pub total: f64,
}

/// Partial sums of every `y_N` up to power `k_max`, and their total.
pub fn eval_subseries_split<S: Scalar>(tables: &[SubSeriesTable<S>], req: &EvalRequest) -> Result<SplitEvaluation> {
    let prefactor = req.prefactor()?;
    let mut ordered: Vec<&SubSeriesTable<S>> = tables.iter().collect();
    ordered.sort_by_key(|t| t.order);
    for order in 0..=req.k_max {
        let table = ordered.iter().find(|t| t.order == order);
        let covered = table.is_some_and(|t| {
            (order..=req.k_max)
                .step_by(2)
                .all(|power| t.coefficient(power).is_some())
        });
        if !covered {
            let power = (order..=req.k_max)
                .step_by(2)
                .find(|&p| table.is_none_or(|t| t.coefficient(p).is_none()))
                .unwrap_or(order);
            return Err(Error::IncompleteCoverage { order, power });
        }
    }
    let mut parts = Vec::new();
    let mut total = 0.0;
    for table in ordered.into_iter().filter(|t| t.order <= req.k_max) {
        let mut sum = 0.0;
        for power in (table.order..=req.k_max).step_by(2) {
            let c = table.coefficient(power).expect("coverage checked").to_f64();
            sum += c * req.x.powi(power as i32);
            finite(sum, power)?;
        }
        let value = finite(prefactor * sum, table.order)?;
        total += value;
        parts.push(SubseriesValue {
            order: table.order,
            value,
        });
    }
    Ok(SplitEvaluation {
        parts,
        total: finite(total, req.k_max)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The last defined `|K_n x|` is below 1.
    LikelyConvergent,
    /// The last defined `|K_n x|` is above 1.
    Divergent,
    Inconclusive,
    /// No ratio is defined.
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioDiagnostic {
    pub index: usize,
    /// `|K_n x|`, `None` where `K_n` is undefined.
    pub scaled_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub x: f64,
    pub ratios: Vec<RatioDiagnostic>,
    pub undefined_ratios: usize,
    /// `|c_k x^k|` of the last coefficient.
    pub last_term: f64,
    /// Whether `|c_k x^k|` strictly decreases over the final terms.
    pub tail_decreasing: bool,
    pub verdict: Verdict,
}

/// Terms compared by [`ConvergenceReport::tail_decreasing`].
pub const TAIL_WINDOW: usize = 5;

/// Ratio and tail diagnostics for a three-term sequence. Purely descriptive.
pub fn convergence_report<S: Scalar>(
    seq: &CoefficientSequence<S>,
    spec: &RecurrenceSpec,
    x: f64,
) -> Result<ConvergenceReport> {
    let ratios: Vec<RatioDiagnostic> = ratio_sequence(seq, spec)?
        .into_iter()
        .map(|e| RatioDiagnostic {
            index: e.index,
            scaled_ratio: e.ratio.map(|k| (k.to_f64() * x).abs()),
        })
        .collect();
    let undefined_ratios = ratios.iter().filter(|r| r.scaled_ratio.is_none()).count();
    let magnitudes: Vec<f64> = seq
        .values
        .iter()
        .enumerate()
        .map(|(k, c)| (c.to_f64() * x.powi(k as i32)).abs())
        .collect();
    let tail = &magnitudes[magnitudes.len().saturating_sub(TAIL_WINDOW)..];
    let tail_decreasing = tail.len() > 1 && tail.windows(2).all(|w| w[1] < w[0]);
    let verdict = match ratios.iter().rev().find_map(|r| r.scaled_ratio) {
        None => Verdict::Undefined,
        Some(r) if r < 1.0 => Verdict::LikelyConvergent,
        Some(r) if r > 1.0 => Verdict::Divergent,
        Some(_) => Verdict::Inconclusive,
    };
    Ok(ConvergenceReport {
        x,
        ratios,
        undefined_ratios,
        last_term: magnitudes.last().copied().unwrap_or(0.0),
        tail_decreasing,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::catalog::lookup;
    use crate::closed_form::{assemble_coefficients, subseries_tables, ClosedFormOptions};
    use crate::recurrence::{direct_expand, ConstantRule, SeedRule, SharedRule};
    use crate::scalar::{integer, rational};

    fn catalog(name: &str) -> RecurrenceSpec {
        lookup(name, &BTreeMap::new(), None).unwrap()
    }

    #[test]
    fn identity_at_one_half() {
        let seq = direct_expand::<Rational>(&catalog("identity"), 60).unwrap();
        let value = eval_partial(&seq, &EvalRequest::new(0.5, 60)).unwrap();
        assert!((value - 2.0).abs() <= 1e-12, "{value}");
    }

    #[test]
    fn fibonacci_generating_function() {
        let seq = direct_expand::<Rational>(&catalog("fibonacci_gf"), 60).unwrap();
        let value = eval_partial(&seq, &EvalRequest::new(0.25, 60)).unwrap();
        assert!((value - 4.0 / 11.0).abs() <= 1e-12, "{value}");
    }

    #[test]
    fn zero_order_is_scaled_seed() {
        let seq = direct_expand::<Rational>(&catalog("lucas"), 3).unwrap();
        let req = EvalRequest::new(2.0, 0).with_lambda(0.5);
        assert_eq!(eval_partial(&seq, &req).unwrap(), 2.0 * 2f64.sqrt());
    }

    #[test]
    fn domain_errors() {
        let seq = direct_expand::<Rational>(&catalog("identity"), 3).unwrap();
        let err = eval_partial(&seq, &EvalRequest::new(-0.5, 3).with_lambda(0.5)).unwrap_err();
        assert_eq!(err.kind(), "DomainError");
        assert!(eval_partial(&seq, &EvalRequest::new(0.0, 3).with_lambda(-1.0)).is_err());
        let ok = eval_partial(&seq, &EvalRequest::new(-0.5, 3).with_lambda(2.0)).unwrap();
        assert!((ok - 0.25 * (1.0 - 0.5 + 0.25 - 0.125)).abs() < 1e-15);
        assert!(eval_partial(&seq, &EvalRequest::new(0.5, 4)).is_err());
    }

    #[test]
    fn exact_partial_sum() {
        let seq = direct_expand::<Rational>(&catalog("fibonacci_gf"), 5).unwrap();
        // x + x^2 + 2x^3 + 3x^4 + 5x^5 at x = 1/2
        let v = eval_partial_exact(&seq.values, &rational(1, 2), 5).unwrap();
        assert_eq!(v, rational(1, 2) + rational(1, 4) + rational(2, 8) + rational(3, 16) + rational(5, 32));
    }

    #[test]
    fn split_agrees_with_total() {
        let spec = catalog("fibonacci");
        let tables = subseries_tables::<Rational>(&spec, 20, &ClosedFormOptions::default()).unwrap();
        let assembled = assemble_coefficients(&tables, 20).unwrap();
        for x in [0.25, -0.25, 0.5] {
            let req = EvalRequest::new(x, 20);
            let split = eval_subseries_split(&tables, &req).unwrap();
            let total = eval_partial(&assembled, &req).unwrap();
            assert_eq!(split.parts.len(), 21);
            assert!((split.total - total).abs() <= 1e-12 * total.abs().max(1.0));
        }
    }

    #[test]
    fn split_parity() {
        let spec = catalog("fibonacci");
        let tables = subseries_tables::<Rational>(&spec, 20, &ClosedFormOptions::default()).unwrap();
        let plus = eval_subseries_split(&tables, &EvalRequest::new(0.3, 20)).unwrap();
        let minus = eval_subseries_split(&tables, &EvalRequest::new(-0.3, 20)).unwrap();
        for (p, m) in plus.parts.iter().zip(&minus.parts) {
            let sign = if p.order % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m.value - sign * p.value).abs() <= 1e-15 * p.value.abs().max(1.0));
        }
    }

    #[test]
    fn vanishing_b_leaves_only_all_a_terms() {
        let rules: Vec<SharedRule> = vec![Arc::new(ConstantRule(integer(1))), Arc::new(ConstantRule(integer(0)))];
        let spec = RecurrenceSpec::canonical(rules).unwrap();
        let tables = subseries_tables::<Rational>(&spec, 10, &ClosedFormOptions::default()).unwrap();
        let split = eval_subseries_split(&tables, &EvalRequest::new(0.5, 10)).unwrap();
        for part in &split.parts {
            // y_N = x^N exactly.
            assert_eq!(part.value, 0.5f64.powi(part.order as i32));
        }
    }

    #[test]
    fn split_requires_coverage() {
        let spec = catalog("fibonacci");
        let tables = subseries_tables::<Rational>(&spec, 6, &ClosedFormOptions::default()).unwrap();
        let err = eval_subseries_split(&tables, &EvalRequest::new(0.5, 8)).unwrap_err();
        assert_eq!(err.kind(), "IncompleteCoverage");
    }

    #[test]
    fn convergence_diagnostics() {
        let identity = catalog("identity");
        let seq = direct_expand::<Rational>(&identity, 20).unwrap();
        // The ratio sequence needs three terms per step.
        assert_eq!(convergence_report(&seq, &identity, 0.5).unwrap_err().kind(), "ArityError");

        let fib = catalog("fibonacci");
        let seq = direct_expand::<Rational>(&fib, 40).unwrap();
        let report = convergence_report(&seq, &fib, 1.0).unwrap();
        let last = report.ratios.last().unwrap().scaled_ratio.unwrap();
        assert!((last - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::Divergent);
        assert!(!report.tail_decreasing);

        let report = convergence_report(&seq, &fib, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::LikelyConvergent);
        assert!(report.tail_decreasing);

        let zeros: Vec<SharedRule> = vec![Arc::new(ConstantRule(integer(0))), Arc::new(ConstantRule(integer(0)))];
        let spec = RecurrenceSpec::new(zeros, SeedRule::Explicit(vec![integer(0)]), integer(0)).unwrap();
        let seq = direct_expand::<Rational>(&spec, 6).unwrap();
        let report = convergence_report(&seq, &spec, 0.5).unwrap();
        assert_eq!(report.undefined_ratios, 6);
        assert_eq!(report.verdict, Verdict::Undefined);
    }
}
