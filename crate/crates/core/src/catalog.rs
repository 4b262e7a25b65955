//! Concrete equations: the Lamé recurrence, constant-coefficient k-nacci
//! sequences, the two-term identity sequence, and exact generating-function
//! references.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::recurrence::{
    CoefficientSequence, ConstantRule, Method, RecurrenceSpec, SeedRule, SharedRule, Singularity,
};
use crate::scalar::{format_rational, integer, rational, Rational, Scalar};

/// Parameters of the Lamé equation
/// `y'' + 1/2 (1/(t-a) + 1/(t-b) + 1/(t-c)) y' - (alpha (alpha+1) t + beta) / (4 (t-a)(t-b)(t-c)) y = 0`
/// expanded about `t = a` (so `x = t - a`), plus the indicial root `lambda`.
/// The equation itself only admits `lambda = 0` and `lambda = 1/2`; the
/// recurrence is defined for any `lambda` off the poles.
#[derive(Clone, Debug, PartialEq)]
pub struct LameParams {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub alpha: Rational,
    /// Accessory parameter.
    pub beta: Rational,
    pub lambda: Rational,
}

impl LameParams {
    pub const NAMES: [&'static str; 5] = ["a", "b", "c", "alpha", "beta"];

    pub fn validate(&self) -> Result<()> {
        if self.a == self.b || self.a == self.c || self.b == self.c {
            return Err(Error::InvalidSpec("Lamé branch points a, b, c must be distinct".into()));
        }
        Ok(())
    }

    /// Reads `a, b, c, alpha, beta` from a parameter map.
    pub fn from_map(params: &BTreeMap<String, Rational>, lambda: Rational) -> Result<Self> {
        let get = |name: &str| {
            params
                .get(name)
                .cloned()
                .ok_or_else(|| Error::InvalidSpec(format!("Lamé equation needs parameter `{name}`")))
        };
        let p = Self {
            a: get("a")?,
            b: get("b")?,
            c: get("c")?,
            alpha: get("alpha")?,
            beta: get("beta")?,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// `4 (a-b)(a-c)(n+lambda+1)(n+lambda+1/2)`, or why it vanishes.
    fn denominator(&self, shifted: &Rational) -> Result<Rational, Singularity> {
        let one = integer(1);
        let half = rational(1, 2);
        if (shifted + &one).is_zero() {
            return Err(Singularity("n + lambda + 1 = 0".into()));
        }
        if (shifted + &half).is_zero() {
            return Err(Singularity("n + lambda + 1/2 = 0".into()));
        }
        Ok(integer(4) * (&self.a - &self.b) * (&self.a - &self.c) * (shifted + one) * (shifted + half))
    }

    fn shifted(&self, n: usize) -> Rational {
        integer(n as i64) + &self.lambda
    }

    pub fn a_coefficient(&self, n: usize) -> Result<Rational, Singularity> {
        let s = self.shifted(n);
        let numer = &self.alpha * (&self.alpha + integer(1)) * &self.a + &self.beta
            - integer(4) * (integer(2) * &self.a - &self.b - &self.c) * &s * &s;
        Ok(numer / self.denominator(&s)?)
    }

    pub fn b_coefficient(&self, n: usize) -> Result<Rational, Singularity> {
        let s = self.shifted(n);
        let two_s = integer(2) * &s;
        let numer = (&self.alpha + &two_s - integer(1)) * (&self.alpha - &two_s + integer(2));
        Ok(numer / self.denominator(&s)?)
    }
}

impl LameParams {
    /// Coefficients of `x^{e + lambda - 1}`, `e = 0..N`, after substituting
    /// `sum_{n<=N} c_n x^{n+lambda}` into the equation multiplied by
    /// `4 x (x+a-b)(x+a-c)`. Higher powers depend on the truncated terms.
    pub fn ode_residual(&self, coefficients: &[Rational]) -> Vec<Rational> {
        let (d1, d2) = (&self.a - &self.b, &self.a - &self.c);
        let four = integer(4);
        // 4 x (x + d1)(x + d2)
        let p = [integer(0), &four * &d1 * &d2, &four * (&d1 + &d2), four.clone()];
        // 2 [(x + d1)(x + d2) + x (x + d2) + x (x + d1)]
        let q = [
            integer(2) * &d1 * &d2,
            integer(4) * (&d1 + &d2),
            integer(6),
        ];
        let alpha_term = &self.alpha * (&self.alpha + integer(1));
        let r = [-(&alpha_term * &self.a + &self.beta), -alpha_term];
        let len = coefficients.len().saturating_sub(1);
        let mut out = vec![Rational::zero(); len];
        let mut add = |e: usize, v: Rational| {
            if e < len {
                out[e] += v;
            }
        };
        for (n, c) in coefficients.iter().enumerate() {
            let s = integer(n as i64) + &self.lambda;
            for (i, pi) in p.iter().enumerate().skip(1) {
                add(n + i - 1, pi * &s * (&s - integer(1)) * c);
            }
            for (i, qi) in q.iter().enumerate() {
                add(n + i, qi * &s * c);
            }
            for (i, ri) in r.iter().enumerate() {
                add(n + i + 1, ri * c);
            }
        }
        out
    }
}

pub fn lame_rules(params: &LameParams) -> Result<(SharedRule, SharedRule)> {
    params.validate()?;
    let pa = params.clone();
    let pb = params.clone();
    let describe = |which: &str| {
        format!(
            "Lamé {which}_n (a={}, b={}, c={}, alpha={}, beta={}, lambda={})",
            format_rational(&params.a),
            format_rational(&params.b),
            format_rational(&params.c),
            format_rational(&params.alpha),
            format_rational(&params.beta),
            format_rational(&params.lambda)
        )
    };
    let a: SharedRule = Arc::new(crate::recurrence::FnRule::new(describe("A"), move |n| pa.a_coefficient(n)));
    let b: SharedRule = Arc::new(crate::recurrence::FnRule::new(describe("B"), move |n| pb.b_coefficient(n)));
    Ok((a, b))
}

/// Canonical-seeded Lamé recurrence with `c_0 = 1`.
pub fn lame_spec(params: &LameParams) -> Result<RecurrenceSpec> {
    let (a, b) = lame_rules(params)?;
    Ok(RecurrenceSpec::canonical(vec![a, b])?
        .with_name("lame")
        .with_lambda(params.lambda.clone()))
}

#[derive(Clone, Debug)]
pub enum CatalogSpec {
    Fixed(RecurrenceSpec),
    /// Needs these parameters plus an explicit indicial root.
    Parameterized { required: &'static [&'static str] },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub spec: CatalogSpec,
    /// Leading coefficients the entry must reproduce.
    pub reference_values: Option<Vec<Rational>>,
}

fn ones(count: usize) -> Vec<SharedRule> {
    (0..count).map(|_| Arc::new(ConstantRule(integer(1))) as SharedRule).collect()
}

fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| integer(v)).collect()
}

fn fixed(name: &str, rules: Vec<SharedRule>, seed: SeedRule, c0: i64) -> CatalogSpec {
    let spec = RecurrenceSpec::new(rules, seed, integer(c0)).expect("catalog specs are valid");
    CatalogSpec::Fixed(spec.with_name(name))
}

/// Every built-in equation. Names are stable identifiers.
pub fn catalog_specs() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "fibonacci",
            summary: "A_n = B_n = 1, canonical seeds c_0 = c_1 = 1",
            spec: fixed("fibonacci", ones(2), SeedRule::Canonical, 1),
            reference_values: Some(ints(&[1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144])),
        },
        CatalogEntry {
            name: "fibonacci_gf",
            summary: "A_n = B_n = 1 seeded c_0 = 0, c_1 = 1, the Taylor coefficients of x/(1-x-x^2)",
            spec: fixed("fibonacci_gf", ones(2), SeedRule::Explicit(ints(&[1])), 0),
            reference_values: Some(ints(&[0, 1, 1, 2, 3, 5, 8, 13])),
        },
        CatalogEntry {
            name: "lucas",
            summary: "A_n = B_n = 1 seeded c_0 = 2, c_1 = 1",
            spec: fixed("lucas", ones(2), SeedRule::Explicit(ints(&[1])), 2),
            reference_values: Some(ints(&[2, 1, 3, 4, 7, 11, 18, 29])),
        },
        CatalogEntry {
            name: "identity",
            summary: "two-term c_{n+1} = c_n, c_0 = 1",
            spec: fixed("identity", ones(1), SeedRule::Canonical, 1),
            reference_values: Some(ints(&[1, 1, 1, 1, 1, 1])),
        },
        CatalogEntry {
            name: "tribonacci",
            summary: "four-term, all rules 1, canonical seeds (term counts of c_n)",
            spec: fixed("tribonacci", ones(3), SeedRule::Canonical, 1),
            reference_values: Some(ints(&[1, 1, 2, 4, 7, 13, 24, 44])),
        },
        CatalogEntry {
            name: "tribonacci_count",
            summary: "four-term, all rules 1, seeds 0, 1, 1",
            spec: fixed("tribonacci_count", ones(3), SeedRule::Explicit(ints(&[1, 1])), 0),
            reference_values: Some(ints(&[0, 1, 1, 2, 4, 7, 13, 24, 44])),
        },
        CatalogEntry {
            name: "tetranacci",
            summary: "five-term, all rules 1, canonical seeds (term counts of c_n)",
            spec: fixed("tetranacci", ones(4), SeedRule::Canonical, 1),
            reference_values: Some(ints(&[1, 1, 2, 4, 8, 15, 29, 56, 108, 208])),
        },
        CatalogEntry {
            name: "tetranacci_count",
            summary: "five-term, all rules 1, seeds 0, 1, 1, 2",
            spec: fixed("tetranacci_count", ones(4), SeedRule::Explicit(ints(&[1, 1, 2])), 0),
            reference_values: Some(ints(&[0, 1, 1, 2, 4, 8, 15, 29, 56, 108, 208])),
        },
        CatalogEntry {
            name: "lame",
            summary: "Lamé equation about t = a; needs a, b, c, alpha, beta and lambda",
            spec: CatalogSpec::Parameterized {
                required: &LameParams::NAMES,
            },
            reference_values: None,
        },
    ]
}

/// Resolves a catalog name to a spec. `lambda` is required for parameterized entries.
pub fn lookup(name: &str, params: &BTreeMap<String, Rational>, lambda: Option<Rational>) -> Result<RecurrenceSpec> {
    let entry = catalog_specs()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidSpec(format!("no catalog entry named `{name}`")))?;
    match entry.spec {
        CatalogSpec::Fixed(spec) => Ok(match lambda {
            Some(l) => spec.with_lambda(l),
            None => spec,
        }),
        CatalogSpec::Parameterized { .. } => {
            let lambda = lambda
                .ok_or_else(|| Error::InvalidSpec(format!("`{name}` needs an explicit indicial root lambda")))?;
            lame_spec(&LameParams::from_map(params, lambda)?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoTermBound {
    /// `c_0 ..= c_{n_max}` of the infinite series.
    Infinite { n_max: usize },
    /// The polynomial of degree `alpha0`; `A_{alpha0} = 0` makes it exact.
    Polynomial { alpha0: usize },
}

/// `c_n = c_0 prod_{i<n} A_i` for a two-term recurrence.
pub fn two_term_series<S: Scalar>(spec: &RecurrenceSpec, bound: TwoTermBound) -> Result<CoefficientSequence<S>> {
    spec.require_arity(2)?;
    let last = match bound {
        TwoTermBound::Infinite { n_max } => n_max,
        TwoTermBound::Polynomial { alpha0 } => alpha0,
    };
    let mut values = Vec::with_capacity(last + 1);
    let mut product = S::one();
    let c0 = S::from_rational(spec.c0());
    values.push(c0.clone());
    for i in 0..last {
        product = product * S::from_rational(&spec.rule_value(0, i)?);
        values.push(c0.clone() * product.clone());
    }
    Ok(CoefficientSequence {
        values,
        method: Method::TwoTermProduct,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratingKind {
    /// `x / (1 - x - x^2)`
    Fibonacci,
    /// `1 / (1 - x)`
    Identity,
}

/// Taylor coefficients of a generating function by exact long division.
pub fn generating_reference(kind: GeneratingKind, n_max: usize) -> Vec<Rational> {
    let (numer, denom) = match kind {
        GeneratingKind::Fibonacci => (ints(&[0, 1]), ints(&[1, -1, -1])),
        GeneratingKind::Identity => (ints(&[1]), ints(&[1, -1])),
    };
    taylor_coefficients(&numer, &denom, n_max).expect("constant term of the denominator is nonzero")
}

/// First `n_max + 1` Taylor coefficients of `numer(x) / denom(x)` (ascending
/// coefficient lists), by power-series long division.
pub fn taylor_coefficients(numer: &[Rational], denom: &[Rational], n_max: usize) -> Result<Vec<Rational>> {
    let lead = denom
        .first()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Error::Domain("denominator must have a nonzero constant term".into()))?;
    let mut out: Vec<Rational> = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let mut acc = numer.get(k).cloned().unwrap_or_else(Rational::zero);
        for j in 1..denom.len().min(k + 1) {
            acc -= &denom[j] * &out[k - j];
        }
        out.push(acc / lead);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{direct_expand, recurrence_residuals, FnRule};

    fn params(a: i64, b: i64, c: i64, alpha: Rational, beta: Rational, lambda: Rational) -> LameParams {
        LameParams {
            a: integer(a),
            b: integer(b),
            c: integer(c),
            alpha,
            beta,
            lambda,
        }
    }

    #[test]
    fn lame_a0_by_hand() {
        // a=2, b=1, c=0, alpha=1, beta=0, lambda=0:
        // A_0 = (1*2*2 + 0 - 0) / (4 * 1 * 2 * 1 * 1/2) = 4/4 = 1, B_0 = (0 * 3)/4 = 0.
        let p = params(2, 1, 0, integer(1), integer(0), integer(0));
        assert_eq!(p.a_coefficient(0).unwrap(), integer(1));
        assert_eq!(p.b_coefficient(0).unwrap(), integer(0));
        // n = 1: A_1 = (4 - 4*3*1) / (4*1*2*2*3/2) = -8/24 = -1/3.
        assert_eq!(p.a_coefficient(1).unwrap(), rational(-1, 3));
        // B_1 = (1+2-1)(1-2+2) / 24 = 2/24 = 1/12.
        assert_eq!(p.b_coefficient(1).unwrap(), rational(1, 12));

        let seq = direct_expand::<Rational>(&lame_spec(&p).unwrap(), 3).unwrap();
        assert_eq!(&seq.values[1] / &seq.values[0], p.a_coefficient(0).unwrap());
    }

    #[test]
    fn lame_series_solves_the_equation() {
        for lambda in [integer(0), rational(1, 2)] {
            let p = params(3, 1, -1, rational(7, 3), rational(1, 2), lambda);
            let seq = direct_expand::<Rational>(&lame_spec(&p).unwrap(), 20).unwrap();
            let residual = p.ode_residual(&seq.values);
            assert_eq!(residual.len(), 20);
            assert!(residual.iter().all(Zero::is_zero));
        }
        // Any other exponent leaves the lowest power unbalanced.
        let p = params(3, 1, -1, rational(7, 3), rational(1, 2), rational(1, 3));
        let seq = direct_expand::<Rational>(&lame_spec(&p).unwrap(), 5).unwrap();
        assert!(!p.ode_residual(&seq.values)[0].is_zero());
    }

    #[test]
    fn lame_b_root() {
        let p = params(3, 1, -1, integer(4), rational(1, 2), integer(0));
        assert_eq!(p.b_coefficient(3).unwrap(), integer(0));
        assert_ne!(p.b_coefficient(2).unwrap(), integer(0));
    }

    #[test]
    fn lame_singular_indices() {
        let p = params(3, 1, -1, integer(1), integer(0), integer(-3));
        assert!(p.a_coefficient(2).unwrap_err().0.contains("n + lambda + 1 = 0"));
        let p = params(3, 1, -1, integer(1), integer(0), rational(-5, 2));
        assert!(p.b_coefficient(2).unwrap_err().0.contains("1/2"));
        let err = direct_expand::<Rational>(&lame_spec(&p).unwrap(), 5).unwrap_err();
        assert_eq!(err.index(), Some(2));
    }

    #[test]
    fn lame_rejects_coincident_branch_points() {
        let p = params(1, 1, 0, integer(1), integer(0), integer(0));
        assert!(lame_rules(&p).is_err());
    }

    #[test]
    fn lame_residual_is_exactly_zero() {
        let p = params(3, 1, -2, rational(7, 3), rational(-5, 4), rational(1, 3));
        let spec = lame_spec(&p).unwrap();
        let seq = direct_expand::<Rational>(&spec, 30).unwrap();
        let residuals = recurrence_residuals(&spec, &seq).unwrap();
        assert_eq!(residuals.len(), 29);
        assert!(residuals.iter().all(|(_, r)| r.is_zero()));
    }

    fn reference(name: &str) -> (RecurrenceSpec, Vec<Rational>) {
        let entry = catalog_specs().into_iter().find(|e| e.name == name).unwrap();
        match entry.spec {
            CatalogSpec::Fixed(spec) => (spec, entry.reference_values.unwrap()),
            CatalogSpec::Parameterized { .. } => panic!("{name} is parameterized"),
        }
    }

    #[test]
    fn catalog_reproduces_reference_values() {
        for entry in catalog_specs() {
            let CatalogSpec::Fixed(spec) = &entry.spec else { continue };
            let expected = entry.reference_values.clone().unwrap();
            let seq = direct_expand::<Rational>(spec, expected.len() - 1).unwrap();
            assert_eq!(seq.values, expected, "{}", entry.name);
        }
    }

    #[test]
    fn catalog_names_are_unique() {
        let mut names: Vec<_> = catalog_specs().iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), catalog_specs().len());
    }

    #[test]
    fn lookup_requires_lambda_for_lame() {
        let mut map = BTreeMap::new();
        for (k, v) in [("a", 2), ("b", 1), ("c", 0), ("alpha", 1), ("beta", 0)] {
            map.insert(k.to_string(), integer(v));
        }
        assert!(lookup("lame", &map, None).is_err());
        let spec = lookup("lame", &map, Some(integer(0))).unwrap();
        assert_eq!(spec.arity(), 3);
        map.remove("beta");
        assert!(lookup("lame", &map, Some(integer(0))).is_err());
        assert!(lookup("nope", &BTreeMap::new(), None).is_err());
        assert_eq!(lookup("lucas", &BTreeMap::new(), None).unwrap().c0(), &integer(2));
    }

    #[test]
    fn two_term_products() {
        let (identity, _) = reference("identity");
        let seq = two_term_series::<Rational>(&identity, TwoTermBound::Infinite { n_max: 9 }).unwrap();
        assert!(seq.values.iter().all(|v| *v == integer(1)));
        assert_eq!(seq.method, Method::TwoTermProduct);

        let harmonic: SharedRule = Arc::new(FnRule::new("1/(n+1)", |n| Ok(rational(1, n as i64 + 1))));
        let spec = RecurrenceSpec::canonical(vec![harmonic]).unwrap();
        let seq = two_term_series::<Rational>(&spec, TwoTermBound::Infinite { n_max: 4 }).unwrap();
        assert_eq!(seq.values[4], rational(1, 24));
        assert_eq!(seq.values, direct_expand::<Rational>(&spec, 4).unwrap().values);

        let cut: SharedRule = Arc::new(FnRule::new("[n<3]", |n| Ok(integer(i64::from(n < 3)))));
        let spec = RecurrenceSpec::canonical(vec![cut]).unwrap();
        let poly = two_term_series::<Rational>(&spec, TwoTermBound::Polynomial { alpha0: 3 }).unwrap();
        assert_eq!(poly.values.len(), 4);
        let direct = direct_expand::<Rational>(&spec, 8).unwrap();
        assert_eq!(&direct.values[..4], &poly.values[..]);
        assert!(direct.values[4..].iter().all(Zero::is_zero));

        let (fib, _) = reference("fibonacci");
        let err = two_term_series::<Rational>(&fib, TwoTermBound::Infinite { n_max: 3 }).unwrap_err();
        assert_eq!(err.kind(), "ArityError");
    }

    #[test]
    fn generating_functions() {
        assert_eq!(generating_reference(GeneratingKind::Identity, 5), ints(&[1, 1, 1, 1, 1, 1]));
        assert_eq!(generating_reference(GeneratingKind::Fibonacci, 7), ints(&[0, 1, 1, 2, 3, 5, 8, 13]));

        let (gf_spec, _) = reference("fibonacci_gf");
        let direct = direct_expand::<Rational>(&gf_spec, 30).unwrap();
        assert_eq!(generating_reference(GeneratingKind::Fibonacci, 30), direct.values);

        let (identity, _) = reference("identity");
        let two = two_term_series::<Rational>(&identity, TwoTermBound::Infinite { n_max: 12 }).unwrap();
        assert_eq!(generating_reference(GeneratingKind::Identity, 12), two.values);
    }

    #[test]
    fn long_division_general() {
        // (1 + x) / (1 - 2x) = 1 + 3x + 6x^2 + 12x^3
        let q = taylor_coefficients(&ints(&[1, 1]), &ints(&[1, -2]), 3).unwrap();
        assert_eq!(q, ints(&[1, 3, 6, 12]));
        assert!(taylor_coefficients(&ints(&[1]), &ints(&[0, 1]), 3).is_err());
    }
}
