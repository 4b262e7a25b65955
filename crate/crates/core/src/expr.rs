//! Inline coefficient rules: rational functions of the index `n`.
//!
//! Grammar (usual precedence, `^` binds tightest and takes an integer literal):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | 'n' | parameter | '(' expr ')'
//! ```
//!
//! Parameters are substituted at parse time, so an [`ExprRule`] only ever
//! depends on `n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::recurrence::{CoefficientRule, RuleLabel, SharedRule, Singularity};
use crate::scalar::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Const(Rational),
    Index,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    fn eval(&self, n: &Rational) -> Result<Rational, String> {
        Ok(match self {
            Expr::Const(v) => v.clone(),
            Expr::Index => n.clone(),
            Expr::Neg(e) => -e.eval(n)?,
            Expr::Add(l, r) => l.eval(n)? + r.eval(n)?,
            Expr::Sub(l, r) => l.eval(n)? - r.eval(n)?,
            Expr::Mul(l, r) => l.eval(n)? * r.eval(n)?,
            Expr::Div(l, r) => {
                let d = r.eval(n)?;
                if d.is_zero() {
                    return Err("division by zero".into());
                }
                l.eval(n)? / d
            }
            Expr::Pow(base, exp) => {
                let b = base.eval(n)?;
                if *exp < 0 && b.is_zero() {
                    return Err("zero raised to a negative power".into());
                }
                num_traits::pow::Pow::pow(b, *exp)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            tokens.push(Token::Num(digits.parse().expect("ascii digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            tokens.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a BTreeMap<String, Rational>,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in `{}`", self.src))
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = self.peek_op() == Some('-');
        if negative {
            self.pos += 1;
        }
        let exp = match self.tokens.get(self.pos) {
            Some(Token::Num(v)) => i32::try_from(v.clone()).map_err(|_| self.err("exponent too large"))?,
            _ => return Err(self.err("expected an integer exponent")),
        };
        self.pos += 1;
        Ok(Expr::Pow(Box::new(base), if negative { -exp } else { exp }))
    }

    fn atom(&mut self) -> Result<Expr> {
        let token = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        let atom = match token {
            Some(Token::Num(v)) => Expr::Const(Rational::from_integer(v)),
            Some(Token::Ident(name)) if name == "n" => Expr::Index,
            Some(Token::Ident(name)) => match self.params.get(&name) {
                Some(v) => Expr::Const(v.clone()),
                None => return Err(self.err(&format!("unknown parameter `{name}`"))),
            },
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                inner
            }
            _ => return Err(self.err("expected a number, `n`, a parameter or `(`")),
        };
        if matches!(self.tokens.get(self.pos), Some(Token::Num(_) | Token::Ident(_)) | Some(Token::Op('('))) {
            return Err(self.err("missing operator (write `2*n`, not `2n`)"));
        }
        Ok(atom)
    }
}

/// A coefficient rule given as a rational function of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprRule {
    source: String,
    expr: Expr,
}

impl ExprRule {
    pub fn parse(source: &str, params: &BTreeMap<String, Rational>) -> Result<Self> {
        let tokens = tokenize(source)?;
        if tokens.is_empty() {
            return Err(Error::Parse("empty rule".into()));
        }
        let mut parser = Parser {
            tokens,
            pos: 0,
            params,
            src: source,
        };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.err("trailing input"));
        }
        Ok(Self {
            source: source.trim().to_string(),
            expr,
        })
    }

    /// Value at an arbitrary rational argument.
    pub fn eval_at(&self, n: &Rational) -> Result<Rational, Singularity> {
        self.expr.eval(n).map_err(|reason| Singularity(format!("{reason} at n = {}", format_rational(n))))
    }
}

impl CoefficientRule for ExprRule {
    fn evaluate(&self, n: usize) -> Result<Rational, Singularity> {
        self.eval_at(&Rational::from_integer(BigInt::from(n)))
    }

    fn describe(&self) -> String {
        self.source.clone()
    }
}

/// Parses `A=...; B=...` into rules `A, B, ...` (labels must be consecutive from `A`).
pub fn parse_inline_rules(text: &str, params: &BTreeMap<String, Rational>) -> Result<Vec<SharedRule>> {
    let mut found: BTreeMap<RuleLabel, ExprRule> = BTreeMap::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, body) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("rule `{part}` is not of the form A=<expr>")))?;
        let mut chars = label.trim().chars();
        let label = match (chars.next().and_then(RuleLabel::from_char), chars.next()) {
            (Some(l), None) => l,
            _ => return Err(Error::Parse(format!("unknown rule label `{}`", label.trim()))),
        };
        if found.insert(label, ExprRule::parse(body, params)?).is_some() {
            return Err(Error::Parse(format!("rule {label} defined twice")));
        }
    }
    let rules: Vec<SharedRule> = found.values().map(|r| Arc::new(r.clone()) as SharedRule).collect();
    for (position, label) in found.keys().enumerate() {
        if label.position() != position {
            return Err(Error::Parse(format!(
                "rules must be consecutive from A; rule {} is missing",
                RuleLabel::ALL[position]
            )));
        }
    }
    if rules.is_empty() {
        return Err(Error::Parse("no rules given".into()));
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};

    fn no_params() -> BTreeMap<String, Rational> {
        BTreeMap::new()
    }

    #[test]
    fn evaluates_rational_functions() {
        let r = ExprRule::parse("(2*n^2 - 3)/(n + 4)", &no_params()).unwrap();
        assert_eq!(r.evaluate(0).unwrap(), rational(-3, 4));
        assert_eq!(r.evaluate(2).unwrap(), rational(5, 6));
        let r = ExprRule::parse("-n^2", &no_params()).unwrap();
        assert_eq!(r.evaluate(3).unwrap(), integer(-9));
        let r = ExprRule::parse("2^-2 * n", &no_params()).unwrap();
        assert_eq!(r.evaluate(2).unwrap(), rational(1, 2));
        let r = ExprRule::parse("1/2 - 1/3", &no_params()).unwrap();
        assert_eq!(r.evaluate(9).unwrap(), rational(1, 6));
    }

    #[test]
    fn substitutes_parameters() {
        let params = BTreeMap::from([("q".to_string(), rational(3, 2))]);
        let r = ExprRule::parse("q*(n+1)", &params).unwrap();
        assert_eq!(r.evaluate(1).unwrap(), integer(3));
        assert!(ExprRule::parse("p*n", &params).is_err());
    }

    #[test]
    fn reports_poles() {
        let r = ExprRule::parse("1/(n-3)", &no_params()).unwrap();
        assert!(r.evaluate(2).is_ok());
        let err = r.evaluate(3).unwrap_err();
        assert!(err.0.contains("division by zero"));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "2n", "(n+1", "n+", "n ^ x", "n $ 2", "1)"] {
            assert!(ExprRule::parse(bad, &no_params()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn inline_rule_sets() {
        let rules = parse_inline_rules("A=1; B=n-3", &no_params()).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[1].evaluate(5).unwrap(), integer(2));
        assert_eq!(rules[1].describe(), "n-3");
        assert!(parse_inline_rules("A=1; C=2", &no_params()).is_err());
        assert!(parse_inline_rules("A=1; A=2", &no_params()).is_err());
        assert!(parse_inline_rules("E=1", &no_params()).is_err());
        assert!(parse_inline_rules(" ; ", &no_params()).is_err());
    }
}
