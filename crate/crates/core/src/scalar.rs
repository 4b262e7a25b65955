//! Numeric fields the recurrence engine runs over.
//!
//! Every coefficient rule produces an exact [`Rational`]. The algorithms are
//! generic over [`Scalar`], so the same code path runs either in exact
//! arbitrary-precision rationals or in IEEE doubles.

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Which field a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Exact,
    Approx,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Approx => "approx",
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(ScalarMode::Exact),
            "approx" | "approximate" | "float" => Ok(ScalarMode::Approx),
            other => Err(Error::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Send + Sync + 'static {
    const MODE: ScalarMode;

    fn from_rational(value: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// `false` only for NaN or infinite doubles.
    fn is_finite(&self) -> bool {
        true
    }

    /// Textual form used in reports: `p/q` for rationals, shortest round-trip decimal for doubles.
    fn render(&self) -> String;

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self.clone() / rhs.clone())
        }
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Approx;

    fn from_rational(value: &Rational) -> Self {
        <Rational as Scalar>::to_f64(value)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Always `p/q`, including integers (`3/1`) and zero (`0/1`).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q` or a bare integer `p`. Decimal points are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a rational of the form p/q"));
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| bad())?;
    let denom = BigInt::from_str(denom).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("`{text}` has a zero denominator")));
    }
    Ok(Rational::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_render_in_lowest_terms() {
        assert_eq!(format_rational(&rational(6, -4)), "-3/2");
        assert_eq!(format_rational(&integer(0)), "0/1");
        assert_eq!(format_rational(&integer(7)), "7/1");
    }

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("3/4").unwrap(), rational(3, 4));
        assert_eq!(parse_rational(" -10 / 4 ").unwrap(), rational(-5, 2));
        assert_eq!(parse_rational("5").unwrap(), integer(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn doubles_render_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(x.render().parse::<f64>().unwrap(), x);
        assert_eq!(2.0f64.render(), "2.0");
    }

    #[test]
    fn checked_div_refuses_zero() {
        assert!(integer(1).checked_div(&integer(0)).is_none());
        assert_eq!(integer(1).checked_div(&integer(4)), Some(rational(1, 4)));
        assert!(1.0f64.checked_div(&0.0).is_none());
    }
}
