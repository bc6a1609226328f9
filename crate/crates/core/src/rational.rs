//! Exact rational values and irrational bounds of the form `c * m^e`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational, always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational as `p/q`, with `q` always present.
pub fn format_pq(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p`, `p/q` or a plain decimal such as `0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let value = Rational::new(digits, scale);
    Some(if negative { -value } else { value })
}

/// `⌈m^β⌉` computed exactly for a rational exponent `β = p/q` with `p, q > 0`.
pub fn ceil_power(base: u64, exponent: &Rational) -> u64 {
    assert!(exponent.is_positive(), "exponent must be positive");
    assert!(base >= 1, "base must be positive");
    let p = exponent
        .numer()
        .to_u32()
        .expect("exponent numerator too large");
    let q = exponent
        .denom()
        .to_u32()
        .expect("exponent denominator too large");
    let target = BigUint::from(base).pow(p);
    let guess = (base as f64).powf(p as f64 / q as f64).ceil() as u64;
    let mut c = guess.max(1);
    while c > 1 && BigUint::from(c - 1).pow(q) >= target {
        c -= 1;
    }
    while BigUint::from(c).pow(q) < target {
        c += 1;
    }
    c
}

/// An upper bound `coeff · base^exponent`, possibly irrational, compared exactly
/// against rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerBound {
    pub coeff: Rational,
    pub base: u64,
    pub exponent: Rational,
}

impl PowerBound {
    pub fn new(coeff: Rational, base: u64, exponent: Rational) -> Self {
        assert!(coeff.is_positive(), "bound coefficient must be positive");
        assert!(base >= 1, "bound base must be positive");
        PowerBound {
            coeff,
            base,
            exponent,
        }
    }

    /// Exact test of `value ≤ coeff · base^exponent`.
    pub fn admits(&self, value: &Rational) -> bool {
        if !value.is_positive() {
            return true;
        }
        let scaled = value / &self.coeff;
        let p = self
            .exponent
            .numer()
            .to_i32()
            .expect("exponent numerator too large");
        let q = self
            .exponent
            .denom()
            .to_i32()
            .expect("exponent denominator too large");
        let lhs = Pow::pow(&scaled, q);
        let rhs = Pow::pow(&Rational::from_integer(BigInt::from(self.base)), p);
        lhs <= rhs
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.coeff) * (self.base as f64).powf(to_f64(&self.exponent))
    }
}

impl fmt::Display for PowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent.is_zero() || self.base == 1 {
            return write!(f, "{}", self.coeff);
        }
        if self.exponent.is_one() {
            return write!(f, "{}*{}", self.coeff, self.base);
        }
        write!(f, "{}*{}^({})", self.coeff, self.base, self.exponent)
    }
}

/// Least common multiple of the denominators of `values` (1 when empty).
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
