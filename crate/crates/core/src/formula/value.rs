use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_pq, to_f64, Rational};

/// Tolerance used when comparing floating-point formula values.
pub const FLOAT_TOL: f64 = 1e-9;

/// Truth values of formulas: exact rationals for finite permutation and rank
/// structures, floats for unitary groups.
pub trait MetricValue: Clone + PartialOrd + fmt::Debug + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn one_minus(&self) -> Self;
    /// `max(self − other, 0)`.
    fn trunc_sub(&self, other: &Self) -> Self;
    /// `min(q·self, 1)`.
    fn scale(&self, q: &Rational) -> Self;
    fn abs_diff(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// `self ≤ other`, exactly for rationals and up to [`FLOAT_TOL`] for floats.
    fn le_tol(&self, other: &Self) -> bool;
    fn is_zero_tol(&self) -> bool;
    fn into_value(self) -> Value;

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl MetricValue for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn one_minus(&self) -> Self {
        Rational::one() - self
    }
    fn trunc_sub(&self, other: &Self) -> Self {
        let d = self - other;
        if d.is_negative() {
            Rational::zero()
        } else {
            d
        }
    }
    fn scale(&self, q: &Rational) -> Self {
        let v = self * q;
        if v > Rational::one() {
            Rational::one()
        } else {
            v
        }
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }
    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }
    fn into_value(self) -> Value {
        Value::Exact(self)
    }
}

impl MetricValue for f64 {
    fn zero_value() -> Self {
        0.0
    }
    fn one_value() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }
    fn one_minus(&self) -> Self {
        1.0 - self
    }
    fn trunc_sub(&self, other: &Self) -> Self {
        (self - other).max(0.0)
    }
    fn scale(&self, q: &Rational) -> Self {
        (self * to_f64(q)).min(1.0)
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn le_tol(&self, other: &Self) -> bool {
        *self <= *other + FLOAT_TOL
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn into_value(self) -> Value {
        Value::Approx(self)
    }
}

/// A formula value with its exactness made explicit.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => to_f64(q),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Exact(q) => serde_json::Value::String(format_pq(q)),
            Value::Approx(x) => serde_json::json!(x),
        }
    }
}

impl fmt::Display for Value {
    /// `p/q` for exact values, shortest round-trip decimal otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{}", format_pq(q)),
            Value::Approx(x) => write!(f, "{x}"),
        }
    }
}
