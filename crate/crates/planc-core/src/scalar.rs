//! Coefficient domains for series: exact rationals and IEEE doubles.
//!
//! A series commits to one scalar kind at the type level. The exact kind
//! compares with `==` and tolerates nothing; the float kind exists for
//! sampled matrix data and compares with a fixed relative tolerance.

use crate::error::CoreError;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use std::fmt::{Debug, Display};
use std::str::FromStr;

/// Relative tolerance for float-mode identity checks.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Condition-number limit for float linear solves.
pub const FLOAT_COND_LIMIT: f64 = 1e12;

/// The two supported coefficient domains.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ScalarKind {
    Rational,
    Float64,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::Float64 => "float64",
        }
    }
}

/// Operations a coefficient domain must provide.
///
/// Method names avoid clashing with `std::ops` so that call sites stay
/// unambiguous for types that also implement the operator traits.
pub trait Scalar: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn kind() -> ScalarKind;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse; errors on zero.
    fn recip(&self) -> Result<Self, CoreError>;
    /// Absolute value as f64, used only for pivot choice and conditioning.
    fn magnitude(&self) -> f64;
    /// Exact kind: `==`. Float kind: |a-b| <= tol * max(1, |a|, |b|).
    fn approx_eq(&self, rhs: &Self, tol: f64) -> bool;
    /// Canonical text form: "p/q" with q > 0, gcd(p, q) = 1 for rationals;
    /// shortest round-trip decimal for floats. Used in CSV and reports.
    fn render(&self) -> String;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
}

impl Scalar for BigRational {
    fn kind() -> ScalarKind {
        ScalarKind::Rational
    }

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn negated(&self) -> Self {
        -self
    }

    fn recip(&self) -> Result<Self, CoreError> {
        if Zero::is_zero(self) {
            return Err(CoreError::DivisionByZero);
        }
        Ok(BigRational::new(self.denom().clone(), self.numer().clone()))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn approx_eq(&self, rhs: &Self, _tol: f64) -> bool {
        self == rhs
    }

    fn render(&self) -> String {
        // Ratio keeps gcd 1 and a positive denominator; emit q explicitly so
        // the canonical form is uniform ("3/1", "-2/5", "0/1").
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_json(&self) -> Value {
        Value::String(self.render())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        let s = v
            .as_str()
            .ok_or_else(|| format!("rational value must be a \"p/q\" string, got {v}"))?;
        parse_rational(s)
    }
}

/// Parses "p" or "p/q" with optional sign; normalizes and reduces.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (num_str, den_str) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p =
        BigInt::from_str(num_str.trim()).map_err(|e| format!("bad numerator {num_str:?}: {e}"))?;
    let q = BigInt::from_str(den_str.trim())
        .map_err(|e| format!("bad denominator {den_str:?}: {e}"))?;
    if Zero::is_zero(&q) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(p, q))
}

impl Scalar for f64 {
    fn kind() -> ScalarKind {
        ScalarKind::Float64
    }

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_one(&self) -> bool {
        *self == 1.0
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn negated(&self) -> Self {
        -self
    }

    fn recip(&self) -> Result<Self, CoreError> {
        if *self == 0.0 {
            return Err(CoreError::DivisionByZero);
        }
        Ok(1.0 / self)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(rhs.abs());
        (self - rhs).abs() <= tol * scale
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        v.as_f64()
            .ok_or_else(|| format!("float64 value must be a JSON number, got {v}"))
    }
}
