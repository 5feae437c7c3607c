//! Exact Laurent polynomials in `s = √L` with rational coefficients.
//!
//! Connection and curvature tables of the metric family `g_L` live in this
//! ring: every entry is a finite sum `Σ c_k s^k` with `k ∈ [-4, 4]`, so tables
//! can be compared against closed forms by exact equality. `L^m` is stored at
//! exponent `2m`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision reduced fraction. `BigRational` keeps the
/// representation normalized (gcd 1, positive denominator).
pub type Rational = BigRational;

/// Smallest allowed exponent of `s`.
pub const MIN_EXP: i32 = -4;
/// Largest allowed exponent of `s`.
pub const MAX_EXP: i32 = 4;

/// Builds `num/den` as a [`Rational`].
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn check_exp(exp: i32) -> Result<()> {
    if (MIN_EXP..=MAX_EXP).contains(&exp) {
        Ok(())
    } else {
        Err(Error::LaurentRange { exponent: exp })
    }
}

/// Laurent polynomial in `s = √L`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SqrtLPoly {
    terms: BTreeMap<i32, Rational>,
}

impl SqrtLPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0).expect("exponent 0 is in range")
    }

    /// `c · s^exp`.
    pub fn monomial(c: Rational, exp: i32) -> Result<Self> {
        check_exp(exp)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Ok(Self { terms })
    }

    /// The metric weight `L = s²`.
    pub fn l() -> Self {
        Self::monomial(Rational::one(), 2).expect("in range")
    }

    /// Builds a polynomial from `(exponent of s, numerator, denominator)` triples.
    pub fn from_terms(terms: &[(i32, i64, i64)]) -> Result<Self> {
        let mut out = Self::zero();
        for &(exp, num, den) in terms {
            out = out + Self::monomial(rational(num, den), exp)?;
        }
        Ok(out)
    }

    /// Converts a rational constant.
    pub fn from_rational(c: &Rational) -> Self {
        Self::constant(c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `s^exp` (zero when absent).
    pub fn coeff(&self, exp: i32) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    fn insert_add(terms: &mut BTreeMap<i32, Rational>, exp: i32, c: Rational) {
        let entry = terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            terms.remove(&exp);
        }
    }

    /// Exact product; fails when an exponent leaves `[-4, 4]`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp = ea + eb;
                check_exp(exp)?;
                Self::insert_add(&mut terms, exp, ca * cb);
            }
        }
        Ok(Self { terms })
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `s^shift`. Dividing by the monomial `L` is `shift = -2`.
    pub fn shift(&self, shift: i32) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let exp = k + shift;
            check_exp(exp)?;
            terms.insert(exp, v.clone());
        }
        Ok(Self { terms })
    }

    /// Numeric value at `s = √L`.
    pub fn eval(&self, l: f64) -> Result<f64> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::NonPositiveL(l));
        }
        Ok(self.eval_unchecked(l))
    }

    pub(crate) fn eval_unchecked(&self, l: f64) -> f64 {
        let s = l.sqrt();
        self.terms
            .iter()
            .map(|(k, c)| {
                // even exponents are integer powers of L, exact where possible
                let m = if k % 2 == 0 { l.powi(k / 2) } else { s.powi(*k) };
                rational_to_f64(c) * m
            })
            .sum()
    }
}

/// Lossy conversion used when tables are evaluated numerically.
pub fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

impl Add for SqrtLPoly {
    type Output = SqrtLPoly;
    fn add(mut self, rhs: SqrtLPoly) -> SqrtLPoly {
        for (k, v) in rhs.terms {
            Self::insert_add(&mut self.terms, k, v);
        }
        self
    }
}

impl<'a> Add<&'a SqrtLPoly> for &'a SqrtLPoly {
    type Output = SqrtLPoly;
    fn add(self, rhs: &'a SqrtLPoly) -> SqrtLPoly {
        self.clone() + rhs.clone()
    }
}

impl Neg for SqrtLPoly {
    type Output = SqrtLPoly;
    fn neg(self) -> SqrtLPoly {
        Self {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl Sub for SqrtLPoly {
    type Output = SqrtLPoly;
    fn sub(self, rhs: SqrtLPoly) -> SqrtLPoly {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a SqrtLPoly> for &'a SqrtLPoly {
    type Output = SqrtLPoly;
    fn sub(self, rhs: &'a SqrtLPoly) -> SqrtLPoly {
        self.clone() - rhs.clone()
    }
}

fn monomial_symbol(exp: i32) -> String {
    if exp % 2 == 0 {
        match exp / 2 {
            1 => "L".to_string(),
            m => format!("L^{m}"),
        }
    } else {
        match exp {
            1 => "s".to_string(),
            k => format!("s^{k}"),
        }
    }
}

fn format_term(c: &Rational, exp: i32) -> String {
    if exp == 0 {
        return c.to_string();
    }
    let sym = monomial_symbol(exp);
    if c.is_one() {
        sym
    } else if (-c).is_one() {
        format!("-{sym}")
    } else {
        format!("{c}*{sym}")
    }
}

/// Canonical rendering, descending exponent order: `3/4*L + 1`, `-1/2*s`,
/// `1/2 - 1/2*L^-1`.
impl fmt::Display for SqrtLPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (exp, c)) in self.terms.iter().rev().enumerate() {
            if i == 0 {
                f.write_str(&format_term(c, *exp))?;
            } else if c.is_negative() {
                write!(f, " - {}", format_term(&-c, *exp))?;
            } else {
                write!(f, " + {}", format_term(c, *exp))?;
            }
        }
        Ok(())
    }
}
