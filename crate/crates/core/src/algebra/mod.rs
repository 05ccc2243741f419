//! Exact arithmetic: rationals, multivariate polynomials, resultants,
//! square-free decomposition, real root isolation and real algebraic numbers.

pub mod interrupt;
mod factor;
mod ran;
mod resultant;
mod roots;
mod poly;
mod upoly;

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::irreducible_factors;
pub use poly::{Monomial, Polynomial, Var};
pub use ran::{eval_sign, root_of_poly_at, Interval, RealAlgebraic, SamplePoint};
pub use resultant::{discriminant, gcd, psc, resultant, squarefree_part};
pub(crate) use resultant::{bareiss_det, content_in};
pub use roots::{cauchy_bound, descartes_count, isolate_real_roots, square_free_factors};
pub use upoly::UniPoly;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("polynomial has degree {degree} in {var}, need at least {need}")]
    Degree { var: String, degree: u32, need: u32 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("point does not assign variable {0}")]
    Unassigned(String),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn sign_of(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// `3`, `-1/2`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Six significant digits, trailing zeros removed.
pub fn fmt_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=9).contains(&mag) {
        return format!("{:.5e}", x);
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // very large magnitudes: scale through strings
        let n = q.numer().to_f64().unwrap_or(f64::MAX);
        let d = q.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// The rational with the smallest denominator in the open interval `(lo, hi)`;
/// among integers, the one closest to zero.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    if lo.is_negative() && hi.is_positive() {
        return Rational::zero();
    }
    if !lo.is_negative() {
        simplest_nonneg(lo, hi)
    } else {
        -simplest_nonneg(&-hi, &-lo)
    }
}

// Stern-Brocot descent on 0 <= lo < hi.
fn simplest_nonneg(lo: &Rational, hi: &Rational) -> Rational {
    let fl = floor(lo);
    let next = Rational::from_integer(&fl + BigInt::one());
    if &next < hi {
        return next;
    }
    // lo and hi share the integer part (or hi is exactly fl+1)
    let base = Rational::from_integer(fl);
    let a = lo - &base;
    let b = hi - &base;
    if a.is_zero() {
        // (0, b): smallest denominator is 1/ceil(1/b)+...
        let inv = b.recip();
        let n = floor(&inv) + BigInt::one();
        return base + Rational::new(BigInt::one(), n);
    }
    // 1/b < 1/a: recurse on reciprocals
    let r = simplest_nonneg(&b.recip(), &a.recip());
    base + r.recip()
}

impl FromStr for Polynomial {
    type Err = AlgebraError;

    /// Compact arithmetic syntax: `x^2 - 1/2*y + 3.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = MiniParser {
            chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let out = p.sum()?;
        if p.pos != p.chars.len() {
            return Err(AlgebraError::Parse(format!("trailing input at {}", p.pos)));
        }
        Ok(out)
    }
}

/// Test and doc helper; panics on malformed input.
pub fn parse_poly(s: &str) -> Polynomial {
    s.parse().unwrap_or_else(|e| panic!("{e}: {s}"))
}

struct MiniParser {
    chars: Vec<char>,
    pos: usize,
}

impl MiniParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.product()?;
        while let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                let rhs = self.product()?;
                acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            if c == '*' {
                self.pos += 1;
                let rhs = self.unary()?;
                acc = &acc * &rhs;
            } else if c == '/' {
                self.pos += 1;
                let rhs = self.unary()?;
                let k = rhs
                    .constant_value()
                    .filter(|k| !k.is_zero())
                    .ok_or_else(|| AlgebraError::Parse("division by non-constant".into()))?;
                acc = acc.scale(&k.recip());
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, AlgebraError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek() == Some('+') {
            self.pos += 1;
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| AlgebraError::Parse("bad exponent".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, AlgebraError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(AlgebraError::Parse("expected )".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_digit() || c == '.')
                {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                Ok(Polynomial::constant(parse_decimal(&text)?))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                Ok(Polynomial::var(Var::from(name)))
            }
            other => Err(AlgebraError::Parse(format!("unexpected {other:?}"))),
        }
    }
}

/// Exact value of a decimal literal such as `12`, `0.5` or `.25`.
pub fn parse_decimal(text: &str) -> Result<Rational, AlgebraError> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(AlgebraError::Parse(format!("bad number {text}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad number {text}")))?;
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(Rational::new(n, d))
}
