//! Exact-by-construction real expressions: rationals, the named constants,
//! rational powers of rationals, and sums/products of those.
//!
//! A `Real` can always be evaluated to a certified interval at any precision,
//! and knows when it is exactly rational (rational subtrees fold at
//! construction, including perfect-power detection for `Pow`), which the
//! continued-fraction code uses to terminate instead of escalating forever.

use super::consts::{e_const, phi, pi};
use super::interval::{check_precision, Interval};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone)]
pub enum Real {
    Rational(BigRational),
    Pi,
    E,
    Phi,
    /// base^expo with base a positive rational and expo rational.
    Pow(BigRational, BigRational),
    Add(Box<Real>, Box<Real>),
    Mul(Box<Real>, Box<Real>),
    Neg(Box<Real>),
}

impl Real {
    pub fn zero() -> Real {
        Real::Rational(BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Real {
        Real::Rational(r)
    }

    pub fn from_i64(n: i64) -> Real {
        Real::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// base^expo, folding to a rational when the result is exactly rational.
    pub fn pow(base: BigRational, expo: BigRational) -> Result<Real> {
        if !base.is_positive() {
            return Err(Error::DomainError(format!(
                "rational power needs a positive base, got {}",
                base
            )));
        }
        if expo.is_zero() {
            return Ok(Real::Rational(BigRational::one()));
        }
        if expo.is_integer() {
            let p = expo
                .to_integer()
                .to_i32()
                .ok_or_else(|| Error::BadParameters(format!("exponent too large: {}", expo)))?;
            return Ok(Real::Rational(base.pow(p)));
        }
        // expo = p/q reduced; base^(p/q) is rational iff numerator and
        // denominator of base are both perfect q-th powers
        let q = expo.denom().to_u32();
        if let Some(q) = q {
            if let (Some(n), Some(d)) = (
                exact_root(base.numer(), q),
                exact_root(base.denom(), q),
            ) {
                let root = BigRational::new(n, d);
                let p = expo
                    .numer()
                    .to_i32()
                    .ok_or_else(|| Error::BadParameters(format!("exponent too large: {}", expo)))?;
                return Ok(Real::Rational(root.pow(p)));
            }
        }
        Ok(Real::Pow(base, expo))
    }

    pub fn sqrt(r: BigRational) -> Result<Real> {
        Real::pow(r, BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn add(self, other: Real) -> Real {
        match (self, other) {
            (Real::Rational(a), Real::Rational(b)) => Real::Rational(a + b),
            (a, b) => Real::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(self, other: Real) -> Real {
        match (self, other) {
            (Real::Rational(a), Real::Rational(b)) => Real::Rational(a * b),
            (Real::Rational(a), b) | (b, Real::Rational(a)) if a.is_zero() => {
                let _ = b;
                Real::Rational(BigRational::zero())
            }
            (a, b) => Real::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(self) -> Real {
        match self {
            Real::Rational(a) => Real::Rational(-a),
            Real::Neg(inner) => *inner,
            a => Real::Neg(Box::new(a)),
        }
    }

    pub fn scale(self, r: BigRational) -> Real {
        Real::mul(Real::Rational(r), self)
    }

    /// Exactly rational? (Constructors fold, so a recursive check suffices
    /// for trees built by hand too.)
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Real::Rational(r) => Some(r.clone()),
            Real::Pi | Real::E | Real::Phi | Real::Pow(..) => None,
            Real::Add(a, b) => Some(a.as_rational()? + b.as_rational()?),
            Real::Mul(a, b) => {
                // zero absorbs even an irrational factor
                match (a.as_rational(), b.as_rational()) {
                    (Some(x), Some(y)) => Some(x * y),
                    (Some(x), _) if x.is_zero() => Some(BigRational::zero()),
                    (_, Some(y)) if y.is_zero() => Some(BigRational::zero()),
                    _ => None,
                }
            }
            Real::Neg(a) => Some(-a.as_rational()?),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_rational().map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Certified enclosure at `bits` fractional bits of accuracy budget.
    pub fn eval(&self, bits: u32) -> Result<Interval> {
        check_precision(bits)?;
        let b = bits + 8;
        Ok(match self {
            Real::Rational(r) => Interval::from_rational(r, b),
            Real::Pi => pi(b),
            Real::E => e_const(b),
            Real::Phi => phi(b),
            Real::Pow(base, expo) => {
                Interval::from_rational(base, b + 16).pow_ratio(expo, b)?
            }
            Real::Add(a, b2) => a.eval(bits + 4)?.add(&b2.eval(bits + 4)?, b),
            Real::Mul(a, b2) => a.eval(bits + 4)?.mul(&b2.eval(bits + 4)?, b),
            Real::Neg(a) => a.eval(bits)?.neg(),
        })
    }

    /// Evaluate with escalation until the enclosure is narrower than
    /// `2^width_exp` (or the cap is hit).
    pub fn eval_to_width(&self, width_exp: i64, cap_bits: u32) -> Result<Interval> {
        let mut bits = std::cmp::max(64, (-width_exp + 32) as u32);
        loop {
            check_precision(bits)?;
            let iv = self.eval(bits)?;
            if iv.width_at_most(width_exp) {
                return Ok(iv);
            }
            if bits >= cap_bits {
                return Err(Error::PrecisionExhausted(format!(
                    "evaluating {} to width 2^{}",
                    self, width_exp
                )));
            }
            bits = (bits * 2).min(cap_bits.max(bits + 1));
        }
    }

    /// Parse an expression: products of factors, where a factor is a number
    /// (integer, fraction `p/q`, or decimal with optional exponent) or one of
    /// `pi`, `e`, `phi`, `sqrt2`, `sqrt(<number>)`.
    pub fn parse(text: &str) -> Result<Real> {
        let s = text.trim();
        if s.is_empty() {
            return Err(Error::MalformedNumber("empty expression".into()));
        }
        let (s, negate) = match s.strip_prefix('-') {
            Some(rest) => (rest.trim(), true),
            None => (s, false),
        };
        let mut value: Option<Real> = None;
        for factor in s.split('*') {
            let f = parse_factor(factor.trim())?;
            value = Some(match value {
                None => f,
                Some(v) => v.mul(f),
            });
        }
        let v = value.ok_or_else(|| Error::MalformedNumber(text.into()))?;
        Ok(if negate { v.neg() } else { v })
    }
}

fn parse_factor(s: &str) -> Result<Real> {
    match s {
        "pi" => return Ok(Real::Pi),
        "e" => return Ok(Real::E),
        "phi" => return Ok(Real::Phi),
        "sqrt2" => return Real::sqrt(BigRational::from_integer(BigInt::from(2))),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let r = parse_rational(inner)?;
        return Real::sqrt(r);
    }
    Ok(Real::Rational(parse_rational(s)?))
}

/// Exact rational from `p/q`, integer, or decimal/scientific text.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::MalformedNumber(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    // decimal with optional exponent
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let ex: i64 = e.parse().map_err(|_| bad())?;
            (m, ex)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u32))
    } else {
        BigRational::new(n, ten.pow((-shift) as u32))
    })
}

/// q-th root of a nonnegative integer if it is exact.
fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.magnitude().nth_root(q);
    let mut back = num_bigint::BigUint::one();
    for _ in 0..q {
        back *= &r;
    }
    if &back == n.magnitude() {
        Some(BigInt::from(r))
    } else {
        None
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(r) => write!(f, "{}", r),
            Real::Pi => write!(f, "pi"),
            Real::E => write!(f, "e"),
            Real::Phi => write!(f, "phi"),
            Real::Pow(b, e) => write!(f, "({})^({})", b, e),
            Real::Add(a, b) => write!(f, "({} + {})", a, b),
            Real::Mul(a, b) => write!(f, "({} * {})", a, b),
            Real::Neg(a) => write!(f, "-({})", a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn perfect_powers_fold_to_rationals() {
        // 4^(5/2) = 32
        let r = Real::pow(rat(4, 1), rat(5, 2)).unwrap();
        assert_eq!(r.as_rational(), Some(rat(32, 1)));
        // 9^(3/2) = 27
        let r = Real::pow(rat(9, 1), rat(3, 2)).unwrap();
        assert_eq!(r.as_rational(), Some(rat(27, 1)));
        // 2^(3/2) stays irrational
        let r = Real::pow(rat(2, 1), rat(3, 2)).unwrap();
        assert!(r.as_rational().is_none());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(
            Real::parse("3/2").unwrap().as_rational(),
            Some(rat(3, 2))
        );
        assert_eq!(
            Real::parse("0.125").unwrap().as_rational(),
            Some(rat(1, 8))
        );
        assert_eq!(
            Real::parse("1e-3").unwrap().as_rational(),
            Some(rat(1, 1000))
        );
        assert_eq!(
            Real::parse("2.5e2").unwrap().as_rational(),
            Some(rat(250, 1))
        );
        assert!(Real::parse("sqrt2").unwrap().as_rational().is_none());
        assert_eq!(
            Real::parse("sqrt(9/4)").unwrap().as_rational(),
            Some(rat(3, 2))
        );
        assert!(Real::parse("twelve").is_err());
        // product form
        let v = Real::parse("3*pi").unwrap();
        let iv = v.eval(96).unwrap();
        assert!((iv.to_f64_mid() - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn eval_matches_f64_for_constants() {
        for (r, want) in [
            (Real::Pi, std::f64::consts::PI),
            (Real::E, std::f64::consts::E),
            (Real::Phi, (1.0 + 5.0f64.sqrt()) / 2.0),
        ] {
            let iv = r.eval(128).unwrap();
            assert!((iv.to_f64_mid() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_to_width_escalates() {
        let x = Real::sqrt(rat(2, 1)).unwrap();
        let iv = x.eval_to_width(-300, 4096).unwrap();
        assert!(iv.width_at_most(-300));
    }

    #[test]
    fn zero_product_absorbs() {
        let v = Real::Rational(BigRational::zero()).mul(Real::Pi);
        assert!(v.is_zero());
    }
}
