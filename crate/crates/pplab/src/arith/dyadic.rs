//! Dyadic fixed-point numbers: `mantissa * 2^exp` with exact integer arithmetic.
//!
//! All certified computation in this crate bottoms out here. Addition and
//! multiplication are exact; precision loss happens only in the explicit
//! `round_floor` / `round_ceil` calls, which is what makes directed rounding
//! auditable.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// A dyadic rational `mantissa * 2^exp`. Not normalised; equality is by value.
#[derive(Debug, Clone)]
pub struct Dyadic {
    pub mantissa: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic { mantissa: n, exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic { mantissa: BigInt::from(n), exp: 0 }
    }

    /// `mantissa * 2^exp` straight from parts.
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        Dyadic { mantissa, exp }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// Shift the representation so that `exp == new_exp`, exactly.
    /// Requires `new_exp <= self.exp` (otherwise information would be lost).
    fn aligned_mantissa(&self, new_exp: i64) -> BigInt {
        debug_assert!(new_exp <= self.exp || self.mantissa.is_zero());
        if self.mantissa.is_zero() {
            return BigInt::zero();
        }
        &self.mantissa << u64::try_from(self.exp - new_exp).expect("alignment shift")
    }

    /// Exact sum.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        Dyadic::new(self.aligned_mantissa(e) + other.aligned_mantissa(e), e)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.mantissa, self.exp)
    }

    /// Exact product.
    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.mantissa * &other.mantissa, self.exp + other.exp)
    }

    /// Largest multiple of `2^target_exp` that is `<= self`. Exact when the
    /// value is already representable at that scale.
    pub fn round_floor(&self, target_exp: i64) -> Dyadic {
        if self.is_zero() || self.exp >= target_exp {
            // Already on a grid at least as coarse-compatible; re-expressing
            // toward a finer grid is exact, so keep as is.
            return self.clone();
        }
        let shift = u64::try_from(target_exp - self.exp).expect("rounding shift");
        // BigInt >> is an arithmetic shift: floor division by 2^shift.
        Dyadic::new(&self.mantissa >> shift, target_exp)
    }

    /// Smallest multiple of `2^target_exp` that is `>= self`.
    pub fn round_ceil(&self, target_exp: i64) -> Dyadic {
        if self.is_zero() || self.exp >= target_exp {
            return self.clone();
        }
        let shift = u64::try_from(target_exp - self.exp).expect("rounding shift");
        Dyadic::new(-((-&self.mantissa) >> shift), target_exp)
    }

    /// `floor(value)` as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            if self.mantissa.is_zero() {
                BigInt::zero()
            } else {
                &self.mantissa << u64::try_from(self.exp).unwrap()
            }
        } else {
            &self.mantissa >> u64::try_from(-self.exp).unwrap()
        }
    }

    /// `ceil(value)` as an integer.
    pub fn ceil_int(&self) -> BigInt {
        -self.neg().floor_int()
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let e = self.exp.min(other.exp);
        self.aligned_mantissa(e).cmp(&other.aligned_mantissa(e))
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.mantissa.abs(), self.exp)
    }

    /// Nearest f64 (round-to-nearest via a 64-bit mantissa window), saturating.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let (m, e) = if bits > 96 {
            let drop = bits - 64;
            (&self.mantissa >> drop, self.exp + drop as i64)
        } else {
            (self.mantissa.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(if m.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
        ldexp(mf, e)
    }

    /// Position of the most significant bit relative to 2^0, i.e.
    /// `floor(log2 |value|) + 1` for nonzero values.
    pub fn magnitude_bits(&self) -> i64 {
        if self.mantissa.is_zero() {
            i64::MIN
        } else {
            self.mantissa.bits() as i64 + self.exp
        }
    }
}

/// Mantissa of `d` on the exact grid `2^scale`, rounded down or up.
pub fn mantissa_at(d: &Dyadic, scale: i64, up: bool) -> BigInt {
    if d.exp >= scale {
        if d.mantissa.is_zero() {
            BigInt::zero()
        } else {
            &d.mantissa << u64::try_from(d.exp - scale).unwrap()
        }
    } else {
        let sh = u64::try_from(scale - d.exp).unwrap();
        if up {
            -((-&d.mantissa) >> sh)
        } else {
            &d.mantissa >> sh
        }
    }
}

/// Ceiling division for signed big integers.
pub fn big_div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    -((-a).div_floor(b))
}

/// `x * 2^e` without overflowing intermediate powers.
pub fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= f64::powi(2.0, 1000);
        e -= 1000;
        if !v.is_finite() {
            return v;
        }
    }
    while e < -1000 {
        v *= f64::powi(2.0, -1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * f64::powi(2.0, e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn add_aligns_exponents() {
        // 3*2^-1 + 5*2^-3 = 17*2^-3
        let s = dy(3, -1).add(&dy(5, -3));
        assert_eq!(s.cmp_value(&dy(17, -3)), Ordering::Equal);
    }

    #[test]
    fn directed_rounding_brackets() {
        // 7*2^-3 = 0.875: floor at 2^-1 grid = 0.5, ceil = 1.0
        let v = dy(7, -3);
        assert_eq!(v.round_floor(-1).cmp_value(&dy(1, -1)), Ordering::Equal);
        assert_eq!(v.round_ceil(-1).cmp_value(&dy(2, -1)), Ordering::Equal);
        // negative value: floor moves away from zero
        let w = dy(-7, -3);
        assert_eq!(w.round_floor(-1).cmp_value(&dy(-2, -1)), Ordering::Equal);
        assert_eq!(w.round_ceil(-1).cmp_value(&dy(-1, -1)), Ordering::Equal);
    }

    #[test]
    fn floor_int_negative() {
        assert_eq!(dy(-5, -1).floor_int(), BigInt::from(-3)); // -2.5 -> -3
        assert_eq!(dy(-5, -1).ceil_int(), BigInt::from(-2));
        assert_eq!(dy(5, -1).floor_int(), BigInt::from(2));
    }

    #[test]
    fn to_f64_handles_huge_mantissas() {
        let big = Dyadic::new(BigInt::from(1) << 400u32, -400);
        assert_eq!(big.to_f64(), 1.0);
        assert!((dy(3, -1).to_f64() - 1.5).abs() == 0.0);
    }
}
