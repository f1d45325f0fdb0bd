//! Directed-rounding interval arithmetic over dyadic fixed-point numbers.
//!
//! Every operation takes the target fractional precision in bits and rounds
//! the lower endpoint down and the upper endpoint up, so the true result is
//! always contained. Exactness is preserved whenever the inputs are already
//! representable at the target scale (rationals with power-of-two
//! denominators, integers, zero), which the floor-certification and the
//! `y = 0` fast paths rely on.

use super::dyadic::Dyadic;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Hard platform cap on working precision; requests beyond it error out.
pub const MAX_PRECISION_BITS: u32 = 1 << 24;

#[derive(Debug, Clone)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

fn target_exp(bits: u32) -> i64 {
    -(bits as i64)
}

/// floor((sign) * num * 2^shift / den) for positive den, any-sign num/shift.
fn div_floor_scaled(num: &BigInt, den: &BigInt, shift: i64) -> BigInt {
    debug_assert!(den.is_positive());
    if shift >= 0 {
        (num << shift as u64).div_floor(den)
    } else {
        num.div_floor(&(den << (-shift) as u64))
    }
}

fn div_ceil_scaled(num: &BigInt, den: &BigInt, shift: i64) -> BigInt {
    -div_floor_scaled(&-num, den, shift)
}

impl Interval {
    pub fn exact(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        Interval::exact(Dyadic::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Interval::exact(Dyadic::from_bigint(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Interval::exact(Dyadic::from_i64(n))
    }

    /// Tightest enclosure of a rational at `bits` fractional bits. Exact when
    /// the denominator is a power of two that fits the scale.
    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let e = target_exp(bits);
        let lo = div_floor_scaled(r.numer(), r.denom(), -e);
        let hi = div_ceil_scaled(r.numer(), r.denom(), -e);
        Interval { lo: Dyadic::new(lo, e), hi: Dyadic::new(hi, e) }
    }

    /// Exact embedding of an f64 (which is itself dyadic).
    pub fn from_f64_exact(x: f64) -> Self {
        let r = BigRational::from_float(x).expect("finite float");
        // denominators of floats are powers of two, so 1100 bits is exact
        Interval::from_rational(&r, 1100)
    }

    pub fn is_point(&self) -> bool {
        self.lo.cmp_value(&self.hi) == Ordering::Equal
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        let s = self.lo.add(&self.hi);
        Dyadic::new(s.mantissa, s.exp - 1)
    }

    fn outward(lo: Dyadic, hi: Dyadic, bits: u32) -> Interval {
        let e = target_exp(bits);
        Interval { lo: lo.round_floor(e), hi: hi.round_ceil(e) }
    }

    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval::outward(self.lo.clone(), self.hi.clone(), bits)
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, other: &Interval, bits: u32) -> Interval {
        Interval::outward(self.lo.add(&other.lo), self.hi.add(&other.hi), bits)
    }

    /// Exact addition (no rounding); mantissas may grow.
    pub fn add_exact(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.add(&other.lo), hi: self.hi.add(&other.hi) }
    }

    pub fn sub(&self, other: &Interval, bits: u32) -> Interval {
        self.add(&other.neg(), bits)
    }

    /// Exact shift by an integer.
    pub fn sub_bigint(&self, n: &BigInt) -> Interval {
        let d = Dyadic::from_bigint(-n);
        Interval { lo: self.lo.add(&d), hi: self.hi.add(&d) }
    }

    pub fn mul(&self, other: &Interval, bits: u32) -> Interval {
        // fast path: both nonnegative, the overwhelmingly common case here
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Interval::outward(self.lo.mul(&other.lo), self.hi.mul(&other.hi), bits);
        }
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp_value(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_value(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        Interval::outward(lo, hi, bits)
    }

    /// Exact scaling by an integer (sign-aware, no rounding).
    pub fn mul_bigint_exact(&self, n: &BigInt) -> Interval {
        let d = Dyadic::from_bigint(n.clone());
        if n.is_negative() {
            Interval { lo: self.hi.mul(&d), hi: self.lo.mul(&d) }
        } else {
            Interval { lo: self.lo.mul(&d), hi: self.hi.mul(&d) }
        }
    }

    /// Reciprocal of a sign-definite interval.
    pub fn recip(&self, bits: u32) -> Result<Interval> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return Err(Error::DomainError("reciprocal of interval containing zero".into()));
        }
        let e = target_exp(bits);
        let rec = |d: &Dyadic, up: bool| -> Dyadic {
            // 1/(m*2^de) at scale 2^e: mantissa = 2^(-e-de)/m directed
            let m = &d.mantissa;
            let shift = -e - d.exp;
            let one = BigInt::one();
            let v = if m.is_positive() {
                if up {
                    div_ceil_scaled(&one, m, shift)
                } else {
                    div_floor_scaled(&one, m, shift)
                }
            } else {
                let mm = -m;
                if up {
                    -div_floor_scaled(&one, &mm, shift)
                } else {
                    -div_ceil_scaled(&one, &mm, shift)
                }
            };
            Dyadic::new(v, e)
        };
        Ok(Interval { lo: rec(&self.hi, false), hi: rec(&self.lo, true) })
    }

    pub fn div(&self, other: &Interval, bits: u32) -> Result<Interval> {
        Ok(self.mul(&other.recip(bits + 8)?, bits))
    }

    /// Integer power of a nonnegative interval, directed per endpoint.
    pub fn pow_int(&self, n: u64, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "pow_int needs a nonnegative interval");
        if n == 0 {
            return Interval::from_i64(1);
        }
        let e = target_exp(bits + 8);
        let mut acc_lo = Dyadic::from_i64(1);
        let mut acc_hi = Dyadic::from_i64(1);
        let mut base_lo = self.lo.clone();
        let mut base_hi = self.hi.clone();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc_lo = acc_lo.mul(&base_lo).round_floor(e);
                acc_hi = acc_hi.mul(&base_hi).round_ceil(e);
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base_lo = base_lo.mul(&base_lo).round_floor(e);
            base_hi = base_hi.mul(&base_hi).round_ceil(e);
        }
        Interval::outward(acc_lo, acc_hi, bits)
    }

    /// q-th root of a nonnegative interval via exact integer nth_root.
    pub fn nth_root(&self, q: u32, bits: u32) -> Interval {
        assert!(q >= 1);
        assert!(!self.lo.is_negative(), "nth_root needs a nonnegative interval");
        let e = target_exp(bits);
        let root_dir = |d: &Dyadic, up: bool| -> Dyadic {
            if d.is_negative() {
                // can only happen through outward rounding slack; clamp
                return Dyadic::zero();
            }
            // (m * 2^(de + q*bits))^(1/q) at integer resolution
            let shift = d.exp + (q as i64) * (bits as i64);
            let scaled = if shift >= 0 {
                &d.mantissa << shift as u64
            } else if up {
                div_ceil_scaled(&d.mantissa, &BigInt::one(), shift)
            } else {
                div_floor_scaled(&d.mantissa, &BigInt::one(), shift)
            };
            let mag = scaled.magnitude().nth_root(q);
            let m = if up { BigInt::from(mag) + 1 } else { BigInt::from(mag) };
            Dyadic::new(m, e)
        };
        let lo = root_dir(&self.lo, false);
        let mut hi = root_dir(&self.hi, true);
        // exactness: if hi is a point equal to lo's root^q, tighten
        if self.is_point() {
            let cand = root_dir(&self.lo, false);
            let mut check = BigInt::one();
            for _ in 0..q {
                check *= &cand.mantissa;
            }
            let exact = {
                let shift = self.lo.exp + (q as i64) * (bits as i64);
                let scaled = if shift >= 0 {
                    Some(&self.lo.mantissa << shift as u64)
                } else {
                    None
                };
                scaled.map(|s| s == check).unwrap_or(false)
            };
            if exact {
                hi = cand.clone();
            }
        }
        Interval { lo, hi }
    }

    /// `self^(p/q)` for a nonnegative interval and rational exponent.
    pub fn pow_ratio(&self, expo: &BigRational, bits: u32) -> Result<Interval> {
        let p = expo
            .numer()
            .to_i64()
            .ok_or_else(|| Error::BadParameters(format!("exponent numerator too large: {}", expo)))?;
        let q = expo
            .denom()
            .to_u32()
            .ok_or_else(|| Error::BadParameters(format!("exponent denominator too large: {}", expo)))?;
        if p == 0 {
            return Ok(Interval::from_i64(1));
        }
        if q > 64 || p.unsigned_abs() > 4096 {
            return self.pow_via_exp(expo, bits);
        }
        let powed = self.pow_int(p.unsigned_abs(), bits + 16);
        let rooted = if q == 1 { powed.round_outward(bits + 8) } else { powed.nth_root(q, bits + 8) };
        let out = if p < 0 { rooted.recip(bits)? } else { rooted };
        Ok(out.round_outward(bits))
    }

    // ---- relative-precision (significant-bits) variants ----
    //
    // These keep `prec` significant bits instead of a fixed absolute scale,
    // which is what polynomial evaluation needs: values range over hundreds
    // of orders of magnitude and the error contract is relative. Rounding
    // grids are anchored to the upper endpoint's magnitude so that doubling
    // `prec` always refines the grid - the nesting-under-refinement property.

    fn sig_grid(&self, prec: u32) -> i64 {
        let m = self.lo.magnitude_bits().max(self.hi.magnitude_bits());
        if m == i64::MIN {
            // interval is exactly zero
            0
        } else {
            m - prec as i64
        }
    }

    pub fn round_sig(&self, prec: u32) -> Interval {
        let g = self.sig_grid(prec);
        Interval { lo: self.lo.round_floor(g), hi: self.hi.round_ceil(g) }
    }

    pub fn mul_sig(&self, other: &Interval, prec: u32) -> Interval {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Interval { lo: self.lo.mul(&other.lo), hi: self.hi.mul(&other.hi) }
                .round_sig(prec);
        }
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp_value(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_value(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        Interval { lo, hi }.round_sig(prec)
    }

    /// Integer power of a nonnegative interval at `prec` significant bits.
    pub fn pow_int_sig(&self, n: u64, prec: u32) -> Interval {
        assert!(!self.lo.is_negative(), "pow_int_sig needs a nonnegative interval");
        if n == 0 {
            return Interval::from_i64(1);
        }
        let p = prec + 4;
        let mut acc: Option<Interval> = None;
        let mut base = self.round_sig(p);
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul_sig(&base, p),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul_sig(&base, p);
        }
        acc.unwrap()
    }

    /// q-th root of a nonnegative interval at `prec` significant bits.
    pub fn nth_root_sig(&self, q: u32, prec: u32) -> Interval {
        assert!(q >= 1);
        assert!(!self.lo.is_negative(), "nth_root_sig needs a nonnegative interval");
        if self.hi.is_zero() {
            return Interval::zero();
        }
        if q == 1 {
            return self.round_sig(prec);
        }
        // output magnitude ~ hi_mag / q; anchor the grid there
        let g = self.hi.magnitude_bits().div_euclid(q as i64) - prec as i64 - 2;
        let root_dir = |d: &Dyadic, up: bool| -> Dyadic {
            if !d.is_positive() {
                return Dyadic::new(BigInt::zero(), g);
            }
            let shift = d.exp - (q as i64) * g;
            let scaled = if shift >= 0 {
                &d.mantissa << shift as u64
            } else if up {
                div_ceil_scaled(&d.mantissa, &BigInt::one(), shift)
            } else {
                div_floor_scaled(&d.mantissa, &BigInt::one(), shift)
            };
            let mag = scaled.magnitude().nth_root(q);
            let m = if up { BigInt::from(mag) + 1 } else { BigInt::from(mag) };
            Dyadic::new(m, g)
        };
        let lo = root_dir(&self.lo, false);
        let mut hi = root_dir(&self.hi, true);
        // tighten exact roots of point intervals (e.g. perfect powers)
        if self.is_point() && self.lo.is_positive() {
            let cand = root_dir(&self.lo, false);
            let shift = self.lo.exp - (q as i64) * g;
            if shift >= 0 {
                let scaled = &self.lo.mantissa << shift as u64;
                let mut back = BigInt::one();
                for _ in 0..q {
                    back *= &cand.mantissa;
                }
                if back == scaled {
                    hi = cand;
                }
            }
        }
        Interval { lo, hi }
    }

    /// Reciprocal at `prec` significant bits (sign-definite input).
    pub fn recip_sig(&self, prec: u32) -> Result<Interval> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return Err(Error::DomainError("reciprocal of interval containing zero".into()));
        }
        // 1/x magnitude ~ -mag(x); use the smaller-|value| endpoint as anchor
        let m = self.lo.magnitude_bits().min(self.hi.magnitude_bits());
        let g = -m - prec as i64 - 1;
        let rec = |d: &Dyadic, up: bool| -> Dyadic {
            let shift = -g - d.exp;
            let one = BigInt::one();
            let v = if d.mantissa.is_positive() {
                if up {
                    div_ceil_scaled(&one, &d.mantissa, shift)
                } else {
                    div_floor_scaled(&one, &d.mantissa, shift)
                }
            } else {
                let mm = -&d.mantissa;
                if up {
                    -div_floor_scaled(&one, &mm, shift)
                } else {
                    -div_ceil_scaled(&one, &mm, shift)
                }
            };
            Dyadic::new(v, g)
        };
        Ok(Interval { lo: rec(&self.hi, false), hi: rec(&self.lo, true) })
    }

    /// x^expo = exp(expo ln x): the route for exponents whose denominator
    /// makes integer root extraction impractical (roots cost grows with the
    /// degree, exp/ln does not).
    pub fn pow_via_exp(&self, expo: &BigRational, prec: u32) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(Error::DomainError(
                "exp-log power needs a strictly positive base".into(),
            ));
        }
        let b = prec + 16;
        let ln_x = super::consts::ln_interval(self, b);
        let e_iv = Interval::from_rational(expo, b + 8);
        let t = ln_x.mul(&e_iv, b);
        Ok(super::consts::exp_interval(&t, prec))
    }

    /// `self^(p/q)` at `prec` significant bits, for a nonnegative interval.
    pub fn pow_ratio_sig(&self, expo: &BigRational, prec: u32) -> Result<Interval> {
        let p = expo
            .numer()
            .to_i64()
            .ok_or_else(|| Error::BadParameters(format!("exponent numerator too large: {}", expo)))?;
        let q = expo
            .denom()
            .to_u32()
            .ok_or_else(|| Error::BadParameters(format!("exponent denominator too large: {}", expo)))?;
        if p == 0 {
            return Ok(Interval::from_i64(1));
        }
        if q > 64 || p.unsigned_abs() > 4096 {
            return self.pow_via_exp(expo, prec);
        }
        // headroom for the multiplicative error growth through |p| factors
        let guard = 64 - p.unsigned_abs().leading_zeros() + 8;
        let powed = self.pow_int_sig(p.unsigned_abs(), prec + guard);
        let rooted = powed.nth_root_sig(q, prec + 4);
        if p < 0 {
            rooted.recip_sig(prec)
        } else {
            Ok(rooted)
        }
    }

    /// Certified floor when both endpoints agree on it.
    pub fn decided_floor(&self) -> Option<BigInt> {
        let fl = self.lo.floor_int();
        if fl == self.hi.floor_int() {
            Some(fl)
        } else {
            None
        }
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let probe = Interval::from_rational(r, 1200);
        self.lo.cmp_value(&probe.hi) != Ordering::Greater
            && self.hi.cmp_value(&probe.lo) != Ordering::Less
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo.cmp_value(&other.lo) != Ordering::Greater
            && self.hi.cmp_value(&other.hi) != Ordering::Less
    }

    pub fn to_f64_mid(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn lo_rational(&self) -> BigRational {
        dyadic_to_rational(&self.lo)
    }

    pub fn hi_rational(&self) -> BigRational {
        dyadic_to_rational(&self.hi)
    }

    /// True if width <= 2^width_exp.
    pub fn width_at_most(&self, width_exp: i64) -> bool {
        let w = self.width();
        if w.is_zero() {
            return true;
        }
        w.cmp_value(&Dyadic::new(BigInt::one(), width_exp)) != Ordering::Greater
    }
}

pub fn dyadic_to_rational(d: &Dyadic) -> BigRational {
    if d.exp >= 0 {
        BigRational::from_integer(&d.mantissa << u64::try_from(d.exp).unwrap())
    } else {
        BigRational::new(d.mantissa.clone(), BigInt::one() << u64::try_from(-d.exp).unwrap())
    }
}

/// Guard against precision requests that cannot be honoured.
pub fn check_precision(bits: u32) -> Result<()> {
    if bits > MAX_PRECISION_BITS {
        Err(Error::PrecisionUnrepresentable(bits as u64))
    } else {
        Ok(())
    }
}
