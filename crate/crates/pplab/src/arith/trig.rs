//! Certified cos(2 pi t), sin(2 pi t) for dyadic-interval arguments.
//!
//! The phase t is reduced mod 1 (e(.) is periodic), folded into a quadrant,
//! and the remaining |x| <= pi/4 + slack is handled by alternating Taylor
//! series with directed term bounds and a one-term tail.

use super::consts::pi;
use super::dyadic::{big_div_ceil as div_ceil, mantissa_at, Dyadic};
use super::interval::Interval;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Alternating Taylor series for sin (odd) or cos (even) at a point 0 <= x <= 0.9.
/// All arithmetic happens on mantissas at the fixed grid 2^scale.
fn alternating_series(x: &Dyadic, bits: u32, is_sin: bool) -> Interval {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        // exact values keep half-integer phases bitwise clean
        return Interval::from_i64(if is_sin { 0 } else { 1 });
    }
    let gb = bits as i64 + 16;
    let scale = -gb;
    let xl = mantissa_at(x, scale, false);
    let xu = mantissa_at(x, scale, true);
    // x^2 mantissas at the same grid
    let x2l = (&xl * &xl) >> gb as u64;
    let x2u = div_ceil(&(&xu * &xu), &(BigInt::one() << gb as u64));
    let one = BigInt::one() << gb as u64;
    let (mut tl, mut tu) = if is_sin { (xl, xu) } else { (one.clone(), one) };
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        if k % 2 == 0 {
            sum_lo += &tl;
            sum_hi += &tu;
        } else {
            sum_lo -= &tu;
            sum_hi -= &tl;
        }
        if tu <= BigInt::one() {
            // terms decrease, so the dropped tail is at most one ulp each way
            sum_lo -= 2;
            sum_hi += 2;
            break;
        }
        let n = if is_sin { 2 * k + 1 } else { 2 * k };
        let den = BigInt::from((n + 1) * (n + 2));
        tl = ((&tl * &x2l) >> gb as u64).div_floor(&den);
        tu = div_ceil(&div_ceil(&(&tu * &x2u), &(BigInt::one() << gb as u64)), &den);
        k += 1;
    }
    Interval {
        lo: Dyadic::new(sum_lo, scale),
        hi: Dyadic::new(sum_hi, scale),
    }
    .round_outward(bits)
}

fn sin_point(x: &Dyadic, bits: u32) -> Interval {
    if x.is_zero() {
        return Interval::zero();
    }
    if x.is_negative() {
        return sin_point(&x.neg(), bits).neg();
    }
    alternating_series(x, bits, true)
}

fn cos_point(x: &Dyadic, bits: u32) -> Interval {
    alternating_series(&x.abs(), bits, false)
}

fn max_abs(x: &Interval) -> Dyadic {
    let a = x.lo.abs();
    let b = x.hi.abs();
    if a.cmp_value(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// (cos(2 pi t), sin(2 pi t)) for an interval phase t of any magnitude.
///
/// The result's width is about 2 pi * width(t) plus series slack at `bits`,
/// so callers escalate t's precision, not this function's.
pub fn e2pi(t: &Interval, bits: u32) -> (Interval, Interval) {
    // reduce mod 1: exact integer shift, periodicity makes this safe
    let k = t.lo.floor_int();
    let t = t.sub_bigint(&k);
    if t.is_point() && t.lo.is_zero() {
        return (Interval::from_i64(1), Interval::zero());
    }
    // quadrant: t = q/4 + r with |r| <= 1/8 + width
    let mid4 = {
        let m = t.mid();
        Dyadic::new(m.mantissa, m.exp + 2)
    };
    let q_int = mid4.add(&Dyadic::new(BigInt::one(), -1)).floor_int();
    let q = q_int.to_i64().expect("quadrant fits i64").rem_euclid(4);
    let r = t.sub(&Interval::exact(Dyadic::new(q_int, -2)), bits + 16);
    // x = 2 pi r, |x| <= pi/4 + slack
    let two_pi = pi(bits + 16).mul_bigint_exact(&BigInt::from(2));
    let x = two_pi.mul(&r, bits + 16);

    // sin is increasing on [-pi/2, pi/2], which covers the folded range
    let s = {
        let lo = sin_point(&x.lo, bits + 8);
        let hi = sin_point(&x.hi, bits + 8);
        Interval { lo: lo.lo, hi: hi.hi }
    };
    // cos is even and decreasing in |x|
    let c = {
        let (amin, amax) = if x.lo.is_negative() && x.hi.is_positive() {
            (Dyadic::zero(), max_abs(&x))
        } else {
            let a = x.lo.abs();
            let b = x.hi.abs();
            if a.cmp_value(&b) == Ordering::Less {
                (a, b)
            } else {
                (b, a)
            }
        };
        let lo = cos_point(&amax, bits + 8);
        let hi = cos_point(&amin, bits + 8);
        Interval { lo: lo.lo, hi: hi.hi }
    };
    let (c, s) = match q {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    };
    (c.round_outward(bits), s.round_outward(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn at(num: i64, den: i64, bits: u32) -> (Interval, Interval) {
        let t = Interval::from_rational(
            &BigRational::new(BigInt::from(num), BigInt::from(den)),
            bits + 24,
        );
        e2pi(&t, bits)
    }

    #[test]
    fn quarter_turns_are_exact() {
        let (c, s) = at(0, 1, 128);
        assert!(c.is_point() && s.is_point());
        assert_eq!(c.to_f64_mid(), 1.0);
        assert_eq!(s.to_f64_mid(), 0.0);

        let (c, s) = at(1, 2, 128);
        assert_eq!(c.to_f64_mid(), -1.0);
        assert_eq!(s.to_f64_mid(), 0.0);

        let (c, s) = at(1, 4, 128);
        assert_eq!(c.to_f64_mid(), 0.0);
        assert_eq!(s.to_f64_mid(), 1.0);

        let (c, s) = at(3, 4, 128);
        assert_eq!(c.to_f64_mid(), 0.0);
        assert_eq!(s.to_f64_mid(), -1.0);
    }

    #[test]
    fn agrees_with_f64_on_a_grid() {
        for i in 0..200 {
            let t = i as f64 / 200.0 + 0.00317;
            let ti = Interval::from_f64_exact(t);
            let (c, s) = e2pi(&ti, 96);
            assert!(c.width_at_most(-80));
            let want_c = (2.0 * std::f64::consts::PI * t).cos();
            let want_s = (2.0 * std::f64::consts::PI * t).sin();
            assert!((c.to_f64_mid() - want_c).abs() < 1e-13, "cos at {}", t);
            assert!((s.to_f64_mid() - want_s).abs() < 1e-13, "sin at {}", t);
        }
    }

    #[test]
    fn periodicity_is_exact() {
        let t = Interval::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(3)), 160);
        let t_shift = t.sub_bigint(&BigInt::from(-7));
        let (c1, s1) = e2pi(&t, 128);
        let (c2, s2) = e2pi(&t_shift, 128);
        assert_eq!(c1.lo.mantissa, c2.lo.mantissa);
        assert_eq!(s1.hi.mantissa, s2.hi.mantissa);
    }

    #[test]
    fn pythagoras_within_width() {
        let t = Interval::from_f64_exact(0.1234567);
        let (c, s) = e2pi(&t, 160);
        let one = c.mul(&c, 200).add_exact(&s.mul(&s, 200));
        assert!(one.contains_rational(&BigRational::from_integer(BigInt::one())));
    }
}
