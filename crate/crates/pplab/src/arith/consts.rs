//! Certified enclosures of the classical constants and logarithms.
//!
//! Machin's formula for pi, atanh series for logarithms, factorial series for
//! e. Partial sums are tracked with directed rounding and an explicit tail
//! bound, so the returned intervals always contain the true value.

use super::dyadic::Dyadic;
use super::interval::Interval;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

static CACHE: Lazy<Mutex<HashMap<&'static str, (u32, Interval)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cached(key: &'static str, bits: u32, compute: impl Fn(u32) -> Interval) -> Interval {
    let mut cache = CACHE.lock().unwrap();
    if let Some((have, iv)) = cache.get(key) {
        if *have >= bits {
            return iv.round_outward(bits);
        }
    }
    let iv = compute(bits);
    cache.insert(key, (bits, iv.clone()));
    iv.round_outward(bits)
}

/// Alternating Gregory series for atan(1/x), x >= 2 an integer.
/// Returns a certified enclosure at `bits` fractional bits.
fn atan_inv(x: u64, bits: u32) -> Interval {
    let scale = bits as i64 + 16;
    let one_scaled = BigInt::one() << scale as u64;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut xpow = BigInt::from(x); // x^(2k+1)
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let den = &xpow * BigInt::from(2 * k + 1);
        let t_lo = (&one_scaled) / (&den); // floor
        let t_hi = (&one_scaled + &den - BigInt::one()) / (&den); // ceil
        if k % 2 == 0 {
            sum_lo += &t_lo;
            sum_hi += &t_hi;
        } else {
            sum_lo -= &t_hi;
            sum_hi -= &t_lo;
        }
        if t_hi <= BigInt::one() {
            // tail after a stopped alternating series is at most one term
            sum_lo -= BigInt::from(2);
            sum_hi += BigInt::from(2);
            break;
        }
        xpow *= &x2;
        k += 1;
    }
    Interval {
        lo: Dyadic::new(sum_lo, -scale),
        hi: Dyadic::new(sum_hi, -scale),
    }
    .round_outward(bits)
}

/// pi via Machin: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi(bits: u32) -> Interval {
    cached("pi", bits, |b| {
        let a5 = atan_inv(5, b + 8).mul_bigint_exact(&BigInt::from(16));
        let a239 = atan_inv(239, b + 8).mul_bigint_exact(&BigInt::from(4));
        a5.sub(&a239, b)
    })
}

/// ln 2 = 2 atanh(1/3) = 2 * sum_{k>=0} 3^-(2k+1) / (2k+1).
pub fn ln2(bits: u32) -> Interval {
    cached("ln2", bits, |b| {
        let scale = b as i64 + 16;
        let one_scaled = BigInt::one() << scale as u64;
        let mut pow3 = BigInt::from(3);
        let mut sum_lo = BigInt::zero();
        let mut sum_hi = BigInt::zero();
        let mut k: u64 = 0;
        loop {
            let den = &pow3 * BigInt::from(2 * k + 1);
            let t_lo = (&one_scaled) / (&den);
            let t_hi = (&one_scaled + &den - BigInt::one()) / (&den);
            sum_lo += &t_lo;
            sum_hi += &t_hi;
            if t_hi <= BigInt::one() {
                // positive tail bounded by sum of a 1/9-ratio geometric series
                sum_hi += BigInt::from(2);
                break;
            }
            pow3 *= BigInt::from(9);
            k += 1;
        }
        Interval {
            lo: Dyadic::new(sum_lo << 1u8, -scale),
            hi: Dyadic::new(sum_hi << 1u8, -scale),
        }
        .round_outward(b)
    })
}

/// Euler's number via the factorial series.
pub fn e_const(bits: u32) -> Interval {
    cached("e", bits, |b| {
        let scale = b as i64 + 16;
        let one_scaled = BigInt::one() << scale as u64;
        let mut fact = BigInt::one();
        let mut sum_lo = BigInt::zero();
        let mut sum_hi = BigInt::zero();
        let mut k: u64 = 0;
        loop {
            let t_lo = (&one_scaled) / (&fact);
            let t_hi = (&one_scaled + &fact - BigInt::one()) / (&fact);
            sum_lo += &t_lo;
            sum_hi += &t_hi;
            if t_hi <= BigInt::one() {
                // tail < 2 / (k+1)!
                sum_hi += BigInt::from(2);
                break;
            }
            k += 1;
            fact *= BigInt::from(k);
        }
        Interval {
            lo: Dyadic::new(sum_lo, -scale),
            hi: Dyadic::new(sum_hi, -scale),
        }
        .round_outward(b)
    })
}

/// Golden ratio (1 + sqrt 5) / 2.
pub fn phi(bits: u32) -> Interval {
    let sqrt5 = Interval::from_i64(5).nth_root(2, bits + 8);
    let one = Interval::from_i64(1);
    let s = one.add_exact(&sqrt5);
    Interval {
        lo: Dyadic::new(s.lo.mantissa, s.lo.exp - 1),
        hi: Dyadic::new(s.hi.mantissa, s.hi.exp - 1),
    }
    .round_outward(bits)
}

/// Natural log of a positive dyadic value.
///
/// Normalises to u in [1,2), runs atanh((u-1)/(u+1)) with a geometric tail
/// bound, and recombines with the cached ln 2.
pub fn ln_dyadic(x: &Dyadic, bits: u32) -> Interval {
    use super::dyadic::{big_div_ceil, mantissa_at};
    assert!(x.is_positive(), "ln needs a positive argument");
    let b = bits + 16;
    let s = x.magnitude_bits() - 1; // x = u * 2^s, u in [1, 2)
    let u = Dyadic::new(x.mantissa.clone(), x.exp - s);
    let u_iv = Interval::exact(u);
    let num = u_iv.sub(&Interval::from_i64(1), b + 8);
    let den = u_iv.add(&Interval::from_i64(1), b + 8);
    let z = num.div(&den, b + 8).expect("u+1 > 0");
    // atanh(z) = sum z^(2k+1)/(2k+1) over 0 <= z < 1/3, on a fixed grid
    let sb = b as i64 + 8;
    let grid = BigInt::one() << sb as u64;
    let zl = mantissa_at(&z.lo, -sb, false).max(BigInt::zero());
    let zu = mantissa_at(&z.hi, -sb, true);
    let z2l = (&zl * &zl) >> sb as u64;
    let z2u = big_div_ceil(&(&zu * &zu), &grid);
    let mut pl = zl;
    let mut pu = zu;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        sum_lo += pl.div_floor(&d);
        let t_hi = big_div_ceil(&pu, &d);
        sum_hi += &t_hi;
        if t_hi <= BigInt::one() {
            // ratio <= z^2 < 1/9, so the dropped tail is under 2 ulp
            sum_hi += 2;
            break;
        }
        pl = (&pl * &z2l) >> sb as u64;
        pu = big_div_ceil(&(&pu * &z2u), &grid);
        k += 1;
    }
    let atanh = Interval {
        lo: Dyadic::new(sum_lo, -sb),
        hi: Dyadic::new(sum_hi, -sb),
    }
    .mul_bigint_exact(&BigInt::from(2));
    let shifted = ln2(b).mul_bigint_exact(&BigInt::from(s));
    atanh.add(&shifted, bits)
}

/// ln over an interval (monotone, so endpoints suffice).
pub fn ln_interval(x: &Interval, bits: u32) -> Interval {
    let lo = ln_dyadic(&x.lo, bits + 4);
    let hi = ln_dyadic(&x.hi, bits + 4);
    Interval { lo: lo.lo, hi: hi.hi }.round_outward(bits)
}

/// exp at a dyadic point: reduce by a multiple of ln 2, Taylor on the
/// remainder, shift the binary exponent back (exactly).
fn exp_point(d: &Dyadic, bits: u32) -> Interval {
    use super::dyadic::{big_div_ceil, mantissa_at};
    let b = bits + 16;
    // k ~ d / ln2; any nearby integer works, the remainder interval is exact
    let k = {
        let approx = d.to_f64() / std::f64::consts::LN_2;
        approx.round() as i64
    };
    let ln2_iv = ln2(b + 8);
    let r = Interval::exact(d.clone()).add(&ln2_iv.mul_bigint_exact(&BigInt::from(-k)), b + 8);
    // Taylor sum of exp on |r| <= 0.7: terms via interval recurrence
    let sb = b as i64 + 8;
    let grid = BigInt::one() << sb as u64;
    let rl = mantissa_at(&r.lo, -sb, false);
    let ru = mantissa_at(&r.hi, -sb, true);
    // signed term mantissas
    let (mut tl, mut tu) = (grid.clone(), grid.clone());
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut n: u64 = 0;
    loop {
        sum_lo += &tl;
        sum_hi += &tu;
        use num_traits::Signed;
        if n > 0 && tl.abs() <= BigInt::one() && tu.abs() <= BigInt::one() {
            // remaining tail is geometric with ratio < 1/2
            sum_lo -= 4;
            sum_hi += 4;
            break;
        }
        n += 1;
        let dn = BigInt::from(n);
        // next term: t * r / n with directed rounding, sign-aware
        let cands = [&tl * &rl, &tl * &ru, &tu * &rl, &tu * &ru];
        let lo_prod = cands.iter().min().unwrap().clone();
        let hi_prod = cands.iter().max().unwrap().clone();
        tl = (lo_prod >> sb as u64).div_floor(&dn);
        tu = big_div_ceil(&big_div_ceil(&hi_prod, &grid), &dn);
    }
    let raw = Interval {
        lo: Dyadic::new(sum_lo, -sb),
        hi: Dyadic::new(sum_hi, -sb),
    };
    // scale by 2^k exactly
    let shifted = Interval {
        lo: Dyadic::new(raw.lo.mantissa, raw.lo.exp + k),
        hi: Dyadic::new(raw.hi.mantissa, raw.hi.exp + k),
    };
    shifted.round_outward(bits)
}

/// exp over an interval (monotone).
pub fn exp_interval(x: &Interval, bits: u32) -> Interval {
    let lo = exp_point(&x.lo, bits + 4);
    let hi = exp_point(&x.hi, bits + 4);
    Interval { lo: lo.lo, hi: hi.hi }.round_outward(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use std::str::FromStr;

    fn close_to(iv: &Interval, decimal: &str, tol: f64) {
        let r = BigRational::from_str(decimal).unwrap();
        let mid = iv.to_f64_mid();
        let want = r.numer().to_string().parse::<f64>().unwrap()
            / r.denom().to_string().parse::<f64>().unwrap();
        assert!(
            (mid - want).abs() <= tol,
            "mid {} vs want {} (tol {})",
            mid,
            want,
            tol
        );
    }

    #[test]
    fn pi_at_256_bits() {
        let p = pi(256);
        assert!(p.width_at_most(-250));
        // 3.14159265358979323846264338327950288...
        close_to(&p, "314159265358979323846/100000000000000000000", 1e-15);
    }

    #[test]
    fn ln2_at_192_bits() {
        let l = ln2(192);
        assert!(l.width_at_most(-186));
        close_to(&l, "693147180559945309417/1000000000000000000000", 1e-15);
    }

    #[test]
    fn e_at_192_bits() {
        let e = e_const(192);
        assert!(e.width_at_most(-186));
        close_to(&e, "271828182845904523536/100000000000000000000", 1e-15);
    }

    #[test]
    fn phi_at_128_bits() {
        let g = phi(128);
        assert!(g.width_at_most(-120));
        close_to(&g, "161803398874989484820/100000000000000000000", 1e-15);
    }

    #[test]
    fn ln_of_integers_matches_f64() {
        for n in [2u64, 3, 5, 7, 10, 97, 1000] {
            let l = ln_dyadic(&Dyadic::from_i64(n as i64), 128);
            assert!(l.width_at_most(-120), "width too wide for ln {}", n);
            assert!((l.to_f64_mid() - (n as f64).ln()).abs() < 1e-14, "ln {}", n);
        }
    }

    #[test]
    fn ln_chebyshev_consistency() {
        // ln(8) = 3 ln 2
        let l8 = ln_dyadic(&Dyadic::from_i64(8), 160);
        let l2 = ln2(160).mul_bigint_exact(&num_bigint::BigInt::from(3));
        assert!((l8.to_f64_mid() - l2.to_f64_mid()).abs() < 1e-30);
    }
}
