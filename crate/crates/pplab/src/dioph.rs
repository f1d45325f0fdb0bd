//! Continued fractions with certified partial quotients, Dirichlet
//! approximation, and sampled verification of the four Diophantine claims
//! behind the Type I/II estimates.
//!
//! For irrational inputs the partial quotients are obtained by expanding both
//! interval endpoints simultaneously and keeping the common prefix, which is
//! provably the expansion of every number in the interval; precision
//! escalates whenever the prefix runs out before the requested denominator
//! bound is reached.

use crate::arith::Real;
use crate::error::{Error, Result};
use crate::exponents::{
    classify_frequency, select_j, ExponentBundle, FrequencyBand, SumFamily,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Escalation ceiling for certified continued fractions.
const CF_PRECISION_CAP: u32 = 1 << 20;

/// A coprime pair (a, q) with a certified upper bound on |q alpha - a|.
#[derive(Debug, Clone)]
pub struct RationalApprox {
    pub a: BigInt,
    pub q: BigInt,
    /// exact upper bound on |q alpha - a|
    pub err: BigRational,
}

impl RationalApprox {
    pub fn err_f64(&self) -> f64 {
        crate::pseudopoly::rational_to_f64(&self.err)
    }
}

fn convergents_from_quotients(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (quotients[0].clone(), BigInt::one());
    out.push((p.clone(), q.clone()));
    for a in &quotients[1..] {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Euclid expansion of an exact rational, stopping once the denominator
/// bound is passed. Returns (quotients, terminated).
fn rational_quotients(x: &BigRational, max_q: &BigInt) -> (Vec<BigInt>, bool) {
    let mut quotients = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let a = num.div_floor(&den);
        let q_next = if quotients.is_empty() { BigInt::one() } else { &a * &q + &q_prev };
        if quotients.len() > 1 && &q_next > max_q {
            return (quotients, false);
        }
        if !quotients.is_empty() {
            q_prev = std::mem::replace(&mut q, q_next);
        }
        let rem = &num - &a * &den;
        quotients.push(a);
        if rem.is_zero() {
            return (quotients, true);
        }
        num = std::mem::replace(&mut den, rem);
    }
}

/// Common-prefix expansion of an interval [lo, hi], never emitting a
/// quotient that the true value might not share.
fn interval_quotients(lo: &BigRational, hi: &BigRational, max_q: &BigInt) -> Vec<BigInt> {
    let mut quotients: Vec<BigInt> = Vec::new();
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let a_lo = lo.floor().to_integer();
        let a_hi = hi.floor().to_integer();
        if a_lo != a_hi {
            return quotients;
        }
        let q_next = if quotients.is_empty() { BigInt::one() } else { &a_lo * &q + &q_prev };
        if quotients.len() > 1 && &q_next > max_q {
            return quotients;
        }
        if !quotients.is_empty() {
            q_prev = std::mem::replace(&mut q, q_next);
        }
        let fl = &lo - BigRational::from_integer(a_lo.clone());
        let fh = &hi - BigRational::from_integer(a_lo.clone());
        quotients.push(a_lo);
        if fl.is_zero() || fh.is_zero() {
            // an endpoint terminated; further quotients are uncertifiable
            return quotients;
        }
        // reciprocal swaps the endpoints
        let new_lo = fh.recip();
        let new_hi = fl.recip();
        lo = new_lo;
        hi = new_hi;
    }
}

/// All convergents p/q with q <= max_q, each with a certified error bound.
///
/// Rational inputs expand exactly (and terminate); irrational inputs use
/// interval endpoints with escalation.
pub fn continued_fraction(x: &Real, max_q: &BigInt) -> Result<Vec<RationalApprox>> {
    if max_q < &BigInt::one() {
        return Err(Error::BadParameters("max_q must be >= 1".into()));
    }
    if let Some(r) = x.as_rational() {
        let (quots, _) = rational_quotients(&r, max_q);
        let convs = convergents_from_quotients(&quots);
        let out = convs
            .into_iter()
            .filter(|(_, q)| q <= max_q)
            .map(|(p, q)| {
                let err = (&r * BigRational::from_integer(q.clone())
                    - BigRational::from_integer(p.clone()))
                .abs();
                RationalApprox { a: p, q, err }
            })
            .collect();
        return Ok(out);
    }
    let mut bits: u32 = 128;
    loop {
        crate::arith::check_precision(bits)?;
        let iv = x.eval(bits)?;
        let lo = iv.lo_rational();
        let hi = iv.hi_rational();
        let quots = interval_quotients(&lo, &hi, max_q);
        if !quots.is_empty() {
            let convs = convergents_from_quotients(&quots);
            // done when the next convergent would exceed max_q for certain:
            // check the last two denominators against the bound
            let complete = convs.last().map(|(_, q)| q > max_q).unwrap_or(false)
                || next_denominator_exceeds(&quots, &convs, max_q, &lo, &hi);
            if complete {
                let out = convs
                    .into_iter()
                    .filter(|(_, q)| q <= max_q)
                    .map(|(p, q)| {
                        // err upper bound from the interval endpoints
                        let e_lo = (&lo * BigRational::from_integer(q.clone())
                            - BigRational::from_integer(p.clone()))
                        .abs();
                        let e_hi = (&hi * BigRational::from_integer(q.clone())
                            - BigRational::from_integer(p.clone()))
                        .abs();
                        RationalApprox { a: p, q, err: e_lo.max(e_hi) }
                    })
                    .collect();
                return Ok(out);
            }
        }
        if bits >= CF_PRECISION_CAP {
            return Err(Error::PrecisionExhausted(format!(
                "continued fraction of {} to denominator {}",
                x, max_q
            )));
        }
        bits = bits.saturating_mul(2).min(CF_PRECISION_CAP);
    }
}

/// True if the convergent after the certified prefix must exceed max_q:
/// q_{n+1} = a_{n+1} q_n + q_{n-1} >= q_n + q_{n-1}, and a lower bound for
/// a_{n+1} comes from the interval remainder.
fn next_denominator_exceeds(
    quots: &[BigInt],
    convs: &[(BigInt, BigInt)],
    max_q: &BigInt,
    lo: &BigRational,
    hi: &BigRational,
) -> bool {
    let n = convs.len();
    let q_n = &convs[n - 1].1;
    let q_prev = if n >= 2 { convs[n - 2].1.clone() } else { BigInt::zero() };
    // walk the interval down the certified prefix to bound the next quotient
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    for a in quots {
        let fl = &lo - BigRational::from_integer(a.clone());
        let fh = &hi - BigRational::from_integer(a.clone());
        if fl.is_zero() || fh.is_zero() {
            return false;
        }
        let new_lo = fh.recip();
        let new_hi = fl.recip();
        lo = new_lo;
        hi = new_hi;
    }
    // next quotient is at least floor(lo)
    let a_next_min = lo.floor().to_integer();
    if a_next_min < BigInt::one() {
        return false;
    }
    &(a_next_min * q_n) + &q_prev > *max_q
}

/// Dirichlet approximation: coprime (a, q) with q <= Q and |q x - a| <= 1/Q,
/// realised as the last convergent with denominator within Q.
pub fn dirichlet_approx(x: &Real, q_bound: &BigRational) -> Result<RationalApprox> {
    if *q_bound < BigRational::one() {
        return Err(Error::BadParameters("Q must be >= 1".into()));
    }
    let max_q = q_bound.floor().to_integer();
    let convs = continued_fraction(x, &max_q)?;
    convs
        .into_iter()
        .last()
        .ok_or_else(|| Error::PrecisionExhausted(format!("no convergent for {}", x)))
}

/// Which of the four claims an instance exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimId {
    /// Type I, small modulus: leading-coefficient target y a_k k m^k h
    C41,
    /// Type I, large modulus: differenced target with j = ceil(-beta+2tau)+1
    C42,
    /// Type II, mid band: j = ceil(-beta)+1
    C53,
    /// Type II, low band: j = ceil(-beta+tau)+1
    C54,
}

impl ClaimId {
    pub fn parse(s: &str) -> Result<ClaimId> {
        match s.to_ascii_uppercase().as_str() {
            "C41" => Ok(ClaimId::C41),
            "C42" => Ok(ClaimId::C42),
            "C53" => Ok(ClaimId::C53),
            "C54" => Ok(ClaimId::C54),
            other => Err(Error::BadParameters(format!("unknown claim id {:?}", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClaimId::C41 => "C41",
            ClaimId::C42 => "C42",
            ClaimId::C53 => "C53",
            ClaimId::C54 => "C54",
        }
    }
}

/// One concrete instance of a claim.
#[derive(Debug, Clone)]
pub struct ClaimInstance {
    pub claim_id: ClaimId,
    pub k: i64,
    pub theta: BigRational,
    /// the coefficient alpha_j or alpha_k in play
    pub coefficient: Real,
    /// value of the differenced variable (m for Type I, n for the Type II claims)
    pub m: u64,
    pub h: u64,
    pub y_exponent: BigRational,
    pub x: u64,
}

#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub j: i64,
    pub approx: RationalApprox,
    pub alpha_target: f64,
    pub q_used: f64,
    pub q_lower_target: f64,
    pub q_upper_target: f64,
    /// q >= lower target, no implied-constant slack
    pub lower_ok: bool,
    /// q / lower target
    pub ratio: f64,
    /// Dirichlet window clamped to the representable cap
    pub scaled_down: bool,
    /// |q alpha - a| <= 1/Q and q <= Q: always provable, asserted here
    pub dirichlet_ok: bool,
}

/// Dirichlet windows above 2^512 are clamped (and flagged).
const Q_CAP_BITS: u32 = 512;

fn big_pow(base: &BigRational, e: i64) -> BigRational {
    base.pow(e as i32)
}

/// Verify one claim instance: build the target coefficient, run Dirichlet in
/// the claim's stated window, and report whether the denominator clears the
/// claim's lower bound.
pub fn verify_claim(inst: &ClaimInstance, bundle: &ExponentBundle) -> Result<ClaimReport> {
    if inst.m == 0 || inst.h == 0 || inst.x < 2 {
        return Err(Error::WindowViolation("m, h, X must be positive (X >= 2)".into()));
    }
    if bundle.k != inst.k || bundle.theta != inst.theta {
        return Err(Error::BadParameters("bundle does not match instance degrees".into()));
    }
    let family = match inst.claim_id {
        ClaimId::C41 | ClaimId::C42 => SumFamily::TypeI,
        _ => SumFamily::TypeII,
    };
    let regime = classify_frequency(&inst.y_exponent, bundle, family)?;
    let expected_band = match inst.claim_id {
        ClaimId::C41 | ClaimId::C42 | ClaimId::C53 => FrequencyBand::Mid,
        ClaimId::C54 => FrequencyBand::Low,
    };
    if regime.band != expected_band {
        return Err(Error::WindowViolation(format!(
            "{} needs the {:?} band, y-exponent {} classifies as {:?}",
            inst.claim_id.name(),
            expected_band,
            inst.y_exponent,
            regime.band
        )));
    }
    // Type I claims additionally split on m vs X^c
    let xr = BigRational::from_integer(BigInt::from(inst.x));
    let m_rat = BigRational::from_integer(BigInt::from(inst.m));
    if matches!(inst.claim_id, ClaimId::C41 | ClaimId::C42) {
        // m <= X^c  <=>  m^(c.denom) <= X^(c.numer)
        let cd = bundle.c_split.denom().to_u32().unwrap_or(u32::MAX);
        let cn = bundle.c_split.numer().to_i64().unwrap_or(i64::MAX);
        let small = if cd != u32::MAX && (0..=64).contains(&cn) {
            BigInt::from(inst.m).pow(cd) <= BigInt::from(inst.x).pow(cn as u32)
        } else {
            m_rat.to_f64().unwrap() <= xr.to_f64().unwrap().powf(bundle.c_split.to_f64().unwrap())
        };
        match inst.claim_id {
            ClaimId::C41 if !small => {
                return Err(Error::WindowViolation(format!(
                    "C41 needs m <= X^c = X^{}, got m = {}",
                    bundle.c_split, inst.m
                )))
            }
            ClaimId::C42 if small => {
                return Err(Error::WindowViolation(format!(
                    "C42 needs m >= X^c = X^{}, got m = {}",
                    bundle.c_split, inst.m
                )))
            }
            _ => {}
        }
    }

    // differentiation index and target coefficient
    let y = Real::pow(xr.clone(), inst.y_exponent.clone())?;
    let (j, multiplier) = match inst.claim_id {
        ClaimId::C41 => {
            // y a_k (k m^k h): differencing keeps the leading coefficient
            let mult = BigRational::from_integer(
                BigInt::from(inst.k) * BigInt::from(inst.m).pow(inst.k as u32) * BigInt::from(inst.h),
            );
            (inst.k, mult)
        }
        _ => {
            let tau = match inst.claim_id {
                ClaimId::C42 => bundle.tau_type_i_large_m.clone(),
                ClaimId::C53 => BigRational::zero(),
                _ => bundle.tau_type_ii_low.clone(),
            };
            let j = select_j(&regime, &tau, bundle)?;
            // (m+h)^j - m^j
            let mh = BigInt::from(inst.m + inst.h).pow(j as u32);
            let mm = BigInt::from(inst.m).pow(j as u32);
            (j, BigRational::from_integer(mh - mm))
        }
    };
    let alpha_target = y.scale(multiplier).mul(inst.coefficient.clone());

    // Dirichlet window and lower bound
    let x_over_m = &xr / &m_rat;
    let (q_lower, mut q_upper) = match inst.claim_id {
        ClaimId::C41 => (x_over_m.clone(), big_pow(&x_over_m, inst.k - 2)),
        _ => (x_over_m.clone(), big_pow(&x_over_m, j - 1)),
    };
    let cap = BigRational::from_integer(BigInt::one() << Q_CAP_BITS);
    let scaled_down = q_upper > cap;
    if scaled_down {
        q_upper = cap;
    }
    if q_upper < BigRational::one() {
        return Err(Error::WindowViolation(format!(
            "degenerate Dirichlet window Q = {}",
            q_upper
        )));
    }

    let approx = dirichlet_approx(&alpha_target, &q_upper)?;
    let q_rat = BigRational::from_integer(approx.q.clone());
    let dirichlet_ok = q_rat <= q_upper && approx.err <= q_upper.recip();
    let lower_ok = q_rat >= q_lower;
    let ratio_rat = &q_rat / &q_lower;
    Ok(ClaimReport {
        claim: inst.claim_id,
        j,
        alpha_target: alpha_target
            .eval(96)
            .map(|iv| iv.to_f64_mid())
            .unwrap_or(f64::NAN),
        q_used: crate::pseudopoly::rational_to_f64(&q_upper),
        q_lower_target: crate::pseudopoly::rational_to_f64(&q_lower),
        q_upper_target: crate::pseudopoly::rational_to_f64(&q_upper),
        lower_ok,
        ratio: crate::pseudopoly::rational_to_f64(&ratio_rat),
        scaled_down,
        dirichlet_ok,
        approx,
    })
}
