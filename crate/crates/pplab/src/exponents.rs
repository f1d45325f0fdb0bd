//! Exact-rational exponent bookkeeping: the three technical parameters
//! (tau1, rho_star, rho), the Type I split point c, the Type II threshold B,
//! frequency-regime classification, differencing-length (tau) selections,
//! and the differentiation-order rules used with the derivative test.
//!
//! Everything here is a pure function of (k, theta) over `BigRational`, so
//! recomputation is deterministic and equality is exact.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// All derived exponents for a degree pair (k, theta).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentBundle {
    pub k: i64,
    pub theta: BigRational,
    /// 1 / (k(k-1))
    pub tau1: BigRational,
    /// min((theta-1)/k - tau1, 1/4 - tau1)
    pub rho_star: BigRational,
    /// (1/3) min(2/((k+1)(3k/2+5/2)^2), rho_star/(k(k-1)^2))
    pub rho: BigRational,
    /// Working interpretation of the prime-sum decay: 3 * rho. The source
    /// states the prime bound with an unsubscripted exponent; this field
    /// records the reading used by the Case I pipeline and is flagged as an
    /// interpretation in the CLI output.
    pub rho_lemma: BigRational,
    /// min((theta-1)/k, 1/2 + rho_star): where Type I swaps variable roles
    pub c_split: BigRational,
    /// tau = 2/(5(k-1)(k-2)): Type I, small-M branch
    pub tau_type_i_small_m: BigRational,
    /// tau = 2/(5k(k-1)): Type I, large-M branch
    pub tau_type_i_large_m: BigRational,
    /// tau = 2/(3k(k-1)): Type II, low/intermediate frequencies
    pub tau_type_ii_low: BigRational,
    /// tau = 2/(3k(k+1)): Type II high frequencies, j = k+1 base case
    pub tau_type_ii_high_base: BigRational,
    /// True when k >= 12, theta > 4 and k > theta all hold, i.e. the degree
    /// pair is inside the property-(F) range where every stored exponent is
    /// positive.
    pub property_f_range: bool,
}

impl ExponentBundle {
    /// B(eps) = 2/3 - 1/(5k(k-1)) - eps: the Type II high-frequency floor.
    pub fn b_threshold(&self, eps: &BigRational) -> BigRational {
        rat(2, 3) - BigRational::new(BigInt::one(), BigInt::from(5 * self.k * (self.k - 1))) - eps
    }
}

/// Per-proposition saving exponents (the bound library): each entry is the
/// delta in `X^(1 - delta + eps)`.
#[derive(Debug, Clone)]
pub struct PropositionExponents {
    /// Type I total and high frequencies: 2 rho_star / (k(k-1)^2)
    pub type_i: BigRational,
    /// Type I intermediate/small frequencies: 1/(5k(k-1))
    pub type_i_mid: BigRational,
    /// Type II total: 1/(3k(k+1)^2) - 1/(5k^2(k-1)(k+1)^2).
    /// The second term is a correction with positive sign in the exponent,
    /// i.e. it weakens the saving; reproduced verbatim and worth flagging.
    pub type_ii: BigRational,
    /// Type II high frequencies: 2/((k+1)(3k/2+5/2)^2)
    pub type_ii_high: BigRational,
    /// Type II near-threshold band: 1/(10k(k-1))
    pub type_ii_near: BigRational,
    /// Type II intermediate/low frequencies: 1/(3k(k-1))
    pub type_ii_low: BigRational,
}

/// Compute every derived exponent for (k, theta) in exact arithmetic.
pub fn compute_bundle(k: i64, theta: &BigRational) -> Result<ExponentBundle> {
    if k <= 1 {
        return Err(Error::DegenerateDegrees(k));
    }
    if *theta <= BigRational::one() {
        return Err(Error::DomainError(format!("theta must be > 1, got {}", theta)));
    }
    let kk = int(k);
    let tau1 = BigRational::new(BigInt::one(), BigInt::from(k * (k - 1)));
    let branch_a = (theta - BigRational::one()) / &kk - &tau1;
    let branch_b = rat(1, 4) - &tau1;
    let rho_star = branch_a.clone().min(branch_b);
    // 2 / ((k+1)(3k/2 + 5/2)^2)
    let half_term = rat(3 * k + 5, 2);
    let rho_a = int(2) / (int(k + 1) * (&half_term * &half_term));
    let rho_b = &rho_star / (int(k) * int(k - 1) * int(k - 1));
    let rho = rat(1, 3) * rho_a.min(rho_b);
    let c_split = ((theta - BigRational::one()) / &kk).min(rat(1, 2) + &rho_star);
    let property_f_range = k >= 12 && *theta > int(4) && kk > *theta;
    Ok(ExponentBundle {
        k,
        theta: theta.clone(),
        tau1,
        rho_lemma: int(3) * &rho,
        rho,
        rho_star,
        c_split,
        // undefined at k = 2 (degenerate, never property-(F)); report zero
        tau_type_i_small_m: if k >= 3 { int(2) / int(5 * (k - 1) * (k - 2)) } else { BigRational::zero() },
        tau_type_i_large_m: int(2) / int(5 * k * (k - 1)),
        tau_type_ii_low: int(2) / int(3 * k * (k - 1)),
        tau_type_ii_high_base: int(2) / int(3 * k * (k + 1)),
        property_f_range,
    })
}

/// The per-proposition savings for this bundle.
pub fn proposition_exponents(bundle: &ExponentBundle) -> PropositionExponents {
    let k = bundle.k;
    let half_term = rat(3 * k + 5, 2);
    PropositionExponents {
        type_i: int(2) * &bundle.rho_star / (int(k) * int(k - 1) * int(k - 1)),
        type_i_mid: BigRational::new(BigInt::one(), BigInt::from(5 * k * (k - 1))),
        type_ii: BigRational::new(BigInt::one(), BigInt::from(3 * k) * BigInt::from((k + 1) * (k + 1)))
            - BigRational::new(
                BigInt::one(),
                BigInt::from(5 * k * k) * BigInt::from(k - 1) * BigInt::from((k + 1) * (k + 1)),
            ),
        type_ii_high: int(2) / (int(k + 1) * (&half_term * &half_term)),
        type_ii_near: BigRational::new(BigInt::one(), BigInt::from(10 * k * (k - 1))),
        type_ii_low: BigRational::new(BigInt::one(), BigInt::from(3 * k * (k - 1))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumFamily {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyBand {
    High,
    Mid,
    Low,
}

/// Where a frequency y = X^{y_exponent} sits for the given sum family.
#[derive(Debug, Clone)]
pub struct FrequencyRegime {
    pub family: SumFamily,
    pub band: FrequencyBand,
    /// alpha with y X^theta = X^alpha (used by the high bands)
    pub alpha: BigRational,
    /// beta with y = X^beta (used by the mid/low bands)
    pub beta: BigRational,
    /// the band's window as exponents of X
    pub bounds_checked: (BigRational, BigRational),
}

/// Classify y = X^{y_exponent} into a frequency band.
///
/// Boundary values go to the higher band; the admissible window is
/// [-23k/30, 1/2] for both families.
pub fn classify_frequency(
    y_exponent: &BigRational,
    bundle: &ExponentBundle,
    family: SumFamily,
) -> Result<FrequencyRegime> {
    let lo = rat(-23 * bundle.k, 30);
    let hi = rat(1, 2);
    if *y_exponent < lo || *y_exponent > hi {
        return Err(Error::OutOfRange {
            got: y_exponent.to_string(),
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let alpha = y_exponent + &bundle.theta;
    let beta = y_exponent.clone();
    let (band, b_lo, b_hi) = match family {
        SumFamily::TypeI => {
            let high_start = -&bundle.theta + &bundle.rho_star;
            if *y_exponent >= high_start {
                (FrequencyBand::High, high_start.max(lo), hi)
            } else {
                (FrequencyBand::Mid, lo, high_start.min(hi))
            }
        }
        SumFamily::TypeII => {
            let mid_start = -&bundle.theta;
            let high_start = &mid_start + bundle.b_threshold(&BigRational::zero());
            if *y_exponent >= high_start {
                (FrequencyBand::High, high_start.max(lo), hi)
            } else if *y_exponent >= mid_start {
                (FrequencyBand::Mid, mid_start.max(lo.clone()), high_start)
            } else {
                (FrequencyBand::Low, lo, mid_start)
            }
        }
    };
    Ok(FrequencyRegime {
        family,
        band,
        alpha,
        beta,
        bounds_checked: (b_lo, b_hi),
    })
}

fn ceil_i64(r: &BigRational) -> Result<i64> {
    r.ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::BadParameters(format!("ceiling of {} out of i64", r)))
}

/// Pick the differentiation order / coefficient index for a regime.
///
/// High bands use the derivative-test selections (no upper restriction);
/// mid/low bands use the claim selections, which must land in 2..=k for the
/// rational-approximation step to apply.
///
/// - Type I high: j = max(k+1, ceil(5 alpha / 2) + 2)
/// - Type II high: j = max(k+1, ceil(3 (alpha + tau) / 2) + 1)
/// - Type I mid (variable roles swapped): j = ceil(-beta + 2 tau) + 1
/// - Type II mid: j = ceil(-beta) + 1
/// - Type II low: j = ceil(-beta + tau) + 1
pub fn select_j(
    regime: &FrequencyRegime,
    tau: &BigRational,
    bundle: &ExponentBundle,
) -> Result<i64> {
    let k = bundle.k;
    let j = match (regime.family, regime.band) {
        (SumFamily::TypeI, FrequencyBand::High) => {
            let c = ceil_i64(&(rat(5, 2) * &regime.alpha))? + 2;
            return Ok(c.max(k + 1));
        }
        (SumFamily::TypeII, FrequencyBand::High) => {
            let c = ceil_i64(&(rat(3, 2) * (&regime.alpha + tau)))? + 1;
            return Ok(c.max(k + 1));
        }
        (SumFamily::TypeI, _) => ceil_i64(&(-&regime.beta + int(2) * tau))? + 1,
        (SumFamily::TypeII, FrequencyBand::Mid) => ceil_i64(&-&regime.beta)? + 1,
        (SumFamily::TypeII, FrequencyBand::Low) => ceil_i64(&(-&regime.beta + tau))? + 1,
    };
    if j < 2 || j > k {
        return Err(Error::JOutOfClaimRange { j, k });
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn bundle_k12_theta5() {
        let b = compute_bundle(12, &int(5)).unwrap();
        assert_eq!(b.tau1, rat(1, 132));
        assert_eq!(b.rho_star, rat(8, 33));
        assert_eq!(b.rho, rat(2, 35937));
        assert_eq!(b.rho_lemma, rat(6, 35937).reduced());
        assert_eq!(b.c_split, rat(1, 3));
        assert_eq!(b.b_threshold(&BigRational::zero()), rat(439, 660));
        assert_eq!(b.tau_type_i_small_m, rat(2, 550).reduced());
        assert_eq!(b.tau_type_i_large_m, rat(2, 660).reduced());
        assert_eq!(b.tau_type_ii_low, rat(2, 396).reduced());
        assert_eq!(b.tau_type_ii_high_base, rat(2, 468).reduced());
        assert!(b.property_f_range);
    }

    #[test]
    fn bundle_k13_theta_nine_halves() {
        let b = compute_bundle(13, &rat(9, 2)).unwrap();
        assert_eq!(b.tau1, rat(1, 156));
        // min(41/156, 38/156) = 19/78
        assert_eq!(b.rho_star, rat(19, 78));
    }

    #[test]
    fn degenerate_and_non_f() {
        assert!(matches!(compute_bundle(1, &int(5)), Err(Error::DegenerateDegrees(1))));
        let b = compute_bundle(2, &rat(3, 2)).unwrap();
        assert!(b.rho_star.is_negative());
        assert!(!b.property_f_range);
    }

    #[test]
    fn recomputation_is_exact() {
        let a = compute_bundle(17, &rat(11, 2)).unwrap();
        let b = compute_bundle(17, &rat(11, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positivity_over_property_f_grid() {
        for k in 12..=40i64 {
            let mut theta = rat(9, 2);
            while theta < int(k) {
                let b = compute_bundle(k, &theta).unwrap();
                assert!(b.property_f_range, "k={} theta={}", k, theta);
                assert!(b.rho_star.is_positive(), "rho_star at k={} theta={}", k, theta);
                assert!(b.rho.is_positive());
                assert!(b.c_split.is_positive() && b.c_split < int(1));
                let b0 = b.b_threshold(&BigRational::zero());
                assert!(b0.is_positive() && b0 < rat(2, 3));
                // rho is a lower bound of both min branches, scaled by 1/3
                let half_term = rat(3 * k + 5, 2);
                let branch1 = int(2) / (int(k + 1) * (&half_term * &half_term));
                let branch2 = &b.rho_star / (int(k) * int(k - 1) * int(k - 1));
                assert!(b.rho <= rat(1, 3) * branch1);
                assert!(b.rho <= rat(1, 3) * branch2);
                theta += rat(1, 2);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let b = compute_bundle(12, &int(5)).unwrap();
        let r = classify_frequency(&rat(2, 5), &b, SumFamily::TypeI).unwrap();
        assert_eq!(r.band, FrequencyBand::High);
        assert_eq!(r.alpha, rat(27, 5)); // y X^5 = X^(2/5+5)

        let r = classify_frequency(&int(-6), &b, SumFamily::TypeI).unwrap();
        assert_eq!(r.band, FrequencyBand::Mid);

        let r = classify_frequency(&rat(-49, 10), &b, SumFamily::TypeII).unwrap();
        assert_eq!(r.band, FrequencyBand::Mid);

        // boundary goes to the higher band
        let r = classify_frequency(&int(-5), &b, SumFamily::TypeII).unwrap();
        assert_eq!(r.band, FrequencyBand::Mid);
        let hs = -int(5) + b.b_threshold(&BigRational::zero());
        let r = classify_frequency(&hs, &b, SumFamily::TypeII).unwrap();
        assert_eq!(r.band, FrequencyBand::High);

        // out of window
        assert!(classify_frequency(&int(-10), &b, SumFamily::TypeI).is_err());
        assert!(classify_frequency(&int(1), &b, SumFamily::TypeI).is_err());
    }

    #[test]
    fn bands_partition_the_window() {
        // every rational on a fine grid lands in exactly one band, and bands
        // tile [-23k/30, 1/2] without gaps
        for (k, theta) in [(12i64, int(5)), (13, rat(9, 2)), (20, rat(23, 2))] {
            let b = compute_bundle(k, &theta).unwrap();
            for family in [SumFamily::TypeI, SumFamily::TypeII] {
                let lo = rat(-23 * k, 30);
                let hi = rat(1, 2);
                let steps = 400i64;
                let mut prev_band = None;
                let mut transitions = 0;
                for i in 0..=steps {
                    let y = &lo + (&hi - &lo) * rat(i, steps);
                    let r = classify_frequency(&y, &b, family).unwrap();
                    assert!(y >= r.bounds_checked.0 && y <= r.bounds_checked.1,
                        "y={} outside its own band bounds {:?}", y, r.bounds_checked);
                    if prev_band != Some(r.band) {
                        if prev_band.is_some() {
                            transitions += 1;
                        }
                        prev_band = Some(r.band);
                    }
                }
                // low -> mid -> high for TypeII, mid -> high for TypeI
                let max_expected = if family == SumFamily::TypeII { 2 } else { 1 };
                assert!(transitions <= max_expected);
            }
        }
    }

    #[test]
    fn select_j_rules() {
        let b = compute_bundle(12, &int(5)).unwrap();
        // Type I high with alpha = 2 -> max(13, 7) = 13
        let mut r = classify_frequency(&rat(-3, 1), &b, SumFamily::TypeI).unwrap();
        r.band = FrequencyBand::High;
        r.alpha = int(2);
        assert_eq!(select_j(&r, &b.tau_type_i_small_m, &b).unwrap(), 13);
        // alpha = 10 -> ceil(25)+2 = 27
        r.alpha = int(10);
        assert_eq!(select_j(&r, &b.tau_type_i_small_m, &b).unwrap(), 27);

        // Type II mid rule: beta = -7/2 -> ceil(7/2)+1 = 5
        let mut r2 = classify_frequency(&rat(-49, 10), &b, SumFamily::TypeII).unwrap();
        r2.beta = rat(-7, 2);
        assert_eq!(select_j(&r2, &BigRational::zero(), &b).unwrap(), 5);

        // out-of-range claim index errors
        let mut r3 = classify_frequency(&rat(-49, 10), &b, SumFamily::TypeII).unwrap();
        r3.beta = rat(-1, 2); // j = 2 ok
        assert_eq!(select_j(&r3, &BigRational::zero(), &b).unwrap(), 2);
        r3.beta = int(0); // j = 1 < 2
        assert!(matches!(
            select_j(&r3, &BigRational::zero(), &b),
            Err(Error::JOutOfClaimRange { j: 1, .. })
        ));
    }

    #[test]
    fn claim_j_in_range_over_sampled_windows(){
        let b = compute_bundle(12, &int(5)).unwrap();
        // Type II mid: beta in [-theta, -theta + B)
        let b0 = b.b_threshold(&BigRational::zero());
        for i in 0..50 {
            let beta = -&b.theta + &b0 * rat(i, 51);
            let r = classify_frequency(&beta, &b, SumFamily::TypeII).unwrap();
            assert_eq!(r.band, FrequencyBand::Mid);
            let j = select_j(&r, &BigRational::zero(), &b).unwrap();
            assert!((2..=b.k).contains(&j));
        }
        // Type II low: beta in [-23k/30, -theta)
        for i in 0..50 {
            let lo = rat(-23 * b.k, 30);
            let beta = &lo + (-&b.theta - &lo) * rat(i, 50);
            let r = classify_frequency(&beta, &b, SumFamily::TypeII).unwrap();
            if r.band != FrequencyBand::Low {
                continue;
            }
            let j = select_j(&r, &b.tau_type_ii_low, &b).unwrap();
            assert!((2..=b.k).contains(&j), "j={} at beta={}", j, beta);
        }
    }

    #[test]
    fn proposition_exponents_positive() {
        let b = compute_bundle(12, &int(5)).unwrap();
        let p = proposition_exponents(&b);
        for (name, v) in [
            ("type_i", &p.type_i),
            ("type_i_mid", &p.type_i_mid),
            ("type_ii", &p.type_ii),
            ("type_ii_high", &p.type_ii_high),
            ("type_ii_near", &p.type_ii_near),
            ("type_ii_low", &p.type_ii_low),
        ] {
            assert!(v.is_positive(), "{} must be a positive saving", name);
        }
    }
}
