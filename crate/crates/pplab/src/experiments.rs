//! The headline experiments: minimum fractional-part search over primes,
//! large-sieve witness search, the divisibility (multiple) search, power-law
//! decay fitting, and the end-to-end sanity check tying them together.

use crate::arith::{Interval, Real};
use crate::error::{Error, Result};
use crate::exponents::ExponentBundle;
use crate::expsums::{prime_exp_sum_wp, ExpSumResult};
use crate::primes::PrimeTable;
use crate::pseudopoly::{check_property_f, floor_certified_with_bits, PseudoPolynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Outcome of the minimum fractional-part search.
#[derive(Debug, Clone)]
pub struct MinSearchResult {
    pub x: u64,
    pub argmin_prime: u64,
    /// distance of xi * floor(f(argmin_prime)) to the nearest integer
    pub min_distance: f64,
    pub evaluations: u64,
    pub ambiguous_floors: u64,
    pub precision_used: u32,
}

/// ||xi * n|| with a certified enclosure tight enough that the f64 value is
/// the correctly rounded distance. Returns (distance, bits used).
fn fractional_distance(xi: &Real, n: &BigInt, cap: u32) -> Result<(f64, u32)> {
    if n.is_zero() {
        return Ok((0.0, 0));
    }
    if let Some(r) = xi.as_rational() {
        // exact: ||p n / q|| from the residue
        let num = r.numer() * n;
        let den = r.denom().clone();
        let (_, rem) = num.div_mod_floor(&den);
        let frac = BigRational::new(rem, den);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let dist = if frac <= half { frac } else { BigRational::one() - frac };
        return Ok((crate::pseudopoly::rational_to_f64(&dist), 0));
    }
    let mut bits = (n.bits() as u32 + 72).max(96);
    loop {
        crate::arith::check_precision(bits)?;
        let iv = xi.eval(bits)?;
        let prod = iv.mul_bigint_exact(n);
        if prod.width_at_most(-61) {
            let mid = prod.mid();
            let fl = mid.floor_int();
            let frac = mid.sub(&crate::arith::Dyadic::from_bigint(fl));
            // dist = min(frac, 1 - frac)
            let one_minus = crate::arith::Dyadic::from_i64(1).sub(&frac);
            let dist = if frac.cmp_value(&one_minus) == std::cmp::Ordering::Less {
                frac
            } else {
                one_minus
            };
            return Ok((dist.to_f64(), bits));
        }
        if bits >= cap {
            return Err(Error::PrecisionExhausted(format!(
                "fractional part of {} * {}",
                xi, n
            )));
        }
        bits = bits.saturating_mul(2).min(cap);
    }
}

/// Search min over primes p <= x of ||xi * floor(f(p))||.
///
/// Floors are certified; primes whose floor stays undecided at the precision
/// cap are counted (and excluded) unless `strict`, in which case the error
/// propagates. Parallel chunks merge deterministically with ties going to the
/// smaller prime.
pub fn min_fracpart(
    xi: &Real,
    f: &PseudoPolynomial,
    x: u64,
    primes: &PrimeTable,
    precision_cap: u32,
    strict: bool,
) -> Result<MinSearchResult> {
    if x < 2 {
        return Err(Error::BadParameters("X must be >= 2".into()));
    }
    if primes.limit() < x {
        return Err(Error::PrimeTableTooSmall { limit: primes.limit(), need: x });
    }
    let plist = primes.up_to(x);
    #[derive(Clone)]
    struct Local {
        best: Option<(f64, u64)>,
        evals: u64,
        ambiguous: u64,
        max_bits: u32,
    }
    let merged: Result<Vec<Local>> = plist
        .par_chunks(1024)
        .map(|chunk| {
            let mut loc = Local { best: None, evals: 0, ambiguous: 0, max_bits: 0 };
            for &p in chunk {
                loc.evals += 1;
                let floor = match floor_certified_with_bits(f, &BigInt::from(p), precision_cap) {
                    Ok((n, bits)) => {
                        loc.max_bits = loc.max_bits.max(bits);
                        n
                    }
                    Err(Error::AmbiguousFloor { arg, cap }) => {
                        if strict {
                            return Err(Error::AmbiguousFloor { arg, cap });
                        }
                        loc.ambiguous += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let (dist, bits) = fractional_distance(xi, &floor, precision_cap)?;
                loc.max_bits = loc.max_bits.max(bits);
                let cand = (dist, p);
                loc.best = Some(match loc.best {
                    None => cand,
                    Some(b) => {
                        if cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1) {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
            Ok(loc)
        })
        .collect();
    let locals = merged?;
    let mut best: Option<(f64, u64)> = None;
    let mut evals = 0;
    let mut ambiguous = 0;
    let mut max_bits = 0;
    for loc in locals {
        evals += loc.evals;
        ambiguous += loc.ambiguous;
        max_bits = max_bits.max(loc.max_bits);
        if let Some(cand) = loc.best {
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1) {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
    }
    let (min_distance, argmin_prime) = best.ok_or_else(|| {
        Error::AssertionFailed("no prime produced a certified floor".into())
    })?;
    Ok(MinSearchResult {
        x,
        argmin_prime,
        min_distance,
        evaluations: evals,
        ambiguous_floors: ambiguous,
        precision_used: max_bits,
    })
}

/// Witness from the large-sieve style lower bound: the smallest m <= M with
/// |sum_j e(m x_j)| >= N/(6M), which exists whenever every ||x_j|| >= 1/M.
#[derive(Debug, Clone)]
pub struct LargeSieveWitness {
    pub m: u64,
    pub magnitude: f64,
    pub threshold: f64,
    pub hypothesis_ok: bool,
}

pub fn large_sieve_witness(x: &[f64], m_bound: u64) -> Result<LargeSieveWitness> {
    if x.is_empty() || m_bound < 1 {
        return Err(Error::BadParameters("need N >= 1 points and M >= 1".into()));
    }
    for (i, &v) in x.iter().enumerate() {
        let norm = (v - v.round()).abs();
        if norm < 1.0 / m_bound as f64 {
            return Err(Error::HypothesisViolated { index: i, norm, m: m_bound });
        }
    }
    let n = x.len() as f64;
    let threshold = n / (6.0 * m_bound as f64);
    for m in 1..=m_bound {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for &v in x {
            let t = 2.0 * std::f64::consts::PI * (m as f64) * v;
            re += t.cos();
            im += t.sin();
        }
        let mag = (re * re + im * im).sqrt();
        if mag >= threshold {
            return Ok(LargeSieveWitness { m, magnitude: mag, threshold, hypothesis_ok: true });
        }
    }
    Err(Error::WitnessNotFound(m_bound))
}

/// Smallest prime p <= limit with floor(f(p)) divisible by m.
pub fn multiple_search(
    m: u64,
    f: &PseudoPolynomial,
    limit: u64,
    primes: &PrimeTable,
    precision_cap: u32,
) -> Result<u64> {
    if m < 2 || limit < 2 {
        return Err(Error::BadParameters("need m >= 2 and limit >= 2".into()));
    }
    if primes.limit() < limit {
        return Err(Error::PrimeTableTooSmall { limit: primes.limit(), need: limit });
    }
    let mb = BigInt::from(m);
    for &p in primes.up_to(limit) {
        let (n, _) = floor_certified_with_bits(f, &BigInt::from(p), precision_cap)?;
        if n.mod_floor(&mb).is_zero() {
            return Ok(p);
        }
    }
    Err(Error::NotFoundWithinLimit { m, limit })
}

/// Least-squares fit of log(min_distance) against log(X).
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub grid: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// the bundle's rho, when the caller attaches one for comparison
    pub rho_predicted: Option<BigRational>,
}

pub fn decay_fit(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} points", points.len())));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::DegenerateFit("X must be strictly increasing".into()));
        }
    }
    if points.iter().any(|&(x, d)| x <= 0.0 || d <= 0.0) {
        return Err(Error::DegenerateFit("X and min_distance must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, d)| (x.ln(), d.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx < 1e-30 {
        return Err(Error::DegenerateFit("zero variance in log X".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot < 1e-30 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(DecayFit {
        grid: points.to_vec(),
        slope,
        intercept,
        r_squared,
        rho_predicted: None,
    })
}

/// Parameters of the contradiction pipeline demos.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// the proof's working exponent, must sit in (0, rho(f))
    pub contradiction_exponent: BigRational,
    /// shift-window exponent: H = X^h_case1 (default 1/6)
    pub h_case1: BigRational,
    pub precision_cap: u32,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn for_bundle(bundle: &ExponentBundle) -> ExperimentConfig {
        ExperimentConfig {
            contradiction_exponent: &bundle.rho / BigRational::from_integer(BigInt::from(2)),
            h_case1: BigRational::new(BigInt::one(), BigInt::from(6)),
            precision_cap: crate::pseudopoly::DEFAULT_PRECISION_CAP,
            seed: 0x5EED,
        }
    }

    pub fn validate(&self, bundle: &ExponentBundle) -> Result<()> {
        if !self.contradiction_exponent.is_positive() || self.contradiction_exponent >= bundle.rho {
            return Err(Error::BadParameters(format!(
                "contradiction exponent {} outside (0, rho = {})",
                self.contradiction_exponent, bundle.rho
            )));
        }
        Ok(())
    }
}

/// End-to-end sanity check: the observed minimum must clear X^(-rho), a very
/// weak threshold that nonetheless exercises floors, precision handling and
/// the prime enumeration all at once.
#[derive(Debug, Clone)]
pub struct SanityReport {
    pub threshold: f64,
    pub result: MinSearchResult,
    pub margin: f64,
    /// crude equidistribution scale 1/(2 pi(X)) for context
    pub pigeonhole_scale: f64,
    pub passed: bool,
}

pub fn theorem_sanity(
    xi: &Real,
    f: &PseudoPolynomial,
    x: u64,
    bundle: &ExponentBundle,
    primes: &PrimeTable,
    precision_cap: u32,
) -> Result<SanityReport> {
    let report = check_property_f(f)?;
    if !report.holds {
        return Err(Error::AssertionFailed(format!(
            "f lacks property (F): {:?}",
            report.violated_conditions
        )));
    }
    if x < 100 {
        return Err(Error::BadParameters("sanity check needs X >= 100".into()));
    }
    let result = min_fracpart(xi, f, x, primes, precision_cap, false)?;
    let threshold = Interval::from_i64(x as i64)
        .pow_ratio_sig(&-&bundle.rho, 96)?
        .to_f64_mid();
    let n_primes = primes.up_to(x).len() as f64;
    Ok(SanityReport {
        threshold,
        margin: threshold - result.min_distance,
        pigeonhole_scale: 1.0 / (2.0 * n_primes),
        passed: result.min_distance <= threshold,
        result,
    })
}

/// Numeric sizes of the three sums in the Case I decomposition, for a chosen
/// multiplier m: (1) the direct sum over e(m xi f(p)) scaled by 1/q,
/// (2) the shifted sums over e((m xi + h) f(p)) weighted 1/|h|,
/// (3) the Fejer-weighted sums over e(h f(p)).
#[derive(Debug, Clone)]
pub struct Case1Report {
    pub x: u64,
    pub m: u64,
    pub q: u64,
    pub h_window: u64,
    pub truncated_sum: f64,
    pub sum1: f64,
    pub sum2: f64,
    pub sum3: f64,
    pub working_precision: u32,
}

pub fn case1_demo(
    xi: &Real,
    f: &PseudoPolynomial,
    x: u64,
    m: u64,
    bundle: &ExponentBundle,
    config: &ExperimentConfig,
    primes: &PrimeTable,
    wp: u32,
) -> Result<Case1Report> {
    config.validate(bundle)?;
    if m < 1 {
        return Err(Error::BadParameters("m must be >= 1".into()));
    }
    let xf = x as f64;
    // q = floor(m^(1/2) X^(rho/2)), at least 1
    let q = {
        let rho_half = &bundle.rho / BigRational::from_integer(BigInt::from(2));
        let xr = Interval::from_i64(x as i64).pow_ratio_sig(&rho_half, 96)?;
        let mr = Interval::from_i64(m as i64).nth_root_sig(2, 96);
        (mr.mul_sig(&xr, 96).to_f64_mid().floor() as u64).max(1)
    };
    let h_window = xf
        .powf(crate::pseudopoly::rational_to_f64(&config.h_case1))
        .floor() as u64;
    let m_xi = Real::from_i64(m as i64).mul(xi.clone());

    // truncated phases: e(m xi floor(f(p)))
    let truncated_sum = floored_sum(f, &m_xi, config.precision_cap, primes.up_to(x), wp)?.magnitude();

    let sum1 = prime_exp_sum_wp(f, &m_xi, x, primes, wp)?.magnitude() / q as f64;

    let mut sum2 = 0.0;
    for h in 1..=h_window {
        for sign in [-1i64, 1] {
            let shift = Real::from_i64(sign * h as i64);
            let phase_y = m_xi.clone().add(shift);
            let s = prime_exp_sum_wp(f, &phase_y, x, primes, wp)?;
            sum2 += s.magnitude() / h as f64;
        }
    }

    let mut sum3 = 0.0;
    let hp1 = (h_window + 1) as f64;
    for h in -(h_window as i64)..=(h_window as i64) {
        let weight = 1.0 - (h.unsigned_abs() as f64) / hp1;
        let s = prime_exp_sum_wp(f, &Real::from_i64(h), x, primes, wp)?;
        sum3 += weight * s.magnitude();
    }
    sum3 /= hp1;

    Ok(Case1Report {
        x,
        m,
        q,
        h_window,
        truncated_sum,
        sum1,
        sum2,
        sum3,
        working_precision: wp,
    })
}

/// Sum of e(xi * floor(f(n))) over the given arguments.
fn floored_sum(
    f: &PseudoPolynomial,
    scale: &Real,
    cap: u32,
    terms: &[u64],
    wp: u32,
) -> Result<ExpSumResult> {
    let phase = |n: u64, bits: u32| -> Result<Interval> {
        let (fl, _) = floor_certified_with_bits(f, &BigInt::from(n), cap)?;
        let iv = scale.eval(bits)?;
        Ok(iv.mul_bigint_exact(&fl))
    };
    crate::expsums::exp_sum_over(&phase, terms, wp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::compute_bundle;
    use crate::primes::sieve;
    use crate::pseudopoly::DEFAULT_PRECISION_CAP;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn min_search_toy_example() {
        // xi = sqrt2, f = x^2 + x^(3/2), X = 20: argmin p = 11, min ~ 0.0315
        let f = PseudoPolynomial::parse("1*x^2 + 1*x^3/2", false).unwrap();
        let xi = Real::sqrt(rat(2, 1)).unwrap();
        let primes = sieve(20).unwrap();
        let r = min_fracpart(&xi, &f, 20, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
        assert_eq!(r.argmin_prime, 11);
        assert!((r.min_distance - 0.0315).abs() < 2e-4, "min = {}", r.min_distance);
        assert_eq!(r.evaluations, 8);
        assert_eq!(r.ambiguous_floors, 0);

        // brute-force oracle over the same primes in plain f64
        let mut best = (f64::INFINITY, 0u64);
        for &p in primes.primes() {
            let v = (p as f64).powi(2) + (p as f64).powf(1.5);
            let n = v.floor();
            let prod = n * std::f64::consts::SQRT_2;
            let d = (prod - prod.round()).abs();
            if d < best.0 {
                best = (d, p);
            }
        }
        assert_eq!(best.1, r.argmin_prime);
        assert!((best.0 - r.min_distance).abs() < 1e-9);
    }

    #[test]
    fn min_search_rational_xi_hits_zero() {
        // xi = 1/2 and f = x: floor(f(2)) = 2 is even, distance exactly 0
        let f = PseudoPolynomial::parse("1*x^1", false).unwrap();
        let xi = Real::from_rational(rat(1, 2));
        let primes = sieve(10).unwrap();
        let r = min_fracpart(&xi, &f, 10, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
        assert_eq!(r.min_distance, 0.0);
        assert_eq!(r.argmin_prime, 2);
    }

    #[test]
    fn min_search_single_candidate() {
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let xi = Real::Pi;
        let primes = sieve(2).unwrap();
        let r = min_fracpart(&xi, &f, 2, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
        assert_eq!(r.argmin_prime, 2);
        assert_eq!(r.evaluations, 1);
        // floor(2^1.5) = 2: ||2 pi|| = 2 pi - 6 = 0.28318...
        assert!((r.min_distance - 0.2831853071795862).abs() < 1e-12);
    }

    #[test]
    fn min_search_monotone_in_x() {
        let f = PseudoPolynomial::parse("1*x^2 + 1*x^3/2", false).unwrap();
        let xi = Real::sqrt(rat(2, 1)).unwrap();
        let primes = sieve(2000).unwrap();
        let mut prev = f64::INFINITY;
        for x in [50u64, 200, 800, 2000] {
            let r = min_fracpart(&xi, &f, x, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
            assert!(r.min_distance <= prev + 1e-15);
            prev = r.min_distance;
        }
    }

    #[test]
    fn min_search_invariant_under_integer_shift_of_xi() {
        let f = PseudoPolynomial::parse("1*x^2 + 1*x^3/2", false).unwrap();
        let primes = sieve(300).unwrap();
        let xi = Real::sqrt(rat(2, 1)).unwrap();
        let xi_shift = xi.clone().add(Real::from_i64(7));
        let a = min_fracpart(&xi, &f, 300, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
        let b = min_fracpart(&xi_shift, &f, 300, &primes, DEFAULT_PRECISION_CAP, true).unwrap();
        assert_eq!(a.argmin_prime, b.argmin_prime);
        assert_eq!(a.min_distance, b.min_distance);
    }

    #[test]
    fn large_sieve_worked_and_violation() {
        let w = large_sieve_witness(&[0.5, 0.5, 0.5], 2).unwrap();
        assert_eq!(w.m, 1);
        assert!((w.magnitude - 3.0).abs() < 1e-12);
        assert!((w.threshold - 0.25).abs() < 1e-15);

        assert!(matches!(
            large_sieve_witness(&[0.001], 2),
            Err(Error::HypothesisViolated { index: 0, .. })
        ));
    }

    #[test]
    fn large_sieve_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for trial in 0..200 {
            let n = rng.gen_range(1..=100usize);
            // ||x|| >= 1/M is satisfiable only for M >= 2
            let m = rng.gen_range(2..=20u64);
            // draw ||x|| >= 1/M by construction
            let x: Vec<f64> = (0..n)
                .map(|_| {
                    let margin = 1.0 / m as f64;
                    let t = rng.gen_range(margin..=(1.0 - margin).max(margin));
                    let base = rng.gen_range(-3i64..=3) as f64;
                    base + t
                })
                .collect();
            let w = large_sieve_witness(&x, m);
            assert!(w.is_ok(), "witness must exist (trial {}): {:?}", trial, w.err());
        }
    }

    #[test]
    fn multiple_search_examples() {
        let primes = sieve(100).unwrap();
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        // floor(7^1.5) = 18, divisible by 3; smaller primes give 2, 5, 11
        assert_eq!(multiple_search(3, &f, 100, &primes, DEFAULT_PRECISION_CAP).unwrap(), 7);

        let id = PseudoPolynomial::parse("1*x^1", false).unwrap();
        assert_eq!(multiple_search(2, &id, 10, &primes, DEFAULT_PRECISION_CAP).unwrap(), 2);

        assert!(matches!(
            multiple_search(1_000_000, &f, 50, &primes, DEFAULT_PRECISION_CAP),
            Err(Error::NotFoundWithinLimit { .. })
        ));
    }

    #[test]
    fn decay_fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = [100.0f64, 1000.0, 10000.0]
            .iter()
            .map(|&x| (x, x.powf(-0.5)))
            .collect();
        let fit = decay_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);

        let flat: Vec<(f64, f64)> = [100.0f64, 1000.0, 10000.0].iter().map(|&x| (x, 0.25)).collect();
        let fit = decay_fit(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn decay_fit_recovers_noisy_slope() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 100.0 * 2.0f64.powi(i);
                let noise = 1.0 + rng.gen_range(-0.01..0.01);
                (x, 3.0 * x.powf(-0.3) * noise)
            })
            .collect();
        let fit = decay_fit(&pts).unwrap();
        assert!((fit.slope + 0.3).abs() < 0.02, "slope = {}", fit.slope);
    }

    #[test]
    fn decay_fit_degenerate_inputs() {
        assert!(matches!(decay_fit(&[(10.0, 0.1), (20.0, 0.05)]), Err(Error::DegenerateFit(_))));
        assert!(matches!(
            decay_fit(&[(10.0, 0.1), (10.0, 0.05), (30.0, 0.01)]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn sanity_check_small_property_f_instance() {
        // full degree-12 polynomial + x^(9/2) at a modest X
        let f = PseudoPolynomial::full_poly_plus(
            12,
            vec![crate::pseudopoly::Term::from_i64(1, 9, 2).unwrap()],
        )
        .unwrap();
        let bundle = compute_bundle(12, &rat(9, 2)).unwrap();
        let primes = sieve(500).unwrap();
        let xi = Real::sqrt(rat(2, 1)).unwrap();
        let rep = theorem_sanity(&xi, &f, 500, &bundle, &primes, DEFAULT_PRECISION_CAP).unwrap();
        assert!(rep.passed);
        assert!(rep.threshold > 0.999); // X^-rho is barely below 1 at desk scale
        assert!(rep.result.min_distance < 0.05);

        // non-(F) input is a precondition error
        let g = PseudoPolynomial::parse("1*x^2 + 1*x^3/2", false).unwrap();
        assert!(theorem_sanity(&xi, &g, 500, &bundle, &primes, DEFAULT_PRECISION_CAP).is_err());
    }

    #[test]
    fn case1_demo_runs() {
        let f = PseudoPolynomial::full_poly_plus(
            12,
            vec![crate::pseudopoly::Term::from_i64(1, 9, 2).unwrap()],
        )
        .unwrap();
        let bundle = compute_bundle(12, &rat(9, 2)).unwrap();
        let config = ExperimentConfig::for_bundle(&bundle);
        let primes = sieve(200).unwrap();
        let xi = Real::sqrt(rat(2, 1)).unwrap();
        let rep = case1_demo(&xi, &f, 200, 1, &bundle, &config, &primes, 96).unwrap();
        assert!(rep.q >= 1);
        assert_eq!(rep.h_window, 2); // 200^(1/6) = 2.41
        assert!(rep.sum1 > 0.0 && rep.sum2 > 0.0 && rep.sum3 > 0.0);
        assert!(rep.truncated_sum > 0.0);
        // trivial bounds
        let pi_x = primes.up_to(200).len() as f64;
        assert!(rep.truncated_sum <= pi_x + 1e-6);
    }
}
