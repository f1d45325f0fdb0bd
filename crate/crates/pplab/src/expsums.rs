//! Exponential sums with certified rounding error: complete sums over a
//! range, prime-restricted sums, von Mangoldt-weighted sums, bilinear
//! Type I/II sums, the explicit-constant Weyl-van der Corput inequality,
//! and the two theoretical bound formulas used for empirical comparison.
//!
//! Determinism contract: terms are processed in fixed chunks of 4096 with a
//! fixed pairwise reduction tree; accumulation is exact fixed-point addition,
//! so results are bit-identical across runs and thread counts.

use crate::arith::{e2pi, ln_dyadic, Dyadic, Interval, Real};
use crate::error::{Error, Result};
use crate::exponents::{classify_frequency, select_j, SumFamily};
use crate::primes::{divisor_count_k, PrimeTable};
use crate::pseudopoly::{split, PseudoPolynomial};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::sync::Arc;

/// Fixed chunk size of the deterministic reduction.
pub const CHUNK_SIZE: usize = 4096;

/// Default working precision for phases; escalated per term as needed so the
/// reduced phase keeps at least this many certified fractional bits.
pub const DEFAULT_WORKING_PRECISION: u32 = 128;

const RANGE_CAP: u64 = 1_000_000_000;

/// A certified exponential-sum value.
#[derive(Debug, Clone)]
pub struct ExpSumResult {
    /// midpoint enclosures of the real and imaginary parts
    re: Dyadic,
    im: Dyadic,
    pub term_count: u64,
    /// certified bound on |true - midpoint| (sum of component half-widths)
    pub rounding_error_bound: f64,
    pub working_precision: u32,
}

impl ExpSumResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn magnitude(&self) -> f64 {
        self.value().norm()
    }

    pub fn re_rational(&self) -> BigRational {
        crate::arith::dyadic_to_rational(&self.re)
    }

    pub fn im_rational(&self) -> BigRational {
        crate::arith::dyadic_to_rational(&self.im)
    }
}

/// A certified phase function: returns an enclosure of phase(n) at the
/// requested precision budget.
pub trait PhaseFn: Sync {
    fn phase(&self, n: u64, bits: u32) -> Result<Interval>;
}

impl<F> PhaseFn for F
where
    F: Fn(u64, u32) -> Result<Interval> + Sync,
{
    fn phase(&self, n: u64, bits: u32) -> Result<Interval> {
        self(n, bits)
    }
}

/// phase(n) = y * f(n), the workhorse for every sum here.
pub struct ScaledPolyPhase<'a> {
    pub f: &'a PseudoPolynomial,
    pub y: &'a Real,
}

impl PhaseFn for ScaledPolyPhase<'_> {
    fn phase(&self, n: u64, bits: u32) -> Result<Interval> {
        if self.y.is_zero() {
            return Ok(Interval::zero());
        }
        let nr = BigRational::from_integer(BigInt::from(n));
        let f_iv = crate::pseudopoly::eval_interval(self.f, &nr, bits)?;
        let y_iv = self.y.eval(bits)?;
        Ok(y_iv.mul_sig(&f_iv, bits))
    }
}

/// One weighted term: argument n with a complex weight (exact dyadics when
/// built from f64s, certified intervals for log weights).
struct WeightedTerm {
    n: u64,
    w_re: Interval,
    w_im: Interval,
}

impl WeightedTerm {
    fn unit(n: u64) -> WeightedTerm {
        WeightedTerm { n, w_re: Interval::from_i64(1), w_im: Interval::zero() }
    }

    fn from_f64(n: u64, w: Complex64) -> WeightedTerm {
        WeightedTerm {
            n,
            w_re: Interval::from_f64_exact(w.re),
            w_im: Interval::from_f64_exact(w.im),
        }
    }
}

/// e(phase(n)) for one term, escalated until the phase enclosure is tight
/// enough that the unit-circle point carries `wp`-level certification.
fn certified_e(phase: &dyn PhaseFn, n: u64, wp: u32, start_bits: u32) -> Result<(Interval, Interval, u32)> {
    let target = -((wp + 8) as i64);
    let mut bits = start_bits.max(wp + 16);
    loop {
        crate::arith::check_precision(bits)?;
        let t = phase.phase(n, bits)?;
        if t.width_at_most(target) {
            let (c, s) = e2pi(&t, wp + 8);
            return Ok((c, s, bits));
        }
        bits = bits.saturating_mul(2);
    }
}

/// Deterministic chunked summation core.
fn sum_weighted(terms: Vec<WeightedTerm>, phase: &dyn PhaseFn, wp: u32) -> Result<ExpSumResult> {
    crate::arith::check_precision(wp)?;
    let term_count = terms.len() as u64;
    if term_count == 0 {
        return Ok(ExpSumResult {
            re: Dyadic::zero(),
            im: Dyadic::zero(),
            term_count: 0,
            rounding_error_bound: 0.0,
            working_precision: wp,
        });
    }
    let scale = wp + 12;
    let chunks: Vec<&[WeightedTerm]> = terms.chunks(CHUNK_SIZE).collect();
    let partials: Vec<Result<(Interval, Interval)>> = chunks
        .par_iter()
        .map(|chunk| {
            let mut acc_re = Interval::zero();
            let mut acc_im = Interval::zero();
            // carry the escalated precision forward inside the chunk: the
            // needed bits vary slowly with n, and the carry is deterministic
            let mut carry_bits = 0u32;
            for t in chunk.iter() {
                let (c, s, used) = certified_e(phase, t.n, wp, carry_bits)?;
                carry_bits = used;
                // (w_re + i w_im)(c + i s)
                let re = t.w_re.mul(&c, scale).add(&t.w_im.mul(&s, scale).neg(), scale);
                let im = t.w_re.mul(&s, scale).add(&t.w_im.mul(&c, scale), scale);
                acc_re = acc_re.add_exact(&re.round_outward(scale));
                acc_im = acc_im.add_exact(&im.round_outward(scale));
            }
            Ok((acc_re, acc_im))
        })
        .collect();
    let mut level: Vec<(Interval, Interval)> = partials.into_iter().collect::<Result<_>>()?;
    // fixed pairwise tree
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / 2 + 1);
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push((a.0.add_exact(&b.0), a.1.add_exact(&b.1))),
                None => next.push(a),
            }
        }
        level = next;
    }
    let (re_iv, im_iv) = level.pop().unwrap();
    let half = |iv: &Interval| {
        let w = iv.width();
        Dyadic::new(w.mantissa, w.exp - 1)
    };
    let err = half(&re_iv).to_f64() + half(&im_iv).to_f64();
    Ok(ExpSumResult {
        re: re_iv.mid(),
        im: im_iv.mid(),
        term_count,
        rounding_error_bound: err * (1.0 + 1e-9) + 1e-300,
        working_precision: wp,
    })
}

/// Sum of e(phase(n)) over an explicit argument list (unit weights).
pub fn exp_sum_over(phase: &dyn PhaseFn, args: &[u64], precision_bits: u32) -> Result<ExpSumResult> {
    if args.len() as u64 > RANGE_CAP {
        return Err(Error::RangeTooLong(args.len() as u64));
    }
    let terms: Vec<WeightedTerm> = args.iter().copied().map(WeightedTerm::unit).collect();
    sum_weighted(terms, phase, precision_bits)
}

/// Complete exponential sum over an inclusive integer range.
pub fn exp_sum(
    phase: &dyn PhaseFn,
    range: std::ops::RangeInclusive<u64>,
    precision_bits: u32,
) -> Result<ExpSumResult> {
    let (lo, hi) = (*range.start(), *range.end());
    if hi >= lo && hi - lo + 1 > RANGE_CAP {
        return Err(Error::RangeTooLong(hi - lo + 1));
    }
    let terms: Vec<WeightedTerm> = (lo..=hi).map(WeightedTerm::unit).collect();
    sum_weighted(terms, phase, precision_bits)
}

/// Sum of e(y f(p)) over primes p <= x.
pub fn prime_exp_sum(
    f: &PseudoPolynomial,
    y: &Real,
    x: u64,
    primes: &PrimeTable,
) -> Result<ExpSumResult> {
    prime_exp_sum_wp(f, y, x, primes, DEFAULT_WORKING_PRECISION)
}

pub fn prime_exp_sum_wp(
    f: &PseudoPolynomial,
    y: &Real,
    x: u64,
    primes: &PrimeTable,
    wp: u32,
) -> Result<ExpSumResult> {
    if primes.limit() < x {
        return Err(Error::PrimeTableTooSmall { limit: primes.limit(), need: x });
    }
    let phase = ScaledPolyPhase { f, y };
    let terms: Vec<WeightedTerm> = primes.up_to(x).iter().copied().map(WeightedTerm::unit).collect();
    sum_weighted(terms, &phase, wp)
}

/// Von Mangoldt-weighted sum over n <= x: only prime powers contribute, so
/// the enumeration runs over p^a <= x with certified log p weights.
pub fn vonmangoldt_exp_sum(f: &PseudoPolynomial, y: &Real, x: u64) -> Result<ExpSumResult> {
    vonmangoldt_exp_sum_wp(f, y, x, DEFAULT_WORKING_PRECISION)
}

pub fn vonmangoldt_exp_sum_wp(
    f: &PseudoPolynomial,
    y: &Real,
    x: u64,
    wp: u32,
) -> Result<ExpSumResult> {
    if x > 100_000_000 {
        return Err(Error::RangeTooLong(x));
    }
    if x < 2 {
        return Ok(ExpSumResult {
            re: Dyadic::zero(),
            im: Dyadic::zero(),
            term_count: 0,
            rounding_error_bound: 0.0,
            working_precision: wp,
        });
    }
    let table = crate::primes::sieve(x)?;
    let mut terms = Vec::new();
    for &p in table.primes() {
        let w = ln_dyadic(&Dyadic::from_i64(p as i64), wp + 8);
        let mut pk = p;
        loop {
            terms.push(WeightedTerm { n: pk, w_re: w.clone(), w_im: Interval::zero() });
            match pk.checked_mul(p) {
                Some(next) if next <= x => pk = next,
                _ => break,
            }
        }
    }
    terms.sort_by_key(|t| t.n);
    let phase = ScaledPolyPhase { f, y };
    sum_weighted(terms, &phase, wp)
}

/// Coefficient sequences for bilinear sums.
#[derive(Clone)]
pub enum CoeffSeq {
    Ones,
    D3,
    D4,
    Custom(Arc<dyn Fn(u64) -> Complex64 + Send + Sync>),
}

impl std::fmt::Debug for CoeffSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffSeq::Ones => write!(f, "Ones"),
            CoeffSeq::D3 => write!(f, "D3"),
            CoeffSeq::D4 => write!(f, "D4"),
            CoeffSeq::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl CoeffSeq {
    fn at(&self, n: u64) -> Complex64 {
        match self {
            CoeffSeq::Ones => Complex64::new(1.0, 0.0),
            CoeffSeq::D3 => Complex64::new(divisor_count_k(n, 3) as f64, 0.0),
            CoeffSeq::D4 => Complex64::new(divisor_count_k(n, 4) as f64, 0.0),
            CoeffSeq::Custom(f) => f(n),
        }
    }
}

/// Specification of a bilinear Type I or Type II sum.
#[derive(Debug, Clone)]
pub struct BilinearSpec {
    pub family: SumFamily,
    pub m: u64,
    /// inner range size; only the Type II family constrains it
    pub n: u64,
    pub x: u64,
    pub a: CoeffSeq,
    pub b: CoeffSeq,
    pub y: Real,
    pub f: PseudoPolynomial,
    /// when set, |a_m| <= d4(m) is spot-checked on a sample
    pub divisor_bounded: bool,
    pub working_precision: u32,
}

impl BilinearSpec {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.x == 0 {
            return Err(Error::SpecInvalid("M and X must be positive".into()));
        }
        if self.family == SumFamily::TypeII {
            if self.n == 0 {
                return Err(Error::SpecInvalid("Type II needs N > 0".into()));
            }
            let prod = self.m as u128 * self.n as u128;
            if prod * 4 < self.x as u128 || prod > 4 * self.x as u128 {
                return Err(Error::SpecInvalid(format!(
                    "MN = {} not comparable to X = {}",
                    prod, self.x
                )));
            }
        }
        if self.divisor_bounded {
            let step = (self.m / 37).max(1);
            let mut m = 1u64;
            while m <= self.m {
                if self.a.at(m).norm() > divisor_count_k(m, 4) as f64 + 1e-9 {
                    return Err(Error::SpecInvalid(format!(
                        "|a_{}| exceeds d4 bound",
                        m
                    )));
                }
                m += step;
            }
        }
        Ok(())
    }
}

/// The double sum over the spec's (m, n) lattice with mn ~ X enforced
/// termwise, i.e. X/2 < mn <= X.
pub fn bilinear_sum(spec: &BilinearSpec) -> Result<ExpSumResult> {
    spec.validate()?;
    let x = spec.x;
    let mut terms: Vec<WeightedTerm> = Vec::new();
    let push_pair = |m: u64, n: u64, terms: &mut Vec<WeightedTerm>| {
        let w = spec.a.at(m) * if spec.family == SumFamily::TypeII {
            spec.b.at(n)
        } else {
            Complex64::new(1.0, 0.0)
        };
        terms.push(WeightedTerm::from_f64(m * n, w));
    };
    match spec.family {
        SumFamily::TypeI => {
            for m in 1..=spec.m {
                // X/2 < mn <= X
                let n_hi = x / m;
                let n_lo = x / (2 * m); // n > n_lo
                for n in (n_lo + 1)..=n_hi {
                    if m as u128 * n as u128 * 2 > x as u128 {
                        push_pair(m, n, &mut terms);
                    }
                }
            }
        }
        SumFamily::TypeII => {
            let m_lo = spec.m / 2; // m > m_lo
            for m in (m_lo + 1)..=spec.m {
                let n_hi = (x / m).min(spec.n);
                let n_lo = (x / (2 * m)).max(spec.n / 2);
                for n in (n_lo + 1)..=n_hi {
                    if m as u128 * n as u128 * 2 > x as u128 && m * n <= x {
                        push_pair(m, n, &mut terms);
                    }
                }
            }
        }
    }
    if terms.len() as u64 > RANGE_CAP {
        return Err(Error::RangeTooLong(terms.len() as u64));
    }
    terms.sort_by_key(|t| (t.n, t.n)); // deterministic order by argument
    let phase = ScaledPolyPhase { f: &spec.f, y: &spec.y };
    sum_weighted(terms, &phase, spec.working_precision)
}

/// Empirical-vs-theoretical comparison record.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub empirical: f64,
    pub theoretical: f64,
    pub ratio: f64,
    pub bound_name: String,
    pub parameters: Vec<(String, String)>,
    /// set only for inequalities that are theorems (the Weyl-van der Corput
    /// check); bound comparisons with unknown implied constants leave it None
    pub holds: Option<bool>,
}

/// Explicit-constant Weyl-van der Corput inequality:
/// |sum z_n|^2 <= (N+H)/(H+1) * sum_{|h|<=H} (1-|h|/(H+1)) |C(h)|
/// with C(h) the shifted correlation over indices staying in range.
pub fn weyl_vdc_check(z: &[Complex64], h_window: u64) -> Result<BoundReport> {
    let n = z.len() as u64;
    if h_window < 1 || h_window > n {
        return Err(Error::HOutOfRange { h: h_window, n });
    }
    let lhs = {
        let s: Complex64 = z.iter().sum();
        s.norm_sqr()
    };
    let hp1 = (h_window + 1) as f64;
    let mut corr_sum = 0.0;
    for h in -(h_window as i64)..=(h_window as i64) {
        let weight = 1.0 - (h.unsigned_abs() as f64) / hp1;
        let mut c = Complex64::new(0.0, 0.0);
        for i in 0..z.len() as i64 {
            let j = i + h;
            if j >= 0 && (j as usize) < z.len() {
                c += z[j as usize] * z[i as usize].conj();
            }
        }
        corr_sum += weight * c.norm();
    }
    let rhs = ((n + h_window) as f64 / hp1) * corr_sum;
    // allow f64 rounding slack on the equality cases
    let holds = lhs <= rhs + (lhs.max(rhs)) * 1e-9 + 1e-12;
    Ok(BoundReport {
        empirical: lhs,
        theoretical: rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
        bound_name: "weyl_van_der_corput".into(),
        parameters: vec![
            ("N".into(), n.to_string()),
            ("H".into(), h_window.to_string()),
        ],
        holds: Some(holds),
    })
}

/// Derivative-test bound: C X^(1+eps) [ (F X^-j)^(1/(j(j-1)))
/// + X^(-1/(j(j-1))) + F^(-2/(j^2(j-1))) ].
pub fn hb_derivative_bound(f_size: f64, x: f64, j: u32, eps: f64, c: f64) -> Result<f64> {
    if j < 3 || f_size <= 0.0 || x < 2.0 || c <= 0.0 {
        return Err(Error::BadParameters(format!(
            "need j >= 3, F > 0, X >= 2, C > 0; got j={}, F={}, X={}, C={}",
            j, f_size, x, c
        )));
    }
    let jj = (j as f64) * (j as f64 - 1.0);
    let t1 = (f_size * x.powf(-(j as f64))).powf(1.0 / jj);
    let t2 = x.powf(-1.0 / jj);
    let t3 = f_size.powf(-2.0 / ((j as f64) * (j as f64) * (j as f64 - 1.0)));
    Ok(c * x.powf(1.0 + eps) * (t1 + t2 + t3))
}

/// Rational-approximation bound: C X^(1+eps) (1/q + 1/X + q/X^j)^(1/(k(k-1))).
pub fn bv_bound(q: f64, x: f64, j: u32, k: u32, eps: f64, c: f64) -> Result<f64> {
    if j < 2 || j > k || k < 3 || q < 1.0 || c <= 0.0 || x < 2.0 {
        return Err(Error::BadParameters(format!(
            "need 2 <= j <= k, k >= 3, q >= 1; got j={}, k={}, q={}",
            j, k, q
        )));
    }
    let inner = 1.0 / q + 1.0 / x + q / x.powi(j as i32);
    Ok(c * x.powf(1.0 + eps) * inner.powf(1.0 / ((k as f64) * (k as f64 - 1.0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStrategy {
    /// rational approximation of the j-th phase coefficient
    BourgainVinogradov,
    /// derivative test with F = y X^theta
    HeathBrownDerivative,
}

/// Run the empirical sum and the named theoretical bound side by side.
///
/// The (a, q) or (F, j) inputs are chosen the way the estimates choose them:
/// classify the frequency, select j, Dirichlet-approximate the coefficient.
/// The ratio is reported, never asserted: the implied constants are unknown.
pub fn bound_comparison(
    f: &PseudoPolynomial,
    y_exponent: &BigRational,
    x: u64,
    strategy: BoundStrategy,
    primes: &PrimeTable,
    eps: f64,
    c_const: f64,
) -> Result<BoundReport> {
    let parts = split(f);
    let k = parts.poly_degree().ok_or(Error::MissingPolynomialPart)?;
    let theta = parts.pseudo_degree().ok_or(Error::MissingPseudoPart)?.clone();
    let bundle = crate::exponents::compute_bundle(k, &theta)?;
    let y = Real::pow(
        BigRational::from_integer(BigInt::from(x)),
        y_exponent.clone(),
    )?;
    let empirical = prime_exp_sum(f, &y, x, primes)?;
    let xf = x as f64;
    let mut params: Vec<(String, String)> = vec![
        ("k".into(), k.to_string()),
        ("theta".into(), theta.to_string()),
        ("y_exponent".into(), y_exponent.to_string()),
        ("X".into(), x.to_string()),
        ("eps".into(), eps.to_string()),
        ("C".into(), c_const.to_string()),
    ];
    let (theoretical, name) = match strategy {
        BoundStrategy::BourgainVinogradov => {
            let regime = classify_frequency(y_exponent, &bundle, SumFamily::TypeII)?;
            let tau = bundle.tau_type_ii_low.clone();
            let j = select_j(&regime, &tau, &bundle)?;
            let coeff = parts
                .poly_part
                .terms()
                .iter()
                .find(|t| t.exponent().to_integer().to_i64() == Some(j))
                .ok_or_else(|| {
                    Error::BadParameters(format!("polynomial has no x^{} coefficient", j))
                })?
                .coefficient()
                .clone();
            let alpha = y.clone().scale(coeff);
            let q_window = BigRational::from_integer(BigInt::from(x)).pow((j - 1) as i32);
            let approx = crate::dioph::dirichlet_approx(&alpha, &q_window)?;
            let qf = crate::pseudopoly::rational_to_f64(&BigRational::from_integer(approx.q.clone()));
            params.push(("j".into(), j.to_string()));
            params.push(("a".into(), approx.a.to_string()));
            params.push(("q".into(), approx.q.to_string()));
            (bv_bound(qf, xf, j as u32, k as u32, eps, c_const)?, "bourgain_vinogradov")
        }
        BoundStrategy::HeathBrownDerivative => {
            let regime = classify_frequency(y_exponent, &bundle, SumFamily::TypeI)?;
            let alpha = &regime.alpha;
            let j = {
                let c = (BigRational::new(BigInt::from(5), BigInt::from(2)) * alpha)
                    .ceil()
                    .to_integer()
                    .to_i64()
                    .unwrap_or(i64::MAX)
                    + 2;
                c.max(k + 1)
            };
            let f_size = xf.powf(crate::pseudopoly::rational_to_f64(alpha));
            params.push(("j".into(), j.to_string()));
            params.push(("F".into(), format!("{:e}", f_size)));
            (
                hb_derivative_bound(f_size, xf, j as u32, eps, c_const)?,
                "heath_brown_derivative",
            )
        }
    };
    let emp = empirical.magnitude();
    Ok(BoundReport {
        empirical: emp,
        theoretical,
        ratio: if theoretical > 0.0 { emp / theoretical } else { f64::NAN },
        bound_name: name.into(),
        parameters: params,
        holds: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn linear_phase(num: i64, den: i64) -> impl Fn(u64, u32) -> Result<Interval> + Sync {
        move |n: u64, _bits: u32| {
            Ok(Interval::from_rational(
                &(rat(num, den) * BigRational::from_integer(BigInt::from(n))),
                256,
            ))
        }
    }

    #[test]
    fn half_integer_phases_cancel_exactly() {
        let r = exp_sum(&linear_phase(1, 2), 1..=4, 128).unwrap();
        assert_eq!(r.value(), Complex64::new(0.0, 0.0));
        assert_eq!(r.rounding_error_bound, 1e-300); // exact dyadic path
        assert_eq!(r.term_count, 4);
    }

    #[test]
    fn zero_phase_counts_terms() {
        let r = exp_sum(&linear_phase(0, 1), 1..=100, 128).unwrap();
        assert_eq!(r.value(), Complex64::new(100.0, 0.0));
    }

    #[test]
    fn complete_residues_cancel() {
        let r = exp_sum(&linear_phase(1, 10), 1..=10, 128).unwrap();
        assert!(r.magnitude() <= 2.0 * r.rounding_error_bound + 1e-30);
    }

    #[test]
    fn trivial_bound_holds() {
        for (num, den, n) in [(1i64, 7i64, 50u64), (3, 11, 64), (5, 13, 100)] {
            let r = exp_sum(&linear_phase(num, den), 1..=n, 96).unwrap();
            assert!(r.magnitude() <= n as f64 + r.rounding_error_bound);
            assert!(r.rounding_error_bound <= n as f64 * (2.0f64).powi(-(96 - 8)));
        }
    }

    #[test]
    fn integer_phase_shift_is_invisible() {
        // adding n to the phase must not change the value (e is 1-periodic)
        let base = linear_phase(1, 7);
        let shifted = move |n: u64, bits: u32| {
            let t = base(n, bits)?;
            Ok(t.sub_bigint(&BigInt::from(-(n as i64))))
        };
        let a = exp_sum(&linear_phase(1, 7), 1..=60, 128).unwrap();
        let b = exp_sum(&shifted, 1..=60, 128).unwrap();
        let d = (a.value() - b.value()).norm();
        assert!(d <= a.rounding_error_bound + b.rounding_error_bound);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let y = Real::from_rational(rat(1, 1));
        let primes = sieve(2000).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| prime_exp_sum(&f, &y, 2000, &primes).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.re_rational(), b.re_rational());
        assert_eq!(a.im_rational(), b.im_rational());
        let c = run(4);
        assert_eq!(c.re_rational(), b.re_rational());
    }

    #[test]
    fn prime_sum_zero_frequency_is_prime_count() {
        let primes = sieve(30).unwrap();
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let r = prime_exp_sum(&f, &Real::zero(), 30, &primes).unwrap();
        assert_eq!(r.value(), Complex64::new(10.0, 0.0));
        assert_eq!(r.rounding_error_bound, 1e-300);
    }

    #[test]
    fn prime_sum_integer_phases() {
        let primes = sieve(100).unwrap();
        let f = PseudoPolynomial::parse("1*x^1", false).unwrap();
        let r = prime_exp_sum(&f, &Real::from_rational(rat(1, 1)), 100, &primes).unwrap();
        assert_eq!(r.value(), Complex64::new(25.0, 0.0)); // pi(100) = 25
    }

    #[test]
    fn prime_table_too_small() {
        let primes = sieve(10).unwrap();
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        assert!(matches!(
            prime_exp_sum(&f, &Real::zero(), 100, &primes),
            Err(Error::PrimeTableTooSmall { .. })
        ));
    }

    #[test]
    fn vonmangoldt_mass_at_zero_frequency() {
        // psi(10) = 3 ln 2 + 2 ln 3 + ln 5 + ln 7 = 7.8320141805054690...
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let r = vonmangoldt_exp_sum(&f, &Real::zero(), 10).unwrap();
        assert!((r.value().re - 7.832014180505469).abs() < 1e-12);
        assert_eq!(r.value().im, 0.0);
        assert_eq!(r.term_count, 7); // 2,3,4,5,7,8,9

        let empty = vonmangoldt_exp_sum(&f, &Real::zero(), 1).unwrap();
        assert_eq!(empty.term_count, 0);
        assert_eq!(empty.value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vonmangoldt_decomposes_into_primes_plus_higher_powers() {
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let y = Real::from_rational(rat(1, 1));
        let x = 500u64;
        let vm = vonmangoldt_exp_sum(&f, &y, x).unwrap();
        // prime part with the same weights, then higher powers term by term
        let table = sieve(x).unwrap();
        let phase = ScaledPolyPhase { f: &f, y: &y };
        let mut expect = Complex64::new(0.0, 0.0);
        for &p in table.primes() {
            let w = ln_dyadic(&Dyadic::from_i64(p as i64), 160).to_f64_mid();
            let mut pk = p;
            while pk <= x {
                let t = phase.phase(pk, 400).unwrap();
                let (c, s) = e2pi(&t, 150);
                expect += Complex64::new(w * c.to_f64_mid(), w * s.to_f64_mid());
                match pk.checked_mul(p) {
                    Some(nx) if nx <= x => pk = nx,
                    _ => break,
                }
            }
        }
        assert!((vm.value() - expect).norm() < 1e-9);
    }

    #[test]
    fn bilinear_lattice_count() {
        // a = b = 1, y = 0, M = 4, X = 16: pairs with 8 < mn <= 16, m <= 4
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let spec = BilinearSpec {
            family: SumFamily::TypeI,
            m: 4,
            n: 0,
            x: 16,
            a: CoeffSeq::Ones,
            b: CoeffSeq::Ones,
            y: Real::zero(),
            f,
            divisor_bounded: false,
            working_precision: 96,
        };
        let r = bilinear_sum(&spec).unwrap();
        assert_eq!(r.value(), Complex64::new(17.0, 0.0));
    }

    #[test]
    fn bilinear_divisor_bound_check() {
        let f = PseudoPolynomial::parse("1*x^3/2", false).unwrap();
        let mut spec = BilinearSpec {
            family: SumFamily::TypeI,
            m: 16,
            n: 0,
            x: 64,
            a: CoeffSeq::D3,
            b: CoeffSeq::Ones,
            y: Real::zero(),
            f,
            divisor_bounded: true,
            working_precision: 96,
        };
        let r = bilinear_sum(&spec).unwrap();
        // magnitude <= sum of weights (triangle inequality)
        let mut weight_sum = 0.0;
        for m in 1..=16u64 {
            let n_hi = 64 / m;
            let n_lo = 32 / m;
            for n in (n_lo + 1)..=n_hi {
                if 2 * m * n > 64 {
                    weight_sum += divisor_count_k(m, 3) as f64;
                }
            }
        }
        assert!(r.magnitude() <= weight_sum + 1e-9);

        // a custom sequence violating the d4 bound is rejected
        spec.a = CoeffSeq::Custom(Arc::new(|_| Complex64::new(1e6, 0.0)));
        assert!(matches!(bilinear_sum(&spec), Err(Error::SpecInvalid(_))));
    }

    #[test]
    fn weyl_vdc_hand_value() {
        let z = vec![Complex64::new(1.0, 0.0); 4];
        let r = weyl_vdc_check(&z, 1).unwrap();
        assert_eq!(r.empirical, 16.0);
        assert!((r.theoretical - 17.5).abs() < 1e-12);
        assert_eq!(r.holds, Some(true));

        let alt: Vec<Complex64> = (0..4).map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let r = weyl_vdc_check(&alt, 1).unwrap();
        assert_eq!(r.empirical, 0.0);
        assert_eq!(r.holds, Some(true));

        assert!(matches!(weyl_vdc_check(&z, 5), Err(Error::HOutOfRange { .. })));
    }

    #[test]
    fn weyl_vdc_random_sequences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=64usize);
            let h = rng.gen_range(1..=(n as u64).min(16));
            let z: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let r = weyl_vdc_check(&z, h).unwrap();
            assert_eq!(r.holds, Some(true), "violation at N={}, H={}", n, h);
        }
    }

    #[test]
    fn bound_formula_worked_values() {
        // independent high-precision evaluation through the interval engine
        let ten = Interval::from_i64(10);
        let oracle_hb = {
            // 1e4 (10^(-2/3) + 10^(-2/3) + 10^(-8/9))
            let a = ten.pow_ratio_sig(&rat(-2, 3), 120).unwrap();
            let b = ten.pow_ratio_sig(&rat(-8, 9), 120).unwrap();
            let sum = a.add_exact(&a).add_exact(&b);
            sum.mul_sig(&Interval::from_i64(10_000), 120).to_f64_mid()
        };
        let v = hb_derivative_bound(1e8, 1e4, 3, 0.0, 1.0).unwrap();
        assert!((v - oracle_hb).abs() / v < 1e-12, "{} vs oracle {}", v, oracle_hb);
        assert!((v - 5600.4).abs() < 0.1);
        // doubling C doubles
        let v2 = hb_derivative_bound(1e8, 1e4, 3, 0.0, 2.0).unwrap();
        assert!((v2 - 2.0 * v).abs() < 1e-9);
        // F = X^j collapses the first term to X^(1+eps) scale
        let v3 = hb_derivative_bound(1e12, 1e4, 3, 0.0, 1.0).unwrap();
        assert!(v3 > 1e4);

        // (q=50, X=1000, j=2, k=3): 1000 * 0.02105^(1/6) ~ 525.5
        let oracle_bv = {
            let inner = Interval::from_rational(&rat(2105, 100_000), 160);
            let root = inner.pow_ratio_sig(&rat(1, 6), 120).unwrap();
            root.mul_sig(&Interval::from_i64(1000), 120).to_f64_mid()
        };
        let b = bv_bound(50.0, 1000.0, 2, 3, 0.0, 1.0).unwrap();
        assert!((b - oracle_bv).abs() / b < 1e-12, "{} vs oracle {}", b, oracle_bv);
        assert!((b - 525.5).abs() < 0.5);
        // q = 1: the 1/q term dominates, bound >= X
        let b1 = bv_bound(1.0, 1000.0, 2, 3, 0.0, 1.0).unwrap();
        assert!(b1 >= 1000.0);

        assert!(hb_derivative_bound(1e8, 1e4, 2, 0.0, 1.0).is_err());
        assert!(bv_bound(50.0, 1000.0, 4, 3, 0.0, 1.0).is_err());
    }

    #[test]
    fn bound_comparison_smoke() {
        // toy f = x^3 + x^(5/2), X = 10^3, y = X^-2 (frequency below -theta)
        let f = PseudoPolynomial::parse("1*x^1 + 1*x^2 + 1*x^3 + 1*x^5/2", false).unwrap();
        let primes = sieve(1000).unwrap();
        let rep = bound_comparison(
            &f,
            &rat(-2, 1),
            1000,
            BoundStrategy::BourgainVinogradov,
            &primes,
            0.0,
            1.0,
        )
        .unwrap();
        assert!(rep.theoretical > 0.0);
        assert!(rep.empirical > 0.0);
        assert!(rep.parameters.iter().any(|(k, _)| k == "j"));
        assert!(rep.holds.is_none());
    }
}
