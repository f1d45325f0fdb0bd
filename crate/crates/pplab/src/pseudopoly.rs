//! Pseudo-polynomials f = sum of c * x^theta with positive coefficients and
//! exponents >= 1, at least one of them non-integral.
//!
//! Exponents are exact rationals, so integrality and the property-(F)
//! comparisons are decidable, and evaluation at integer arguments can detect
//! exactly-rational values (perfect powers) before falling back to certified
//! interval evaluation.

use crate::arith::{dyadic_to_rational, Interval};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Default escalation cap for floor certification, overridable per call and
/// via `PPLAB_PRECISION_CAP` in the CLI.
pub const DEFAULT_PRECISION_CAP: u32 = 16384;

/// One monomial `coefficient * x^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    coefficient: BigRational,
    exponent: BigRational,
}

impl Term {
    pub fn new(coefficient: BigRational, exponent: BigRational) -> Result<Term> {
        if !coefficient.is_positive() {
            return Err(Error::NonPositiveCoefficient(coefficient.to_string()));
        }
        if exponent < BigRational::one() {
            return Err(Error::ExponentBelowOne(exponent.to_string()));
        }
        Ok(Term { coefficient, exponent })
    }

    pub fn from_i64(coefficient: i64, exponent_num: i64, exponent_den: i64) -> Result<Term> {
        Term::new(
            BigRational::from_integer(BigInt::from(coefficient)),
            BigRational::new(BigInt::from(exponent_num), BigInt::from(exponent_den)),
        )
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn exponent(&self) -> &BigRational {
        &self.exponent
    }

    pub fn is_integral(&self) -> bool {
        self.exponent.is_integer()
    }
}

/// A pseudo-polynomial: terms ordered by strictly increasing exponent.
///
/// `strict` construction additionally demands a non-integral exponent; the
/// relaxation flag admits pure polynomials for testing and toy runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoPolynomial {
    terms: Vec<Term>,
}

/// f = P + phi: integral-exponent terms and the rest. Either part may be
/// empty; the term multiset is exactly the original one.
#[derive(Debug, Clone)]
pub struct PolySplit {
    pub poly_part: PseudoPolynomial,
    pub pseudo_part: PseudoPolynomial,
}

/// The four conditions of property (F), individually reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyFCondition {
    /// k >= 12
    MinPolyDegree,
    /// theta > 4
    PseudoDegreeAboveFour,
    /// k > theta
    PolyDegreeDominates,
    /// P is full: every coefficient of x^1 .. x^k present
    PolyFull,
}

impl fmt::Display for PropertyFCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyFCondition::MinPolyDegree => write!(f, "k >= 12"),
            PropertyFCondition::PseudoDegreeAboveFour => write!(f, "theta > 4"),
            PropertyFCondition::PolyDegreeDominates => write!(f, "k > theta"),
            PropertyFCondition::PolyFull => write!(f, "P is full"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyFReport {
    pub k: i64,
    pub theta: BigRational,
    pub is_full: bool,
    pub holds: bool,
    pub violated_conditions: Vec<PropertyFCondition>,
}

/// A certified enclosure of f(x): the true value lies in [lower, upper] and
/// the width is at most 2^(4 - precision_bits) * f(x).
#[derive(Debug, Clone)]
pub struct CertifiedInterval {
    pub lower: BigRational,
    pub upper: BigRational,
    pub precision_bits: u32,
}

impl CertifiedInterval {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn midpoint_f64(&self) -> f64 {
        let two = BigRational::from_integer(BigInt::from(2));
        rational_to_f64(&((&self.lower + &self.upper) / two))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lower <= v && v <= &self.upper
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // convert through a dyadic enclosure so huge values don't saturate early
    Interval::from_rational(r, 96).to_f64_mid()
}

/// Validating constructor for pseudo-polynomials.
pub fn build_pseudo(terms: Vec<Term>, strict: bool) -> Result<PseudoPolynomial> {
    if terms.is_empty() {
        return Err(Error::EmptyTermList);
    }
    let mut terms = terms;
    terms.sort_by(|a, b| a.exponent.cmp(&b.exponent));
    for w in terms.windows(2) {
        if w[0].exponent == w[1].exponent {
            return Err(Error::DuplicateExponent(w[0].exponent.to_string()));
        }
    }
    if strict && terms.iter().all(|t| t.is_integral()) {
        return Err(Error::NoNonIntegralExponent);
    }
    Ok(PseudoPolynomial { terms })
}

impl PseudoPolynomial {
    fn from_sorted(terms: Vec<Term>) -> PseudoPolynomial {
        PseudoPolynomial { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// deg(f): the largest exponent.
    pub fn degree(&self) -> Option<&BigRational> {
        self.terms.last().map(|t| t.exponent())
    }

    /// The full polynomial x + x^2 + ... + x^k plus the given extra terms;
    /// convenient for property-(F) instances.
    pub fn full_poly_plus(k: i64, extra: Vec<Term>) -> Result<PseudoPolynomial> {
        let mut terms = Vec::with_capacity(k as usize + extra.len());
        for j in 1..=k {
            terms.push(Term::from_i64(1, j, 1)?);
        }
        terms.extend(extra);
        build_pseudo(terms, false)
    }

    /// Parse the text format: `coeff*x^expo` monomials joined by `+`, e.g.
    /// `1*x^12 + 3/2*x^9/2`.
    pub fn parse(text: &str, strict: bool) -> Result<PseudoPolynomial> {
        let mut terms = Vec::new();
        for raw in text.split('+') {
            let mono = raw.trim();
            if mono.is_empty() {
                return Err(Error::MalformedPolynomial(format!("empty monomial in {:?}", text)));
            }
            let (coeff, expo) = mono
                .split_once("*x^")
                .ok_or_else(|| Error::MalformedPolynomial(format!("expected coeff*x^expo, got {:?}", mono)))?;
            let c = crate::arith::parse_rational(coeff)
                .map_err(|_| Error::MalformedPolynomial(format!("bad coefficient {:?}", coeff)))?;
            let e = crate::arith::parse_rational(expo)
                .map_err(|_| Error::MalformedPolynomial(format!("bad exponent {:?}", expo)))?;
            terms.push(Term::new(c, e)?);
        }
        build_pseudo(terms, strict)
    }

    pub fn to_text(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{}*x^{}", t.coefficient, t.exponent))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for PseudoPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Split into polynomial part (integral exponents) and pseudo part.
pub fn split(f: &PseudoPolynomial) -> PolySplit {
    let (poly, pseudo): (Vec<Term>, Vec<Term>) =
        f.terms.iter().cloned().partition(|t| t.is_integral());
    PolySplit {
        poly_part: PseudoPolynomial::from_sorted(poly),
        pseudo_part: PseudoPolynomial::from_sorted(pseudo),
    }
}

impl PolySplit {
    /// k = deg(P) as an integer.
    pub fn poly_degree(&self) -> Option<i64> {
        self.poly_part
            .degree()
            .and_then(|d| d.to_integer().to_i64())
    }

    /// theta = deg(phi).
    pub fn pseudo_degree(&self) -> Option<&BigRational> {
        self.pseudo_part.degree()
    }

    /// P is full when x^1 .. x^k all appear (coefficients are positive by
    /// construction, so presence is the whole test).
    pub fn poly_is_full(&self) -> bool {
        match self.poly_degree() {
            None => false,
            Some(k) => {
                let mut want: i64 = 1;
                for t in self.poly_part.terms() {
                    match t.exponent().to_integer().to_i64() {
                        Some(j) if j == want => want += 1,
                        _ => return false,
                    }
                }
                want == k + 1
            }
        }
    }
}

/// Evaluate the four conditions of property (F) exactly.
pub fn check_property_f(f: &PseudoPolynomial) -> Result<PropertyFReport> {
    let parts = split(f);
    if parts.poly_part.is_empty() {
        return Err(Error::MissingPolynomialPart);
    }
    if parts.pseudo_part.is_empty() {
        return Err(Error::MissingPseudoPart);
    }
    let k = parts.poly_degree().expect("nonempty poly part");
    let theta = parts.pseudo_degree().expect("nonempty pseudo part").clone();
    let is_full = parts.poly_is_full();
    let four = BigRational::from_integer(BigInt::from(4));
    let theta_vs_k = BigRational::from_integer(BigInt::from(k)) > theta;
    let mut violated = Vec::new();
    if k < 12 {
        violated.push(PropertyFCondition::MinPolyDegree);
    }
    if theta <= four {
        violated.push(PropertyFCondition::PseudoDegreeAboveFour);
    }
    if !theta_vs_k {
        violated.push(PropertyFCondition::PolyDegreeDominates);
    }
    if !is_full {
        violated.push(PropertyFCondition::PolyFull);
    }
    Ok(PropertyFReport {
        k,
        theta,
        is_full,
        holds: violated.is_empty(),
        violated_conditions: violated,
    })
}

/// f(x) as an exact rational, when every power is rational (x a perfect
/// power as required by each exponent's denominator).
pub fn eval_exact_rational(f: &PseudoPolynomial, x: &BigRational) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for t in f.terms() {
        let p = crate::arith::Real::pow(x.clone(), t.exponent().clone()).ok()?;
        let r = p.as_rational()?;
        acc += t.coefficient() * r;
    }
    Some(acc)
}

fn exact_log2_floor(x: &BigRational) -> i64 {
    debug_assert!(x.is_positive());
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    let mut e = n - d; // 2^e <= x < 2^(e+2)
    // adjust down if 2^e > x
    loop {
        let pow = if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
        };
        if &pow > x {
            e -= 1;
        } else if &pow * BigRational::from_integer(BigInt::from(2)) <= *x {
            e += 1;
        } else {
            return e;
        }
    }
}

/// Certified enclosure of f(x) with relative width at most
/// 2^(4 - precision_bits).
///
/// Intervals produced at doubled precision are nested inside the coarser
/// ones (rounding grids refine), which the property tests rely on.
pub fn eval_certified(
    f: &PseudoPolynomial,
    x: &BigRational,
    precision_bits: u32,
) -> Result<CertifiedInterval> {
    if !x.is_positive() {
        return Err(Error::DomainError(format!("evaluation point must be positive, got {}", x)));
    }
    if precision_bits < 64 {
        return Err(Error::BadParameters("precision_bits must be >= 64".into()));
    }
    crate::arith::check_precision(precision_bits)?;
    let iv = eval_interval(f, x, precision_bits)?;
    Ok(CertifiedInterval {
        lower: dyadic_to_rational(&iv.lo),
        upper: dyadic_to_rational(&iv.hi),
        precision_bits,
    })
}

/// Shared relative-precision evaluation core.
pub(crate) fn eval_interval(f: &PseudoPolynomial, x: &BigRational, bits: u32) -> Result<Interval> {
    let nterms = f.terms().len() as u32;
    let prec = bits + 8 + 32 - nterms.leading_zeros(); // + ceil_log2(terms) headroom
    // enclose x with `prec` significant bits regardless of its magnitude
    let xmag = exact_log2_floor(x);
    let x_iv = Interval::from_rational(x, (prec as i64 - xmag.min(0)) as u32 + 4);
    let mut sum = Interval::zero();
    for t in f.terms() {
        let powed = x_iv.pow_ratio_sig(t.exponent(), prec)?;
        let cmag = exact_log2_floor(t.coefficient());
        let c_iv = Interval::from_rational(t.coefficient(), (prec as i64 - cmag.min(0)) as u32 + 4);
        sum = sum.add_exact(&c_iv.mul_sig(&powed, prec));
    }
    Ok(sum.round_sig(bits + 5))
}

/// Certified floor of f(x) at a positive integer x.
///
/// Exact-rational detection runs first (so exact integers like
/// f = x^2 + x^(5/2) at x = 4 never enter the escalation loop); otherwise
/// precision doubles from 64 bits until the enclosure excludes every integer
/// or the cap is reached.
pub fn floor_certified(
    f: &PseudoPolynomial,
    x: &BigInt,
    precision_cap_bits: u32,
) -> Result<BigInt> {
    floor_certified_with_bits(f, x, precision_cap_bits).map(|(n, _)| n)
}

/// Same as [`floor_certified`] but also reports the precision that decided.
pub fn floor_certified_with_bits(
    f: &PseudoPolynomial,
    x: &BigInt,
    precision_cap_bits: u32,
) -> Result<(BigInt, u32)> {
    if !x.is_positive() {
        return Err(Error::DomainError(format!("floor argument must be >= 1, got {}", x)));
    }
    let xr = BigRational::from_integer(x.clone());
    if let Some(exact) = eval_exact_rational(f, &xr) {
        return Ok((exact.floor().to_integer(), 0));
    }
    let mut bits: u32 = 64;
    loop {
        crate::arith::check_precision(bits)?;
        let iv = eval_interval(f, &xr, bits)?;
        if let Some(n) = iv.decided_floor() {
            return Ok((n, bits));
        }
        if bits >= precision_cap_bits {
            return Err(Error::AmbiguousFloor { arg: x.to_string(), cap: precision_cap_bits });
        }
        bits = (bits * 2).min(precision_cap_bits);
    }
}

/// The Weyl-differenced value f_h(u, v) = f(u(v+h)) - f(uv), certified to
/// one unit in the last requested place.
pub fn diff_value(
    f: &PseudoPolynomial,
    u: &BigRational,
    v: &BigRational,
    h: &BigRational,
    precision_bits: u32,
) -> Result<CertifiedInterval> {
    if !u.is_positive() || !v.is_positive() {
        return Err(Error::DomainError("u and v must be positive".into()));
    }
    let vh = v + h;
    if !vh.is_positive() {
        return Err(Error::DomainError(format!("v + h must be positive, got {}", vh)));
    }
    if h.is_zero() {
        // identical arguments: exactly zero, no cancellation error
        return Ok(CertifiedInterval {
            lower: BigRational::zero(),
            upper: BigRational::zero(),
            precision_bits,
        });
    }
    let a = u * &vh;
    let b = u * v;
    // absolute target: difference of two relative enclosures, so evaluate
    // both operands tight enough that the cancellation keeps the contract
    let mut bits = precision_bits.max(64);
    loop {
        crate::arith::check_precision(bits)?;
        let ia = eval_interval(f, &a, bits)?;
        let ib = eval_interval(f, &b, bits)?;
        let d = ia.add_exact(&ib.neg());
        if d.width_at_most(-(precision_bits as i64)) {
            return Ok(CertifiedInterval {
                lower: dyadic_to_rational(&d.lo),
                upper: dyadic_to_rational(&d.hi),
                precision_bits,
            });
        }
        bits = bits.saturating_mul(2);
    }
}
