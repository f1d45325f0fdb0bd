//! Crate-wide error type with the exit-code classes used by the CLI.

use thiserror::Error;

/// Everything that can go wrong across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    // ---- pseudo-polynomial construction / evaluation ----
    #[error("term list is empty")]
    EmptyTermList,
    #[error("duplicate exponent {0}")]
    DuplicateExponent(String),
    #[error("coefficient must be positive, got {0}")]
    NonPositiveCoefficient(String),
    #[error("exponent must be >= 1, got {0}")]
    ExponentBelowOne(String),
    #[error("strict pseudo-polynomial needs at least one non-integral exponent")]
    NoNonIntegralExponent,
    #[error("polynomial part is empty")]
    MissingPolynomialPart,
    #[error("pseudo part is empty")]
    MissingPseudoPart,
    #[error("requested precision {0} bits is not representable on this platform")]
    PrecisionUnrepresentable(u64),
    #[error("floor undecided at precision cap {cap} bits for argument {arg}")]
    AmbiguousFloor { arg: String, cap: u32 },
    #[error("argument outside domain: {0}")]
    DomainError(String),

    // ---- exponents ----
    #[error("degenerate degrees: k = {0} (need k >= 2)")]
    DegenerateDegrees(i64),
    #[error("frequency exponent {got} outside admissible window [{lo}, {hi}]")]
    OutOfRange { got: String, lo: String, hi: String },
    #[error("selected index j = {j} falls outside the claim range 2..={k}")]
    JOutOfClaimRange { j: i64, k: i64 },

    // ---- primes / decomposition ----
    #[error("sieve limit {0} exceeds the 10^9 desk-scale cap")]
    LimitTooLarge(u64),

    // ---- Diophantine ----
    #[error("certified precision exhausted while {0}")]
    PrecisionExhausted(String),
    #[error("claim parameter outside its stated window: {0}")]
    WindowViolation(String),

    // ---- exponential sums ----
    #[error("summation range of {0} terms exceeds the 10^9 cap")]
    RangeTooLong(u64),
    #[error("prime table covers only {limit}, need {need}")]
    PrimeTableTooSmall { limit: u64, need: u64 },
    #[error("invalid bilinear spec: {0}")]
    SpecInvalid(String),
    #[error("shift window H = {h} outside 1..={n}")]
    HOutOfRange { h: u64, n: u64 },
    #[error("bad bound parameters: {0}")]
    BadParameters(String),

    // ---- experiments ----
    #[error("large-sieve hypothesis violated at index {index}: ||x|| = {norm} < 1/{m}")]
    HypothesisViolated { index: usize, norm: f64, m: u64 },
    #[error("no large-sieve witness m <= {0} found; this contradicts the lemma and signals a bug")]
    WitnessNotFound(u64),
    #[error("no prime p <= {limit} with floor(f(p)) divisible by {m}")]
    NotFoundWithinLimit { m: u64, limit: u64 },
    #[error("decay fit needs >= 3 points with positive spread, got {0}")]
    DegenerateFit(String),
    #[error("assertion failed: {0}")]
    AssertionFailed(String),

    // ---- CLI ----
    #[error("unknown flag or config key: {0}")]
    UnknownFlag(String),
    #[error("malformed polynomial: {0}")]
    MalformedPolynomial(String),
    #[error("malformed number: {0}")]
    MalformedNumber(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code class: 2 assertion, 3 precision, 4 I/O, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            AssertionFailed(_) | WitnessNotFound(_) => 2,
            PrecisionExhausted(_) | AmbiguousFloor { .. } | PrecisionUnrepresentable(_) => 3,
            Io(_) => 4,
            _ => 1,
        }
    }
}
