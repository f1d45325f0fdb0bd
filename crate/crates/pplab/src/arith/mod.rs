//! Certified arbitrary-precision arithmetic: dyadic fixed point, directed
//! intervals, constants, trig, and exact real expressions.

pub mod consts;
pub mod dyadic;
pub mod interval;
pub mod real;
pub mod trig;

pub use consts::{e_const, ln2, ln_dyadic, ln_interval, phi, pi};
pub use dyadic::Dyadic;
pub use interval::{check_precision, dyadic_to_rational, Interval, MAX_PRECISION_BITS};
pub use real::{parse_rational, Real};
pub use trig::e2pi;
