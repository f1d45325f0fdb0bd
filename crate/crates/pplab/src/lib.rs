//! pplab: a desk-scale lab for fractional parts of pseudo-polynomials at
//! prime arguments.
//!
//! The crate is organised around the objects it computes:
//!
//! - [`arith`] - certified dyadic interval arithmetic, constants, trig.
//! - [`pseudopoly`] - pseudo-polynomials, the polynomial/pseudo split,
//!   property (F), certified evaluation and floors.
//! - [`exponents`] - the exact-rational exponent bundle (tau1, rho_star,
//!   rho, the c split, the B threshold), frequency-regime classification
//!   and differentiation-order selection.
//! - [`primes`] - sieve, von Mangoldt, generalized divisor counts, and
//!   Heath-Brown decomposition parameters.
//! - [`dioph`] - continued fractions, Dirichlet approximation, and the
//!   sampled verification of the four Diophantine claims.
//! - [`expsums`] - exponential sums (complete, prime, von Mangoldt,
//!   bilinear), the Weyl-van der Corput check, and the bound formulas.
//! - [`experiments`] - the minimum fractional-part search, large-sieve
//!   witnesses, the divisibility search, decay fitting, and the
//!   end-to-end sanity check.
//! - [`cli`] - config parsing and subcommand dispatch for the `pplab` binary.
//!
//! Run `cargo run --example <name>` for guided tours of each capability, or
//! `cargo run --bin pplab -- --help` for the command-line interface.

pub mod arith;
pub mod cli;
pub mod exponents;
pub mod experiments;
pub mod expsums;
pub mod primes;
pub mod pseudopoly;
pub mod dioph;
pub mod error;

pub use error::{Error, Result};
