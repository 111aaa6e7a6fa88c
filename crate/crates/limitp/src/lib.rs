//! Densities and prime-sum constants for tuples of shifted k-free numbers.
//!
//! The central object is the indicator
//!
//! ```text
//! f(n) = kfree_{r_1}(n + alpha_1) * ... * kfree_{r_s}(n + alpha_s)
//! ```
//!
//! where `kfree_r` is 1 exactly when no prime power p^r divides its argument.
//! The crate computes, exactly where possible:
//!
//! * per-prime local data for f — forbidden-class counts, class survivor
//!   densities and pair correlations — in arbitrary-precision rational
//!   arithmetic ([`local`]);
//! * the natural density of the tuple set and the constant governing the
//!   count of primes p with f(p) = 1, as truncated Euler products carrying
//!   rigorous truncation-tail bounds, plus residue-class densities, Gaussian
//!   sums and singular-series partial sums ([`global`]);
//! * sieve-based measurements of everything above at desk scale
//!   ([`empirical`]), on top of segmented sieves and elementary
//!   multiplicative functions ([`arith`]) and a general congruence solver
//!   ([`congruence`]).
//!
//! All computation is deterministic; identical inputs reproduce identical
//! bits. Tables and indicators are immutable after construction and safe to
//! share across threads.

pub mod arith;
pub mod congruence;
pub mod empirical;
pub mod error;
pub mod global;
pub mod local;
pub mod tuple;

pub use error::{Error, Result};
pub use tuple::TupleConfig;
