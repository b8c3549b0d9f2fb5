//! A desk-scale numerical laboratory for multiplicative arithmetic
//! functions.
//!
//! The crate evaluates multiplicative functions from their prime-power
//! values ([`multiplicative`], backed by the sieve in [`sieve`]), accumulates
//! their conditionally convergent partial sums with compensated summation
//! ([`series`]), evaluates the Dirichlet eta and Riemann zeta functions and
//! locates critical-line zeros ([`zeta`]), and runs the MO-condition
//! machinery — certified Euler factors, the vanishing-sum and
//! nonvanishing-factor checks, the prime-power distance between functions,
//! perturbation/closeness-transfer experiments, and weighted decay scans
//! ([`verify`]). The built-in function families live in [`catalog`].
//!
//! With the default `parallel` feature the data-parallel loops (bulk
//! sieving, segment value generation, per-prime factor work) run on rayon;
//! reductions keep a fixed block structure, so results are identical with
//! the feature disabled or under any thread count.

pub mod catalog;
pub mod error;
pub mod multiplicative;
pub mod numeric;
pub mod series;
pub mod sieve;
pub mod verify;
pub mod zeta;

pub(crate) mod parallel;
pub(crate) mod stream;

pub use error::{Error, Result};
pub use multiplicative::{eval_at, sieve_values, sieve_values_seq, MultiplicativeSpec};
#[cfg(feature = "parallel")]
pub use multiplicative::sieve_values_par;
pub use numeric::ComplexValue;
pub use series::{compensated_sum, partial_sums, PartialSumSeries};
pub use sieve::{Factorization, SpfTable};
