//! Exact and certified computations around unsieved integers.
//!
//! The crate counts integers up to `x` all of whose prime factors lie in a
//! prescribed set of primes, compares those counts with the classical
//! inclusion-exclusion, Hall and Dickman benchmarks, and provides exact or
//! error-barred verifiers for three equivalent additive statements: one about
//! products of primes in a window, one about weighted integer sums, and one
//! about sums of reals drawn from an open subset of `(0, 1)` with measure
//! `dt/t`.
//!
//! Everything here is `no_std` with `alloc`; IO, timing, report formats and
//! the command line live in the companion `unsieved` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod comb;
pub mod continuous;
pub mod count;
pub mod dickman;
mod error;
pub mod exact;
pub mod float;
pub mod predictions;
pub mod primes;
pub mod rng;
mod segment;

pub use error::{Error, Result};
pub use primes::{Descriptor, PrimeSet};

/// Euler–Mascheroni constant, to the digits the benchmarks quote.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// `exp(EULER_GAMMA)`, fixed for Hall-type comparisons.
pub const EXP_GAMMA: f64 = 1.781_072_417_990_198;

/// Ceilings shared by the sieve-based operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Largest `x` accepted by [`primes::primes_up_to`].
    pub prime_ceiling: u64,
    /// Largest `x` (or interval end) accepted by the counting sieves.
    pub sieve_ceiling: u64,
    /// Node budget of every depth-first enumeration.
    pub dfs_nodes: u64,
    /// Entries per sieve segment.
    pub segment_len: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            prime_ceiling: 2_000_000_000,
            sieve_ceiling: 1_000_000_000,
            dfs_nodes: 100_000_000,
            segment_len: 1 << 20,
        }
    }
}
