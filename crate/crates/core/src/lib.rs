//! Prime-like integer subsets and the generalized Goldbach property.
//!
//! * [`sieve`]: segmented prime sieve, `π(n)`, on-disk prime cache.
//! * [`subsets`]: primes, shifted primes and `±1`-jittered primes, with their
//!   deviation from `π(n)`.
//! * [`verifier`]: witness search, `A_n`/`B_n` distance sets, sharded range
//!   verification and the shift correspondence check.
//! * [`probmodel`]: log-space probabilities and bounds of the random-subset
//!   failure model.
//! * [`montecarlo`]: sampling oracle for that model.

// `!(x > lo)` guards are meant to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod montecarlo;
pub mod probmodel;
pub mod rng;
pub mod sieve;
pub mod subsets;
pub mod verifier;

pub use error::{Error, Result};
pub use montecarlo::{mc_disjoint, mc_disjoint_sharded, McEstimate};
pub use probmodel::{
    alpha_approx, alpha_solve, alpha_tail_bound, exact_disjoint_prob, inequality_crossover,
    lemma_bound, sqrt_bound, tail_sum, AlphaSolution, BoundForm, LogProb, TailSum,
};
pub use sieve::{pi_approx, sieve_primes, sieve_primes_with, PrimeTable, SieveConfig};
pub use subsets::{
    build_subset, similarity_deviation, IntegerSubset, SimilarityReport, SubsetKind, SubsetSpec,
};
pub use verifier::{
    build_ab, goldbach_witness, verify_range, verify_range_sharded, verify_shift_theorem,
    DistanceSets, VerificationReport, Witness,
};
