//! Exact arithmetic kernels for checking the finite computations behind the
//! modularity of the Hulek-Verrill quotient threefold at `phi = -1/7`.
//!
//! Everything here is pure and allocation-only: finite fields and quadratic
//! characters, the weighted character-sum point counter, Frobenius trace
//! splitting, naive elliptic-curve point counts, the mod-5 monodromy group
//! computations, residual character elimination, Picard-Fuchs recurrence
//! recovery, and the toric boundary count. Parallel orchestration,
//! checkpoint files, database access and the command-line front end live in
//! the `hvcheck` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod charelim;
pub mod elliptic;
pub mod field;
pub mod monodromy;
pub mod picardfuchs;
pub mod pointcount;
pub mod zeta;

mod arith;

pub use arith::{is_prime, primes_up_to};
