//! Certification of geometric ergodicity for Markov kernels by drift and
//! hitting-time conditions.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be reused
//! anywhere; IO, configuration, and the command-line driver live in the
//! companion `mcergo` crate.
//!
//! Layout:
//! - [`kernels`]: finite transition matrices, lazy and birth-death
//!   constructions, grid Metropolis-Hastings and Gibbs kernels, the
//!   continuous ball walk, and the three dominated restrictions.
//! - [`analysis`]: stationary laws, total variation, mixing times, expected
//!   and maximum hitting times, pseudo-minorization witnesses.
//! - [`montecarlo`]: seeded trajectory simulation, hitting-time estimates,
//!   and the identity coupling of a chain with its restriction.
//! - [`certify`]: drift checks, compatibility radii, the contraction solve,
//!   and the assembled `M(x)(1-rho)^t` bound.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod certify;
mod error;
pub mod kernels;
pub mod linalg;
pub mod montecarlo;
pub mod tol;

pub use error::{Error, Result};
pub use kernels::{FiniteKernel, StateSet};
