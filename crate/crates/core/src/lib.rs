//! Probabilistic models of prime counting.
//!
//! The crate pairs an exact segmented sieve with four binomial-style models of
//! `π(x)` and `π(x; k, l)`: their moments, deviation bands, Monte Carlo
//! simulation, and a set of numeric checks on the conjectures they suggest.

pub mod analytic;
pub mod conjectures;
pub mod error;
pub mod models;
pub mod montecarlo;
pub mod primes;

pub use error::{Error, Result};
