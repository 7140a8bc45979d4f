//! Identifiability analysis and economic Hamiltonian identification for
//! spin-1/2 chains probed through a single qubit.
//!
//! * [`spin_models`] turns exchange-chain Hamiltonians into compressed linear
//!   models `(A, B, C)` and carries a density-matrix oracle for small chains.
//! * [`linsys`] holds the realization-theory machinery.
//! * [`identifiability`] decides whether the chain parameters are determined
//!   by the probe data and produces checkable counterexamples when not.
//! * [`estimator`] recovers parameters from sampled traces with a truncated
//!   Taylor-series least-squares fit.

// `!(x <= limit)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod identifiability;
pub mod linsys;
pub mod pauli;
pub mod rng;
pub mod serde_rows;
pub mod spin_models;

pub use error::{Error, Result};
pub use linsys::LinearSystem;
pub use pauli::{Pauli, PauliString, Phase};
pub use spin_models::{Family, HamiltonianSpec, Measurement};
