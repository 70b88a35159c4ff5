//! Quantum state tomography from time-continuous weak measurement of a single
//! observable.
//!
//! The crate simulates stochastic measurement records for one- and two-qubit
//! systems driven by fixed Rabi and coupling controls, and reconstructs the
//! unknown initial state from a batch of records:
//!
//! - [`qcore`]: density matrices, the Pauli-string basis, fidelity, trace
//!   distance and the closed-form two-qubit positivity test.
//! - [`dynamics`]: Hamiltonians, Kraus propagation of conditioned states,
//!   record sampling, record likelihoods and the `CTOM1` record file format.
//! - [`controls`]: commutator tables and reachability of state components
//!   into the measured observable, plus the named control settings.
//! - [`fisher`]: weak-limit Fisher information and the Cramér–Rao floor.
//! - [`estimation`]: Bayesian mean / most-probable estimators over candidate
//!   grids, constrained maximum likelihood by differential evolution, and a
//!   linear-inversion baseline.
//! - [`sampling`]: Hilbert–Schmidt random states, Werner-type mixtures and
//!   fixed test-state catalogs.
//! - [`cli`]: the `qtomo` command-line front end.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controls;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod qcore;
pub mod sampling;

pub use error::{Error, Result};
