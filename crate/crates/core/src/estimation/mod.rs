//! Reconstruction of the initial state from a batch of records.
//!
//! - Bayesian mean (BME) and most-probable (MPBE) estimators over a finite
//!   candidate grid, computed in log space.
//! - Maximum likelihood over the full physical set by differential evolution.
//! - Linear inversion from projective-style tallies, as a baseline.

mod bayes;
pub mod de;
mod grid;
mod linear;
mod mle;
mod report;

pub use bayes::{batch_log_likelihood, bme, mpbe, mpbe_index, posterior, posterior_from_effects, Posterior};
pub use de::DeConfig;
pub use grid::{build_grid, log_sum_exp, CandidateGrid, GridGeometry, GridKind};
pub use linear::{linear_inversion, strong_measurement, synthesize_tallies, LinearInversion, Tally};
pub use mle::{mle, mle_two_qubit};
pub use report::{EstimationReport, Method};
