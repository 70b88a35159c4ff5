use std::time::Instant;

use rayon::prelude::*;

use super::grid::{log_sum_exp, CandidateGrid};
use super::report::{EstimationReport, Method};
use crate::dynamics::{record::log_likelihood_with, EffectBatch, KrausPropagator, MeasurementRecord};
use crate::qcore::{from_pauli, PauliCoefficients};
use crate::qcore::DensityMatrix;
use crate::{Error, Result};

/// `Σ_j ln P(R_j | ρ)` by propagating the conditioned state through every
/// record. `0` for an empty batch, `-∞` if some record is impossible.
pub fn batch_log_likelihood(candidate: &DensityMatrix, records: &[MeasurementRecord]) -> Result<f64> {
    let Some(first) = records.first() else {
        return Ok(0.0);
    };
    if records.iter().any(|r| !r.compatible_with(first)) {
        return Err(Error::ConfigMismatch);
    }
    if candidate.dim() != first.dim() {
        return Err(Error::DimensionMismatch(candidate.dim(), first.dim()));
    }
    let prop = KrausPropagator::new(&first.control, &first.config)?;
    let terms: Vec<f64> = records
        .par_iter()
        .map(|r| log_likelihood_with(&prop, candidate, r))
        .collect();
    Ok(terms.iter().sum())
}

/// Normalized posterior weights over a candidate grid.
#[derive(Clone, Debug)]
pub struct Posterior<'g> {
    grid: &'g CandidateGrid,
    log_weights: Vec<f64>,
    records_used: usize,
}

impl<'g> Posterior<'g> {
    pub fn grid(&self) -> &'g CandidateGrid {
        self.grid
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }

    pub fn records_used(&self) -> usize {
        self.records_used
    }
}

pub fn posterior<'g>(grid: &'g CandidateGrid, records: &[MeasurementRecord]) -> Result<Posterior<'g>> {
    let batch = EffectBatch::new(records)?;
    posterior_from_effects(grid, &batch)
}

/// Posterior from precomputed record effects; lets several grids or
/// estimators share one pass over the records.
pub fn posterior_from_effects<'g>(grid: &'g CandidateGrid, batch: &EffectBatch) -> Result<Posterior<'g>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("candidate grid must not be empty".into()));
    }
    if let Some(d) = batch.dim() {
        if d != grid.dim() {
            return Err(Error::DimensionMismatch(grid.dim(), d));
        }
    }
    let mut log_weights: Vec<f64> = grid
        .coefficients()
        .par_iter()
        .zip(grid.log_prior().par_iter())
        .map(|(c, lp)| lp + batch.log_likelihood(&c.coeffs))
        .collect();
    let z = log_sum_exp(&log_weights);
    if !z.is_finite() {
        return Err(Error::InconsistentData);
    }
    log_weights.iter_mut().for_each(|l| *l -= z);
    Ok(Posterior {
        grid,
        log_weights,
        records_used: batch.len(),
    })
}

/// Posterior mean `Σ w_i ρ_i` and the Bayesian covariance of the
/// non-identity coefficients.
pub fn bme(post: &Posterior<'_>) -> Result<EstimationReport> {
    let start = Instant::now();
    let coeffs = post.grid.coefficients();
    let n = coeffs[0].coeffs.len();
    let weights = post.weights();
    let mut mean = vec![0.0; n];
    let mut second = vec![vec![0.0; n - 1]; n - 1];
    for (w, c) in weights.iter().zip(coeffs) {
        if *w == 0.0 {
            continue;
        }
        for (m, x) in mean.iter_mut().zip(&c.coeffs) {
            *m += w * x;
        }
        let v = c.non_identity();
        for i in 0..n - 1 {
            for j in i..n - 1 {
                second[i][j] += w * v[i] * v[j];
            }
        }
    }
    mean[0] = 1.0;
    let mut cov = vec![vec![0.0; n - 1]; n - 1];
    for i in 0..n - 1 {
        for j in i..n - 1 {
            let v = second[i][j] - mean[i + 1] * mean[j + 1];
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    let estimate = PauliCoefficients::new(post.grid.dim(), mean)?;
    let rho = from_pauli(&estimate);
    let mut report = EstimationReport::from_state(Method::Bme, &rho, post.records_used)?;
    report.estimate = estimate;
    report.valid = rho.is_valid();
    report.bayes_cov = Some(cov);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Index of the most probable candidate; ties go to the lowest index.
pub fn mpbe_index(post: &Posterior<'_>) -> usize {
    let mut best = 0;
    for (i, l) in post.log_weights.iter().enumerate() {
        if *l > post.log_weights[best] {
            best = i;
        }
    }
    best
}

/// Candidate with the largest posterior weight.
pub fn mpbe(post: &Posterior<'_>) -> Result<EstimationReport> {
    let start = Instant::now();
    let best = mpbe_index(post);
    let mut report = EstimationReport::from_state(Method::Mpbe, &post.grid.states()[best], post.records_used)?;
    report.estimate = post.grid.coefficients()[best].clone();
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
