use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::de::{maximize, DeConfig};
use super::report::{EstimationReport, Method};
use crate::dynamics::{EffectBatch, MeasurementRecord};
use crate::qcore::linalg::hermitian_apply;
use crate::qcore::positivity::positivity_residuals;
use crate::qcore::{from_pauli, DensityMatrix, PauliCoefficients};
use crate::{Error, Result};

const INIT_RANGE: f64 = 1.732_050_807_568_877_2; // √3

/// Exact physicality of a coefficient vector (with `c_0 = 1`): the Bloch
/// ball for one qubit, the three closed-form conditions for two.
fn physical(coeffs: &[f64]) -> bool {
    match coeffs.len() {
        4 => coeffs[1..].iter().map(|x| x * x).sum::<f64>() <= 1.0,
        16 => positivity_residuals(coeffs).residuals.iter().all(|r| *r >= 0.0),
        _ => false,
    }
}

fn with_identity(x: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(x.len() + 1);
    c.push(1.0);
    c.extend_from_slice(x);
    c
}

/// Uniform draw in the `±√3` cube, pulled radially into the physical set:
/// `x = s_max · v^{1/n} · u` with `s_max` the largest feasible scale of `u`.
fn feasible_start(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(-INIT_RANGE..INIT_RANGE)).collect();
    let scaled = |s: f64| -> Vec<f64> { u.iter().map(|x| s * x).collect() };
    let (mut lo, mut hi) = (0.0, 1.0);
    if physical(&with_identity(&scaled(1.0))) {
        lo = 1.0;
    } else {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if physical(&with_identity(&scaled(mid))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let v: f64 = rng.random::<f64>();
    scaled(lo * v.powf(1.0 / n as f64))
}

/// Maximum-likelihood state over the physical set, by differential evolution
/// on the non-identity Pauli coefficients with rejection of unphysical
/// candidates. Works for one or two qubits.
pub fn mle(records: &[MeasurementRecord], de: &DeConfig, dim: usize) -> Result<EstimationReport> {
    let start = Instant::now();
    crate::qcore::check_dim(dim)?;
    let batch = EffectBatch::new(records)?;
    if let Some(d) = batch.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch(dim, d));
        }
    }
    if batch.is_empty() {
        let mut report = EstimationReport::from_state(Method::Mle, &DensityMatrix::maximally_mixed(dim)?, 0)?;
        report.no_data = true;
        return Ok(report);
    }
    let n = dim * dim - 1;
    let fitness = |x: &[f64]| {
        let c = with_identity(x);
        if physical(&c) {
            batch.log_likelihood(&c)
        } else {
            f64::NEG_INFINITY
        }
    };
    let result = maximize(n, fitness, |rng| feasible_start(rng, n), de)?;
    assert!(result.value.is_finite(), "the maximally mixed state is always feasible");

    let coeffs = PauliCoefficients::from_non_identity(dim, &result.best)?;
    let mut rho = from_pauli(&coeffs);
    if !rho.is_valid() {
        // Boundary optimum: clear round-off negativity.
        let clipped = hermitian_apply(rho.matrix(), |l| l.max(0.0).into());
        let tr = crate::qcore::linalg::trace(&clipped).re;
        rho = DensityMatrix::new(clipped.unscale(tr))?;
    }
    let mut report = EstimationReport::from_state(Method::Mle, &rho, batch.len())?;
    report.log_likelihood = Some(result.value);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Two-qubit maximum-likelihood reconstruction. An empty batch yields the
/// maximally mixed state with `no_data` set.
pub fn mle_two_qubit(records: &[MeasurementRecord], de: &DeConfig) -> Result<EstimationReport> {
    mle(records, de, 4)
}
