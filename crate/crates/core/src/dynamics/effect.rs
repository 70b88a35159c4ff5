//! Record effects: `P(R|ρ) = Tr[𝓜_R† 𝓜_R ρ]` is linear in `ρ`, so each
//! record reduces to a weight vector over Pauli coefficients. Evaluating a
//! candidate then costs one dot product per record, with no trajectory.

use rayon::prelude::*;

use super::kraus::{measurement_weights, KrausPropagator};
use super::record::MeasurementRecord;
use super::control::{ControlSetting, MeasurementConfig};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{basis_element, DensityMatrix, PauliCoefficients};
use crate::{Error, Result};

fn compose(prop: &KrausPropagator, record: &MeasurementRecord) -> (CMatrix, f64) {
    let dim = prop.dim();
    let half = dim / 2;
    let mut k = linalg::identity(dim);
    let mut log_scale = 0.0;
    for &r in &record.readouts {
        let (plus, minus) = measurement_weights(r, prop.config());
        for i in 0..dim {
            let w = if i < half { plus } else { minus };
            k.row_mut(i).iter_mut().for_each(|z| *z *= w);
        }
        k = prop.unitary() * k;
        let nu = linalg::frobenius_norm(&k);
        k.unscale_mut(nu);
        log_scale += 2.0 * nu.ln();
    }
    (k, log_scale)
}

/// The composed Kraus operator `𝓜_R = U M(r_n) ⋯ U M(r_1)`, returned as
/// `(K, s)` with `𝓜_R = e^{s/2} K` and `‖K‖_F = 1`.
pub fn kraus_product(record: &MeasurementRecord) -> Result<(CMatrix, f64)> {
    let prop = KrausPropagator::new(&record.control, &record.config)?;
    Ok(compose(&prop, record))
}

/// `P(R|ρ) = exp(log_scale) · Σ_i weights[i] c_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordEffect {
    pub dim: usize,
    pub log_scale: f64,
    pub weights: Vec<f64>,
}

impl RecordEffect {
    pub fn from_record(record: &MeasurementRecord) -> Result<Self> {
        let prop = KrausPropagator::new(&record.control, &record.config)?;
        Ok(Self::with_propagator(&prop, record))
    }

    fn with_propagator(prop: &KrausPropagator, record: &MeasurementRecord) -> Self {
        let dim = prop.dim();
        let (k, mut log_scale) = compose(prop, record);
        let mut effect = k.adjoint() * k;
        let tr = linalg::trace(&effect).re;
        effect.unscale_mut(tr);
        log_scale += tr.ln();
        let weights = (0..dim * dim)
            .map(|i| linalg::hs_inner(basis_element(dim, i).expect("dim"), &effect).re / dim as f64)
            .collect();
        Self {
            dim,
            log_scale,
            weights,
        }
    }

    /// `Tr(Ê ρ)` for the normalized effect `Ê`.
    #[inline]
    pub fn overlap(&self, coeffs: &[f64]) -> f64 {
        self.weights.iter().zip(coeffs).map(|(w, c)| w * c).sum()
    }

    pub fn log_likelihood(&self, coeffs: &PauliCoefficients) -> f64 {
        let p = self.overlap(&coeffs.coeffs);
        if p > 0.0 {
            self.log_scale + p.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Effects of a batch of records that share configuration and control.
#[derive(Clone, Debug)]
pub struct EffectBatch {
    dim: usize,
    config: Option<(MeasurementConfig, ControlSetting)>,
    total_log_scale: f64,
    weights: Vec<f64>,
}

impl EffectBatch {
    pub fn new(records: &[MeasurementRecord]) -> Result<Self> {
        let Some(first) = records.first() else {
            return Ok(Self {
                dim: 0,
                config: None,
                total_log_scale: 0.0,
                weights: Vec::new(),
            });
        };
        if records.iter().any(|r| !r.compatible_with(first)) {
            return Err(Error::ConfigMismatch);
        }
        let prop = KrausPropagator::new(&first.control, &first.config)?;
        let effects: Vec<RecordEffect> = records
            .par_iter()
            .map(|r| RecordEffect::with_propagator(&prop, r))
            .collect();
        let total_log_scale = effects.iter().map(|e| e.log_scale).sum();
        let weights = effects.into_iter().flat_map(|e| e.weights).collect();
        Ok(Self {
            dim: first.dim(),
            config: Some((first.config, first.control)),
            total_log_scale,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.weights.len() / (self.dim * self.dim)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of the records, or `None` for an empty batch.
    pub fn dim(&self) -> Option<usize> {
        (self.dim != 0).then_some(self.dim)
    }

    pub fn config(&self) -> Option<&(MeasurementConfig, ControlSetting)> {
        self.config.as_ref()
    }

    /// `Σ_j ln P(R_j | c)` for a full coefficient vector `c` (with `c_0 = 1`).
    /// `-∞` if any record has non-positive probability under `c`.
    pub fn log_likelihood(&self, coeffs: &[f64]) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let n = self.dim * self.dim;
        debug_assert_eq!(coeffs.len(), n);
        let mut total = 0.0;
        for w in self.weights.chunks_exact(n) {
            let p: f64 = w.iter().zip(coeffs).map(|(a, b)| a * b).sum();
            if !(p > 0.0) {
                return f64::NEG_INFINITY;
            }
            total += p.ln();
        }
        total + self.total_log_scale
    }

    /// Score vector `∂/∂c_i ln P` summed over records, for `i ≥ 1`.
    pub fn score(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.dim * self.dim;
        let mut out = vec![0.0; n.saturating_sub(1)];
        for w in self.weights.chunks_exact(n) {
            let p: f64 = w.iter().zip(coeffs).map(|(a, b)| a * b).sum();
            for (o, wi) in out.iter_mut().zip(&w[1..]) {
                *o += wi / p;
            }
        }
        out
    }

    pub fn log_likelihood_state(&self, rho: &DensityMatrix) -> Result<f64> {
        if self.dim != 0 && rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim));
        }
        let c = crate::qcore::to_pauli(rho)?;
        Ok(self.log_likelihood(&c.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{record_log_likelihood, simulate_batch, RabiDrive};
    use crate::qcore::to_pauli;

    #[test]
    fn effect_matches_chain_rule() {
        let cfg = MeasurementConfig::new(0.01, 60, 0.4).unwrap();
        let ctrl = ControlSetting::single(RabiDrive::new(0.7, 0.7, 4.7));
        let truth = DensityMatrix::from_bloch(0.5, -0.2, 0.1).unwrap();
        let recs = simulate_batch(&truth, &ctrl, &cfg, 5, 3).unwrap();
        let probe = DensityMatrix::from_bloch(-0.3, 0.4, 0.6).unwrap();
        let c = to_pauli(&probe).unwrap();
        for rec in &recs {
            let eff = RecordEffect::from_record(rec).unwrap();
            let chain = record_log_likelihood(&probe, rec).unwrap();
            assert!((eff.log_likelihood(&c) - chain).abs() < 1e-9 * chain.abs());
        }
    }

    #[test]
    fn empty_batch_is_zero() {
        let b = EffectBatch::new(&[]).unwrap();
        assert!(b.is_empty());
        assert_eq!(b.log_likelihood(&[1.0, 0.0, 0.0, 0.0]), 0.0);
    }
}
