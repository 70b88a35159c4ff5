//! Linear-inversion baseline from projective-style outcome tallies.
//!
//! Tallies can be synthesized from the continuous-measurement simulator: the
//! state is rotated so the requested Pauli string maps onto the measured
//! observable, recorded under a strong undriven measurement, and each record
//! is thresholded on the sign of its mean readout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate_batch, ControlSetting, MeasurementConfig, RabiDrive};
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::{basis_element, basis_label, check_dim, measured_observable, DensityMatrix, PauliCoefficients};
use crate::{Error, Result};

/// Outcome counts for one observable, keyed by eigenvalue.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub observable: String,
    pub outcomes: Vec<(f64, u64)>,
}

impl Tally {
    pub fn new(observable: impl Into<String>, outcomes: Vec<(f64, u64)>) -> Self {
        Self {
            observable: observable.into(),
            outcomes,
        }
    }

    pub fn total(&self) -> u64 {
        self.outcomes.iter().map(|(_, n)| n).sum()
    }
}

/// Linear-inversion estimate; not necessarily a physical state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearInversion {
    pub dim: usize,
    /// Coefficients including `c_0 = 1`.
    pub coeffs: Vec<f64>,
    pub valid: bool,
}

impl LinearInversion {
    /// The estimate as coefficients (no positivity guarantee).
    pub fn coefficients(&self) -> Result<PauliCoefficients> {
        PauliCoefficients::new(self.dim, self.coeffs.clone())
    }
}

/// `č_i = Σ_j n_ij λ_ij / Σ_j n_ij` for every non-identity observable.
pub fn linear_inversion(dim: usize, tallies: &[Tally]) -> Result<LinearInversion> {
    check_dim(dim)?;
    let by_label: BTreeMap<String, &Tally> = tallies
        .iter()
        .map(|t| {
            let k = crate::qcore::label_index(dim, &t.observable)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown observable {:?}", t.observable)))?;
            Ok((basis_label(dim, k), t))
        })
        .collect::<Result<_>>()?;
    let mut coeffs = vec![1.0];
    for k in 1..dim * dim {
        let label = basis_label(dim, k);
        let t = by_label.get(&label).ok_or_else(|| Error::MissingObservable(label.clone()))?;
        let total = t.total();
        if total == 0 {
            return Err(Error::MissingObservable(label));
        }
        let sum: f64 = t.outcomes.iter().map(|(l, n)| l * *n as f64).sum();
        coeffs.push(sum / total as f64);
    }
    let valid = crate::qcore::from_pauli(&PauliCoefficients::new(dim, coeffs.clone())?).is_valid();
    Ok(LinearInversion { dim, coeffs, valid })
}

/// Default strong-measurement configuration for tally synthesis: `T = 10τ`,
/// so the mean readout of a record has standard deviation `√(τ/T) ≈ 0.32`
/// and the sign is wrong with probability below 1e-3.
pub fn strong_measurement() -> MeasurementConfig {
    MeasurementConfig {
        dt: 0.001,
        n_steps: 100,
        tau: 0.01,
    }
}

/// Unitary `W` with `W P W† = Z_meas` for a Pauli string `P` (both have
/// eigenvalues ±1 with equal multiplicity).
fn rotation_onto_measured(dim: usize, k: usize) -> Result<crate::qcore::CMatrix> {
    let (_, vp) = hermitian_eigen(basis_element(dim, k)?);
    let (_, vz) = hermitian_eigen(measured_observable(dim)?);
    Ok(vz * vp.adjoint())
}

/// Simulated ±1 tallies for every non-identity Pauli string, `shots` records
/// each. Record seeds derive from `seed` and the observable index.
pub fn synthesize_tallies(
    truth: &DensityMatrix,
    shots: usize,
    config: &MeasurementConfig,
    seed: u64,
) -> Result<Vec<Tally>> {
    let dim = truth.dim();
    check_dim(dim)?;
    let control = if dim == 2 {
        ControlSetting::single(RabiDrive::off())
    } else {
        ControlSetting::two_qubit(RabiDrive::off(), RabiDrive::off(), 0.0)
    };
    (1..dim * dim)
        .map(|k| {
            let w = rotation_onto_measured(dim, k)?;
            let rotated = truth.conjugate(&w);
            let records = simulate_batch(&rotated, &control, config, shots, crate::dynamics::record_seed(seed, k as u64))?;
            let plus = records.iter().filter(|r| r.mean_readout() >= 0.0).count() as u64;
            Ok(Tally::new(
                basis_label(dim, k),
                vec![(1.0, plus), (-1.0, shots as u64 - plus)],
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::to_pauli;

    fn tallies(plus: u64, minus: u64) -> Vec<Tally> {
        ["X", "Y", "Z"]
            .iter()
            .map(|l| Tally::new(*l, vec![(1.0, plus), (-1.0, minus)]))
            .collect()
    }

    #[test]
    fn arithmetic() {
        let li = linear_inversion(2, &tallies(10, 0)).unwrap();
        assert_eq!(li.coeffs, vec![1.0, 1.0, 1.0, 1.0]);
        assert!(!li.valid);
        let li = linear_inversion(2, &tallies(75, 25)).unwrap();
        assert_eq!(&li.coeffs[1..], &[0.5, 0.5, 0.5]);
        assert!(li.valid);
    }

    #[test]
    fn near_pure_counts_are_unphysical() {
        let li = linear_inversion(2, &tallies(999, 1)).unwrap();
        let norm = li.coeffs[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm > 1.0);
        assert!(!li.valid);
    }

    #[test]
    fn missing_observable() {
        let mut t = tallies(1, 1);
        t.pop();
        assert!(matches!(linear_inversion(2, &t), Err(Error::MissingObservable(l)) if l == "Z"));
        let mut t = tallies(1, 1);
        t[0].outcomes.clear();
        assert!(matches!(linear_inversion(2, &t), Err(Error::MissingObservable(l)) if l == "X"));
    }

    #[test]
    fn rotation_maps_pauli_onto_measured() {
        for dim in [2, 4] {
            for k in 1..dim * dim {
                let w = rotation_onto_measured(dim, k).unwrap();
                let mapped = &w * basis_element(dim, k).unwrap() * w.adjoint();
                assert!((mapped - measured_observable(dim).unwrap()).camax() < 1e-10, "{dim} {k}");
            }
        }
    }

    #[test]
    fn synthesized_tallies_recover_state() {
        let truth = DensityMatrix::from_bloch(0.5, -0.3, 0.6).unwrap();
        let t = synthesize_tallies(&truth, 4000, &strong_measurement(), 7).unwrap();
        let li = linear_inversion(2, &t).unwrap();
        let c = to_pauli(&truth).unwrap();
        for k in 1..4 {
            assert!((li.coeffs[k] - c.coeffs[k]).abs() < 0.05, "{k}: {} vs {}", li.coeffs[k], c.coeffs[k]);
        }
    }
}
