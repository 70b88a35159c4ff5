//! Fisher information of a weak continuous measurement about the initial
//! Pauli coefficients, the Cramér–Rao floor and error-ellipsoid geometry.
//!
//! In the weak-measurement limit (τ ≫ T) the information matrix is
//!
//! ```text
//! F[E,E'] = exp(−T/2τ) / (d² τ) · ∫₀ᵀ a_E(t) a_E'(t) dt,   a_E(t) = Tr(Z(t) E),
//! ```
//!
//! with `Z(t) = U†(t) Z U(t)` the measured observable in the Heisenberg picture.

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{build_hamiltonian, ControlSetting, MeasurementConfig};
use crate::qcore::linalg::{hermitian_eigen, hs_inner, CMatrix, C64};
use crate::qcore::{basis_element, basis_label, measured_observable, PauliCoefficients};
use crate::{Error, Result};

/// Default number of Simpson intervals for the time integral.
pub const DEFAULT_INTERVALS: usize = 4096;

/// Relative diagonal threshold below which a label counts as uninformed.
pub const INFORMED_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FisherMatrix {
    /// Non-identity basis labels in basis order.
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
    pub config: MeasurementConfig,
    pub control: ControlSetting,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.control.dim()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.labels.len()).map(|i| self.entries[i][i]).collect()
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.entries[i][j])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.labels.len();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j])
    }
}

/// `a_E(t) = Tr(U†(t) Z U(t) E)` for every non-identity basis element `E`.
pub struct HeisenbergOverlaps {
    dim: usize,
    eigvals: Vec<f64>,
    eigvecs: CMatrix,
}

impl HeisenbergOverlaps {
    pub fn new(control: &ControlSetting) -> Result<Self> {
        control.validate()?;
        let h = build_hamiltonian(control);
        let (eigvals, eigvecs) = hermitian_eigen(&h.matrix);
        Ok(Self {
            dim: control.dim(),
            eigvals,
            eigvecs,
        })
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        let d = self.dim;
        let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            self.eigvals.iter().map(|l| C64::from_polar(1.0, -l * t)),
        ));
        let u = &self.eigvecs * phases * self.eigvecs.adjoint();
        let z = measured_observable(d).expect("supported dimension");
        let zt = u.adjoint() * z * &u;
        (1..d * d)
            .map(|k| hs_inner(basis_element(d, k).expect("valid index"), &zt).re)
            .collect()
    }
}

pub fn fisher_matrix(control: &ControlSetting, config: &MeasurementConfig) -> Result<FisherMatrix> {
    fisher_matrix_with_grid(control, config, DEFAULT_INTERVALS)
}

/// Fisher matrix with an explicit number of Simpson intervals (rounded up to
/// an even number, at least 2).
pub fn fisher_matrix_with_grid(
    control: &ControlSetting,
    config: &MeasurementConfig,
    intervals: usize,
) -> Result<FisherMatrix> {
    config.validate()?;
    let overlaps = HeisenbergOverlaps::new(control)?;
    let d = control.dim();
    let total = config.total_time();
    if config.tau < 2.0 * total {
        warn!(
            "τ = {} is not much larger than T = {}; the weak-measurement Fisher matrix is only indicative",
            config.tau, total
        );
    }
    let n = (intervals.max(2) + 1) & !1;
    let h = total / n as f64;
    let m = d * d - 1;

    let weighted: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let a = overlaps.at(k as f64 * h);
            let mut outer = vec![0.0; m * m];
            for i in 0..m {
                for j in i..m {
                    outer[i * m + j] = w * a[i] * a[j];
                }
            }
            outer
        })
        .reduce(
            || vec![0.0; m * m],
            |mut acc, x| {
                acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
                acc
            },
        );

    let prefactor = (-total / (2.0 * config.tau)).exp() / ((d * d) as f64 * config.tau) * h / 3.0;
    let mut entries = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = prefactor * weighted[i * m + j];
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    Ok(FisherMatrix {
        labels: (1..d * d).map(|k| basis_label(d, k)).collect(),
        entries,
        config: *config,
        control: *control,
    })
}

/// Cramér–Rao covariance floor `F⁺ / N` on the informed block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrbFloor {
    pub labels: Vec<String>,
    /// Full-size matrix; rows and columns of uninformed labels are zero.
    pub covariance: Vec<Vec<f64>>,
    pub informed: Vec<bool>,
}

impl CrbFloor {
    pub fn variance(&self, label: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        self.informed[i].then(|| self.covariance[i][i])
    }

    pub fn informed_labels(&self) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.informed)
            .filter(|(_, inf)| **inf)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn uninformed_labels(&self) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.informed)
            .filter(|(_, inf)| !**inf)
            .map(|(l, _)| l.as_str())
            .collect()
    }
}

pub fn crb_floor(fisher: &FisherMatrix, n_records: usize) -> Result<CrbFloor> {
    if n_records == 0 {
        return Err(Error::InvalidArgument("Cramér–Rao floor needs N ≥ 1".into()));
    }
    let diag = fisher.diagonal();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let informed: Vec<bool> = diag.iter().map(|&v| max > 0.0 && v > INFORMED_EPS * max).collect();
    let idx: Vec<usize> = (0..diag.len()).filter(|&i| informed[i]).collect();
    if idx.is_empty() {
        return Err(Error::DegenerateInformation);
    }
    let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| fisher.entries[idx[a]][idx[b]]);
    let pinv = block
        .pseudo_inverse(INFORMED_EPS * max)
        .map_err(|e| Error::InvalidArgument(format!("pseudo-inverse failed: {e}")))?;
    let m = diag.len();
    let mut covariance = vec![vec![0.0; m]; m];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            covariance[i][j] = 0.5 * (pinv[(a, b)] + pinv[(b, a)]) / n_records as f64;
        }
    }
    Ok(CrbFloor {
        labels: fisher.labels.clone(),
        covariance,
        informed,
    })
}

/// Error ellipsoid `{c + r(n) n}` with `r(n)² = nᵀ C n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEllipsoid {
    pub center: PauliCoefficients,
    pub covariance: Vec<Vec<f64>>,
}

impl ErrorEllipsoid {
    pub fn new(center: PauliCoefficients, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let m = center.non_identity().len();
        if covariance.len() != m || covariance.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch(m, covariance.len()));
        }
        let c = DMatrix::from_fn(m, m, |i, j| covariance[i][j]);
        let asym = (&c - c.transpose()).amax();
        let scale = c.amax().max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::InvalidArgument("covariance is not symmetric".into()));
        }
        let min = c.symmetric_eigenvalues().min();
        if min < -1e-10 * scale {
            return Err(Error::InvalidArgument(format!("covariance not PSD (λ_min = {min:e})")));
        }
        Ok(Self { center, covariance })
    }

    /// `√(nᵀ C n)` for a unit direction `n`.
    pub fn radius(&self, direction: &[f64]) -> Result<f64> {
        ellipsoid_radius(&self.covariance, direction)
    }
}

pub fn ellipsoid_radius(covariance: &[Vec<f64>], direction: &[f64]) -> Result<f64> {
    if direction.len() != covariance.len() {
        return Err(Error::DimensionMismatch(covariance.len(), direction.len()));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector (|n| = {norm})")));
    }
    let mut q = 0.0;
    for (i, ni) in direction.iter().enumerate() {
        for (j, nj) in direction.iter().enumerate() {
            q += ni * covariance[i][j] * nj;
        }
    }
    Ok(q.max(0.0).sqrt())
}
