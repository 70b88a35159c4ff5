use serde::{Deserialize, Serialize};

use super::basis::{basis_element, basis_label, measured_index};
use super::linalg::{self, c, CMatrix, C64};
use super::{check_dim, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
use crate::{Error, Result};

/// A one- or two-qubit density matrix.
///
/// [`DensityMatrix::new`] enforces Hermiticity, unit trace and positivity.
/// [`from_pauli`] skips the positivity check so candidate coefficient vectors
/// can be screened; use [`DensityMatrix::check`] on those.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a square matrix of supported dimension without validating it.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        check_dim(matrix.nrows())?;
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            matrix: linalg::identity(dim).unscale(dim as f64),
        })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        check_dim(dim)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        Ok(Self { matrix: m })
    }

    /// Single-qubit state `½(I + xX + yY + zZ)`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        from_pauli(&PauliCoefficients::new(2, vec![1.0, x, y, z])?).validated()
    }

    /// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        let o = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        Self::pure(&[o, z, z, o]).expect("bell state")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues_hermitian(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn check(&self) -> Result<()> {
        let herm = linalg::hermiticity_error(&self.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = linalg::trace(&self.matrix);
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {} ≠ 1", tr.re)));
        }
        let lmin = self.min_eigenvalue();
        if lmin < PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:e}")));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    pub(crate) fn validated(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self {
            matrix: linalg::hermitian_part(&(u * &self.matrix * u.adjoint())),
        }
    }

    /// Populations of the +1 and −1 eigenspaces of the measured observable.
    pub fn measured_populations(&self) -> (f64, f64) {
        let half = self.dim() / 2;
        let diag = self.matrix.diagonal();
        let plus: f64 = diag.iter().take(half).map(|z| z.re).sum();
        let minus: f64 = diag.iter().skip(half).map(|z| z.re).sum();
        (plus, minus)
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension(self.dim()));
        }
        let p = to_pauli(self)?;
        Ok([p.coeffs[1], p.coeffs[2], p.coeffs[3]])
    }
}

/// Coefficients `c_i = Tr(ρ E_i)` in the Pauli-string basis, with `c_0 = 1`.
/// Serializes in the canonical state form, so a report's estimate can be
/// reused as a state file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoefficients {
    pub dim: usize,
    #[serde(rename = "pauli")]
    pub coeffs: Vec<f64>,
}

impl PauliCoefficients {
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if coeffs.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for dim {dim}, got {}",
                dim * dim,
                coeffs.len()
            )));
        }
        if coeffs[0] != 1.0 {
            return Err(Error::InvalidState(format!("identity coefficient {} ≠ 1", coeffs[0])));
        }
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { dim, coeffs })
    }

    /// Builds from the `d² − 1` non-identity coefficients.
    pub fn from_non_identity(dim: usize, rest: &[f64]) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(rest.len() + 1);
        coeffs.push(1.0);
        coeffs.extend_from_slice(rest);
        Self::new(dim, coeffs)
    }

    pub fn non_identity(&self) -> &[f64] {
        &self.coeffs[1..]
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        super::label_index(self.dim, label).map(|k| self.coeffs[k])
    }

    pub fn measured(&self) -> f64 {
        self.coeffs[measured_index(self.dim)]
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.coeffs.len()).map(|k| basis_label(self.dim, k)).collect()
    }
}

/// Canonical JSON form of a state: `{"dim": d, "pauli": [c_0, …]}`, with
/// coefficients in row-major `(i, j)` order for two qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub pauli: Vec<f64>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let p = to_pauli(rho)?;
        Ok(Self {
            dim: p.dim,
            pauli: p.coeffs,
        })
    }

    /// Parses into a validated density matrix.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        from_pauli(&PauliCoefficients::new(self.dim, self.pauli.clone())?).validated()
    }
}

pub fn to_pauli(rho: &DensityMatrix) -> Result<PauliCoefficients> {
    let dim = rho.dim();
    check_dim(dim)?;
    let mut coeffs: Vec<f64> = (0..dim * dim)
        .map(|k| {
            let e = basis_element(dim, k).expect("dim checked");
            linalg::hs_inner(e, rho.matrix()).re
        })
        .collect();
    coeffs[0] = 1.0;
    Ok(PauliCoefficients { dim, coeffs })
}

/// `(1/d) Σ c_i E_i`. Hermitian with unit trace by construction; positivity
/// is not checked.
pub fn from_pauli(coeffs: &PauliCoefficients) -> DensityMatrix {
    let dim = coeffs.dim;
    let mut m = linalg::zeros(dim);
    for (k, &ck) in coeffs.coeffs.iter().enumerate() {
        if ck != 0.0 {
            m += basis_element(dim, k).expect("dim checked").scale(ck);
        }
    }
    DensityMatrix {
        matrix: m.unscale(dim as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_coefficients() {
        let p = to_pauli(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert_eq!(p.coeffs, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fig4_state_coefficients() {
        let rho = DensityMatrix::from_bloch(-0.4, -0.6, 0.3).unwrap();
        let p = to_pauli(&rho).unwrap();
        for (got, want) in p.coeffs.iter().zip([1.0, -0.4, -0.6, 0.3]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_coefficients_from_trace_oracle() {
        // direct trace of the 4×4 projector against each Pauli string
        let bell = DensityMatrix::bell_phi_plus();
        let p = to_pauli(&bell).unwrap();
        for k in 1..16 {
            let expect = match basis_label(4, k).as_str() {
                "XX" => 1.0,
                "YY" => -1.0,
                "ZZ" => 1.0,
                _ => 0.0,
            };
            assert!((p.coeffs[k] - expect).abs() < 1e-12, "{}", basis_label(4, k));
        }
    }

    #[test]
    fn from_pauli_examples() {
        let mixed = from_pauli(&PauliCoefficients::new(2, vec![1.0, 0.0, 0.0, 0.0]).unwrap());
        assert_eq!(mixed, DensityMatrix::maximally_mixed(2).unwrap());

        let plus = from_pauli(&PauliCoefficients::new(2, vec![1.0, 1.0, 0.0, 0.0]).unwrap());
        let expect = DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((plus.matrix() - expect.matrix()).iter().all(|z| z.norm() < 1e-15));

        // eigenvalues (1 ± |r|)/2 with |r| = √0.83
        let rho = from_pauli(&PauliCoefficients::new(2, vec![1.0, 0.7, -0.5, 0.3]).unwrap());
        let ev = rho.eigenvalues();
        let r = 0.83f64.sqrt();
        assert!((ev[0] - (1.0 - r) / 2.0).abs() < 1e-12);
        assert!((ev[1] - (1.0 + r) / 2.0).abs() < 1e-12);
        assert!((ev[1] - 0.956).abs() < 1e-3 && (ev[0] - 0.044).abs() < 1e-3);
    }

    #[test]
    fn from_pauli_can_be_unphysical() {
        let p = PauliCoefficients::new(2, vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(!from_pauli(&p).is_valid());
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(PauliCoefficients::new(2, vec![0.5, 0.0, 0.0, 0.0]).is_err());
        assert!(PauliCoefficients::new(4, vec![1.0; 4]).is_err());
        assert!(matches!(PauliCoefficients::new(3, vec![1.0; 9]), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn json_round_trip() {
        let rho = DensityMatrix::bell_phi_plus();
        let text = serde_json::to_string(&StateJson::from_state(&rho).unwrap()).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let rho2 = back.to_state().unwrap();
        assert!((rho.matrix() - rho2.matrix()).iter().all(|z| z.norm() < 1e-14));
    }
}
