use super::linalg::{self, CMatrix};
use super::state::DensityMatrix;
use crate::{Error, Result};

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.dim(), b.dim()))
    }
}

/// Uhlmann fidelity `Tr √(√b a √b)` (not squared), clamped to `[0, 1]`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let sb = linalg::psd_sqrt(b.matrix());
    let inner = &sb * a.matrix() * &sb;
    let f: f64 = linalg::eigenvalues_hermitian(&inner)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `½ Tr|a − b|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let diff = a.matrix() - b.matrix();
    let d: f64 = linalg::eigenvalues_hermitian(&diff).into_iter().map(f64::abs).sum();
    Ok((0.5 * d).clamp(0.0, 1.0))
}

/// Kronecker product of two single-qubit states.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    for s in [a, b] {
        if s.dim() != 2 {
            return Err(Error::UnsupportedDimension(s.dim()));
        }
    }
    DensityMatrix::from_matrix_unchecked(linalg::kron(a.matrix(), b.matrix()))
}

/// Reduced state of the second qubit, tracing out the first.
pub fn partial_trace_first(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    let m = rho.matrix();
    let reduced = CMatrix::from_fn(2, 2, |i, j| m[(i, j)] + m[(2 + i, 2 + j)]);
    DensityMatrix::from_matrix_unchecked(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c;
    use crate::qcore::{to_pauli, PauliCoefficients};

    #[test]
    fn self_fidelity_is_one() {
        let rho = DensityMatrix::from_bloch(0.1, -0.5, 0.2).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-14);
    }

    #[test]
    fn zero_rotation_fidelity_bound() {
        let rho0 = DensityMatrix::from_bloch(-0.4, -0.6, 0.3).unwrap();
        let z_only = DensityMatrix::from_bloch(0.0, 0.0, 0.3).unwrap();
        let f = fidelity(&rho0, &z_only).unwrap();
        assert!((f - 0.918).abs() < 5e-4, "{f}");
    }

    #[test]
    fn pure_overlap() {
        let zero = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let plus = DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        // |⟨0|+⟩| = 1/√2
        assert!((fidelity(&zero, &plus).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let one = DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_is_half_bloch_distance() {
        let r1 = [0.3, -0.2, 0.5];
        let r2 = [-0.1, 0.4, 0.2];
        let a = DensityMatrix::from_bloch(r1[0], r1[1], r1[2]).unwrap();
        let b = DensityMatrix::from_bloch(r2[0], r2[1], r2[2]).unwrap();
        let euclid = r1.iter().zip(r2).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        assert!((trace_distance(&a, &b).unwrap() - euclid / 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch(2, 4))));
        assert!(trace_distance(&a, &b).is_err());
        assert!(tensor(&b, &a).is_err());
    }

    #[test]
    fn tensor_examples() {
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(tensor(&m, &m).unwrap(), DensityMatrix::maximally_mixed(4).unwrap());

        let zero = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
        let zz = tensor(&zero, &zero).unwrap();
        assert!((zz.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((zz.matrix().iter().map(|z| z.norm()).sum::<f64>() - 1.0).abs() < 1e-15);

        // product coefficients factorize
        let a = DensityMatrix::from_bloch(-0.4, -0.75, 0.5).unwrap();
        let b = DensityMatrix::from_bloch(0.6, -0.5, 0.6).unwrap();
        let ab = to_pauli(&tensor(&a, &b).unwrap()).unwrap();
        let (pa, pb) = (to_pauli(&a).unwrap(), to_pauli(&b).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert!((ab.coeffs[4 * i + j] - pa.coeffs[i] * pb.coeffs[j]).abs() < 1e-12);
            }
        }
        assert!(tensor(&a, &b).unwrap().is_valid());
    }

    #[test]
    fn partial_trace_recovers_factor() {
        let a = DensityMatrix::from_bloch(0.0, 1.0, 0.0).unwrap();
        let b = DensityMatrix::from_bloch(0.7, -0.5, 0.3).unwrap();
        let r = partial_trace_first(&tensor(&a, &b).unwrap()).unwrap();
        let p = to_pauli(&r).unwrap();
        let expect = PauliCoefficients::new(2, vec![1.0, 0.7, -0.5, 0.3]).unwrap();
        for (x, y) in p.coeffs.iter().zip(&expect.coeffs) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
