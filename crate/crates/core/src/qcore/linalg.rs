//! Small dense complex matrix helpers. Matrices here are at most 4×4, so
//! everything goes through the Hermitian eigendecomposition.

use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigenvalues_hermitian(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `V f(Λ) V†` for Hermitian `m = V Λ V†`.
pub fn hermitian_apply(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let fj = f(lambda);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
    }
    scaled * vectors.adjoint()
}

/// Principal square root of a positive semidefinite matrix (negative
/// eigenvalues from roundoff are clamped to zero).
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_apply(m, |x| c(x.max(0.0).sqrt(), 0.0))
}

/// `exp(-i h t)` for Hermitian `h`.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_apply(h, |lambda| C64::from_polar(1.0, -lambda * t))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest deviation of `u† u` from the identity.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u - identity(u.nrows());
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_exp(&zeros(4), 0.3);
        assert!((u - identity(4)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn eigenvalues_sorted() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(-1.0, 0.0)]);
        let v = eigenvalues_hermitian(&m);
        assert!(v[0] < v[1]);
        assert!((v[1] - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let s = psd_sqrt(&m);
        assert!((&s * &s - m).iter().all(|z| z.norm() < 1e-13));
    }
}
