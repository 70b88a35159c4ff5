use std::sync::OnceLock;

use super::check_dim;
use super::linalg::{c, kron, CMatrix};
use crate::{Error, Result};

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn pauli(k: usize) -> CMatrix {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let entries = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [o, z, z, -o],
        _ => unreachable!("pauli index out of range"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

fn basis(dim: usize) -> &'static [CMatrix] {
    static ONE: OnceLock<Vec<CMatrix>> = OnceLock::new();
    static TWO: OnceLock<Vec<CMatrix>> = OnceLock::new();
    match dim {
        2 => ONE.get_or_init(|| (0..4).map(pauli).collect()),
        4 => TWO.get_or_init(|| {
            (0..16).map(|k| kron(&pauli(k / 4), &pauli(k % 4))).collect()
        }),
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Pauli string `E_index`. For `dim = 4` the index is `4 i + j` for `σ_i ⊗ σ_j`.
pub fn basis_element(dim: usize, index: usize) -> Result<&'static CMatrix> {
    check_dim(dim)?;
    basis(dim)
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("basis index {index} out of range for dim {dim}")))
}

/// Label of a basis element: `"X"` for one qubit, `"YX"` (meaning Y⊗X) for two.
pub fn basis_label(dim: usize, index: usize) -> String {
    match dim {
        2 => LETTERS[index].to_string(),
        _ => format!("{}{}", LETTERS[index / 4], LETTERS[index % 4]),
    }
}

/// Inverse of [`basis_label`]. Accepts `"Y⊗X"` as well as `"YX"`.
pub fn label_index(dim: usize, label: &str) -> Option<usize> {
    let letters: Vec<usize> = label
        .chars()
        .filter(|ch| *ch != '⊗' && !ch.is_whitespace())
        .map(|ch| LETTERS.iter().position(|l| *l == ch.to_ascii_uppercase()))
        .collect::<Option<_>>()?;
    match (dim, letters.as_slice()) {
        (2, [k]) => Some(*k),
        (4, [i, j]) => Some(4 * i + j),
        _ => None,
    }
}

/// Index of the measured observable: Z for one qubit, Z⊗I for two.
pub fn measured_index(dim: usize) -> usize {
    if dim == 2 {
        3
    } else {
        12
    }
}

pub fn measured_observable(dim: usize) -> Result<&'static CMatrix> {
    check_dim(dim)?;
    basis_element(dim, measured_index(dim))
}

/// A labelled Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub label: String,
    pub matrix: CMatrix,
}

impl Observable {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn pauli(dim: usize, index: usize) -> Result<Self> {
        Ok(Self::new(basis_label(dim, index), basis_element(dim, index)?.clone()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}
