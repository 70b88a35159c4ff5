//! Random and fixed test states.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::qcore::linalg::{c, trace, CMatrix};
use crate::qcore::{check_dim, tensor, DensityMatrix, StateJson};
use crate::{Error, Result};

/// Hilbert–Schmidt random density matrix via the Ginibre construction
/// `G G† / Tr(G G†)` with i.i.d. standard complex Gaussian entries.
pub fn hs_random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let gg = &g * g.adjoint();
    let tr = trace(&gg).re;
    DensityMatrix::from_matrix_unchecked(gg.unscale(tr))
}

/// `(1 − p) ρ₁ ⊗ ρ₂ + p |Φ⁺⟩⟨Φ⁺|` for single-qubit `ρ₁`, `ρ₂`.
pub fn werner_mix(p: f64, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0, 1]")));
    }
    let product = tensor(rho1, rho2)?;
    let bell = DensityMatrix::bell_phi_plus();
    let m = product.matrix().scale(1.0 - p) + bell.matrix().scale(p);
    DensityMatrix::new(m)
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: String,
    pub state: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct StateCatalog {
    pub name: String,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Serialize)]
struct CatalogJson<'a> {
    name: &'a str,
    entries: Vec<EntryJson<'a>>,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    label: &'a str,
    state: StateJson,
}

impl StateCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&DensityMatrix> {
        self.entries
            .get(index)
            .map(|e| &e.state)
            .ok_or_else(|| Error::UnknownCatalog(format!("{}:{index}", self.name)))
    }

    pub fn to_json(&self) -> Result<String> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(EntryJson {
                    label: &e.label,
                    state: StateJson::from_state(&e.state)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&CatalogJson {
            name: &self.name,
            entries,
        })?)
    }
}

pub const CATALOG_NAMES: [&str; 3] = ["single-qubit-9", "remote-10", "two-qubit-9"];

/// Initial Bloch vectors used for the single-qubit average-fidelity study.
/// The list is named for nine states but holds ten; all ten are kept.
const SINGLE_QUBIT: [[f64; 3]; 10] = [
    [-0.4, -0.6, 0.3],
    [-0.4, 0.6, -0.3],
    [-0.4, 0.6, 0.3],
    [0.4, 0.6, -0.3],
    [-0.7, -0.5, -0.3],
    [-0.7, -0.5, 0.3],
    [0.7, -0.5, 0.3],
    [-0.5, 0.3, 0.8],
    [-0.5, -0.3, -0.8],
    [0.5, 0.3, 0.8],
];

/// Initial Bloch vectors of the unmeasured (remote) qubit.
const REMOTE: [[f64; 3]; 10] = [
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0],
    [-0.6, -0.4, 0.3],
    [-0.7, -0.5, -0.3],
    [0.0, -0.5, 0.3],
    [0.3, -0.3, 0.3],
    [0.3, -0.7, 0.5],
    [0.5, 0.3, 0.8],
    [0.7, -0.5, 0.1],
    [0.7, 0.0, 0.0],
    [0.7, 0.0, 0.3],
];

enum TwoQubit {
    Werner(f64, [f64; 3], [f64; 3]),
    Bell,
    Product([f64; 3], [f64; 3]),
}

const TWO_QUBIT: [TwoQubit; 9] = [
    TwoQubit::Werner(0.5, [0.7, -0.2, 0.3], [0.6, -0.1, 0.4]),
    TwoQubit::Bell,
    TwoQubit::Werner(0.2, [-0.4, -0.75, 0.5], [0.6, -0.5, 0.6]),
    TwoQubit::Werner(0.5, [0.2, -0.75, 0.5], [0.6, -0.5, 0.4]),
    TwoQubit::Werner(0.8, [0.2, -0.75, 0.5], [0.6, -0.5, 0.4]),
    TwoQubit::Product([0.7, -0.2, 0.5], [0.6, -0.5, 0.4]),
    TwoQubit::Werner(0.5, [0.7, -0.2, 0.5], [0.6, -0.5, 0.4]),
    TwoQubit::Werner(0.8, [0.7, -0.2, 0.5], [0.6, -0.5, 0.4]),
    TwoQubit::Product([0.7, -0.2, 0.3], [0.6, -0.1, 0.4]),
];

fn bloch(v: &[f64; 3]) -> DensityMatrix {
    DensityMatrix::from_bloch(v[0], v[1], v[2]).expect("catalog Bloch vector inside the ball")
}

fn bloch_label(v: &[f64; 3]) -> String {
    format!("({}, {}, {})", v[0], v[1], v[2])
}

fn bloch_catalog(name: &str, list: &[[f64; 3]]) -> StateCatalog {
    StateCatalog {
        name: name.to_string(),
        entries: list
            .iter()
            .map(|v| CatalogEntry {
                label: bloch_label(v),
                state: bloch(v),
            })
            .collect(),
    }
}

/// Fixed test-state lists: `single-qubit-9`, `remote-10` (Bloch vectors of
/// the remote qubit) and `two-qubit-9`.
pub fn catalog(name: &str) -> Result<StateCatalog> {
    match name {
        "single-qubit-9" => Ok(bloch_catalog(name, &SINGLE_QUBIT)),
        "remote-10" => Ok(bloch_catalog(name, &REMOTE)),
        "two-qubit-9" => {
            let entries = TWO_QUBIT
                .iter()
                .map(|spec| {
                    Ok(match spec {
                        TwoQubit::Werner(p, a, b) => CatalogEntry {
                            label: format!("W({p}, {}, {})", bloch_label(a), bloch_label(b)),
                            state: werner_mix(*p, &bloch(a), &bloch(b))?,
                        },
                        TwoQubit::Bell => CatalogEntry {
                            label: "Phi+".into(),
                            state: DensityMatrix::bell_phi_plus(),
                        },
                        TwoQubit::Product(a, b) => CatalogEntry {
                            label: format!("{} ⊗ {}", bloch_label(a), bloch_label(b)),
                            state: tensor(&bloch(a), &bloch(b))?,
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StateCatalog {
                name: name.to_string(),
                entries,
            })
        }
        other => Err(Error::UnknownCatalog(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::to_pauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hs_draws_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2, 4] {
            for _ in 0..2000 {
                let rho = hs_random(dim, &mut rng).unwrap();
                rho.check().unwrap();
                assert!(rho.purity() <= 1.0 + 1e-12);
            }
        }
        assert!(hs_random(3, &mut rng).is_err());
    }

    #[test]
    fn werner_endpoints_and_coefficients() {
        let a = DensityMatrix::from_bloch(0.7, -0.2, 0.3).unwrap();
        let b = DensityMatrix::from_bloch(0.6, -0.1, 0.4).unwrap();
        let w0 = werner_mix(0.0, &a, &b).unwrap();
        assert!((w0.matrix() - tensor(&a, &b).unwrap().matrix()).camax() < 1e-15);
        let w1 = werner_mix(1.0, &a, &b).unwrap();
        assert!((w1.matrix() - DensityMatrix::bell_phi_plus().matrix()).camax() < 1e-15);
        assert!(werner_mix(1.5, &a, &b).is_err());

        // c_ij(W) = (1 − p) c_i(a) c_j(b) + p c_ij(Φ⁺)
        let p = 0.5;
        let w = to_pauli(&werner_mix(p, &a, &b).unwrap()).unwrap();
        let ca = [1.0, 0.7, -0.2, 0.3];
        let cb = [1.0, 0.6, -0.1, 0.4];
        let bell = to_pauli(&DensityMatrix::bell_phi_plus()).unwrap();
        for (i, a) in ca.iter().enumerate() {
            for (j, b) in cb.iter().enumerate() {
                let expect = (1.0 - p) * a * b + p * bell.coeffs[4 * i + j];
                assert!((w.coeffs[4 * i + j] - expect).abs() < 1e-12);
            }
        }
        let first = catalog("two-qubit-9").unwrap();
        assert!((first.get(0).unwrap().matrix() - werner_mix(p, &a, &b).unwrap().matrix()).camax() < 1e-15);
    }

    #[test]
    fn catalogs() {
        for name in CATALOG_NAMES {
            let cat = catalog(name).unwrap();
            for e in &cat.entries {
                e.state.check().unwrap();
            }
        }
        let remote = catalog("remote-10").unwrap();
        assert_eq!(remote.len(), 10);
        let b = remote.get(0).unwrap().bloch().unwrap();
        assert!((b[0] - FRAC_1_SQRT_2).abs() < 1e-15 && (b[1] - FRAC_1_SQRT_2).abs() < 1e-15 && b[2].abs() < 1e-15);
        let single = catalog("single-qubit-9").unwrap();
        assert!(single.entries.iter().any(|e| {
            let v = e.state.bloch().unwrap();
            (v[0] + 0.4).abs() < 1e-15 && (v[1] + 0.6).abs() < 1e-15 && (v[2] - 0.3).abs() < 1e-15
        }));
        assert_eq!(catalog("two-qubit-9").unwrap().len(), 9);
        assert!(matches!(catalog("nope"), Err(Error::UnknownCatalog(_))));
        assert!(remote.to_json().unwrap().contains("remote-10"));
    }
}
