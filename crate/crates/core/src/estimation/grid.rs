use rand::Rng;
use serde::Serialize;

use crate::qcore::{tensor, to_pauli, DensityMatrix, PauliCoefficients};
use crate::sampling::hs_random;
use crate::{Error, Result};

/// How candidate states are generated.
#[derive(Clone, Debug)]
pub enum GridKind {
    /// Single-qubit states drawn i.i.d. from the Hilbert–Schmidt measure.
    HsUniformBall,
    /// `ancilla ⊗ σ` with `σ` Hilbert–Schmidt random and the ancilla fixed.
    ProductWithFixedAncilla,
    /// Caller-supplied states.
    Explicit(Vec<DensityMatrix>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridGeometry {
    HsUniformBall,
    ProductWithFixedAncilla,
    Explicit,
}

/// Candidate initial states with a normalized log prior.
#[derive(Clone, Debug)]
pub struct CandidateGrid {
    states: Vec<DensityMatrix>,
    coeffs: Vec<PauliCoefficients>,
    log_prior: Vec<f64>,
    geometry: GridGeometry,
}

impl CandidateGrid {
    /// Grid over the given states with a uniform prior.
    pub fn new(states: Vec<DensityMatrix>, geometry: GridGeometry) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidArgument("candidate grid must not be empty".into()));
        };
        let dim = first.dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(dim, s.dim()));
            }
            s.check()?;
        }
        let coeffs = states.iter().map(to_pauli).collect::<Result<Vec<_>>>()?;
        let n = states.len();
        Ok(Self {
            states,
            coeffs,
            log_prior: vec![-(n as f64).ln(); n],
            geometry,
        })
    }

    /// Replaces the prior with `log_prior` (any additive constant), normalized.
    pub fn with_log_prior(mut self, log_prior: Vec<f64>) -> Result<Self> {
        if log_prior.len() != self.states.len() {
            return Err(Error::DimensionMismatch(self.states.len(), log_prior.len()));
        }
        let z = log_sum_exp(&log_prior);
        if !z.is_finite() {
            return Err(Error::InvalidArgument("prior has no finite mass".into()));
        }
        self.log_prior = log_prior.into_iter().map(|l| l - z).collect();
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn coefficients(&self) -> &[PauliCoefficients] {
        &self.coeffs
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }
}

pub fn build_grid<R: Rng + ?Sized>(
    kind: GridKind,
    count: usize,
    rng: &mut R,
    fixed_ancilla: Option<&DensityMatrix>,
) -> Result<CandidateGrid> {
    match kind {
        GridKind::Explicit(states) => CandidateGrid::new(states, GridGeometry::Explicit),
        _ if count == 0 => Err(Error::InvalidArgument("grid size must be at least 1".into())),
        GridKind::HsUniformBall => {
            let states = (0..count).map(|_| hs_random(2, rng)).collect::<Result<Vec<_>>>()?;
            CandidateGrid::new(states, GridGeometry::HsUniformBall)
        }
        GridKind::ProductWithFixedAncilla => {
            let ancilla = fixed_ancilla
                .ok_or_else(|| Error::InvalidArgument("product grid needs a fixed ancilla state".into()))?;
            if ancilla.dim() != 2 {
                return Err(Error::DimensionMismatch(2, ancilla.dim()));
            }
            let states = (0..count)
                .map(|_| tensor(ancilla, &hs_random(2, rng)?))
                .collect::<Result<Vec<_>>>()?;
            CandidateGrid::new(states, GridGeometry::ProductWithFixedAncilla)
        }
    }
}

/// `ln Σ exp(x_i)`, stable for large magnitudes; `-∞` if every term is `-∞`.
pub fn log_sum_exp(x: &[f64]) -> f64 {
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_grid_fixes_ancilla_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ancilla = DensityMatrix::from_bloch(0.0, 1.0, 0.0).unwrap();
        let grid = build_grid(GridKind::ProductWithFixedAncilla, 50, &mut rng, Some(&ancilla)).unwrap();
        for c in grid.coefficients() {
            assert!(c.get("XI").unwrap().abs() < 1e-12);
            assert!(c.get("ZI").unwrap().abs() < 1e-12);
            assert!((c.get("YI").unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(build_grid(GridKind::ProductWithFixedAncilla, 5, &mut rng, None).is_err());
    }

    #[test]
    fn explicit_and_prior() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = DensityMatrix::from_bloch(0.1, 0.2, 0.3).unwrap();
        let grid = build_grid(GridKind::Explicit(vec![s]), 1, &mut rng, None).unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid.log_prior(), &[0.0]);
        let two = CandidateGrid::new(
            vec![DensityMatrix::maximally_mixed(2).unwrap(), DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap()],
            GridGeometry::Explicit,
        )
        .unwrap()
        .with_log_prior(vec![5.0, 5.0 + 3f64.ln()])
        .unwrap();
        assert!((two.log_prior()[0].exp() - 0.25).abs() < 1e-15);
        assert!(log_sum_exp(two.log_prior()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_extremes() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[-1e6, -1e6]) - (-1e6 + 2f64.ln())).abs() < 1e-6);
    }
}
