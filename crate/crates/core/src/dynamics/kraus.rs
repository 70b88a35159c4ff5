use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::control::{build_hamiltonian, ControlSetting, MeasurementConfig};
use crate::qcore::linalg::{self, c, CMatrix};
use crate::qcore::{DensityMatrix, Observable};
use crate::{Error, Result};

/// `U(dt) = exp(−i H dt)`.
pub fn unitary_step(h: &Observable, dt: f64) -> CMatrix {
    linalg::unitary_exp(&h.matrix, dt)
}

/// Diagonal entries of `M(r)` on the +1 and −1 eigenspaces of the measured
/// observable.
pub(crate) fn measurement_weights(r: f64, config: &MeasurementConfig) -> (f64, f64) {
    let norm = (config.dt / (2.0 * PI * config.tau)).powf(0.25);
    let k = config.dt / (4.0 * config.tau);
    (norm * (-(r - 1.0).powi(2) * k).exp(), norm * (-(r + 1.0).powi(2) * k).exp())
}

/// `M(r) = (dt/2πτ)^{1/4} exp(−(r − Z)² dt / 4τ)` with `Z` the measured
/// observable (Z or Z⊗I); diagonal in the computational basis.
pub fn measurement_operator(r: f64, config: &MeasurementConfig, dim: usize) -> CMatrix {
    let (plus, minus) = measurement_weights(r, config);
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            c(0.0, 0.0)
        } else if i < dim / 2 {
            c(plus, 0.0)
        } else {
            c(minus, 0.0)
        }
    })
}

/// Precomputed single-step propagation for a fixed control and configuration.
#[derive(Clone, Debug)]
pub struct KrausPropagator {
    dim: usize,
    config: MeasurementConfig,
    unitary: CMatrix,
}

impl KrausPropagator {
    pub fn new(control: &ControlSetting, config: &MeasurementConfig) -> Result<Self> {
        control.validate()?;
        config.validate()?;
        let h = build_hamiltonian(control);
        Ok(Self::from_hamiltonian(&h, config))
    }

    pub fn from_hamiltonian(h: &Observable, config: &MeasurementConfig) -> Self {
        Self {
            dim: h.dim(),
            config: *config,
            unitary: unitary_step(h, config.dt),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn config(&self) -> &MeasurementConfig {
        &self.config
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// `M(r) ρ M(r)†` (unnormalized) and its trace `p(r|ρ) = Tr[M†M ρ]`.
    fn measure(&self, rho: &CMatrix, r: f64) -> (CMatrix, f64) {
        let (plus, minus) = measurement_weights(r, &self.config);
        let half = self.dim / 2;
        let w = |i: usize| if i < half { plus } else { minus };
        let m = CMatrix::from_fn(self.dim, self.dim, |i, j| rho[(i, j)] * (w(i) * w(j)));
        let p = (0..self.dim).map(|i| m[(i, i)].re).sum();
        (m, p)
    }

    /// Measurement then unitary: `ρ' = U M ρ M† U† / Tr[…]`, returning the
    /// updated state and the one-step density `p(r|ρ)`.
    pub fn step(&self, rho: &DensityMatrix, r: f64) -> Result<(DensityMatrix, f64)> {
        let (m, p) = self.measure(rho.matrix(), r);
        if !(p >= 1e-300) {
            return Err(Error::Underflow);
        }
        let evolved = &self.unitary * m * self.unitary.adjoint();
        let next = linalg::hermitian_part(&evolved).unscale(p);
        Ok((DensityMatrix::from_matrix_unchecked(next)?, p))
    }

    /// One-step readout density `p(r|ρ)`.
    pub fn density(&self, rho: &DensityMatrix, r: f64) -> f64 {
        let (plus, minus) = measurement_weights(r, &self.config);
        let (pp, pm) = rho.measured_populations();
        pp * plus * plus + pm * minus * minus
    }
}

/// Single conditioned update for Hamiltonian `h`. Prefer [`KrausPropagator`]
/// when stepping repeatedly.
pub fn conditioned_step(
    rho: &DensityMatrix,
    r: f64,
    h: &Observable,
    config: &MeasurementConfig,
) -> Result<(DensityMatrix, f64)> {
    KrausPropagator::from_hamiltonian(h, config).step(rho, r)
}

/// Draws a readout from the two-Gaussian mixture: means ±1, variance `τ/dt`,
/// weights equal to the ±1 eigenspace populations of `rho`.
pub fn sample_readout<R: Rng + ?Sized>(rho: &DensityMatrix, config: &MeasurementConfig, rng: &mut R) -> f64 {
    let (plus, _) = rho.measured_populations();
    let mean = if rng.random::<f64>() < plus { 1.0 } else { -1.0 };
    let z: f64 = rng.sample(StandardNormal);
    mean + (config.tau / config.dt).sqrt() * z
}
