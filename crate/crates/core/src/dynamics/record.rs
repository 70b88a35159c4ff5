use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::control::{ControlSetting, MeasurementConfig};
use super::kraus::{sample_readout, KrausPropagator};
use crate::qcore::DensityMatrix;
use crate::{Error, Result};

/// One measurement run: readouts `r_1 … r_n` plus acquisition metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub readouts: Vec<f64>,
    pub config: MeasurementConfig,
    pub control: ControlSetting,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn new(readouts: Vec<f64>, config: MeasurementConfig, control: ControlSetting, seed: u64) -> Result<Self> {
        if readouts.len() != config.n_steps {
            return Err(Error::InvalidArgument(format!(
                "{} readouts for n_steps = {}",
                readouts.len(),
                config.n_steps
            )));
        }
        if readouts.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("non-finite readout".into()));
        }
        Ok(Self {
            readouts,
            config,
            control,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.control.dim()
    }

    pub fn len(&self) -> usize {
        self.readouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readouts.is_empty()
    }

    pub fn mean_readout(&self) -> f64 {
        if self.readouts.is_empty() {
            return 0.0;
        }
        self.readouts.iter().sum::<f64>() / self.readouts.len() as f64
    }

    /// True if both records were taken with the same configuration and control.
    pub fn compatible_with(&self, other: &Self) -> bool {
        self.config == other.config && self.control == other.control
    }
}

/// Per-record seed derived from a master seed (SplitMix64 finalizer), so
/// batches do not depend on how records are scheduled across threads.
pub fn record_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn simulate_with(prop: &KrausPropagator, rho0: &DensityMatrix, control: &ControlSetting, seed: u64) -> Result<MeasurementRecord> {
    let config = *prop.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = rho0.clone();
    let mut readouts = Vec::with_capacity(config.n_steps);
    for _ in 0..config.n_steps {
        let r = sample_readout(&rho, &config, &mut rng);
        rho = prop.step(&rho, r)?.0;
        readouts.push(r);
    }
    Ok(MeasurementRecord {
        readouts,
        config,
        control: *control,
        seed,
    })
}

/// Generates one record from `rho0`: sample a readout from the current
/// state, apply the conditioned update, repeat for `n_steps`.
pub fn simulate_record(
    rho0: &DensityMatrix,
    control: &ControlSetting,
    config: &MeasurementConfig,
    seed: u64,
) -> Result<MeasurementRecord> {
    if rho0.dim() != control.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), control.dim()));
    }
    let prop = KrausPropagator::new(control, config)?;
    simulate_with(&prop, rho0, control, seed)
}

/// `count` independent records, record `j` seeded with `record_seed(master_seed, j)`.
pub fn simulate_batch(
    rho0: &DensityMatrix,
    control: &ControlSetting,
    config: &MeasurementConfig,
    count: usize,
    master_seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    if rho0.dim() != control.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), control.dim()));
    }
    let prop = KrausPropagator::new(control, config)?;
    (0..count as u64)
        .into_par_iter()
        .map(|j| simulate_with(&prop, rho0, control, record_seed(master_seed, j)))
        .collect()
}

/// `ln P(R|ρ₀)` accumulated step by step as `Σ_k ln p(r_k | ρ_{k−1})`.
/// Returns `-∞` when some step has vanishing density for this state.
pub fn record_log_likelihood(rho0: &DensityMatrix, record: &MeasurementRecord) -> Result<f64> {
    if rho0.dim() != record.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), record.dim()));
    }
    let prop = KrausPropagator::new(&record.control, &record.config)?;
    Ok(log_likelihood_with(&prop, rho0, record))
}

pub(crate) fn log_likelihood_with(prop: &KrausPropagator, rho0: &DensityMatrix, record: &MeasurementRecord) -> f64 {
    let mut rho = rho0.clone();
    let mut total = 0.0;
    for &r in &record.readouts {
        match prop.step(&rho, r) {
            Ok((next, p)) => {
                total += p.ln();
                rho = next;
            }
            Err(_) => return f64::NEG_INFINITY,
        }
    }
    total
}
