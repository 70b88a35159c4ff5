//! Controlled dynamics under continuous weak measurement of Z (or Z⊗I).

pub(crate) mod control;
mod effect;
mod io;
mod kraus;
pub(crate) mod record;

pub use control::{build_hamiltonian, ControlSetting, MeasurementConfig, RabiDrive};
pub use effect::{kraus_product, EffectBatch, RecordEffect};
pub use io::{read_records, read_records_from, write_records, write_records_csv, write_records_to, MAGIC};
pub use kraus::{conditioned_step, measurement_operator, sample_readout, unitary_step, KrausPropagator};
pub use record::{
    record_log_likelihood, record_seed, simulate_batch, simulate_record, MeasurementRecord,
};
