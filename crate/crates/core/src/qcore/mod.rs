//! States, observables and distances for one and two qubits.

mod basis;
pub mod linalg;
mod metrics;
pub(crate) mod positivity;
mod state;

pub use basis::{
    basis_element, basis_label, label_index, measured_index, measured_observable, Observable,
};
pub use linalg::{CMatrix, C64};
pub use metrics::{fidelity, partial_trace_first, tensor, trace_distance};
pub use positivity::{check_two_qubit_positivity, PositivityCheck};
pub use state::{from_pauli, to_pauli, DensityMatrix, PauliCoefficients, StateJson};

/// Hermiticity tolerance (absolute, per entry).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = -1e-10;
/// Smallest admissible residual of the closed-form positivity constraints.
pub const CONSTRAINT_TOL: f64 = -1e-9;

pub(crate) fn check_dim(dim: usize) -> crate::Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(crate::Error::UnsupportedDimension(dim))
    }
}
