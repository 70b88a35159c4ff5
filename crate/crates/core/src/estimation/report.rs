use std::io::Write;

use serde::Serialize;

use crate::qcore::{basis_label, fidelity, from_pauli, to_pauli, trace_distance, DensityMatrix, PauliCoefficients};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Bme,
    Mpbe,
    Mle,
    Li,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bme => "bme",
            Method::Mpbe => "mpbe",
            Method::Mle => "mle",
            Method::Li => "li",
        }
    }
}

/// Result of one reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct EstimationReport {
    pub method: Method,
    /// Estimated Pauli coefficients (may be unphysical for linear inversion).
    pub estimate: PauliCoefficients,
    /// Whether the estimate is a valid density matrix.
    pub valid: bool,
    /// Bayesian covariance of the non-identity coefficients (BME only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bayes_cov: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_vs_truth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_distance_vs_truth: Option<f64>,
    pub records_used: usize,
    /// Set when no records were available and the estimate is a default.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub no_data: bool,
    /// Labels whose coefficient is zero by construction because the ancilla
    /// was fixed to a known state. They are still reported, for comparison
    /// with full two-qubit reconstructions.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub known_zero: Vec<String>,
    pub wall_time_s: f64,
}

impl EstimationReport {
    pub(crate) fn from_state(method: Method, state: &DensityMatrix, records_used: usize) -> Result<Self> {
        Ok(Self {
            method,
            estimate: to_pauli(state)?,
            valid: true,
            bayes_cov: None,
            log_likelihood: None,
            fidelity_vs_truth: None,
            trace_distance_vs_truth: None,
            records_used,
            no_data: false,
            known_zero: Vec::new(),
            wall_time_s: 0.0,
        })
    }

    /// The estimate as a density matrix, or `None` if it is not a valid state.
    pub fn state(&self) -> Option<DensityMatrix> {
        let rho = from_pauli(&self.estimate);
        rho.is_valid().then_some(rho)
    }

    /// `√Tr Cov_BME`, if a Bayesian covariance is present.
    pub fn bayes_error(&self) -> Option<f64> {
        self.bayes_cov
            .as_ref()
            .map(|c| (0..c.len()).map(|i| c[i][i]).sum::<f64>().max(0.0).sqrt())
    }

    /// Fills in fidelity and trace distance against a known state. Both are
    /// left empty when the estimate is not a valid state.
    pub fn with_truth(mut self, truth: &DensityMatrix) -> Result<Self> {
        if let Some(rho) = self.state() {
            self.fidelity_vs_truth = Some(fidelity(&rho, truth)?);
            self.trace_distance_vs_truth = Some(trace_distance(&rho, truth)?);
        }
        Ok(self)
    }

    /// Marks the coefficients fixed at zero by a known ancilla: for
    /// `ρ = ρ_a ⊗ σ` every `E_i ⊗ E_j` with a vanishing ancilla component
    /// `Tr(ρ_a E_i)` is zero whatever `σ` is.
    pub fn with_fixed_ancilla(mut self, ancilla: &DensityMatrix) -> Result<Self> {
        let a = to_pauli(ancilla)?;
        if a.dim != 2 || self.estimate.dim != 4 {
            return Err(Error::InvalidArgument("fixed ancilla needs a qubit ancilla and a two-qubit estimate".into()));
        }
        self.known_zero = (1..16)
            .filter(|k| a.coeffs[k / 4].abs() < 1e-12)
            .map(|k| basis_label(4, k))
            .collect();
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-coefficient CSV: `label,estimate,truth,error,bayes_std,known_zero`.
    /// Truth-based and Bayesian columns are empty when unavailable.
    pub fn write_csv<W: Write>(&self, w: W, truth: Option<&DensityMatrix>) -> Result<()> {
        let truth = truth.map(to_pauli).transpose()?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["label", "estimate", "truth", "error", "bayes_std", "known_zero"])?;
        let dim = self.estimate.dim;
        for k in 1..dim * dim {
            let est = self.estimate.coeffs[k];
            let (t, e) = match &truth {
                Some(t) => (t.coeffs[k].to_string(), (est - t.coeffs[k]).to_string()),
                None => (String::new(), String::new()),
            };
            let s = self
                .bayes_cov
                .as_ref()
                .map(|c| c[k - 1][k - 1].max(0.0).sqrt().to_string())
                .unwrap_or_default();
            let label = basis_label(dim, k);
            let known = self.known_zero.contains(&label).to_string();
            out.write_record([label, est.to_string(), t, e, s, known])?;
        }
        out.flush()?;
        Ok(())
    }
}
