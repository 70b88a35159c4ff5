use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::qcore::linalg::{self, kron, CMatrix};
use crate::qcore::{basis_element, Observable};
use crate::{Error, Result};

/// A Rabi drive `(Ω/2) n·σ` with axis `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
/// `rate` is an angular frequency (radians per time unit).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiDrive {
    pub theta: f64,
    pub phi: f64,
    pub rate: f64,
}

impl RabiDrive {
    pub fn new(theta: f64, phi: f64, rate: f64) -> Self {
        Self { theta, phi, rate }
    }

    pub fn off() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Setting code for this drive: `0`, `X`, `XY`, `XYZ`, … or `(θ,φ)`.
    pub fn code(&self) -> String {
        if self.rate == 0.0 {
            return "0".into();
        }
        for (code, theta, phi) in NAMED_AXES {
            let target = RabiDrive::new(*theta, *phi, 1.0).axis();
            let axis = self.axis();
            if axis.iter().zip(target).all(|(a, b)| (a - b).abs() < 1e-12) {
                return (*code).into();
            }
        }
        format!("({},{})", self.theta, self.phi)
    }

    fn operator(&self) -> CMatrix {
        let n = self.axis();
        let mut h = linalg::zeros(2);
        for (k, nk) in n.iter().enumerate() {
            h += basis_element(2, k + 1).expect("pauli").scale(*nk);
        }
        h.scale(self.rate / 2.0)
    }
}

/// Axis codes and their polar/azimuthal angles.
pub(crate) const NAMED_AXES: &[(&str, f64, f64)] = &[
    ("X", FRAC_PI_2, 0.0),
    ("Y", FRAC_PI_2, FRAC_PI_2),
    ("Z", 0.0, 0.0),
    ("XY", FRAC_PI_2, FRAC_PI_4),
    ("YZ", FRAC_PI_4, FRAC_PI_2),
    ("XZ", FRAC_PI_4, 0.0),
    ("XYZ", FRAC_PI_4, FRAC_PI_4),
];

/// Fixed control Hamiltonian for one qubit, or two qubits with an X⊗X coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSetting {
    pub first: RabiDrive,
    pub second: Option<RabiDrive>,
    pub coupling: f64,
}

impl ControlSetting {
    pub fn single(drive: RabiDrive) -> Self {
        Self {
            first: drive,
            second: None,
            coupling: 0.0,
        }
    }

    pub fn two_qubit(first: RabiDrive, second: RabiDrive, coupling: f64) -> Self {
        Self {
            first,
            second: Some(second),
            coupling,
        }
    }

    pub fn num_qubits(&self) -> usize {
        if self.second.is_some() {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    /// Setting code such as `"XYZ"`, `"0+XYZ"` or `"XY+YZ"`.
    pub fn label(&self) -> String {
        match &self.second {
            None => self.first.code(),
            Some(second) => format!("{}+{}", self.first.code(), second.code()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let drives = std::iter::once(&self.first).chain(self.second.as_ref());
        for d in drives {
            if !(d.rate.is_finite() && d.rate >= 0.0 && d.theta.is_finite() && d.phi.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid Rabi drive {d:?}")));
            }
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid coupling {}", self.coupling)));
        }
        if self.second.is_none() && self.coupling != 0.0 {
            return Err(Error::InvalidArgument("single-qubit setting with nonzero coupling".into()));
        }
        Ok(())
    }
}

/// Acquisition parameters of a record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Characteristic measurement time; the measurement rate is `1/(2τ)`.
    pub tau: f64,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_steps: 200,
            tau: 0.4,
        }
    }
}

impl MeasurementConfig {
    pub fn new(dt: f64, n_steps: usize, tau: f64) -> Result<Self> {
        let cfg = Self { dt, n_steps, tau };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config with `n_steps = round(total_time / dt)`.
    pub fn from_total_time(dt: f64, total_time: f64, tau: f64) -> Result<Self> {
        if !(dt > 0.0) || !(total_time >= 0.0) {
            return Err(Error::InvalidArgument(format!("dt={dt}, T={total_time}")));
        }
        Self::new(dt, (total_time / dt).round() as usize, tau)
    }

    pub fn total_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {}", self.tau)));
        }
        if self.dt > self.tau / 10.0 {
            log::warn!("dt = {} is not much smaller than tau = {}", self.dt, self.tau);
        }
        Ok(())
    }
}

/// `(Ω/2) n·σ` for one qubit;
/// `(g/2) X⊗X + (Ω_a/2)(n_a·σ)⊗I + (Ω_u/2) I⊗(n_u·σ)` for two.
pub fn build_hamiltonian(control: &ControlSetting) -> Observable {
    let h = match &control.second {
        None => control.first.operator(),
        Some(second) => {
            let id = linalg::identity(2);
            let xx = basis_element(4, 5).expect("XX").scale(control.coupling / 2.0);
            xx + kron(&control.first.operator(), &id) + kron(&id, &second.operator())
        }
    };
    Observable::new("H", linalg::hermitian_part(&h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::label_index;

    #[test]
    fn zero_rates_give_zero_hamiltonian() {
        let h = build_hamiltonian(&ControlSetting::two_qubit(RabiDrive::off(), RabiDrive::off(), 0.0));
        assert!(h.matrix.iter().all(|z| z.norm() == 0.0));
        let h1 = build_hamiltonian(&ControlSetting::single(RabiDrive::new(1.0, 2.0, 0.0)));
        assert!(h1.matrix.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn spherical_axis_convention() {
        let n = RabiDrive::new(FRAC_PI_4, FRAC_PI_4, 1.0).axis();
        assert!((n[0] - 0.5).abs() < 1e-15 && (n[1] - 0.5).abs() < 1e-15);
        assert!((n[2] - 0.5f64.sqrt()).abs() < 1e-15);
        for (code, theta, phi) in NAMED_AXES {
            let a = RabiDrive::new(*theta, *phi, 1.0).axis();
            assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12, "{code}");
        }
    }

    #[test]
    fn remote_hamiltonian_matches_closed_form() {
        let (g, omega) = (1.3, 2.1);
        let ctrl = ControlSetting::two_qubit(RabiDrive::off(), RabiDrive::new(FRAC_PI_4, FRAC_PI_4, omega), g);
        let h = build_hamiltonian(&ctrl).matrix;
        let e = |l: &str| basis_element(4, label_index(4, l).unwrap()).unwrap().clone();
        let expect = e("XX").scale(g / 2.0)
            + (e("IX") + e("IY") + e("IZ").scale(2f64.sqrt())).scale(omega / 4.0);
        assert!((h - expect).iter().all(|z| z.norm() < 1e-14));
        assert_eq!(ctrl.label(), "0+XYZ");
    }

    #[test]
    fn labels_follow_axes() {
        let xy = RabiDrive::new(FRAC_PI_2, FRAC_PI_4, 1.0);
        let yz = RabiDrive::new(FRAC_PI_4, FRAC_PI_2, 1.0);
        assert_eq!(ControlSetting::two_qubit(xy, yz, 1.0).label(), "XY+YZ");
        assert_eq!(ControlSetting::single(RabiDrive::new(0.3, 0.2, 1.0)).label(), "(0.3,0.2)");
    }

    #[test]
    fn config_validation() {
        assert!(MeasurementConfig::new(0.0, 10, 1.0).is_err());
        assert!(MeasurementConfig::new(0.01, 10, -1.0).is_err());
        let c = MeasurementConfig::from_total_time(0.01, 2.0, 0.4).unwrap();
        assert_eq!(c.n_steps, 200);
        assert!((c.total_time() - 2.0).abs() < 1e-12);
        assert!(ControlSetting::single(RabiDrive::new(0.0, 0.0, -1.0)).validate().is_err());
    }
}
