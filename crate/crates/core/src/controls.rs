//! Which initial-state components a fixed control Hamiltonian can carry into
//! the measured observable.
//!
//! The commutator of two Pauli strings is either zero or proportional to a
//! single Pauli string, so a table of commutator labels against the
//! Hamiltonian summands shows how information flows between components.
//! The table is label-only and can suggest paths that cancel; the
//! reachability closure follows the nested commutators with their
//! coefficients and agrees with the Fisher-matrix support.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::dynamics::{build_hamiltonian, ControlSetting, RabiDrive};
use crate::dynamics::control::NAMED_AXES;
use crate::qcore::linalg::{commutator, hs_inner, CMatrix};
use crate::qcore::{basis_element, basis_label, check_dim, measured_index, Observable};
use crate::{Error, Result};

/// Default depth of the reachability closure.
pub const DEFAULT_MAX_DEPTH: usize = 6;

/// Relative threshold below which Hamiltonian Pauli weights are dropped.
const TERM_THRESHOLD: f64 = 1e-12;

/// Commutator labels `[term, observable]` for every non-identity basis
/// element against every Hamiltonian summand. `"0"` marks a vanishing
/// commutator; proportionality factors are discarded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorTable {
    pub dim: usize,
    pub observables: Vec<String>,
    pub ham_terms: Vec<String>,
    /// `entries[a][b]` is the label of `[ham_terms[b], observables[a]]`.
    pub entries: Vec<Vec<String>>,
}

impl CommutatorTable {
    pub fn entry(&self, observable: &str, term: &str) -> Option<&str> {
        let a = self.observables.iter().position(|o| o == observable)?;
        let b = self.ham_terms.iter().position(|t| t == term)?;
        Some(&self.entries[a][b])
    }
}

impl fmt::Display for CommutatorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .observables
            .iter()
            .chain(&self.ham_terms)
            .map(|s| s.chars().count())
            .max()
            .unwrap_or(1)
            .max(2)
            + 2;
        write!(f, "{:>width$}", "[H,·]")?;
        for t in &self.ham_terms {
            write!(f, "{t:>width$}")?;
        }
        writeln!(f)?;
        for (obs, row) in self.observables.iter().zip(&self.entries) {
            write!(f, "{obs:>width$}")?;
            for e in row {
                write!(f, "{e:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Label of the single basis element proportional to `m`, `None` if `m = 0`.
fn project_single(dim: usize, m: &CMatrix, context: (&str, &str)) -> Result<Option<usize>> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale < 1e-12 {
        return Ok(None);
    }
    let weights: Vec<f64> = (0..dim * dim)
        .map(|k| hs_inner(basis_element(dim, k).expect("valid index"), m).norm() / dim as f64)
        .collect();
    let max = weights.iter().cloned().fold(0.0, f64::max);
    let significant: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 1e-9 * max).collect();
    match significant.as_slice() {
        [k] => Ok(Some(*k)),
        _ => Err(Error::NonPauliCommutator(context.0.to_string(), context.1.to_string())),
    }
}

/// Builds the commutator table for the given Hamiltonian summands. Summands
/// must be Pauli strings (or multiples of them).
pub fn commutator_table(dim: usize, ham_terms: &[Observable]) -> Result<CommutatorTable> {
    check_dim(dim)?;
    for t in ham_terms {
        if t.dim() != dim {
            return Err(Error::DimensionMismatch(dim, t.dim()));
        }
    }
    let observables: Vec<String> = (1..dim * dim).map(|k| basis_label(dim, k)).collect();
    let mut entries = Vec::with_capacity(observables.len());
    for (a, obs) in observables.iter().enumerate() {
        let e = basis_element(dim, a + 1)?;
        let row = ham_terms
            .iter()
            .map(|t| {
                let comm = commutator(&t.matrix, e);
                Ok(match project_single(dim, &comm, (&t.label, obs))? {
                    Some(k) => basis_label(dim, k),
                    None => "0".to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    Ok(CommutatorTable {
        dim,
        observables,
        ham_terms: ham_terms.iter().map(|t| t.label.clone()).collect(),
        entries,
    })
}

/// Pauli decomposition of the control Hamiltonian, identity excluded.
pub fn hamiltonian_terms(control: &ControlSetting) -> Vec<Observable> {
    let h = build_hamiltonian(control);
    let dim = h.dim();
    let weights: Vec<f64> = (0..dim * dim)
        .map(|k| hs_inner(basis_element(dim, k).expect("valid index"), &h.matrix).re / dim as f64)
        .collect();
    let max = weights.iter().map(|w| w.abs()).fold(0.0, f64::max);
    (1..dim * dim)
        .filter(|&k| max > 0.0 && weights[k].abs() > TERM_THRESHOLD * max)
        .map(|k| Observable::pauli(dim, k).expect("valid index"))
        .collect()
}

/// The Pauli strings of the standard term set: X, Y, Z for one qubit; the
/// coupling X⊗X and all local terms for two.
pub fn default_terms(dim: usize) -> Result<Vec<Observable>> {
    let labels: &[&str] = match dim {
        2 => &["X", "Y", "Z"],
        4 => &["XX", "XI", "YI", "ZI", "IX", "IY", "IZ"],
        _ => return Err(Error::UnsupportedDimension(dim)),
    };
    labels
        .iter()
        .map(|l| {
            let idx = crate::qcore::label_index(dim, l).expect("static label");
            Observable::pauli(dim, idx)
        })
        .collect()
}

/// Components whose initial value can reach the measured observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReachabilitySet {
    pub dim: usize,
    /// Accessible labels in basis order.
    pub accessible: Vec<String>,
    /// Minimal commutator order for each accessible label.
    pub depth: BTreeMap<String, usize>,
}

impl ReachabilitySet {
    pub fn contains(&self, label: &str) -> bool {
        self.depth.contains_key(label)
    }

    /// Non-identity labels that are not accessible.
    pub fn inaccessible(&self) -> Vec<String> {
        (1..self.dim * self.dim)
            .map(|k| basis_label(self.dim, k))
            .filter(|l| !self.contains(l))
            .collect()
    }
}

/// Components whose coefficients are smaller than this (relative to unit
/// Krylov vectors and a unit-norm Hamiltonian) count as exact cancellations.
const CANCEL_EPS: f64 = 1e-9;

/// `E_b ↦ i[H, E_b]` as a real matrix in the Pauli basis (column `b`).
fn adjoint_action(h: &CMatrix, dim: usize) -> Vec<Vec<f64>> {
    let n = dim * dim;
    (0..n)
        .map(|b| {
            let comm = commutator(h, basis_element(dim, b).expect("valid index")) * crate::qcore::linalg::c(0.0, 1.0);
            (0..n)
                .map(|a| hs_inner(basis_element(dim, a).expect("valid index"), &comm).re / dim as f64)
                .collect()
        })
        .collect()
}

/// Closure of the measured observable under nested commutators with the
/// control Hamiltonian, `Z, [H, Z], [H, [H, Z]], …`, up to `max_depth`.
///
/// The nested commutators are tracked with their coefficients rather than
/// label by label, so paths that cancel exactly (for example through a
/// drive with equal `IY` and `IZ` weights) do not mark a component as
/// accessible. A label is accessible at depth `k` when it has a nonzero
/// component in the span of the first `k` nested commutators; the closure
/// therefore coincides with the support of the Heisenberg-picture
/// observable `U†ZU` and of the Fisher-matrix diagonal.
pub fn reachability(control: &ControlSetting, max_depth: usize) -> Result<ReachabilitySet> {
    control.validate()?;
    let dim = control.dim();
    let n = dim * dim;
    let start = measured_index(dim);

    let mut depth_of: Vec<Option<usize>> = vec![None; n];
    depth_of[start] = Some(0);

    let h = build_hamiltonian(control).matrix;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        let action = adjoint_action(&h.unscale(scale), dim);
        let mut basis: Vec<Vec<f64>> = vec![(0..n).map(|k| if k == start { 1.0 } else { 0.0 }).collect()];
        for d in 1..=max_depth {
            let last = basis.last().expect("non-empty");
            let mut v: Vec<f64> = (0..n).map(|a| (0..n).map(|b| action[b][a] * last[b]).sum()).collect();
            // Arnoldi step, orthogonalized twice for stability.
            for _ in 0..2 {
                for q in &basis {
                    let dot: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < CANCEL_EPS {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            for (k, slot) in depth_of.iter_mut().enumerate().skip(1) {
                if slot.is_none() && v[k].abs() > CANCEL_EPS {
                    *slot = Some(d);
                }
            }
            basis.push(v);
        }
    }

    let mut accessible = Vec::new();
    let mut depth = BTreeMap::new();
    for (k, d) in depth_of.iter().enumerate() {
        if let Some(d) = d {
            let label = basis_label(dim, k);
            accessible.push(label.clone());
            depth.insert(label, *d);
        }
    }
    Ok(ReachabilitySet { dim, accessible, depth })
}

fn parse_angles(s: &str) -> Option<(f64, f64)> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_drive(token: &str, rate: f64) -> Result<RabiDrive> {
    let token = token.trim();
    if token == "0" {
        return Ok(RabiDrive::off());
    }
    if let Some(open) = token.find('(') {
        let prefix = &token[..open];
        if !prefix.is_empty() && !NAMED_AXES.iter().any(|(c, _, _)| *c == prefix) {
            return Err(Error::UnknownSetting(token.to_string()));
        }
        let (theta, phi) = parse_angles(&token[open..]).ok_or_else(|| Error::UnknownSetting(token.to_string()))?;
        return Ok(RabiDrive::new(theta, phi, rate));
    }
    NAMED_AXES
        .iter()
        .find(|(code, _, _)| *code == token)
        .map(|(_, theta, phi)| RabiDrive::new(*theta, *phi, rate))
        .ok_or_else(|| Error::UnknownSetting(token.to_string()))
}

/// Control setting from a code: `"A"` for one qubit, `"A+B"` for two (drive
/// `A` on the first, measured qubit, `B` on the second). Tokens are `0` (no drive),
/// an axis code (`X`, `Y`, `Z`, `XY`, `YZ`, `XZ`, `XYZ`) or explicit angles
/// `(θ,φ)`, optionally prefixed by an axis code as in `XYZ(0.3,0.8)`.
/// `g` is ignored for one qubit.
pub fn named_setting(code: &str, omega: f64, g: f64) -> Result<ControlSetting> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid Rabi rate Ω={omega}")));
    }
    // Split on the '+' that is outside parentheses.
    let mut level = 0i32;
    let mut split = None;
    for (i, ch) in code.char_indices() {
        match ch {
            '(' => level += 1,
            ')' => level -= 1,
            '+' if level == 0 => split = Some(i),
            _ => {}
        }
    }
    let setting = match split {
        None => ControlSetting::single(parse_drive(code, omega)?),
        Some(i) => {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidArgument(format!("invalid coupling g={g}")));
            }
            ControlSetting::two_qubit(parse_drive(&code[..i], omega)?, parse_drive(&code[i + 1..], omega)?, g)
        }
    };
    setting.validate()?;
    Ok(setting)
}
