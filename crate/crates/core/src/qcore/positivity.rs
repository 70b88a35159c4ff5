//! Closed-form positivity test for two-qubit Pauli coefficient vectors.
//!
//! Arrange `c_ij` as `D = [[1, vᵀ], [u, B]]` with `u_i = c_i0`, `v_j = c_0j`
//! and `B_ij = c_ij` (i, j ∈ {x, y, z}). The state is positive iff all three
//! residuals below are non-negative; they are rescaled coefficients of the
//! characteristic polynomial of `ρ`.

use super::state::PauliCoefficients;
use super::CONSTRAINT_TOL;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityCheck {
    pub feasible: bool,
    pub residuals: [f64; 3],
}

type Mat3 = [[f64; 3]; 3];

fn det3(b: &Mat3) -> f64 {
    b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
}

fn cofactor3(b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let s: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let minor = b[r[0]][s[0]] * b[r[1]][s[1]] - b[r[0]][s[1]] * b[r[1]][s[0]];
            *entry = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    out
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Evaluates the three positivity constraints on a 16-entry coefficient
/// vector (`c_00` first). Feasible iff every residual is ≥ −1e-9.
pub fn check_two_qubit_positivity(coeffs: &PauliCoefficients) -> PositivityCheck {
    debug_assert_eq!(coeffs.dim, 4);
    positivity_residuals(&coeffs.coeffs)
}

pub(crate) fn positivity_residuals(c: &[f64]) -> PositivityCheck {
    let u = [c[4], c[8], c[12]];
    let v = [c[1], c[2], c[3]];
    let b: Mat3 = [[c[5], c[6], c[7]], [c[9], c[10], c[11]], [c[13], c[14], c[15]]];
    let bt = cofactor3(&b);

    let quad = |m: &Mat3| -> f64 {
        (0..3)
            .map(|i| (0..3).map(|j| u[i] * m[i][j] * v[j]).sum::<f64>())
            .sum()
    };
    let ubv = quad(&b);
    let ubtv = quad(&bt);
    let det_b = det3(&b);
    let d_norm = 1.0 + norm2(&c[1..]);

    let ut_b: Vec<f64> = (0..3).map(|j| (0..3).map(|i| u[i] * b[i][j]).sum()).collect();
    let b_v: Vec<f64> = (0..3).map(|i| (0..3).map(|j| b[i][j] * v[j]).sum()).collect();
    let bt_norm: f64 = bt.iter().flatten().map(|x| x * x).sum();

    let r1 = 4.0 - d_norm;
    let r2 = 2.0 * (ubv - det_b) - (d_norm - 2.0);
    let r3 = 8.0 * (ubv - det_b) + (d_norm - 2.0).powi(2) + 8.0 * ubtv
        - 4.0 * (norm2(&u) * norm2(&v) + norm2(&ut_b) + norm2(&b_v) + bt_norm);

    let residuals = [r1, r2, r3];
    PositivityCheck {
        feasible: residuals.iter().all(|&r| r >= CONSTRAINT_TOL),
        residuals,
    }
}
