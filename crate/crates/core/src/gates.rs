//! The dynamical gate generated by the edge interaction, the `U/V` family of
//! diagonal gates, the qutrit T gate and the single-qutrit Clifford
//! generators.

use std::f64::consts::PI;

use crate::algebra::{omega, pauli_x, root_of_unity};
use crate::effective::edge_interaction_matrix;
use crate::error::{Error, Result};
use crate::hierarchy::{hierarchy_level, DEFAULT_K_MAX};
use crate::operator::{c, DenseOperator};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalGate {
    pub beta_t: f64,
    /// `exp(−i βt H_int)`.
    pub matrix: DenseOperator,
    /// Relative phase of the non-degenerate entry of `H† U H`, in `[0, 2π)`.
    pub theta: f64,
    /// Common phase of the two degenerate entries of `H† U H`.
    pub global_phase: f64,
}

impl DynamicalGate {
    /// `diag(1, 1, e^{iθ})`.
    pub fn diagonal_form(&self) -> DenseOperator {
        diagonal_gate(self.theta)
    }
}

/// `diag(1, 1, e^{iθ})`.
pub fn diagonal_gate(theta: f64) -> DenseOperator {
    DenseOperator::phase_diagonal(&[0.0, 0.0, theta])
}

/// `U = exp(−i βt H_int)` and its Fourier-diagonal form `U = H U_D H†`.
///
/// In the columns of `H` the interaction is `diag(−1, −1, 2)`, so
/// `U_D = e^{iβt} diag(1, 1, e^{−3iβt})`.
pub fn dynamical_gate(beta_t: f64) -> DynamicalGate {
    let matrix = edge_interaction_matrix().hermitian_propagator(beta_t);
    let (_, _, h) = clifford_generators();
    let diag = &(&h.dagger() * &matrix) * &h;
    let base = diag.get(0, 0);
    let mut theta = (diag.get(2, 2) / base).arg().rem_euclid(2.0 * PI);
    if 2.0 * PI - theta < tol::ALGEBRAIC {
        theta = 0.0;
    }
    DynamicalGate { beta_t, matrix, theta, global_phase: base.arg() }
}

/// `diag(ζ^{v_0}, ζ^{v_1}, ζ^{v_2})` with `ζ = e^{2πi/9}`, `v_0 = 0`,
/// `v_1 = 6z + 2γ + 3ε`, `v_2 = 6z + γ + 6ε` (mod 9).
pub fn uv_gate(z: u8, gamma: u8, eps: u8) -> DenseOperator {
    let (z, gamma, eps) = (z as i64 % 3, gamma as i64 % 3, eps as i64 % 3);
    let v1 = 6 * z + 2 * gamma + 3 * eps;
    let v2 = 6 * z + gamma + 6 * eps;
    DenseOperator::diagonal(&[c(1.0, 0.0), root_of_unity(9, v1), root_of_unity(9, v2)])
}

/// `X† U_D X U_D†` for `U_D ∝ diag(1, 1, e^{iθ})`; at `θ = 2π/9` this is the
/// T gate `diag(1, ζ, ζ⁸)`.
pub fn t_from_ud(u_d: &DenseOperator) -> Result<DenseOperator> {
    if u_d.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: u_d.dim() });
    }
    u_d.require_unitary()?;
    let off = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| u_d.get(i, j).norm())
        .fold(0.0, f64::max);
    if off > tol::COMPARE || (u_d.get(0, 0) - u_d.get(1, 1)).norm() > tol::COMPARE {
        return Err(Error::WrongGate("expected diag(1, 1, e^{i theta}) up to phase".into()));
    }
    let x = pauli_x();
    let inner = &(&x.dagger() * u_d) * &x;
    Ok(&inner * &u_d.dagger())
}

/// Qutrit T gate `diag(1, ζ, ζ⁸)`.
pub fn t_gate() -> DenseOperator {
    DenseOperator::diagonal(&[c(1.0, 0.0), root_of_unity(9, 1), root_of_unity(9, 8)])
}

/// `(X, S, H)`: cyclic shift, `S = diag(1, ω, 1)` and the normalized Fourier
/// matrix `H_{jk} = ω^{jk}/√3`.
pub fn clifford_generators() -> (DenseOperator, DenseOperator, DenseOperator) {
    let s = DenseOperator::diagonal(&[c(1.0, 0.0), omega(), c(1.0, 0.0)]);
    let h = DenseOperator::from_fn(3, |j, k| root_of_unity(3, (j * k) as i64) / 3f64.sqrt());
    (pauli_x(), s, h)
}

/// Whether `H V H†` sits on the same hierarchy level as `V`.
pub fn theorem1_check(v: &DenseOperator) -> Result<bool> {
    const BOUND: usize = 6;
    let level = hierarchy_level(v, BOUND)?
        .level
        .ok_or(Error::ExceedsBound(BOUND))?;
    let (_, _, h) = clifford_generators();
    let rotated = hierarchy_level(&h.conjugate(v), DEFAULT_K_MAX)?;
    Ok(rotated.level == Some(level))
}
