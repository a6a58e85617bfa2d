//! Numerical workbench for Z3 parafermion chains and the qutrit gates they
//! generate.
//!
//! The crate is organised bottom-up:
//!
//! * [`operator`] and [`algebra`]: dense operators, clock matrices,
//!   parafermion strings, Weyl–Heisenberg displacements and Pauli/Clifford
//!   predicates.
//! * [`chain`]: chain Hamiltonian in the parafermion and clock pictures, exact
//!   diagonalization with parity labels, first-order edge mode.
//! * [`effective`]: degenerate perturbation theory on the encoded ground space,
//!   closed-form interaction Hamiltonians, decimation, comparison tables.
//! * [`gates`] and [`hierarchy`]: the dynamical gate and Clifford-hierarchy
//!   classification.
//! * [`magic`] and [`sampler`]: discrete Wigner functions, contextuality
//!   score, strange states, random-word sampling.
//! * [`rydberg`] and [`berry`]: four-level Rydberg scheme, adiabatic
//!   elimination, time evolution and Berry-phase loops.

pub mod algebra;
pub mod berry;
pub mod chain;
pub mod effective;
pub mod error;
pub mod gates;
pub mod hierarchy;
pub mod magic;
pub mod operator;
pub mod rydberg;
pub mod sampler;

pub use error::{Error, Result};
pub use operator::DenseOperator;

pub use num_complex::Complex64 as C64;

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Phase-insensitive operator comparisons and membership tests.
    pub const COMPARE: f64 = 1e-9;
    /// Exact algebraic identities (commutation relations, Hermiticity).
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Unitarity of flagged operators.
    pub const UNITARY: f64 = 1e-10;
    /// Ground-space grouping, relative to the spectral width.
    pub const DEGENERACY: f64 = 1e-8;
    /// Idempotency of spectral projectors.
    pub const PROJECTOR: f64 = 1e-10;
    /// Density-matrix validation (trace, Hermiticity, positivity).
    pub const DENSITY: f64 = 1e-9;
}
