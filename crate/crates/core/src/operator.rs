//! Dense complex operators.
//!
//! Every operator in the crate (chain Hamiltonians of dimension `3^L`, qutrit
//! gates, Rydberg Hamiltonians) is a [`DenseOperator`]: a thin wrapper over a
//! square `nalgebra` matrix with the handful of helpers the physics needs.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<C64>,
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square(), "operators are square");
        Self { matrix }
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// Diagonal unitary `diag(e^{i p_0}, e^{i p_1}, ...)`.
    pub fn phase_diagonal(phases: &[f64]) -> Self {
        let entries: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        Self::diagonal(&entries)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self::from_matrix(self.matrix.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_matrix(self.matrix.transpose())
    }

    pub fn conj(&self) -> Self {
        Self::from_matrix(self.matrix.map(|z| z.conj()))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix(self.matrix.kronecker(&other.matrix))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_matrix(&self.matrix * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// `self · other · self†`.
    pub fn conjugate(&self, other: &Self) -> Self {
        &(self * other) * &self.dagger()
    }

    pub fn apply(&self, state: &DVector<C64>) -> DVector<C64> {
        &self.matrix * state
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (&self.matrix * self.matrix.adjoint() - DMatrix::identity(self.dim(), self.dim()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() < tol
    }

    pub fn require_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation < tol::UNITARY {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation < tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    /// `Some(c)` if `self = c · other` up to `tol`, with `other` unitary.
    ///
    /// Compares `other† · self` against the scalar multiple of the identity
    /// given by its normalized trace.
    pub fn proportional_to(&self, other: &Self, tol: f64) -> Option<C64> {
        if self.dim() != other.dim() {
            return None;
        }
        let m = &other.dagger() * self;
        let c = m.trace() / self.dim() as f64;
        let off = (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let expected = if i == j { c } else { C64::new(0.0, 0.0) };
                (m.get(i, j) - expected).norm()
            })
            .fold(0.0, f64::max);
        (off < tol && c.norm() > tol).then_some(c)
    }

    /// Global-phase-insensitive equality for unitaries.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.proportional_to(other, tol)
            .is_some_and(|c| (c.norm() - 1.0).abs() < tol)
    }

    /// Hermitian eigendecomposition with ascending eigenvalues.
    pub fn eigh(&self) -> Eigh {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            eig.eigenvectors[(i, order[j])]
        });
        Eigh { values, vectors }
    }

    /// `exp(-i t H)` for Hermitian `H`, exactly unitary by construction.
    pub fn hermitian_propagator(&self, t: f64) -> Self {
        self.eigh().function(|e| C64::from_polar(1.0, -e * t))
    }
}

impl Eigh {
    /// Applies `f` to the spectrum: `V f(Λ) V†`.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> DenseOperator {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let fe = f(e);
            for i in 0..n {
                scaled[(i, j)] *= fe;
            }
        }
        DenseOperator::from_matrix(scaled * self.vectors.adjoint())
    }
}

impl<'a> Mul<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(&self.matrix * &rhs.matrix)
    }
}

impl Mul for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(self.matrix * rhs.matrix)
    }
}

impl Mul<C64> for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: C64) -> DenseOperator {
        DenseOperator::from_matrix(self.matrix * rhs)
    }
}

impl Add for DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(self.matrix + rhs.matrix)
    }
}

impl<'a> Add<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(&self.matrix + &rhs.matrix)
    }
}

impl AddAssign<&DenseOperator> for DenseOperator {
    fn add_assign(&mut self, rhs: &DenseOperator) {
        self.matrix += &rhs.matrix;
    }
}

impl Sub for DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(self.matrix - rhs.matrix)
    }
}

impl<'a> Sub<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(&self.matrix - &rhs.matrix)
    }
}

impl Neg for DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        DenseOperator::from_matrix(-self.matrix)
    }
}

/// `x + i y` shorthand.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
