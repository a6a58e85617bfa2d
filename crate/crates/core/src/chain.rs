//! The Z3 parafermion chain
//!
//! `H = −Σ_j J_j (α ω̄ ψ_j† χ_{j+1} + h.c.) − Σ_j f_j (α̂ ω̄ χ_j† ψ_j + h.c.)`
//!
//! with `α = e^{−iφ}/sin(π/3)` and `α̂ = e^{−iφ̂}/sin(π/3)`. This normalization
//! reproduces the explicit two-site form with its `2/√3` prefactor and the
//! `{−2J, 0, 2J}` bond spectrum, so it is used for every chain length.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{self, omega, parafermion, SiteIndex, QUTRIT};
use crate::error::{Error, Result};
use crate::operator::{c, DenseOperator};
use crate::{tol, C64};

/// Largest chain handled by the dense solvers (dimension `3^8 = 6561`).
pub const MAX_SITES: usize = 8;

/// Couplings and chiral angles of an open chain of `f.len()` sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// On-site flip couplings `f_1..f_L`.
    pub f: Vec<f64>,
    /// Bond couplings `J_1..J_{L-1}`.
    pub j: Vec<f64>,
    pub phi: f64,
    pub phi_hat: f64,
}

impl ChainSpec {
    pub fn new(f: Vec<f64>, j: Vec<f64>, phi: f64, phi_hat: f64) -> Result<Self> {
        let spec = Self { f, j, phi, phi_hat };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform couplings at the given angles.
    pub fn uniform(len: usize, f: f64, j: f64, phi: f64, phi_hat: f64) -> Result<Self> {
        Self::new(vec![f; len], vec![j; len.saturating_sub(1)], phi, phi_hat)
    }

    /// Uniform couplings at the super-integrable point `φ = φ̂ = π/6`.
    pub fn super_integrable(len: usize, f: f64, j: f64) -> Result<Self> {
        Self::uniform(len, f, j, PI / 6.0, PI / 6.0)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn dim(&self) -> usize {
        QUTRIT.pow(self.len() as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.len();
        if len == 0 {
            return Err(Error::InvalidSpec("chain needs at least one site".into()));
        }
        if len > MAX_SITES {
            return Err(Error::ChainTooLong { len, max: MAX_SITES });
        }
        if self.j.len() + 1 != len {
            return Err(Error::InvalidSpec(format!(
                "{} sites need {} bond couplings, got {}",
                len,
                len - 1,
                self.j.len()
            )));
        }
        for (name, values) in [("f", &self.f), ("J", &self.j)] {
            if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{name} couplings must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.phi.is_finite() || !self.phi_hat.is_finite() {
            return Err(Error::InvalidSpec("chiral angles must be finite".into()));
        }
        Ok(())
    }

    /// Same angles, all couplings multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            f: self.f.iter().map(|v| v * factor).collect(),
            j: self.j.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Same bonds and angles with every flip coupling set to zero.
    pub fn without_flips(&self) -> Self {
        Self { f: vec![0.0; self.len()], ..self.clone() }
    }
}

/// `α_m = e^{iφ(2m−3)} / sin(πm/3)` for `m ∈ {1, 2}`.
pub fn alpha_coefficients(phi: f64, m: i32) -> Result<C64> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidAlphaIndex(m));
    }
    let n = QUTRIT as f64;
    let m_f = m as f64;
    Ok(C64::from_polar(1.0, phi * (2.0 * m_f - n)) / (PI * m_f / n).sin())
}

fn hermitian_pair(op: DenseOperator) -> DenseOperator {
    let dag = op.dagger();
    op + dag
}

/// Bond part `−Σ J_j (α ω̄ ψ_j† χ_{j+1} + h.c.)` in the parafermion picture.
pub fn bond_terms(spec: &ChainSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let len = spec.len();
    let alpha = alpha_coefficients(spec.phi, 1)?;
    let mut h = DenseOperator::zeros(spec.dim());
    for (idx, &jj) in spec.j.iter().enumerate() {
        let site = idx + 1;
        let psi = parafermion(SiteIndex::psi(site), len)?;
        let chi_next = parafermion(SiteIndex::chi(site + 1), len)?;
        let term = (&psi.dagger() * &chi_next).scale(alpha * omega().conj() * jj);
        h = h - hermitian_pair(term);
    }
    Ok(h)
}

/// Flip part `−Σ f_j (α̂ ω̄ χ_j† ψ_j + h.c.)` in the parafermion picture.
pub fn flip_terms(spec: &ChainSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let len = spec.len();
    let alpha_hat = alpha_coefficients(spec.phi_hat, 1)?;
    let mut h = DenseOperator::zeros(spec.dim());
    for (idx, &ff) in spec.f.iter().enumerate() {
        let site = idx + 1;
        let chi = parafermion(SiteIndex::chi(site), len)?;
        let psi = parafermion(SiteIndex::psi(site), len)?;
        let term = (&chi.dagger() * &psi).scale(alpha_hat * omega().conj() * ff);
        h = h - hermitian_pair(term);
    }
    Ok(h)
}

/// Chain Hamiltonian assembled from parafermion operators.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<DenseOperator> {
    Ok(bond_terms(spec)? + flip_terms(spec)?)
}

/// Chain Hamiltonian assembled from clock strings:
/// `−Σ J_j (α σ_j† σ_{j+1} + h.c.) − Σ f_j (α̂ τ_j + h.c.)`.
pub fn build_hamiltonian_clock(spec: &ChainSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let len = spec.len();
    let (sigma, tau) = algebra::clock_generators();
    let sigma_dag = sigma.dagger();
    let alpha = alpha_coefficients(spec.phi, 1)?;
    let alpha_hat = alpha_coefficients(spec.phi_hat, 1)?;
    let mut h = DenseOperator::zeros(spec.dim());
    for (idx, &jj) in spec.j.iter().enumerate() {
        let site = idx + 1;
        let term = algebra::embed(&[(site, &sigma_dag), (site + 1, &sigma)], len).scale(alpha * jj);
        h = h - hermitian_pair(term);
    }
    for (idx, &ff) in spec.f.iter().enumerate() {
        let term = algebra::embed(&[(idx + 1, &tau)], len).scale(alpha_hat * ff);
        h = h - hermitian_pair(term);
    }
    Ok(h)
}

/// Basis-index permutation implementing `ω^P = ∏ τ_j†` on `len` sites:
/// `ω^P |s⟩ = |perm[s]⟩`.
pub fn parity_permutation(len: usize) -> Vec<usize> {
    let dim = QUTRIT.pow(len as u32);
    (0..dim)
        .map(|idx| {
            let mut rest = idx;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..len {
                let digit = rest % QUTRIT;
                rest /= QUTRIT;
                out += ((digit + QUTRIT - 1) % QUTRIT) * place;
                place *= QUTRIT;
            }
            out
        })
        .collect()
}

/// `(ω^P)^power |v⟩` via the basis permutation.
pub fn apply_parity(perm: &[usize], v: &DVector<C64>, power: usize) -> DVector<C64> {
    let mut out = v.clone();
    for _ in 0..power % QUTRIT {
        let mut next = DVector::zeros(v.len());
        for (src, &dst) in perm.iter().enumerate() {
            next[dst] = out[src];
        }
        out = next;
    }
    out
}

/// Parity-sector projector `Π_q v = (1/3) Σ_k ω^{−qk} (ω^P)^k v`.
fn project_sector(perm: &[usize], v: &DVector<C64>, q: usize) -> DVector<C64> {
    let mut out = DVector::zeros(v.len());
    for k in 0..QUTRIT {
        out += apply_parity(perm, v, k) * (algebra::omega_pow(-((q * k) as i64)) / QUTRIT as f64);
    }
    out
}

/// Number of sites for a chain operator of dimension `3^L`.
pub fn sites_for_dim(dim: usize) -> Option<usize> {
    let mut len = 0;
    let mut d = 1;
    while d < dim {
        d *= QUTRIT;
        len += 1;
    }
    (d == dim).then_some(len)
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending spectrum.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`, a parity eigenstate.
    pub eigenvectors: DMatrix<C64>,
    /// Label `q` means `ω^P` eigenvalue `ω^q`.
    pub parity_labels: Vec<u8>,
    /// Number of levels within the degeneracy threshold of the minimum.
    pub ground_dim: usize,
}

impl SpectrumResult {
    pub fn ground_projector(&self) -> DenseOperator {
        let g = self.eigenvectors.columns(0, self.ground_dim);
        DenseOperator::from_matrix(g * g.adjoint())
    }

    /// Ground-state vectors as columns.
    pub fn ground_states(&self) -> DMatrix<C64> {
        self.eigenvectors.columns(0, self.ground_dim).into_owned()
    }

    pub fn lowest(&self, n: usize) -> &[f64] {
        &self.eigenvalues[..n.min(self.eigenvalues.len())]
    }
}

/// Full spectrum of a Hermitian chain operator, with eigenvectors rotated into
/// simultaneous eigenstates of `ω^P` inside each degenerate level.
pub fn diagonalize(h: &DenseOperator) -> Result<SpectrumResult> {
    let scale = h.max_abs().max(1.0);
    h.require_hermitian(tol::ALGEBRAIC * scale)?;
    let len = sites_for_dim(h.dim())
        .ok_or_else(|| Error::InvalidSpec(format!("dimension {} is not a power of 3", h.dim())))?;
    let eig = h.eigh();
    let n = eig.values.len();
    let width = eig.values[n - 1] - eig.values[0];
    let threshold = tol::DEGENERACY * width;
    let perm = parity_permutation(len);

    let mut vectors = DMatrix::<C64>::zeros(n, n);
    let mut labels = vec![0u8; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[start] <= threshold {
            end += 1;
        }
        let block = eig.vectors.columns(start, end - start).into_owned();
        let mut col = start;
        for q in 0..QUTRIT {
            // Restricted projector V† Π_q V; its unit eigenvectors span the sector.
            let projected: Vec<DVector<C64>> = (0..block.ncols())
                .map(|k| project_sector(&perm, &block.column(k).into_owned(), q))
                .collect();
            let restricted = DMatrix::from_fn(block.ncols(), block.ncols(), |a, b| {
                block.column(a).dotc(&projected[b])
            });
            let local = DenseOperator::from_matrix(restricted).eigh();
            for (k, &val) in local.values.iter().enumerate() {
                if val > 0.5 {
                    let v = &block * local.vectors.column(k);
                    let v = v.normalize();
                    vectors.set_column(col, &v);
                    labels[col] = q as u8;
                    col += 1;
                }
            }
        }
        debug_assert_eq!(col, end, "parity sectors must exhaust a degenerate level");
        start = end;
    }

    let ground_dim = eig
        .values
        .iter()
        .take_while(|&&e| e - eig.values[0] <= threshold)
        .count();
    Ok(SpectrumResult {
        eigenvalues: eig.values,
        eigenvectors: vectors,
        parity_labels: labels,
        ground_dim,
    })
}

/// First-order left edge mode
/// `Ψ = χ_1 − 2if e^{−iφ̂} X + 2iωf e^{iφ̂} χ_1† Y`, `Y = −X†`,
/// `X = (ψ_1 + e^{2iφ} χ_2 + e^{−2iφ} ω ψ_1† χ_2†) / (4 J_1 sin 3φ)`.
///
/// The factor `ω` on the last term is fixed by requiring the `O(f)` part of
/// `[H, Ψ]` to cancel for this operator representation.
pub fn edge_mode_first_order(spec: &ChainSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let len = spec.len();
    if len < 2 {
        return Err(Error::ChainTooShort { min: 2, got: len });
    }
    let f = spec.f[0];
    if spec.f.iter().any(|&v| (v - f).abs() > 1e-15 * f.max(1.0)) {
        return Err(Error::NonUniformFlip);
    }
    let s3 = (3.0 * spec.phi).sin();
    if s3.abs() < tol::ALGEBRAIC {
        return Err(Error::SingularCorrection { phi: spec.phi });
    }
    let chi1 = parafermion(SiteIndex::chi(1), len)?;
    let psi1 = parafermion(SiteIndex::psi(1), len)?;
    let chi2 = parafermion(SiteIndex::chi(2), len)?;
    let w = omega();
    let phi = spec.phi;
    let x = (psi1.clone()
        + chi2.scale(C64::from_polar(1.0, 2.0 * phi))
        + (&psi1.dagger() * &chi2.dagger()).scale(C64::from_polar(1.0, -2.0 * phi) * w))
        .scale_real(1.0 / (4.0 * spec.j[0] * s3));
    let y = -x.dagger();
    let i = c(0.0, 1.0);
    let correction_x = x.scale(-2.0 * i * f * C64::from_polar(1.0, -spec.phi_hat));
    let correction_y =
        (&chi1.dagger() * &y).scale(2.0 * i * w * f * C64::from_polar(1.0, spec.phi_hat));
    Ok(chi1 + correction_x + correction_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parity_operator;

    #[test]
    fn alpha_examples() {
        let a = alpha_coefficients(PI / 6.0, 1).unwrap();
        let expected = C64::from_polar(1.0, -PI / 6.0) / (PI / 3.0).sin();
        assert!((a - expected).norm() < 1e-15);
        let a0 = alpha_coefficients(0.0, 1).unwrap();
        assert!((a0 - c(1.0 / (PI / 3.0).sin(), 0.0)).norm() < 1e-15);
        let a2 = alpha_coefficients(PI / 6.0, 2).unwrap();
        let expected2 = C64::from_polar(1.0, PI / 6.0) / (2.0 * PI / 3.0).sin();
        assert!((a2 - expected2).norm() < 1e-15);
        assert_eq!(alpha_coefficients(0.1, 3), Err(Error::InvalidAlphaIndex(3)));
    }

    #[test]
    fn spec_validation() {
        assert!(ChainSpec::new(vec![0.1, 0.1], vec![], 0.0, 0.0).is_err());
        assert!(ChainSpec::new(vec![-0.1], vec![], 0.0, 0.0).is_err());
        assert!(matches!(
            ChainSpec::uniform(9, 0.1, 1.0, 0.0, 0.0),
            Err(Error::ChainTooLong { len: 9, max: 8 })
        ));
        assert!(ChainSpec::new(vec![0.1, 0.2], vec![1.0], 0.3, 0.4).is_ok());
    }

    #[test]
    fn bond_spectrum_is_minus_two_zero_two() {
        let spec = ChainSpec::super_integrable(2, 0.0, 1.0).unwrap();
        let res = diagonalize(&build_hamiltonian(&spec).unwrap()).unwrap();
        for (k, target) in [-2.0, 0.0, 2.0].iter().enumerate() {
            for e in &res.eigenvalues[3 * k..3 * k + 3] {
                assert!((e - target).abs() < 1e-10);
            }
        }
        assert_eq!(res.ground_dim, 3);
        let mut labels = res.parity_labels[..3].to_vec();
        labels.sort();
        assert_eq!(labels, vec![0, 1, 2]);
    }

    #[test]
    fn identity_spectrum() {
        let res = diagonalize(&DenseOperator::identity(9)).unwrap();
        assert!(res.eigenvalues.iter().all(|e| (e - 1.0).abs() < 1e-14));
        assert_eq!(res.ground_dim, 9);
    }

    #[test]
    fn ground_projector_is_idempotent() {
        let spec = ChainSpec::super_integrable(3, 0.0, 1.0).unwrap();
        let res = diagonalize(&build_hamiltonian(&spec).unwrap()).unwrap();
        let p = res.ground_projector();
        assert!((&p * &p).max_abs_diff(&p) < tol::PROJECTOR);
        assert!((p.trace().re - 3.0).abs() < 1e-10);
    }

    #[test]
    fn parity_labels_match_expectation_values() {
        let spec = ChainSpec::new(vec![0.2, 0.1, 0.3], vec![1.0, 0.7], 0.4, 0.2).unwrap();
        let res = diagonalize(&build_hamiltonian(&spec).unwrap()).unwrap();
        let p = parity_operator(3);
        for k in 0..res.eigenvalues.len() {
            let v = res.eigenvectors.column(k).into_owned();
            let ev = v.dotc(&p.apply(&v));
            let expected = algebra::omega_pow(res.parity_labels[k] as i64);
            assert!((ev - expected).norm() < 1e-8, "level {k}");
        }
    }

    #[test]
    fn small_flip_splits_ground_level_at_second_order() {
        // Second-order prediction: shift −2f² on all, interaction f²·{2,−1,−1}.
        let f = 0.1;
        let spec = ChainSpec::super_integrable(2, f, 1.0).unwrap();
        let res = diagonalize(&build_hamiltonian(&spec).unwrap()).unwrap();
        let low = res.lowest(3);
        let predicted = [-2.0 - 3.0 * f * f, -2.0 - 3.0 * f * f, -2.0];
        for (e, p) in low.iter().zip(predicted) {
            assert!((e - p).abs() < 5.0 * f.powi(3), "{e} vs {p}");
        }
        assert!(low[2] - low[0] > 2.0 * f * f);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let a = DenseOperator::from_fn(3, |i, j| c((i + 2 * j) as f64, 0.0));
        assert!(matches!(diagonalize(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn edge_mode_without_flips_is_chi_one() {
        let spec = ChainSpec::super_integrable(3, 0.0, 1.0).unwrap();
        let psi = edge_mode_first_order(&spec).unwrap();
        let chi1 = parafermion(SiteIndex::chi(1), 3).unwrap();
        assert!(psi.max_abs_diff(&chi1) < 1e-15);
    }

    #[test]
    fn edge_mode_coefficient_at_symmetric_point() {
        // |−2if e^{−iφ̂}/(4J sin(π/2))| = 2f/(4J) for the ψ_1 component.
        let f = 0.05;
        let spec = ChainSpec::super_integrable(2, f, 1.0).unwrap();
        let psi = edge_mode_first_order(&spec).unwrap();
        let chi1 = parafermion(SiteIndex::chi(1), 2).unwrap();
        let psi1 = parafermion(SiteIndex::psi(1), 2).unwrap();
        // Hilbert–Schmidt overlap picks out the ψ_1 coefficient.
        let coeff = (&psi1.dagger() * &(psi - chi1)).trace() / 9.0;
        assert!((coeff.norm() - 2.0 * f / 4.0).abs() < 1e-12);
    }

    #[test]
    fn edge_mode_rejects_singular_and_non_uniform() {
        let spec = ChainSpec::uniform(2, 0.1, 1.0, 0.0, 0.1).unwrap();
        assert!(matches!(edge_mode_first_order(&spec), Err(Error::SingularCorrection { .. })));
        let spec = ChainSpec::new(vec![0.1, 0.2], vec![1.0], 0.5, 0.5).unwrap();
        assert_eq!(edge_mode_first_order(&spec), Err(Error::NonUniformFlip));
        let spec = ChainSpec::super_integrable(1, 0.1, 1.0).unwrap();
        assert!(matches!(edge_mode_first_order(&spec), Err(Error::ChainTooShort { .. })));
    }

    #[test]
    fn parity_permutation_matches_dense_operator() {
        let perm = parity_permutation(2);
        let p = parity_operator(2);
        for (src, &dst) in perm.iter().enumerate() {
            assert!((p.get(dst, src) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }
}
