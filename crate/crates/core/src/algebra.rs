//! Clock and shift matrices, parafermion strings on `L` sites, the global
//! Z3 parity, and Weyl–Heisenberg displacements with Pauli/Clifford
//! membership predicates.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::{tol, C64};

/// Local dimension of a clock site.
pub const QUTRIT: usize = 3;

/// `ω^k` with `ω = e^{2πi/3}`.
pub fn omega_pow(k: i64) -> C64 {
    root_of_unity(QUTRIT as u64, k)
}

pub fn omega() -> C64 {
    omega_pow(1)
}

/// `e^{2πi k / n}`.
pub fn root_of_unity(n: u64, k: i64) -> C64 {
    let k = k.rem_euclid(n as i64);
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Clock matrix `diag(1, ω_d, ω_d², ...)`.
pub fn clock(d: usize) -> DenseOperator {
    let entries: Vec<C64> = (0..d).map(|k| root_of_unity(d as u64, k as i64)).collect();
    DenseOperator::diagonal(&entries)
}

/// Cyclic shift `|j⟩ → |j+1 mod d⟩`.
pub fn shift(d: usize) -> DenseOperator {
    DenseOperator::from_fn(d, |i, j| {
        if i == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `(σ, τ)`: `σ = diag(1, ω, ω²)` and the cyclic shift `τ`, with `στ = ωτσ`.
pub fn clock_generators() -> (DenseOperator, DenseOperator) {
    (clock(QUTRIT), shift(QUTRIT))
}

/// Places single-site operators on a chain of `len` qutrits; sites are
/// 1-based and site 1 is the most significant tensor factor.
pub fn embed(ops: &[(usize, &DenseOperator)], len: usize) -> DenseOperator {
    let id = DenseOperator::identity(QUTRIT);
    let mut out: Option<DenseOperator> = None;
    for site in 1..=len {
        let mut factor = id.clone();
        for (s, op) in ops {
            if *s == site {
                factor = &factor * op;
            }
        }
        out = Some(match out {
            None => factor,
            Some(acc) => acc.kron(&factor),
        });
    }
    out.unwrap_or_else(|| DenseOperator::identity(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParafermionKind {
    Chi,
    Psi,
}

/// A parafermion `χ_j` or `ψ_j`; `site` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SiteIndex {
    pub site: usize,
    pub kind: ParafermionKind,
}

impl SiteIndex {
    pub fn chi(site: usize) -> Self {
        Self { site, kind: ParafermionKind::Chi }
    }

    pub fn psi(site: usize) -> Self {
        Self { site, kind: ParafermionKind::Psi }
    }
}

/// `χ_j = (∏_{k<j} τ_k) σ_j` or `ψ_j = ω (∏_{k<j} τ_k) σ_j τ_j` on `len` sites.
pub fn parafermion(index: SiteIndex, len: usize) -> Result<DenseOperator> {
    if index.site == 0 || index.site > len {
        return Err(Error::SiteOutOfRange { site: index.site, len });
    }
    let (sigma, tau) = clock_generators();
    let local = match index.kind {
        ParafermionKind::Chi => sigma,
        ParafermionKind::Psi => &sigma * &tau,
    };
    let mut ops: Vec<(usize, &DenseOperator)> = (1..index.site).map(|k| (k, &tau)).collect();
    ops.push((index.site, &local));
    let string = embed(&ops, len);
    Ok(match index.kind {
        ParafermionKind::Chi => string,
        ParafermionKind::Psi => string.scale(omega()),
    })
}

/// Z3 symmetry generator `ω^P = ∏_j τ_j†`.
pub fn parity_operator(len: usize) -> DenseOperator {
    let tau_dag = shift(QUTRIT).dagger();
    let ops: Vec<(usize, &DenseOperator)> = (1..=len).map(|k| (k, &tau_dag)).collect();
    embed(&ops, len)
}

/// A point `(x, z)` of the qutrit phase space `Z3 × Z3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: u8,
    pub z: u8,
}

impl PhasePoint {
    pub fn new(x: i64, z: i64) -> Self {
        Self {
            x: x.rem_euclid(3) as u8,
            z: z.rem_euclid(3) as u8,
        }
    }

    /// All nine points in `(x, z)` lexicographic order.
    pub fn all() -> impl Iterator<Item = PhasePoint> {
        (0..3).flat_map(|x| (0..3).map(move |z| PhasePoint::new(x, z)))
    }

    /// Row-major index `3x + z`.
    pub fn index(self) -> usize {
        3 * self.x as usize + self.z as usize
    }

    pub fn is_origin(self) -> bool {
        self.x == 0 && self.z == 0
    }
}

impl std::ops::Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x as i64 + rhs.x as i64, self.z as i64 + rhs.z as i64)
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{}Z^{}", self.x, self.z)
    }
}

/// Qutrit Pauli `X` (cyclic shift).
pub fn pauli_x() -> DenseOperator {
    shift(QUTRIT)
}

/// Qutrit Pauli `Z = diag(1, ω, ω²)`.
pub fn pauli_z() -> DenseOperator {
    clock(QUTRIT)
}

/// `D^{x,z} = ω^{2xz} X^x Z^z`.
pub fn displacement(p: PhasePoint) -> DenseOperator {
    let xz = (p.x as i64) * (p.z as i64);
    (&pauli_x().pow(p.x as u32) * &pauli_z().pow(p.z as u32)).scale(omega_pow(2 * xz))
}

/// The phase point `p` with `U ∝ D^p`, if any.
pub fn pauli_match(u: &DenseOperator) -> Option<PhasePoint> {
    if u.dim() != QUTRIT {
        return None;
    }
    PhasePoint::all().find(|&p| u.approx_eq_up_to_phase(&displacement(p), tol::COMPARE))
}

fn require_qutrit_unitary(u: &DenseOperator) -> Result<()> {
    if u.dim() != QUTRIT {
        return Err(Error::DimensionMismatch { expected: QUTRIT, got: u.dim() });
    }
    u.require_unitary()
}

/// Whether `U = c·D^p` for some phase point `p` and unit-modulus `c`.
pub fn is_pauli_up_to_phase(u: &DenseOperator) -> Result<bool> {
    require_qutrit_unitary(u)?;
    Ok(pauli_match(u).is_some())
}

/// Whether `U` maps the Pauli generators `X`, `Z` into the Pauli group.
pub fn is_clifford(u: &DenseOperator) -> Result<bool> {
    require_qutrit_unitary(u)?;
    Ok([pauli_x(), pauli_z()]
        .iter()
        .all(|p| pauli_match(&u.conjugate(p)).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::c;
    use proptest::prelude::*;

    fn basis(k: usize) -> nalgebra::DVector<C64> {
        let mut v = nalgebra::DVector::zeros(3);
        v[k] = c(1.0, 0.0);
        v
    }

    #[test]
    fn sigma_acts_with_omega_on_one() {
        let (sigma, _) = clock_generators();
        let out = sigma.apply(&basis(1));
        assert!((out[1] - omega()).norm() < 1e-15);
    }

    #[test]
    fn tau_is_the_cyclic_shift_of_order_three() {
        let (_, tau) = clock_generators();
        assert!((tau.apply(&basis(0))[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((tau.apply(&basis(2))[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(tau.pow(3).max_abs_diff(&DenseOperator::identity(3)) < 1e-15);
    }

    #[test]
    fn group_commutator_is_omega() {
        let (s, t) = clock_generators();
        let gc = &(&(&s * &t) * &s.dagger()) * &t.dagger();
        let expected = DenseOperator::identity(3).scale(omega());
        assert!(gc.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn chi_on_single_site_is_sigma() {
        let chi = parafermion(SiteIndex::chi(1), 1).unwrap();
        assert!(chi.max_abs_diff(&clock_generators().0) < 1e-15);
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        assert_eq!(
            parafermion(SiteIndex::psi(3), 2),
            Err(Error::SiteOutOfRange { site: 3, len: 2 })
        );
        assert!(parafermion(SiteIndex::chi(0), 2).is_err());
    }

    #[test]
    fn chi_pair_commutation_on_two_sites() {
        let a = parafermion(SiteIndex::chi(1), 2).unwrap();
        let b = parafermion(SiteIndex::chi(2), 2).unwrap();
        assert!((&a * &b).max_abs_diff(&(&b * &a).scale(omega())) < 1e-12);
    }

    #[test]
    fn parity_on_one_site_is_tau_dagger() {
        assert!(parity_operator(1).max_abs_diff(&shift(3).dagger()) < 1e-15);
        assert!(parity_operator(3).pow(3).max_abs_diff(&DenseOperator::identity(27)) < 1e-12);
    }

    #[test]
    fn parity_eigenvalues_on_two_sites() {
        // ω^P is normal, so its spectrum follows from the Hermitian parts
        // (ω^P + ω^P†)/2 and (ω^P − ω^P†)/2i diagonalized separately.
        let p = parity_operator(2);
        let re = (&p + &p.dagger()).scale_real(0.5).eigh().values;
        let im = (&p - &p.dagger()).scale(c(0.0, -0.5)).eigh().values;
        let count = |vals: &[f64], target: f64| vals.iter().filter(|v| (**v - target).abs() < 1e-10).count();
        assert_eq!(count(&re, 1.0), 3);
        assert_eq!(count(&re, -0.5), 6);
        assert_eq!(count(&im, 0.0), 3);
        assert_eq!(count(&im, 3f64.sqrt() / 2.0), 3);
        assert_eq!(count(&im, -(3f64.sqrt()) / 2.0), 3);
    }

    #[test]
    fn displacement_examples() {
        assert!(displacement(PhasePoint::new(0, 0)).max_abs_diff(&DenseOperator::identity(3)) < 1e-15);
        assert!(displacement(PhasePoint::new(1, 0)).max_abs_diff(&pauli_x()) < 1e-15);
        let expected = (&pauli_x() * &pauli_z()).scale(omega_pow(2));
        assert!(displacement(PhasePoint::new(1, 1)).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn displacements_are_trace_orthogonal() {
        for p in PhasePoint::all() {
            for q in PhasePoint::all() {
                let t = (&displacement(p).dagger() * &displacement(q)).trace();
                let expected = if p == q { 3.0 } else { 0.0 };
                assert!((t - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_predicate_examples() {
        assert!(is_pauli_up_to_phase(&pauli_z()).unwrap());
        let phased = pauli_x().scale(C64::from_polar(1.0, PI / 7.0));
        assert!(is_pauli_up_to_phase(&phased).unwrap());
        let w = omega();
        let h = DenseOperator::from_rows(
            3,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), w, w.conj(), c(1.0, 0.0), w.conj(), w],
        )
        .scale_real(1.0 / 3f64.sqrt());
        // exhaustive: H differs from every displacement
        for p in PhasePoint::all() {
            assert!(!h.approx_eq_up_to_phase(&displacement(p), 1e-9));
        }
        assert!(!is_pauli_up_to_phase(&h).unwrap());
    }

    #[test]
    fn clifford_predicate_examples() {
        let s = DenseOperator::diagonal(&[c(1.0, 0.0), omega(), c(1.0, 0.0)]);
        assert!(is_clifford(&s).unwrap());
        let p = DenseOperator::phase_diagonal(&[0.0, 0.0, 2.0 * PI / 9.0]);
        assert!(!is_clifford(&p).unwrap());
        assert!(is_clifford(&pauli_x()).unwrap());
    }

    #[test]
    fn predicates_reject_non_unitary() {
        let a = DenseOperator::identity(3).scale_real(0.5);
        assert!(matches!(is_pauli_up_to_phase(&a), Err(Error::NotUnitary { .. })));
        assert!(matches!(is_clifford(&a), Err(Error::NotUnitary { .. })));
    }

    proptest! {
        #[test]
        fn displacements_compose_projectively(x1 in 0i64..3, z1 in 0i64..3, x2 in 0i64..3, z2 in 0i64..3) {
            let p = PhasePoint::new(x1, z1);
            let q = PhasePoint::new(x2, z2);
            let prod = &displacement(p) * &displacement(q);
            prop_assert!(prod.approx_eq_up_to_phase(&displacement(p + q), 1e-12));
        }
    }
}
