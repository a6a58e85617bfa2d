//! Effective edge-mode Hamiltonians on the three-fold ground space.
//!
//! The bond part `H₀` is diagonal in the clock basis (`σ_j†σ_{j+1}` is
//! diagonal), so its ground states are product states and the reduced
//! resolvent is a diagonal division. The flip part `V` is applied as a sparse
//! map, which keeps perturbation theory cheap up to eight sites.
//!
//! Encoded basis: `e_0` is the ground state of `H₀` with `χ_1 = 1`, and
//! `e_k = (ω^P)^k e_0`. In this basis `ω^P` acts as the cyclic shift and
//! `χ_1 = diag(1, ω̄, ω)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{omega, shift, QUTRIT};
use crate::chain::{alpha_coefficients, build_hamiltonian, diagonalize, ChainSpec};
use crate::error::{Error, Result};
use crate::operator::{c, DenseOperator};
use crate::C64;

/// Couplings with `max f / min J` at or above this are outside the expansion.
pub const PERTURBATIVE_LIMIT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveHamiltonian {
    pub order: usize,
    /// Multiple of the identity.
    pub shift: f64,
    /// Traceless 3×3 operator in the encoded basis.
    pub interaction: DenseOperator,
    /// Prefactor of `interaction`. Numerical results carry `1.0`.
    pub coupling: f64,
}

impl EffectiveHamiltonian {
    /// `shift · 1 + coupling · interaction`.
    pub fn matrix(&self) -> DenseOperator {
        DenseOperator::identity(QUTRIT).scale_real(self.shift) + self.interaction.scale_real(self.coupling)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix().eigh().values
    }

    pub fn interaction_eigenvalues(&self) -> Vec<f64> {
        self.interaction.eigh().values
    }

    fn split(order: usize, full: DenseOperator) -> Self {
        let shift = full.trace().re / QUTRIT as f64;
        let interaction = full - DenseOperator::identity(QUTRIT).scale_real(shift);
        Self { order, shift, interaction, coupling: 1.0 }
    }
}

/// `A` with `A_{k+1,k} = ω̄`: the projection of `ω χ_1 ψ_L†`.
fn edge_hopping() -> DenseOperator {
    DenseOperator::from_fn(QUTRIT, |i, j| {
        if i == (j + 1) % QUTRIT {
            omega().conj()
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Projected `ω χ_1 ψ_L† + h.c.`: zero diagonal, `(0,1) = ω`, `(0,2) = ω̄`, cyclic.
pub fn edge_interaction_matrix() -> DenseOperator {
    let a = edge_hopping();
    let dag = a.dagger();
    a + dag
}

/// Projected `i ω χ_1 ψ_L† + h.c.`.
pub fn third_order_interaction_matrix() -> DenseOperator {
    let a = edge_hopping().scale(c(0.0, 1.0));
    let dag = a.dagger();
    a + dag
}

/// Interaction matrix of the two-site chain away from `φ̂ = π/6`, as printed:
/// `(0,1) = e^{−2iφ̂}`, `(0,2) = e^{2iφ̂}`, cyclic.
pub fn asymmetric_interaction_matrix(phi_hat: f64) -> DenseOperator {
    let minus = C64::from_polar(1.0, -2.0 * phi_hat);
    DenseOperator::from_fn(QUTRIT, |i, j| {
        if j == (i + 1) % QUTRIT {
            minus
        } else if i == (j + 1) % QUTRIT {
            minus.conj()
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `[2cos2φ̂, −cos2φ̂ + √3 sin2φ̂, −cos2φ̂ − √3 sin2φ̂]`.
pub fn asymmetric_eigenvalues(phi_hat: f64) -> [f64; 3] {
    let (s, co) = (2.0 * phi_hat).sin_cos();
    let r3 = 3f64.sqrt();
    [2.0 * co, -co + r3 * s, -co - r3 * s]
}

/// Encoded action of `ω^P`: the cyclic shift `e_k → e_{k+1}`.
pub fn encoded_parity() -> DenseOperator {
    shift(QUTRIT)
}

/// Clock-basis description of `H₀` and `V` for one chain.
struct SparseChain {
    len: usize,
    /// Diagonal of the bond Hamiltonian.
    h0: Vec<f64>,
    flips: Vec<(usize, C64)>,
}

impl SparseChain {
    fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let len = spec.len();
        let dim = spec.dim();
        let alpha = alpha_coefficients(spec.phi, 1)?;
        let alpha_hat = alpha_coefficients(spec.phi_hat, 1)?;
        let h0 = (0..dim)
            .map(|idx| {
                let d = digits(idx, len);
                spec.j
                    .iter()
                    .enumerate()
                    .map(|(b, &jj)| {
                        let diff = d[b + 1] as i64 - d[b] as i64;
                        -2.0 * jj * (alpha * crate::algebra::omega_pow(diff)).re
                    })
                    .sum()
            })
            .collect();
        let flips = spec
            .f
            .iter()
            .enumerate()
            .map(|(site, &f)| (QUTRIT.pow((len - 1 - site) as u32), -alpha_hat * f))
            .collect();
        Ok(Self { len, h0, flips })
    }

    fn dim(&self) -> usize {
        self.h0.len()
    }

    /// `V v` with `V = Σ_j (a_j τ_j + ā_j τ_j†)`.
    fn apply_v(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![c(0.0, 0.0); v.len()];
        for &(place, amp) in &self.flips {
            for (idx, &x) in v.iter().enumerate() {
                if x == c(0.0, 0.0) {
                    continue;
                }
                let digit = (idx / place) % QUTRIT;
                let up = if digit == QUTRIT - 1 { idx - digit * place } else { idx + place };
                let down = if digit == 0 { idx + (QUTRIT - 1) * place } else { idx - place };
                out[up] += amp * x;
                out[down] += amp.conj() * x;
            }
        }
        out
    }

    fn ground(&self) -> Result<GroundBasis> {
        let e0 = self.h0.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = self.h0.iter().map(|e| e.abs()).fold(1.0, f64::max);
        let members: Vec<usize> =
            (0..self.dim()).filter(|&i| (self.h0[i] - e0).abs() <= 1e-9 * scale).collect();
        if members.len() != QUTRIT {
            return Err(Error::DegenerateBasis(members.len()));
        }
        let first = members
            .iter()
            .copied()
            .find(|&i| digits(i, self.len)[0] == 0)
            .ok_or(Error::DegenerateBasis(members.len()))?;
        // (ω^P)^k lowers every digit by k.
        let lower = |idx: usize, k: usize| -> usize {
            digits(idx, self.len)
                .iter()
                .fold(0, |acc, &d| acc * QUTRIT + (d + QUTRIT * k - k) % QUTRIT)
        };
        Ok(GroundBasis { indices: [first, lower(first, 1), lower(first, 2)], energy: e0 })
    }
}

fn digits(idx: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    let mut rest = idx;
    for slot in out.iter_mut().rev() {
        *slot = rest % QUTRIT;
        rest /= QUTRIT;
    }
    out
}

/// Clock-basis indices of the encoded states `e_0, e_1, e_2` and their
/// common unperturbed energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundBasis {
    pub indices: [usize; 3],
    pub energy: f64,
}

/// Ground basis of the bond Hamiltonian of `spec`.
pub fn ground_basis(spec: &ChainSpec) -> Result<GroundBasis> {
    SparseChain::new(spec)?.ground()
}

/// Projects a dense chain operator onto the encoded basis.
pub fn project(op: &DenseOperator, basis: &GroundBasis) -> DenseOperator {
    DenseOperator::from_fn(QUTRIT, |a, b| op.get(basis.indices[a], basis.indices[b]))
}

fn perturbative_ratio(spec: &ChainSpec) -> f64 {
    let max_f = spec.f.iter().cloned().fold(0.0, f64::max);
    let min_j = spec.j.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_f == 0.0 {
        0.0
    } else {
        max_f / min_j
    }
}

/// Second- and third-order corrections without the regime guard.
fn corrections(spec: &ChainSpec) -> Result<(DenseOperator, DenseOperator)> {
    if spec.len() < 2 {
        return Err(Error::ChainTooShort { min: 2, got: spec.len() });
    }
    let chain = SparseChain::new(spec)?;
    let basis = chain.ground()?;
    let dim = chain.dim();
    let is_ground = |i: usize| basis.indices.contains(&i);
    let resolve = |v: &[C64]| -> Vec<C64> {
        (0..dim)
            .map(|i| if is_ground(i) { c(0.0, 0.0) } else { v[i] / (basis.energy - chain.h0[i]) })
            .collect()
    };

    let mut v_e = Vec::with_capacity(QUTRIT);
    let mut r_v_e = Vec::with_capacity(QUTRIT);
    let mut v_r_v_e = Vec::with_capacity(QUTRIT);
    let mut v_r_v_r_v_e = Vec::with_capacity(QUTRIT);
    for &g in &basis.indices {
        let mut e = vec![c(0.0, 0.0); dim];
        e[g] = c(1.0, 0.0);
        let ve = chain.apply_v(&e);
        let rve = resolve(&ve);
        let vrve = chain.apply_v(&rve);
        let rvrve = resolve(&vrve);
        v_r_v_r_v_e.push(chain.apply_v(&rvrve));
        v_e.push(ve);
        r_v_e.push(rve);
        v_r_v_e.push(vrve);
    }
    let idx = basis.indices;
    let pvp = DenseOperator::from_fn(QUTRIT, |a, b| v_e[b][idx[a]]);
    let second = DenseOperator::from_fn(QUTRIT, |a, b| v_r_v_e[b][idx[a]]);
    // P V R² V P = (R V e_a)† (R V e_b).
    let pvr2vp = DenseOperator::from_fn(QUTRIT, |a, b| {
        r_v_e[a].iter().zip(&r_v_e[b]).map(|(x, y)| x.conj() * y).sum()
    });
    let third = DenseOperator::from_fn(QUTRIT, |a, b| v_r_v_r_v_e[b][idx[a]])
        - (&pvr2vp * &pvp + &pvp * &pvr2vp).scale_real(0.5);
    Ok((second, third))
}

/// Numerical degenerate perturbation theory, `H₀` = bonds, `V` = flips.
///
/// Returns the correction of exactly `order` (2 or 3) in the encoded basis,
/// split into identity shift and traceless interaction with coupling 1.
pub fn perturbative_effective(spec: &ChainSpec, order: usize) -> Result<EffectiveHamiltonian> {
    if !(2..=3).contains(&order) {
        return Err(Error::InvalidOrder(order));
    }
    let ratio = perturbative_ratio(spec);
    if ratio >= PERTURBATIVE_LIMIT {
        return Err(Error::NonPerturbative { ratio, limit: PERTURBATIVE_LIMIT });
    }
    let (second, third) = corrections(spec)?;
    Ok(EffectiveHamiltonian::split(order, if order == 2 { second } else { third }))
}

fn require_min_len(spec: &ChainSpec) -> Result<usize> {
    spec.validate()?;
    let len = spec.len();
    if len < 2 {
        return Err(Error::ChainTooShort { min: 2, got: len });
    }
    Ok(len)
}

/// Second-order closed form: shift
/// `−(∏_{i<L} f_i² / ∏_{i<L−1} J_i² + f_L²) / J_{L−1}` and coupling
/// `∏ f_i / ∏ J_i` on [`edge_interaction_matrix`].
pub fn closed_form_second(spec: &ChainSpec) -> Result<EffectiveHamiltonian> {
    let len = require_min_len(spec)?;
    let f = &spec.f;
    let j = &spec.j;
    let f_head_sq: f64 = f[..len - 1].iter().map(|x| x * x).product();
    let j_head_sq: f64 = j[..len - 2].iter().map(|x| x * x).product();
    let shift = -(f_head_sq / j_head_sq + f[len - 1].powi(2)) / j[len - 2];
    let coupling = f.iter().product::<f64>() / j.iter().product::<f64>();
    Ok(EffectiveHamiltonian { order: 2, shift, interaction: edge_interaction_matrix(), coupling })
}

/// Third-order closed form: coupling
/// `−(f_L ∏ f_i²/J_i² + (f_L²/J_{L−1}) ∏ f_i/J_i) / √3` (products over `i < L`)
/// on [`third_order_interaction_matrix`], no shift.
pub fn closed_form_third(spec: &ChainSpec) -> Result<EffectiveHamiltonian> {
    let len = require_min_len(spec)?;
    let f_last = spec.f[len - 1];
    let ratios = spec.f[..len - 1].iter().zip(&spec.j);
    let sq: f64 = ratios.clone().map(|(f, j)| (f / j).powi(2)).product();
    let lin: f64 = ratios.map(|(f, j)| f / j).product();
    let coupling = -(f_last * sq + f_last * f_last / spec.j[len - 2] * lin) / 3f64.sqrt();
    Ok(EffectiveHamiltonian {
        order: 3,
        shift: 0.0,
        interaction: third_order_interaction_matrix(),
        coupling,
    })
}

/// Two-site second order with free `φ̂` at `φ = π/6`: shift `−(f_1²+f_2²)/J`,
/// coupling `−f_1 f_2 / J` on [`asymmetric_interaction_matrix`].
pub fn asymmetric_second(spec: &ChainSpec) -> Result<EffectiveHamiltonian> {
    spec.validate()?;
    if spec.len() != 2 {
        return Err(Error::WrongLength { expected: 2, got: spec.len() });
    }
    if (spec.phi - PI / 6.0).abs() > 1e-12 {
        return Err(Error::InvalidSpec(format!("requires phi = pi/6, got {}", spec.phi)));
    }
    let (f1, f2, j) = (spec.f[0], spec.f[1], spec.j[0]);
    Ok(EffectiveHamiltonian {
        order: 2,
        shift: -(f1 * f1 + f2 * f2) / j,
        interaction: asymmetric_interaction_matrix(spec.phi_hat),
        coupling: -f1 * f2 / j,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecimationStep {
    /// 1-based bond between sites `bond_index` and `bond_index + 1`.
    pub bond_index: usize,
    pub f_effective: f64,
    pub remaining_spec: ChainSpec,
}

/// Removes the strongest bond (left-most on ties) and merges its sites into
/// one with field `f_i f_{i+1} / (2 J_i)`.
pub fn decimate(spec: &ChainSpec) -> Result<DecimationStep> {
    require_min_len(spec)?;
    let (b, &jb) = spec
        .j
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, v)| match best {
            Some((_, bv)) if *bv >= *v => best,
            _ => Some((i, v)),
        })
        .expect("at least one bond");
    let (fl, fr) = (spec.f[b], spec.f[b + 1]);
    if jb <= fl.max(fr) {
        return Err(Error::NoDominantBond);
    }
    let f_effective = fl * fr / (2.0 * jb);
    let mut f = spec.f[..b].to_vec();
    f.push(f_effective);
    f.extend_from_slice(&spec.f[b + 2..]);
    let mut j = spec.j[..b].to_vec();
    j.extend_from_slice(&spec.j[b + 1..]);
    Ok(DecimationStep {
        bond_index: b + 1,
        f_effective,
        remaining_spec: ChainSpec { f, j, ..spec.clone() },
    })
}

/// Decimates until one site remains; returns every step.
pub fn decimate_fully(spec: &ChainSpec) -> Result<Vec<DecimationStep>> {
    let mut steps = Vec::new();
    let mut current = spec.clone();
    while current.len() > 1 {
        let step = decimate(&current)?;
        current = step.remaining_spec.clone();
        steps.push(step);
    }
    Ok(steps)
}

/// Two-site interaction strength three ways: measured from the exact
/// ground-level spread (`spread / 3`), the perturbative `f_1 f_2 / J` and the
/// decimation field `f_1 f_2 / (2J)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingComparison {
    pub measured: f64,
    pub perturbative: f64,
    pub decimation: f64,
}

pub fn coupling_comparison(spec: &ChainSpec) -> Result<CouplingComparison> {
    spec.validate()?;
    if spec.len() != 2 {
        return Err(Error::WrongLength { expected: 2, got: spec.len() });
    }
    let exact = diagonalize(&build_hamiltonian(spec)?)?;
    let low = exact.lowest(3);
    let (f1, f2, j) = (spec.f[0], spec.f[1], spec.j[0]);
    Ok(CouplingComparison {
        measured: (low[2] - low[0]) / 3.0,
        perturbative: f1 * f2 / j,
        decimation: f1 * f2 / (2.0 * j),
    })
}

/// One row of the exact-versus-perturbative ground-level table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub f: f64,
    pub exact: [f64; 3],
    pub perturbative: [f64; 3],
    pub nonperturbative: bool,
}

impl ComparisonRow {
    pub fn residuals(&self) -> [f64; 3] {
        std::array::from_fn(|k| (self.exact[k] - self.perturbative[k]).abs())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().cloned().fold(0.0, f64::max)
    }
}

fn comparison_row(template: &ChainSpec, f: f64) -> Result<ComparisonRow> {
    let spec = ChainSpec { f: vec![f; 2], ..template.clone() };
    spec.validate()?;
    let e_bond = ground_basis(&spec)?.energy;
    let (second, third) = corrections(&spec)?;
    let second_shift = second.trace().re / QUTRIT as f64;
    let offset = e_bond + second_shift;
    let exact = diagonalize(&build_hamiltonian(&spec)?)?;
    let pert = (second + third).eigh().values;
    Ok(ComparisonRow {
        f,
        exact: std::array::from_fn(|k| exact.eigenvalues[k] - offset),
        perturbative: std::array::from_fn(|k| pert[k] + e_bond - offset),
        nonperturbative: perturbative_ratio(&spec) >= PERTURBATIVE_LIMIT,
    })
}

/// Three lowest exact levels of the two-site chain at `f_1 = f_2 = f` against
/// second plus third order, both with the unperturbed energy and the
/// second-order shift deducted. Rows follow the grid order.
pub fn spectrum_comparison(template: &ChainSpec, f_grid: &[f64]) -> Result<Vec<ComparisonRow>> {
    if template.len() != 2 {
        return Err(Error::WrongLength { expected: 2, got: template.len() });
    }
    f_grid.par_iter().map(|&f| comparison_row(template, f)).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
