//! Four-level Rydberg ladder in the rotating frame, adiabatic elimination of
//! the far-detuned level `|3⟩`, a fixed-step exponential integrator, and the
//! mapping of the eliminated Hamiltonian onto the edge interaction.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::effective::edge_interaction_matrix;
use crate::error::{Error, Result};
use crate::operator::{c, DenseOperator};
use crate::{tol, C64};

/// Largest `dt · ‖H‖` accepted by [`evolve`].
pub const STEP_GUARD: f64 = 0.1;

/// Below this `|Δ| / max(Ω_3, Ω_4)` the elimination is not trustworthy.
pub const ELIMINATION_RATIO_WARNING: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RydbergParams {
    /// Rabi frequencies `Ω_1..Ω_4`.
    pub omega: [f64; 4],
    /// Detunings `Δ_1..Δ_4`.
    pub delta: [f64; 4],
    /// Field phases `φ_1..φ_4`.
    pub phase: [f64; 4],
}

impl RydbergParams {
    /// Boost `Δ = (Δ_1 + Δ_2 + Δ_3 + Δ_4) / 2`.
    pub fn boost(&self) -> f64 {
        self.delta.iter().sum::<f64>() / 2.0
    }

    /// `Ω_R = −Ω_4 Ω_3 e^{i(φ_4 − φ_3)} / (2Δ)`.
    pub fn effective_rabi(&self) -> Result<C64> {
        let boost = self.boost();
        if boost == 0.0 {
            return Err(Error::ZeroBoost);
        }
        Ok(-C64::from_polar(self.omega[3] * self.omega[2] / (2.0 * boost), self.phase[3] - self.phase[2]))
    }

    /// `Δ_4 − (Δ_1 + Δ_2 + Δ_3)`.
    pub fn resonance_residual(&self) -> f64 {
        self.delta[3] - (self.delta[0] + self.delta[1] + self.delta[2])
    }

    pub fn check_resonance(&self) -> Result<()> {
        let residual = self.resonance_residual();
        let scale = self.delta.iter().map(|d| d.abs()).fold(1.0, f64::max);
        if residual.abs() > tol::ALGEBRAIC * scale {
            return Err(Error::ResonanceViolated { residual });
        }
        Ok(())
    }

    /// `|Δ| / max(Ω_3, Ω_4)`; infinite when both vanish.
    pub fn elimination_ratio(&self) -> f64 {
        let strong = self.omega[2].max(self.omega[3]);
        if strong == 0.0 {
            f64::INFINITY
        } else {
            self.boost().abs() / strong
        }
    }

    /// Parameters whose eliminated Hamiltonian is `g H_int − (Δ + g) 1`, with
    /// `Δ / Ω_3 = Δ / Ω_4 = ratio` and `|Ω_R| = 2g`.
    pub fn interaction_regime(g: f64, ratio: f64) -> Self {
        let boost = 4.0 * ratio * ratio * g;
        let strong = 2.0 * (g * boost).sqrt();
        let w = 2.0 * PI / 3.0;
        Self {
            omega: [2.0 * g, 2.0 * g, strong, strong],
            delta: [-g, g, boost, boost],
            // −e^{i(φ_4 − φ_3)} = ω̄ puts g ω̄ on the (0, 2) entry.
            phase: [w, w, 0.0, PI - w],
        }
    }

    /// The printed mapping: `Ω_i = 2g`, `Δ_1 = Δ_3 = Δ_4 = g`, `Δ_2 = −g`,
    /// `φ_1 = φ_2 = 2π/3`, `φ_4 − φ_3 = −2π/3`.
    pub fn printed_mapping(g: f64) -> Self {
        let w = 2.0 * PI / 3.0;
        Self {
            omega: [2.0 * g; 4],
            delta: [g, -g, g, g],
            phase: [w, w, 0.0, -w],
        }
    }
}

fn set_pair(m: &mut DenseOperator, i: usize, j: usize, z: C64) {
    let mut raw = m.clone().into_matrix();
    raw[(i, j)] = z;
    raw[(j, i)] = z.conj();
    *m = DenseOperator::from_matrix(raw);
}

/// The 4×4 rotating-frame Hamiltonian with `|3⟩` at zero energy.
pub fn rotating_hamiltonian(p: &RydbergParams) -> Result<DenseOperator> {
    p.check_resonance()?;
    let [d1, d2, d3, _] = p.delta;
    let mut h = DenseOperator::diagonal(&[
        c(-(d1 + d2 + d3), 0.0),
        c(-(d2 + d3), 0.0),
        c(-d3, 0.0),
        c(0.0, 0.0),
    ]);
    let coupling = |k: usize| C64::from_polar(p.omega[k] / 2.0, p.phase[k]);
    set_pair(&mut h, 0, 1, coupling(0));
    set_pair(&mut h, 1, 2, coupling(1));
    set_pair(&mut h, 2, 3, coupling(2));
    set_pair(&mut h, 0, 3, coupling(3));
    Ok(h)
}

fn eliminate_with_boost(p: &RydbergParams, boost: f64) -> DenseOperator {
    let [o1, o2, o3, o4] = p.omega;
    let [d1, d2, d3, _] = p.delta;
    let mut h = DenseOperator::diagonal(&[
        c(-(d1 + d2 + d3 + o4 * o4 / (4.0 * boost)), 0.0),
        c(-(d2 + d3), 0.0),
        c(-(d3 + o3 * o3 / (4.0 * boost)), 0.0),
    ]);
    set_pair(&mut h, 0, 1, C64::from_polar(o1 / 2.0, p.phase[0]));
    set_pair(&mut h, 1, 2, C64::from_polar(o2 / 2.0, p.phase[1]));
    set_pair(&mut h, 0, 2, -C64::from_polar(o4 * o3 / (4.0 * boost), p.phase[3] - p.phase[2]));
    h
}

/// Effective 3×3 Hamiltonian after eliminating `|3⟩` with
/// `c_3 = −(Ω_4 e^{−iφ_4} c_0 + Ω_3 e^{−iφ_3} c_2) / (2Δ)`.
pub fn adiabatic_eliminate(p: &RydbergParams) -> Result<DenseOperator> {
    p.check_resonance()?;
    let boost = p.boost();
    if boost == 0.0 {
        return Err(Error::ZeroBoost);
    }
    Ok(eliminate_with_boost(p, boost))
}

/// Sampled wavefunctions of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<C64>>,
}

impl Trajectory {
    pub fn last(&self) -> &DVector<C64> {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest population of `level` over the samples.
    pub fn max_population(&self, level: usize) -> f64 {
        self.states.iter().map(|s| s[level].norm_sqr()).fold(0.0, f64::max)
    }
}

/// Integrates `i ∂_t ψ = H(t) ψ` on `[0, T]` with `exp(−i H(t + dt/2) dt)`
/// steps; the step is shrunk to divide `T` evenly. Every `stride`-th state
/// and the final state are kept.
pub fn evolve(
    h: impl Fn(f64) -> DenseOperator,
    psi0: &DVector<C64>,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(duration >= 0.0 && duration.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("T = {duration}, dt = {dt}")));
    }
    let steps = (duration / dt).ceil() as usize;
    let step = if steps == 0 { 0.0 } else { duration / steps as f64 };
    let stride = stride.max(1);
    let mut psi = psi0.clone();
    let mut out = Trajectory { times: vec![0.0], states: vec![psi.clone()] };
    for k in 0..steps {
        let t = (k as f64 + 0.5) * step;
        let hk = h(t);
        if hk.dim() != psi.len() {
            return Err(Error::DimensionMismatch { expected: psi.len(), got: hk.dim() });
        }
        let load = step * hk.spectral_norm();
        if load >= STEP_GUARD {
            return Err(Error::StepTooLarge(load));
        }
        psi = hk.hermitian_propagator(step).apply(&psi);
        if (k + 1) % stride == 0 || k + 1 == steps {
            out.times.push((k + 1) as f64 * step);
            out.states.push(psi.clone());
        }
    }
    Ok(out)
}

/// Residual of one convention variant in [`verify_mapping`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingVariant {
    /// `+1` divides by `Δ`, `−1` by `−Δ`.
    pub boost_sign: i8,
    pub conjugated: bool,
    /// Value taken for `φ_4 − φ_3`.
    pub phase_difference: f64,
    pub transposed: bool,
    /// Sign applied to `φ_1 = φ_2 = ±2π/3`.
    pub ladder_phase_sign: i8,
    /// Identity offset removed before comparison.
    pub offset: f64,
    /// Largest entry of `H_eff − g H_int − c 1`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub g: f64,
    /// Eliminated Hamiltonian under the literal reading, row-major `[re, im]`.
    pub literal_matrix: Vec<[f64; 2]>,
    pub literal_residual: f64,
    pub variants: Vec<MappingVariant>,
    pub best: MappingVariant,
}

fn residual_to_target(m: &DenseOperator, target: &DenseOperator) -> (f64, f64) {
    let offset = (m.trace() - target.trace()).re / m.dim() as f64;
    let shifted = m - &DenseOperator::identity(m.dim()).scale_real(offset);
    (offset, shifted.max_abs_diff(target))
}

/// Substitutes the printed mapping into the eliminated Hamiltonian and
/// compares with `g H_int + c 1` across 32 sign and phase conventions.
pub fn verify_mapping(g: f64) -> MappingReport {
    let target = edge_interaction_matrix().scale_real(g);
    let w = 2.0 * PI / 3.0;
    let literal_params = RydbergParams::printed_mapping(g);
    let literal = eliminate_with_boost(&literal_params, literal_params.boost());
    let (_, literal_residual) = residual_to_target(&literal, &target);
    let mut variants = Vec::with_capacity(32);
    for boost_sign in [1i8, -1] {
        for conjugated in [false, true] {
            for phase_difference in [-w, w] {
                for transposed in [false, true] {
                    for ladder_phase_sign in [1i8, -1] {
                        let mut p = RydbergParams::printed_mapping(g);
                        p.phase = [ladder_phase_sign as f64 * w, ladder_phase_sign as f64 * w, 0.0, phase_difference];
                        let mut m = eliminate_with_boost(&p, boost_sign as f64 * p.boost());
                        if conjugated {
                            m = m.conj();
                        }
                        if transposed {
                            m = m.transpose();
                        }
                        let (offset, residual) = residual_to_target(&m, &target);
                        variants.push(MappingVariant {
                            boost_sign,
                            conjugated,
                            phase_difference,
                            transposed,
                            ladder_phase_sign,
                            offset,
                            residual,
                        });
                    }
                }
            }
        }
    }
    let best = variants
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .cloned()
        .expect("32 variants");
    MappingReport {
        g,
        literal_matrix: literal.matrix().transpose().iter().map(|z| [z.re, z.im]).collect(),
        literal_residual,
        variants,
        best,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseDesign {
    pub params: RydbergParams,
    /// `c` with `H_eff = target + c 1`.
    pub offset: f64,
    pub residual: f64,
}

/// Field parameters whose eliminated Hamiltonian equals `target + c 1`.
///
/// Off-diagonals fix `Ω_1, φ_1`, `Ω_2, φ_2`, the product `Ω_3 Ω_4` and
/// `φ_4 − φ_3`; the Stark shifts are split evenly (`Ω_3 = Ω_4`), the boost
/// `Δ > 0` is free, and the diagonal then fixes `Δ_1, Δ_2, Δ_3` with
/// `Δ_4 = Δ_1 + Δ_2 + Δ_3`.
pub fn inverse_design(target: &DenseOperator, boost: f64) -> Result<InverseDesign> {
    if target.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: target.dim() });
    }
    let scale = target.max_abs().max(1.0);
    target.require_hermitian(tol::ALGEBRAIC * scale)?;
    if !(boost > 0.0 && boost.is_finite()) {
        return Err(Error::ZeroBoost);
    }
    let t01 = target.get(0, 1);
    let t12 = target.get(1, 2);
    let t02 = target.get(0, 2);
    let stark = t02.norm();
    let strong = 2.0 * (boost * stark).sqrt();
    let offset = -boost - stark - target.get(0, 0).re;
    let d3 = -stark - target.get(2, 2).re - offset;
    let d2 = -target.get(1, 1).re - offset - d3;
    let d1 = boost - d2 - d3;
    let phase4 = if stark > 0.0 { (-t02).arg() } else { 0.0 };
    let params = RydbergParams {
        omega: [2.0 * t01.norm(), 2.0 * t12.norm(), strong, strong],
        delta: [d1, d2, d3, d1 + d2 + d3],
        phase: [t01.arg(), t12.arg(), 0.0, phase4],
    };
    let built = adiabatic_eliminate(&params)?;
    let shifted = target + &DenseOperator::identity(3).scale_real(offset);
    let residual = built.max_abs_diff(&shifted);
    if residual > 1e-6 * scale {
        return Err(Error::Unreachable(residual));
    }
    Ok(InverseDesign { params, offset, residual })
}

/// `|⟨a|b⟩|²` after normalizing both vectors.
pub fn fidelity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::c;

    fn basis(dim: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        v
    }

    fn random_params(seed: u64) -> RydbergParams {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..3.0));
        RydbergParams {
            omega: std::array::from_fn(|_| rng.random_range(0.0..2.0)),
            delta: [d[0], d[1], d[2] + 20.0, d[0] + d[1] + d[2] + 20.0],
            phase: std::array::from_fn(|_| rng.random_range(-PI..PI)),
        }
    }

    #[test]
    fn zero_fields_give_detuning_diagonal() {
        let p = RydbergParams { omega: [0.0; 4], delta: [1.0, 2.0, 3.0, 6.0], phase: [0.0; 4] };
        let h = rotating_hamiltonian(&p).unwrap();
        let expected = DenseOperator::diagonal(&[c(-6.0, 0.0), c(-5.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0)]);
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        for seed in 0..10 {
            let p = random_params(seed);
            assert!(rotating_hamiltonian(&p).unwrap().is_hermitian(1e-12));
            assert!(adiabatic_eliminate(&p).unwrap().is_hermitian(1e-12));
        }
    }

    #[test]
    fn resonance_and_boost_errors() {
        let mut p = RydbergParams::printed_mapping(1.0);
        p.delta[3] += 0.1;
        assert!(matches!(rotating_hamiltonian(&p), Err(Error::ResonanceViolated { .. })));
        let p = RydbergParams { omega: [1.0; 4], delta: [1.0, -1.0, 0.0, 0.0], phase: [0.0; 4] };
        assert_eq!(adiabatic_eliminate(&p), Err(Error::ZeroBoost));
    }

    #[test]
    fn printed_mapping_diagonals() {
        let g = 0.7;
        let p = RydbergParams::printed_mapping(g);
        let h4 = rotating_hamiltonian(&p).unwrap();
        for (k, e) in [-g, 0.0, -g, 0.0].iter().enumerate() {
            assert!((h4.get(k, k).re - e).abs() < 1e-15);
        }
        let h3 = adiabatic_eliminate(&p).unwrap();
        for (k, e) in [-2.0 * g, 0.0, -2.0 * g].iter().enumerate() {
            assert!((h3.get(k, k).re - e).abs() < 1e-15);
        }
        let w_bar = crate::algebra::omega().conj();
        assert!((h3.get(0, 2) + w_bar * g).norm() < 1e-12);
    }

    #[test]
    fn elimination_without_strong_fields_is_the_upper_block() {
        let mut p = random_params(3);
        p.omega[2] = 0.0;
        p.omega[3] = 0.0;
        let h4 = rotating_hamiltonian(&p).unwrap();
        let h3 = adiabatic_eliminate(&p).unwrap();
        let block = DenseOperator::from_fn(3, |i, j| h4.get(i, j));
        assert!(h3.max_abs_diff(&block) < 1e-15);
    }

    #[test]
    fn stark_shifts_and_effective_rabi() {
        let p = random_params(5);
        let h3 = adiabatic_eliminate(&p).unwrap();
        let boost = p.boost();
        let [d1, d2, d3, _] = p.delta;
        assert!((h3.get(0, 0).re + d1 + d2 + d3 + p.omega[3].powi(2) / (4.0 * boost)).abs() < 1e-12);
        assert!((h3.get(2, 2).re + d3 + p.omega[2].powi(2) / (4.0 * boost)).abs() < 1e-12);
        let rabi = p.effective_rabi().unwrap();
        assert!((h3.get(0, 2).norm() - rabi.norm() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn regime_reproduces_interaction() {
        let g = 0.3;
        let p = RydbergParams::interaction_regime(g, 20.0);
        let h3 = adiabatic_eliminate(&p).unwrap();
        let target = edge_interaction_matrix().scale_real(g);
        let (offset, residual) = residual_to_target(&h3, &target);
        assert!(residual < 1e-12);
        assert!((offset + p.boost() + g).abs() < 1e-9);
        assert!((p.effective_rabi().unwrap().norm() - 2.0 * g).abs() < 1e-12);
        assert!((p.elimination_ratio() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let psi = basis(3, 1);
        let tr = evolve(|_| DenseOperator::zeros(3), &psi, 2.0, 0.1, 5).unwrap();
        assert!((tr.last() - &psi).norm() < 1e-15);
        assert_eq!(*tr.times.last().unwrap(), 2.0);
    }

    #[test]
    fn resonant_rabi_transfer() {
        let omega = 1.3;
        let h = DenseOperator::from_rows(2, &[c(0.0, 0.0), c(omega / 2.0, 0.0), c(omega / 2.0, 0.0), c(0.0, 0.0)]);
        let tr = evolve(|_| h.clone(), &basis(2, 0), PI / omega, 0.01, 1000).unwrap();
        assert!((tr.last()[1].norm_sqr() - 1.0).abs() < 1e-6);
        assert!((tr.last().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn step_guard_and_grid_errors() {
        let h = DenseOperator::identity(2).scale_real(10.0);
        assert!(matches!(evolve(|_| h.clone(), &basis(2, 0), 1.0, 0.02, 1), Err(Error::StepTooLarge(_))));
        assert!(matches!(evolve(|_| h.clone(), &basis(2, 0), 1.0, 0.0, 1), Err(Error::InvalidTimeGrid(_))));
    }

    #[test]
    fn mapping_report_enumerates_conventions() {
        let rep = verify_mapping(1.0);
        assert_eq!(rep.variants.len(), 32);
        assert!(rep.literal_residual > 0.5);
        assert!(rep.best.residual < 1e-12);
        assert_eq!(rep.best.boost_sign, -1);
        let doubled = verify_mapping(2.0);
        assert!((doubled.literal_residual - 2.0 * rep.literal_residual).abs() < 1e-12);
    }

    #[test]
    fn inverse_design_examples() {
        let g = 0.4;
        let target = edge_interaction_matrix().scale_real(g);
        let d = inverse_design(&target, 50.0).unwrap();
        assert!(d.residual < 1e-9);
        d.params.check_resonance().unwrap();

        let zero = inverse_design(&DenseOperator::zeros(3), 10.0).unwrap();
        assert!(zero.params.omega.iter().all(|&o| o == 0.0));

        for seed in 0..5 {
            let p = random_params(seed);
            let target = adiabatic_eliminate(&p).unwrap();
            let d = inverse_design(&target, p.boost()).unwrap();
            assert!(d.residual < 1e-8);
            let rebuilt = adiabatic_eliminate(&d.params).unwrap();
            let (_, r) = residual_to_target(&rebuilt, &target);
            assert!(r < 1e-8);
        }
    }
}
