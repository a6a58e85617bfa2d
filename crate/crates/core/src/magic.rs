//! Discrete Wigner function, the max-over-phase-points contextuality score,
//! strange states and sample statistics.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{displacement, PhasePoint};
use crate::error::{Error, Result};
use crate::gates::clifford_generators;
use crate::operator::{c, DenseOperator};
use crate::{tol, C64};

/// Normalized qutrit pure state, gauge-fixed so the first amplitude with
/// modulus above `1e-9` is real and positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QutritState {
    pub amplitudes: [C64; 3],
}

/// `α|0⟩ + e^{iδ_1} β|1⟩ + e^{iδ_2} γ|2⟩` with `δ` in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
}

const GAUGE_FLOOR: f64 = 1e-9;

impl QutritState {
    pub fn new(amplitudes: [C64; 3]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidDensityMatrix("zero or non-finite state vector".into()));
        }
        let pivot = amplitudes
            .iter()
            .find(|a| a.norm() / norm > GAUGE_FLOOR)
            .copied()
            .expect("non-zero vector");
        let phase = pivot.conj() / pivot.norm();
        Ok(Self { amplitudes: amplitudes.map(|a| a * phase / norm) })
    }

    pub fn basis(k: usize) -> Self {
        let mut a = [c(0.0, 0.0); 3];
        a[k] = c(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn from_vector(v: &DVector<C64>) -> Result<Self> {
        if v.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: v.len() });
        }
        Self::new([v[0], v[1], v[2]])
    }

    pub fn vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    pub fn density(&self) -> DenseOperator {
        let v = self.vector();
        DenseOperator::from_matrix(&v * v.adjoint())
    }

    /// `U|ψ⟩`, re-gauged.
    pub fn evolve(&self, u: &DenseOperator) -> Self {
        Self::from_vector(&u.apply(&self.vector())).expect("unitary preserves the norm")
    }

    pub fn coordinates(&self) -> Coordinates {
        let [a, b, g] = self.amplitudes;
        let arg = |z: C64| if z.norm() > GAUGE_FLOOR { z.arg().rem_euclid(2.0 * PI) } else { 0.0 };
        Coordinates {
            alpha: a.norm(),
            beta: b.norm(),
            gamma: g.norm(),
            delta1: arg(b),
            delta2: arg(g),
        }
    }

    /// Amplitudes rounded to `1e-6`, for counting distinct states.
    pub fn key(&self) -> [i64; 6] {
        let r = |x: f64| (x * 1e6).round() as i64;
        let [a, b, g] = self.amplitudes;
        [r(a.re), r(a.im), r(b.re), r(b.im), r(g.re), r(g.im)]
    }
}

/// `A^{0,0} = (1/3) Σ D^{x,z}` and `A^p = D^p A^{0,0} D^p†`.
pub fn phase_point_operator(p: PhasePoint) -> DenseOperator {
    let mut a00 = DenseOperator::zeros(3);
    for q in PhasePoint::all() {
        a00 += &displacement(q);
    }
    displacement(p).conjugate(&a00.scale_real(1.0 / 3.0))
}

fn phase_point_operators() -> Vec<DenseOperator> {
    PhasePoint::all().map(phase_point_operator).collect()
}

/// Nine quasi-probabilities `W(p) = Tr[A^p ρ] / 3`, indexed by [`PhasePoint::index`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerTable {
    pub values: [f64; 9],
}

impl WignerTable {
    pub fn get(&self, p: PhasePoint) -> f64 {
        self.values[p.index()]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn validate_density(rho: &DenseOperator) -> Result<()> {
    if rho.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: rho.dim() });
    }
    let herm = rho.hermiticity_deviation();
    if herm > tol::DENSITY {
        return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > tol::DENSITY {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
    }
    let min = rho.eigh().values[0];
    if min < -tol::DENSITY {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

fn phase_point_traces(rho: &DenseOperator) -> [f64; 9] {
    let ops = phase_point_operators();
    std::array::from_fn(|k| (&ops[k] * rho).trace().re)
}

pub fn wigner(rho: &DenseOperator) -> Result<WignerTable> {
    validate_density(rho)?;
    Ok(WignerTable { values: phase_point_traces(rho).map(|t| t / 3.0) })
}

/// `max_r Tr[A^r ρ]`, taken literally.
pub fn contextuality_score(rho: &DenseOperator) -> Result<f64> {
    validate_density(rho)?;
    Ok(phase_point_traces(rho).iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// `min_p 3 W(p) = min_r Tr[A^r ρ]`, reported beside the score.
pub fn wigner_min(rho: &DenseOperator) -> Result<f64> {
    Ok(3.0 * wigner(rho)?.min())
}

/// `(1/2) ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DenseOperator, sigma: &DenseOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    let diff = rho - sigma;
    let svd = diff.into_matrix().svd(false, false);
    Ok(0.5 * svd.singular_values.iter().sum::<f64>())
}

/// Trace distance between pure states, `√(1 − |⟨ψ|φ⟩|²)`.
pub fn pure_trace_distance(a: &QutritState, b: &QutritState) -> f64 {
    let overlap = a.vector().dotc(&b.vector()).norm_sqr();
    (1.0 - overlap).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrangeState {
    pub label: &'static str,
    pub state: QutritState,
    /// Fourier-type Clifford (`D H D†` for the displacement `D` used) having
    /// `state` as an eigenvector.
    pub fourier: DenseOperator,
}

pub const STRANGE_LABELS: [&str; 3] = ["S_a", "S_b", "S_c"];

/// `S_a = (|1⟩ − |2⟩)/√2` and its images `X S_a`, `X² S_a`: the strange states
/// at the three magnitude mid-sections.
pub fn strange_states() -> Vec<StrangeState> {
    let r = 1.0 / 2f64.sqrt();
    let s_a = QutritState::new([c(0.0, 0.0), c(r, 0.0), c(-r, 0.0)]).expect("normalized");
    let (_, _, h) = clifford_generators();
    (0..3)
        .map(|k| {
            let d = displacement(PhasePoint::new(k, 0));
            StrangeState {
                label: STRANGE_LABELS[k as usize],
                state: s_a.evolve(&d),
                fourier: d.conjugate(&h),
            }
        })
        .collect()
}

/// Orbit of `|0⟩` under `{X, S, H}`, distinct up to global phase.
pub fn stabilizer_states() -> Vec<QutritState> {
    let (x, s, h) = clifford_generators();
    let gens = [x, s, h];
    let start = QutritState::basis(0);
    let mut seen = HashSet::from([start.key()]);
    let mut out = vec![start];
    let mut frontier = vec![start];
    while let Some(state) = frontier.pop() {
        for g in &gens {
            let next = state.evolve(g);
            if seen.insert(next.key()) {
                out.push(next);
                frontier.push(next);
            }
        }
    }
    out
}

/// One sampled state with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub word_index: usize,
    /// Letters left to right; the right-most acts first.
    pub word: String,
    pub state: QutritState,
    pub score_m: f64,
    pub wigner_min: f64,
    /// Trace distances to `S_a`, `S_b`, `S_c`.
    pub strange_distances: [f64; 3],
}

impl SampleRecord {
    pub fn from_state(word_index: usize, word: String, state: QutritState, strange: &[StrangeState]) -> Self {
        let rho = state.density();
        let traces = phase_point_traces(&rho);
        Self {
            word_index,
            word,
            state,
            score_m: traces.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            wigner_min: traces.iter().cloned().fold(f64::INFINITY, f64::min),
            strange_distances: std::array::from_fn(|k| pure_trace_distance(&state, &strange[k].state)),
        }
    }

    pub fn nearest_strange_distance(&self) -> f64 {
        self.strange_distances.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub records: usize,
    pub distinct_states: usize,
    pub bins: usize,
    pub phase_cells_occupied: usize,
    pub phase_occupancy: f64,
    pub magnitude_cells_occupied: usize,
    pub magnitude_cells: usize,
    pub magnitude_occupancy: f64,
    /// Records with a negative phase-point trace.
    pub negative_count: usize,
}

/// Occupancy of a `bins × bins` grid over `(δ_1, δ_2)` and of the triangular
/// grid over `(β², γ²)` (cells with `i + j < bins`).
pub fn coverage_stats(records: &[SampleRecord], bins: usize) -> Result<CoverageReport> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins == 0 {
        return Err(Error::InvalidSpec("bins must be positive".into()));
    }
    let cell = |x: f64, span: f64| ((x / span * bins as f64).floor() as usize).min(bins - 1);
    let mut phase = HashSet::new();
    let mut magnitude = HashSet::new();
    let mut distinct = HashSet::new();
    let mut negative = 0;
    for r in records {
        let co = r.state.coordinates();
        phase.insert((cell(co.delta1, 2.0 * PI), cell(co.delta2, 2.0 * PI)));
        let i = cell(co.beta * co.beta, 1.0);
        let j = cell(co.gamma * co.gamma, 1.0).min(bins - 1 - i);
        magnitude.insert((i, j));
        distinct.insert(r.state.key());
        if r.wigner_min < -tol::DENSITY {
            negative += 1;
        }
    }
    let magnitude_cells = bins * (bins + 1) / 2;
    Ok(CoverageReport {
        records: records.len(),
        distinct_states: distinct.len(),
        bins,
        phase_cells_occupied: phase.len(),
        phase_occupancy: phase.len() as f64 / (bins * bins) as f64,
        magnitude_cells_occupied: magnitude.len(),
        magnitude_cells,
        magnitude_occupancy: magnitude.len() as f64 / magnitude_cells as f64,
        negative_count: negative,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestStrange {
    pub label: String,
    pub word_index: usize,
    pub distance: f64,
    pub score_m: f64,
    pub wigner_min: f64,
}

/// For each of `S_a`, `S_b`, `S_c`, the record at minimal trace distance
/// (lowest word index on ties).
pub fn nearest_strange_report(records: &[SampleRecord]) -> Result<Vec<NearestStrange>> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok((0..3)
        .map(|k| {
            let best = records
                .iter()
                .min_by(|a, b| {
                    a.strange_distances[k]
                        .total_cmp(&b.strange_distances[k])
                        .then(a.word_index.cmp(&b.word_index))
                })
                .expect("non-empty");
            NearestStrange {
                label: STRANGE_LABELS[k].to_string(),
                word_index: best.word_index,
                distance: best.strange_distances[k],
                score_m: best.score_m,
                wigner_min: best.wigner_min,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed() -> DenseOperator {
        DenseOperator::identity(3).scale_real(1.0 / 3.0)
    }

    #[test]
    fn phase_point_operator_basics() {
        let a00 = phase_point_operator(PhasePoint::new(0, 0));
        assert!((a00.trace() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(a00.is_hermitian(1e-12));
        let mut sum = DenseOperator::zeros(3);
        for p in PhasePoint::all() {
            sum += &phase_point_operator(p);
        }
        assert!(sum.max_abs_diff(&DenseOperator::identity(3).scale_real(3.0)) < 1e-12);
        let mut spec = a00.eigh().values;
        spec.sort_by(f64::total_cmp);
        for (x, y) in spec.iter().zip([-1.0, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_examples() {
        let w = wigner(&mixed()).unwrap();
        assert!(w.values.iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-12));
        let s_a = &strange_states()[0];
        assert!((wigner(&s_a.state.density()).unwrap().min() + 1.0 / 3.0).abs() < 1e-12);
        let zero = wigner(&QutritState::basis(0).density()).unwrap();
        assert!(zero.min() > -1e-12);
        assert!((zero.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn score_oracle_values() {
        // Exhaustive phase-point traces: S_a gives [-1, 1/2 × 8], |0⟩ gives [1, 1, 1, 0 × 6].
        let s_a = strange_states()[0].state.density();
        let mut t = phase_point_traces(&s_a).to_vec();
        t.sort_by(f64::total_cmp);
        assert!((t[0] + 1.0).abs() < 1e-12);
        assert!(t[1..].iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!((contextuality_score(&s_a).unwrap() - 0.5).abs() < 1e-12);
        assert!((wigner_min(&s_a).unwrap() + 1.0).abs() < 1e-12);
        let zero = QutritState::basis(0).density();
        assert!((contextuality_score(&zero).unwrap() - 1.0).abs() < 1e-12);
        assert!((contextuality_score(&mixed()).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn strange_state_properties() {
        for s in strange_states() {
            let v = s.state.vector();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let hv = s.fourier.apply(&v);
            let lambda = v.dotc(&hv);
            assert!((hv - v * lambda).norm() < 1e-12, "{}", s.label);
            assert!((wigner(&s.state.density()).unwrap().min() + 1.0 / 3.0).abs() < 1e-12);
        }
        let (_, _, h) = clifford_generators();
        let s_a = strange_states()[0].state.vector();
        assert!(h.apply(&s_a).dotc(&s_a).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let zero = QutritState::basis(0).density();
        let one = QutritState::basis(1).density();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let s_a = strange_states()[0].state;
        let d = trace_distance(&zero, &s_a.density()).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!((pure_trace_distance(&QutritState::basis(0), &s_a) - d).abs() < 1e-12);
        assert!(trace_distance(&zero, &DenseOperator::identity(2)).is_err());
    }

    #[test]
    fn stabilizer_orbit() {
        let states = stabilizer_states();
        assert_eq!(states.len(), 12);
        for s in &states {
            assert!(wigner(&s.density()).unwrap().min() > -1e-12);
        }
    }

    #[test]
    fn invalid_density_rejected() {
        let bad = DenseOperator::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(wigner(&bad), Err(Error::InvalidDensityMatrix(_))));
        let half = DenseOperator::identity(3).scale_real(0.5);
        assert!(matches!(contextuality_score(&half), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn gauge_and_coordinates() {
        let s = QutritState::new([c(0.0, 0.0), c(0.0, 2.0), c(-2.0, 0.0)]).unwrap();
        let co = s.coordinates();
        assert!(co.alpha.abs() < 1e-15);
        assert!(co.delta1.abs() < 1e-15);
        assert!((co.delta2 - PI / 2.0).abs() < 1e-12);
        assert!((co.beta * co.beta + co.gamma * co.gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_record_occupies_one_cell() {
        let strange = strange_states();
        let rec = SampleRecord::from_state(0, String::new(), QutritState::basis(0), &strange);
        let rep = coverage_stats(std::slice::from_ref(&rec), 12).unwrap();
        assert_eq!(rep.phase_cells_occupied, 1);
        assert_eq!(rep.magnitude_cells_occupied, 1);
        assert!(coverage_stats(&[], 12).is_err());
        let near = nearest_strange_report(&[rec]).unwrap();
        assert_eq!(near.len(), 3);
    }
}
