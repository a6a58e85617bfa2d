//! Clifford-hierarchy classification of single-qutrit unitaries.
//!
//! `C^(1)` is the Pauli group up to phase. `U ∈ C^(2)` when `U X U†` and
//! `U Z U†` are Pauli. For `k ≥ 3` the conjugate of every non-identity Pauli
//! must lie in `C^(k−1)`; these levels are not groups, so generators do not
//! suffice. Verdicts are memoized on phase-normalized matrices.
//!
//! Diagonal gates with phases `2π n_j / 3^M` also have a closed form: the
//! level is the smallest `k = 2(m−1) + a` whose lattice of exponents
//! generated by `3^{M−m'} (j^b)_j` (`b ∈ {1, 2}` for `m' < m`, `b ≤ a` for
//! `m' = m`) contains the gate's exponent vector.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::algebra::{displacement, PhasePoint};
use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::{tol, C64};

pub const DEFAULT_K_MAX: usize = 8;
const MAX_K: usize = 8;

type M3 = Matrix3<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyVerdict {
    /// `None` when the gate is not in `C^(k_max)`.
    pub level: Option<usize>,
    pub k_max: usize,
}

/// One step down the hierarchy: `U ↦ U D^p U†` lands on `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub pauli: PhasePoint,
    pub level: usize,
}

fn to_m3(u: &DenseOperator) -> M3 {
    M3::from_fn(|i, j| u.get(i, j))
}

/// Exact-up-to-tolerance Pauli test on a 3×3 unitary.
fn pauli_of(u: &M3) -> Option<PhasePoint> {
    let x = (0..3).max_by(|&a, &b| u[(a, 0)].norm().total_cmp(&u[(b, 0)].norm()))?;
    let entries: [C64; 3] = std::array::from_fn(|j| u[((j + x) % 3, j)]);
    for j in 0..3 {
        for i in 0..3 {
            if i != (j + x) % 3 && u[(i, j)].norm() > tol::COMPARE {
                return None;
            }
        }
    }
    let base = entries[0];
    if base.norm() < 0.5 {
        return None;
    }
    (0..3u8).find_map(|z| {
        let ok = (1..3).all(|j| {
            let target = crate::algebra::omega_pow((z as i64) * j as i64) * base;
            (entries[j as usize] - target).norm() < tol::COMPARE
        });
        ok.then(|| PhasePoint::new(x as i64, z as i64))
    })
}

/// Phase-normalized, rounded matrix used as a memo key.
fn memo_key(u: &M3) -> [i64; 18] {
    let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = u
        .iter()
        .find(|z| z.norm() > max - 1e-6)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let mut key = [0i64; 18];
    // Column-major traversal matches `iter()`.
    for (k, z) in u.iter().enumerate() {
        let w = z * phase;
        key[2 * k] = (w.re * 1e8).round() as i64;
        key[2 * k + 1] = (w.im * 1e8).round() as i64;
    }
    key
}

/// Recursive membership tester with a private memo.
pub struct Classifier {
    paulis: Vec<(PhasePoint, M3)>,
    memo: HashMap<([i64; 18], usize), bool>,
}

impl Default for Classifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Classifier {
    pub fn new() -> Self {
        let paulis = PhasePoint::all()
            .filter(|p| !p.is_origin())
            .map(|p| (p, to_m3(&displacement(p))))
            .collect();
        Self { paulis, memo: HashMap::new() }
    }

    fn conj(u: &M3, p: &M3) -> M3 {
        u * p * u.adjoint()
    }

    fn generators(&self, k: usize) -> impl Iterator<Item = &(PhasePoint, M3)> {
        // X = D^{1,0}, Z = D^{0,1}.
        self.paulis
            .iter()
            .filter(move |(p, _)| k >= 3 || (p.x + p.z == 1))
    }

    fn member(&mut self, u: &M3, k: usize) -> bool {
        if k == 1 {
            return pauli_of(u).is_some();
        }
        let key = (memo_key(u), k);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let conjugates: Vec<M3> = self.generators(k).map(|(_, p)| Self::conj(u, p)).collect();
        let result = conjugates.iter().all(|c| self.member(c, k - 1));
        self.memo.insert(key, result);
        result
    }

    fn level_of(&mut self, u: &M3, k_max: usize) -> Option<usize> {
        (1..=k_max).find(|&k| self.member(u, k))
    }

    pub fn classify(&mut self, u: &DenseOperator, k_max: usize) -> Result<HierarchyVerdict> {
        check_input(u, k_max)?;
        let m = to_m3(u);
        Ok(HierarchyVerdict { level: self.level_of(&m, k_max), k_max })
    }

    /// Conjugations stepping the level down by one until a Pauli is reached.
    pub fn witness_chain(&mut self, u: &DenseOperator, k_max: usize) -> Result<Vec<WitnessStep>> {
        check_input(u, k_max)?;
        let mut current = to_m3(u);
        let mut level = match self.level_of(&current, k_max) {
            Some(l) => l,
            None => return Ok(Vec::new()),
        };
        let mut chain = Vec::new();
        while level > 1 {
            let paulis = self.paulis.clone();
            let step = paulis.iter().find_map(|(p, pm)| {
                let next = Self::conj(&current, pm);
                (self.level_of(&next, level - 1) == Some(level - 1)).then_some((*p, next))
            });
            let (p, next) = step.expect("a level-k gate has a conjugate at level k-1");
            level -= 1;
            chain.push(WitnessStep { pauli: p, level });
            current = next;
        }
        Ok(chain)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

fn check_input(u: &DenseOperator, k_max: usize) -> Result<()> {
    if u.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: u.dim() });
    }
    if k_max == 0 || k_max > MAX_K {
        return Err(Error::InvalidSpec(format!("k_max must be in 1..={MAX_K}, got {k_max}")));
    }
    u.require_unitary()
}

/// Smallest `k ≤ k_max` with `U ∈ C^(k)`, using a fresh memo.
pub fn hierarchy_level(u: &DenseOperator, k_max: usize) -> Result<HierarchyVerdict> {
    Classifier::new().classify(u, k_max)
}

/// A phase `2π · num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub num: i64,
    pub den: u64,
}

impl Phase {
    pub fn new(num: i64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn radians(self) -> f64 {
        2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("expected a rational p/q, got {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Self { num, den })
    }
}

/// `diag(e^{2πi φ_0}, e^{2πi φ_1}, e^{2πi φ_2})`.
pub fn diagonal_from_phases(phases: &[Phase; 3]) -> DenseOperator {
    let p: Vec<f64> = phases.iter().map(|p| p.radians()).collect();
    DenseOperator::phase_diagonal(&p)
}

fn power_of_three(den: u64) -> Option<u32> {
    let mut d = den;
    let mut m = 0;
    while d > 1 && d.is_multiple_of(3) {
        d /= 3;
        m += 1;
    }
    (d == 1).then_some(m)
}

/// Hermite basis `{(a, b), (0, c)}` of a rank-≤2 integer lattice.
struct Lattice2 {
    a: i128,
    b: i128,
    c: i128,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    ext_gcd(a, b).0
}

impl Lattice2 {
    fn span(vectors: &[(i128, i128)]) -> Self {
        let mut lat = Self { a: 0, b: 0, c: 0 };
        for &(x, y) in vectors {
            lat.insert(x, y);
        }
        lat
    }

    fn insert(&mut self, x: i128, y: i128) {
        if x == 0 {
            self.c = gcd(self.c, y);
        } else if self.a == 0 {
            let (a, b) = (self.a, self.b);
            self.a = x;
            self.b = y;
            if a != 0 || b != 0 {
                self.c = gcd(self.c, b);
            }
        } else {
            let (g, s, t) = ext_gcd(self.a, x);
            let new_b = s * self.b + t * y;
            // Eliminating the first coordinate leaves a pure second-coordinate vector.
            let rest = (x / g) * self.b - (self.a / g) * y;
            self.a = g;
            self.b = new_b;
            self.c = gcd(self.c, rest);
        }
        if self.a < 0 {
            self.a = -self.a;
            self.b = -self.b;
        }
        if self.c != 0 {
            self.b = self.b.rem_euclid(self.c);
        }
    }

    fn contains(&self, x: i128, y: i128) -> bool {
        let k = if self.a == 0 {
            if x != 0 {
                return false;
            }
            0
        } else {
            if x % self.a != 0 {
                return false;
            }
            x / self.a
        };
        let r = y - k * self.b;
        if self.c == 0 {
            r == 0
        } else {
            r % self.c == 0
        }
    }
}

/// Closed-form level of `diag(e^{2πi φ_j})` for phases with 3-power denominators.
pub fn diagonal_level(phases: &[Phase; 3]) -> Result<HierarchyVerdict> {
    let mut m_total = 0;
    for p in phases {
        let m = power_of_three(p.den).ok_or(Error::DenominatorNotPowerOfThree(p.den))?;
        m_total = m_total.max(m);
    }
    let modulus = 3i128.pow(m_total);
    let n: Vec<i128> = phases
        .iter()
        .map(|p| (p.num as i128 * (modulus / p.den as i128)).rem_euclid(modulus))
        .collect();
    let target = ((n[1] - n[0]).rem_euclid(modulus), (n[2] - n[0]).rem_euclid(modulus));
    let k_max = (2 * m_total as usize).max(1);
    let mut generators = vec![(modulus, 0), (0, modulus)];
    for m in 1..=m_total.max(1) {
        for a in 1..=2u32 {
            if m <= m_total {
                let scale = 3i128.pow(m_total - m);
                generators.push((scale, scale * 2i128.pow(a)));
            }
            let lattice = Lattice2::span(&generators);
            if lattice.contains(target.0, target.1) {
                let level = 2 * (m as usize - 1) + a as usize;
                return Ok(HierarchyVerdict { level: Some(level), k_max });
            }
        }
    }
    unreachable!("the full exponent group is generated at m = M")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{pauli_match, pauli_x, pauli_z};
    use crate::gates::{diagonal_gate, t_gate, uv_gate};
    use std::f64::consts::PI;

    fn level(u: &DenseOperator) -> Option<usize> {
        hierarchy_level(u, DEFAULT_K_MAX).unwrap().level
    }

    fn phases(n: [i64; 3], den: u64) -> [Phase; 3] {
        n.map(|k| Phase::new(k, den))
    }

    #[test]
    fn fast_pauli_test_agrees_with_reference() {
        let (_, s, h) = crate::gates::clifford_generators();
        let samples = [pauli_x(), pauli_z(), s, h, t_gate(), (&pauli_x() * &pauli_z()).scale(C64::from_polar(1.0, 0.4))];
        for u in &samples {
            assert_eq!(pauli_of(&to_m3(u)), pauli_match(u));
        }
    }

    #[test]
    fn examples() {
        assert_eq!(level(&pauli_z()), Some(1));
        assert_eq!(level(&diagonal_gate(2.0 * PI / 3.0)), Some(2));
        assert_eq!(level(&t_gate()), Some(3));
        assert_eq!(level(&diagonal_gate(2.0 * PI / 9.0)), Some(4));
        assert_eq!(level(&diagonal_gate(2.0 * PI / 27.0)), Some(6));
        assert_eq!(level(&uv_gate(0, 1, 0)), Some(3));
    }

    #[test]
    fn bounded_verdict() {
        let v = hierarchy_level(&diagonal_gate(2.0 * PI / 27.0), 5).unwrap();
        assert_eq!(v, HierarchyVerdict { level: None, k_max: 5 });
        assert!(hierarchy_level(&pauli_z(), 9).is_err());
        assert!(hierarchy_level(&pauli_z().scale_real(2.0), 4).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(diagonal_level(&phases([0, 1, 2], 3)).unwrap().level, Some(1));
        assert_eq!(diagonal_level(&phases([0, 1, 8], 9)).unwrap().level, Some(3));
        assert_eq!(diagonal_level(&phases([0, 0, 1], 9)).unwrap().level, Some(4));
        assert_eq!(diagonal_level(&phases([0, 0, 1], 3)).unwrap().level, Some(2));
        assert_eq!(diagonal_level(&phases([0, 0, 1], 27)).unwrap().level, Some(6));
        assert_eq!(diagonal_level(&phases([0, 0, 0], 1)).unwrap().level, Some(1));
        assert_eq!(
            diagonal_level(&[Phase::new(0, 1), Phase::new(1, 2), Phase::new(0, 1)]),
            Err(Error::DenominatorNotPowerOfThree(2))
        );
    }

    #[test]
    fn witness_chain_descends_to_pauli() {
        let chain = Classifier::new().witness_chain(&t_gate(), DEFAULT_K_MAX).unwrap();
        assert_eq!(chain.iter().map(|s| s.level).collect::<Vec<_>>(), vec![2, 1]);
        let mut u = to_m3(&t_gate());
        for step in &chain {
            u = Classifier::conj(&u, &to_m3(&displacement(step.pauli)));
        }
        assert!(pauli_of(&u).is_some());
    }

    #[test]
    fn pauli_multiplication_preserves_level() {
        let u = diagonal_gate(2.0 * PI / 9.0);
        for p in PhasePoint::all() {
            assert_eq!(level(&(&u * &displacement(p))), Some(4));
        }
    }

    #[test]
    fn phase_parsing() {
        assert_eq!("1/9".parse::<Phase>().unwrap(), Phase::new(1, 9));
        assert_eq!(" 2 ".parse::<Phase>().unwrap(), Phase::new(2, 1));
        assert!("1/0".parse::<Phase>().is_err());
        assert!("x".parse::<Phase>().is_err());
    }

    #[test]
    fn lattice_membership() {
        let lat = Lattice2::span(&[(9, 0), (0, 9), (1, 2), (3, 6), (3, 3)]);
        assert!(lat.contains(1, 8));
        assert!(!lat.contains(0, 1));
    }
}
