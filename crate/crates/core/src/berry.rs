//! Geometric phase of the `(|2⟩, |3⟩)` pair when the coupling phase `φ_3`
//! winds around a closed loop.
//!
//! `H(s) = [[−ω_23/2, D(s) e^{iφ(s)}], [D(s) e^{−iφ(s)}, ω_23/2]]` with the
//! loop parameter `s ∈ [0, 1]` and physical time `t = sT`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, DenseOperator};
use crate::C64;

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const QUADRATURE_TOL: f64 = 1e-9;

#[derive(Clone)]
pub struct BerryLoop {
    /// `|D(s)|`.
    pub envelope: Profile,
    /// `φ_3(s)`.
    pub phase: Profile,
    /// `dφ_3/ds`.
    pub phase_rate: Profile,
    /// Bare splitting `ω_23`.
    pub splitting: f64,
    /// `+1` upper branch, `−1` lower branch.
    pub branch: i8,
}

impl std::fmt::Debug for BerryLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BerryLoop")
            .field("splitting", &self.splitting)
            .field("branch", &self.branch)
            .finish_non_exhaustive()
    }
}

impl BerryLoop {
    /// Constant `|D|`, `φ_3(s) = 2π · winding · s`.
    pub fn constant(coupling: f64, splitting: f64, branch: i8, winding: i32) -> Self {
        let rate = 2.0 * PI * winding as f64;
        Self {
            envelope: Arc::new(move |_| coupling),
            phase: Arc::new(move |s| rate * s),
            phase_rate: Arc::new(move |_| rate),
            splitting,
            branch,
        }
    }

    /// `|D(s)| = D_0 (1 + depth · sin 2πs)` with a single winding.
    pub fn modulated(coupling: f64, depth: f64, splitting: f64, branch: i8) -> Self {
        let mut out = Self::constant(coupling, splitting, branch, 1);
        out.envelope = Arc::new(move |s| coupling * (1.0 + depth * (2.0 * PI * s).sin()));
        out
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let (env, ph, rate) = (self.envelope.clone(), self.phase.clone(), self.phase_rate.clone());
        Self {
            envelope: Arc::new(move |s| env(1.0 - s)),
            phase: Arc::new(move |s| ph(1.0 - s)),
            phase_rate: Arc::new(move |s| -rate(1.0 - s)),
            splitting: self.splitting,
            branch: self.branch,
        }
    }

    fn half_splitting(&self) -> f64 {
        self.splitting / 2.0
    }

    /// `F_l = (ω_23/2)² + |D|² − l (ω_23/2) √((ω_23/2)² + |D|²)`.
    pub fn f_l(&self, s: f64) -> f64 {
        let h = self.half_splitting();
        let d = (self.envelope)(s);
        h * h + d * d - self.branch as f64 * h * (h * h + d * d).sqrt()
    }

    pub fn hamiltonian(&self, s: f64) -> DenseOperator {
        let h = self.half_splitting();
        let off = C64::from_polar((self.envelope)(s), (self.phase)(s));
        DenseOperator::from_rows(2, &[c(-h, 0.0), off, off.conj(), c(h, 0.0)])
    }

    /// Branch energy `l √((ω_23/2)² + |D|²)`.
    pub fn energy(&self, s: f64) -> f64 {
        let h = self.half_splitting();
        let d = (self.envelope)(s);
        self.branch as f64 * (h * h + d * d).sqrt()
    }

    /// Smallest gap `2√((ω_23/2)² + |D|²)` on a fine grid.
    pub fn min_gap(&self) -> f64 {
        (0..=1000)
            .map(|k| 2.0 * self.energy(k as f64 / 1000.0).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Instantaneous eigenvector of the branch at `s`.
    pub fn eigenvector(&self, s: f64) -> DVector<C64> {
        let eig = self.hamiltonian(s).eigh();
        let col = if self.branch > 0 { 1 } else { 0 };
        eig.vectors.column(col).into_owned()
    }

    fn check_closed(&self) -> Result<()> {
        let winding = ((self.phase)(1.0) - (self.phase)(0.0)) / (2.0 * PI);
        if (winding - winding.round()).abs() > 1e-9 {
            return Err(Error::OpenLoop(winding * 2.0 * PI));
        }
        Ok(())
    }
}

fn simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, fa: f64, b: f64, fb: f64) -> Result<(f64, f64, f64)> {
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    Ok((m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm)?;
    let (rm, frm, right) = simpson(f, m, fm, b, fb)?;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)?
        + adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson quadrature on `[a, b]`, started from 8 panels.
fn integrate(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for k in 0..PANELS {
        let (lo, hi) = (a + k as f64 * width, a + (k + 1) as f64 * width);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        let (m, fm, whole) = simpson(f, lo, flo, hi, fhi)?;
        total += adaptive(f, lo, flo, hi, fhi, m, fm, whole, tol / PANELS as f64, 40)?;
    }
    Ok(total)
}

/// `γ_l = (l/2) ∮ |D|² / F_l dφ_3`.
pub fn berry_phase_closed(lp: &BerryLoop) -> Result<f64> {
    lp.check_closed()?;
    let integrand = |s: f64| -> Result<f64> {
        let d = (lp.envelope)(s);
        if d == 0.0 {
            return Ok(0.0);
        }
        let f = lp.f_l(s);
        if f.abs() < 1e-14 * (1.0 + d * d) {
            return Err(Error::VanishingDenominator(s));
        }
        Ok(d * d / f * (lp.phase_rate)(s))
    };
    Ok(0.5 * lp.branch as f64 * integrate(&integrand, 0.0, 1.0, QUADRATURE_TOL)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerryNumeric {
    pub gamma: f64,
    pub duration: f64,
    /// `T · min gap`.
    pub adiabaticity: f64,
    pub steps: usize,
    /// Set when `T · min gap < 20`.
    pub adiabatic_warning: bool,
}

fn steps_for(lp: &BerryLoop, duration: f64) -> usize {
    let h = lp.half_splitting();
    let dmax = (0..=1000).map(|k| (lp.envelope)(k as f64 / 1000.0)).fold(0.0, f64::max);
    let norm = (h * h + dmax * dmax).sqrt() + (0..=100).map(|k| (lp.phase_rate)(k as f64 / 100.0).abs()).fold(0.0, f64::max) / duration.max(1e-300);
    ((duration * norm * 40.0).ceil() as usize).max(4000)
}

/// `exp(−i H(s_mid) dt)` stepping of the branch eigenstate around the loop.
fn transport(lp: &BerryLoop, duration: f64, shift: f64, steps: usize) -> (DVector<C64>, f64) {
    let mut psi = lp.eigenvector(0.0);
    let dt = duration / steps as f64;
    let mut dynamical = 0.0;
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        let h = lp.hamiltonian(s) + DenseOperator::identity(2).scale_real(shift);
        psi = h.hermitian_propagator(dt).apply(&psi);
        dynamical += (lp.energy(s) + shift) * dt;
    }
    (psi, dynamical)
}

/// `arg⟨n(0)|ψ(T)⟩ + ∫ E_l dt`, wrapped to `(−π, π]`.
pub fn berry_phase_numeric(lp: &BerryLoop, duration: f64) -> Result<BerryNumeric> {
    lp.check_closed()?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("T = {duration}")));
    }
    let steps = steps_for(lp, duration);
    let (psi, dynamical) = transport(lp, duration, 0.0, steps);
    let overlap = lp.eigenvector(0.0).dotc(&psi);
    let adiabaticity = duration * lp.min_gap();
    Ok(BerryNumeric {
        gamma: wrap(overlap.arg() + dynamical),
        duration,
        adiabaticity,
        steps,
        adiabatic_warning: adiabaticity < 20.0,
    })
}

/// Result of cancelling the dynamical phase with a uniform Stark offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    /// Offset `−Ē_l` added to both levels.
    pub offset: f64,
    /// `arg⟨n(0)|ψ(T)⟩` under the compensated Hamiltonian.
    pub phase: f64,
    /// Residual dynamical phase `∫ (E_l + offset) dt`.
    pub residual_dynamical: f64,
}

/// Adds the Stark offset `−(1/T) ∫ E_l dt` so that the bare overlap phase is
/// the geometric phase.
pub fn stark_compensation(lp: &BerryLoop, duration: f64) -> Result<Compensation> {
    lp.check_closed()?;
    let steps = steps_for(lp, duration);
    let mean = (0..steps)
        .map(|k| lp.energy((k as f64 + 0.5) / steps as f64))
        .sum::<f64>()
        / steps as f64;
    let (psi, residual) = transport(lp, duration, -mean, steps);
    Ok(Compensation {
        offset: -mean,
        phase: wrap(lp.eigenvector(0.0).dotc(&psi).arg()),
        residual_dynamical: residual,
    })
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Smallest `|a − b|` modulo `2π`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_has_no_phase() {
        let lp = BerryLoop::constant(0.0, 1.0, 1, 1);
        assert_eq!(berry_phase_closed(&lp).unwrap(), 0.0);
        let num = berry_phase_numeric(&lp, 50.0).unwrap();
        assert!(num.gamma.abs() < 1e-9);
    }

    #[test]
    fn constant_envelope_closed_form() {
        let (d, w) = (0.3, 1.0);
        for branch in [1i8, -1] {
            let lp = BerryLoop::constant(d, w, branch, 1);
            let expected = 0.5 * branch as f64 * 2.0 * PI * d * d / lp.f_l(0.0);
            assert!((berry_phase_closed(&lp).unwrap() - expected).abs() < 1e-9);
        }
        // Upper branch: (D²/F_+) = 1 + cos θ.
        let lp = BerryLoop::constant(d, w, 1, 1);
        let cos = (w / 2.0) / ((w / 2.0f64).powi(2) + d * d).sqrt();
        assert!((berry_phase_closed(&lp).unwrap() - PI * (1.0 + cos)).abs() < 1e-9);
    }

    #[test]
    fn reversal_negates() {
        let lp = BerryLoop::modulated(0.3, 0.4, 1.0, 1);
        let fwd = berry_phase_closed(&lp).unwrap();
        let back = berry_phase_closed(&lp.reversed()).unwrap();
        assert!((fwd + back).abs() < 1e-8);
    }

    #[test]
    fn open_loop_and_degeneracy_rejected() {
        let mut lp = BerryLoop::constant(0.3, 1.0, 1, 1);
        lp.phase = Arc::new(|s| 3.0 * s);
        assert!(matches!(berry_phase_closed(&lp), Err(Error::OpenLoop(_))));
        // Zero splitting with an envelope touching zero closes the gap.
        let lp = BerryLoop::modulated(0.3, 1.0, 0.0, -1);
        assert!(matches!(berry_phase_closed(&lp), Err(Error::VanishingDenominator(_))));
        let lp = BerryLoop::modulated(0.3, 1.0, 1.0, -1);
        assert!(berry_phase_closed(&lp).is_ok());
    }

    #[test]
    fn numeric_matches_closed_upper_branch() {
        let w = 1.0;
        let lp = BerryLoop::constant(w / 4.0, w, 1, 1);
        let gap = lp.min_gap();
        let num = berry_phase_numeric(&lp, 200.0 / gap).unwrap();
        let closed = berry_phase_closed(&lp).unwrap();
        assert!(angle_distance(num.gamma, closed) / closed.abs() < 0.01);
        assert!(!num.adiabatic_warning);
    }

    #[test]
    fn compensation_cancels_dynamical_phase() {
        let lp = BerryLoop::constant(0.25, 1.0, 1, 1);
        let t = 200.0 / lp.min_gap();
        let comp = stark_compensation(&lp, t).unwrap();
        let num = berry_phase_numeric(&lp, t).unwrap();
        assert!(comp.residual_dynamical.abs() < 1e-9);
        assert!(angle_distance(comp.phase, num.gamma) < 1e-9);
    }

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-15);
        assert!(angle_distance(0.1, 2.0 * PI - 0.1) < 0.2 + 1e-12);
    }
}
