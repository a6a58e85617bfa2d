//! `rydberg evolve` and `rydberg berry`.

use clap::{Args, ValueEnum};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use z3pf::berry::{angle_distance, berry_phase_closed, berry_phase_numeric, BerryLoop};
use z3pf::rydberg::{adiabatic_eliminate, evolve, rotating_hamiltonian, RydbergParams};
use z3pf::C64;

use crate::config::InitialState;
use crate::error::{CliError, Result};
use crate::output::OutputDir;

/// Samples kept per trajectory when no stride is given.
const TARGET_SAMPLES: usize = 2000;

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Four levels in the rotating frame.
    #[default]
    Full,
    /// Three levels after eliminating the intermediate state.
    Eliminated,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveArgs {
    /// Rabi frequency of beam 1; omitted beam parameters come from `g` and `ratio`.
    #[arg(long, allow_hyphen_values = true)]
    pub omega1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega4: Option<f64>,
    /// Detuning of beam 1.
    #[arg(long, allow_hyphen_values = true)]
    pub delta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta4: Option<f64>,
    /// Phase of beam 1.
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi4: Option<f64>,
    /// Interaction strength used for omitted beam parameters.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Detuning over strong Rabi frequency used for omitted beam parameters.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Duration (default 10 / |Ω_R|).
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub duration: Option<f64>,
    /// Time step (default 0.05 / ‖H‖).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Basis index or comma-separated real amplitudes.
    #[arg(long)]
    pub psi0: Option<InitialState>,
    /// Keep every stride-th step.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    abs2_c0: f64,
    abs2_c1: f64,
    abs2_c2: f64,
    abs2_c3: f64,
    arg_c2: f64,
    arg_c3: f64,
}

impl EvolveArgs {
    pub fn resolve(self) -> Result<Self> {
        let g = self.g.unwrap_or(0.25);
        let ratio = self.ratio.unwrap_or(20.0);
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(CliError::config("ratio", "must be positive"));
        }
        let base = RydbergParams::interaction_regime(g, ratio);
        let pick = |given: [Option<f64>; 4], fallback: [f64; 4]| -> [Option<f64>; 4] {
            std::array::from_fn(|k| Some(given[k].unwrap_or(fallback[k])))
        };
        let [omega1, omega2, omega3, omega4] = pick([self.omega1, self.omega2, self.omega3, self.omega4], base.omega);
        let [delta1, delta2, delta3, delta4] = pick([self.delta1, self.delta2, self.delta3, self.delta4], base.delta);
        let [phi1, phi2, phi3, phi4] = pick([self.phi1, self.phi2, self.phi3, self.phi4], base.phase);
        let mut out = Self {
            omega1,
            omega2,
            omega3,
            omega4,
            delta1,
            delta2,
            delta3,
            delta4,
            phi1,
            phi2,
            phi3,
            phi4,
            g: Some(g),
            ratio: Some(ratio),
            model: Some(self.model.unwrap_or_default()),
            duration: self.duration,
            dt: self.dt,
            psi0: Some(self.psi0.unwrap_or(InitialState::Basis(0))),
            stride: self.stride,
        };
        let params = out.params()?;
        let h = out.hamiltonian(&params)?;
        let duration = match out.duration {
            Some(t) => t,
            None => 10.0 / params.effective_rabi()?.norm(),
        };
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(CliError::config("T", "must be finite and non-negative"));
        }
        let dt = out.dt.unwrap_or(0.05 / h.spectral_norm().max(1e-300));
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::config("dt", "must be positive"));
        }
        let steps = (duration / dt).ceil() as usize;
        out.duration = Some(duration);
        out.dt = Some(dt);
        out.stride = Some(out.stride.unwrap_or(steps.div_ceil(TARGET_SAMPLES).max(1)));
        out.initial(h.dim())?;
        Ok(out)
    }

    fn params(&self) -> Result<RydbergParams> {
        let get = |v: Option<f64>| v.expect("resolved");
        Ok(RydbergParams {
            omega: [self.omega1, self.omega2, self.omega3, self.omega4].map(get),
            delta: [self.delta1, self.delta2, self.delta3, self.delta4].map(get),
            phase: [self.phi1, self.phi2, self.phi3, self.phi4].map(get),
        })
    }

    fn hamiltonian(&self, p: &RydbergParams) -> Result<z3pf::DenseOperator> {
        Ok(match self.model.expect("resolved") {
            Model::Full => rotating_hamiltonian(p)?,
            Model::Eliminated => adiabatic_eliminate(p)?,
        })
    }

    fn initial(&self, dim: usize) -> Result<DVector<C64>> {
        let v = match self.psi0.as_ref().expect("resolved") {
            InitialState::Basis(k) if *k < dim => DVector::from_fn(dim, |i, _| C64::new(f64::from(u8::from(i == *k)), 0.0)),
            InitialState::Basis(k) => return Err(CliError::config("psi0", format!("basis index {k} outside 0..{dim}"))),
            InitialState::Amplitudes(a) if a.len() == dim => DVector::from_fn(dim, |i, _| C64::new(a[i][0], a[i][1])),
            InitialState::Amplitudes(a) => {
                return Err(CliError::config("psi0", format!("expected {dim} amplitudes, got {}", a.len())))
            }
        };
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(CliError::config("psi0", "state has zero norm"));
        }
        Ok(v.unscale(norm))
    }

    pub fn run(&self, out: &mut OutputDir) -> Result<String> {
        let params = self.params()?;
        let h = self.hamiltonian(&params)?;
        let psi0 = self.initial(h.dim())?;
        let traj = evolve(
            |_| h.clone(),
            &psi0,
            self.duration.expect("resolved"),
            self.dt.expect("resolved"),
            self.stride.expect("resolved"),
        )?;
        let amp = |s: &DVector<C64>, k: usize| s.get(k).copied().unwrap_or_default();
        let rows = traj.times.iter().zip(&traj.states).map(|(&t, s)| TrajectoryRow {
            t,
            abs2_c0: amp(s, 0).norm_sqr(),
            abs2_c1: amp(s, 1).norm_sqr(),
            abs2_c2: amp(s, 2).norm_sqr(),
            abs2_c3: amp(s, 3).norm_sqr(),
            arg_c2: amp(s, 2).arg(),
            arg_c3: amp(s, 3).arg(),
        });
        out.csv("trajectory.csv", rows)?;
        let leakage = if h.dim() == 4 { traj.max_population(3) } else { 0.0 };
        Ok(format!("{} samples, peak population of |3> {leakage:.3e}", traj.times.len()))
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerryArgs {
    /// Mean coupling amplitude |D|.
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Level splitting ω_23.
    #[arg(long, allow_hyphen_values = true)]
    pub splitting: Option<f64>,
    /// Eigenstate branch, +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Option<i8>,
    /// Windings of the coupling phase.
    #[arg(long, allow_hyphen_values = true)]
    pub winding: Option<i32>,
    /// Envelope modulation depth; non-zero requires a single winding.
    #[arg(long, allow_hyphen_values = true)]
    pub depth: Option<f64>,
    /// Loop duration; overrides t_gap.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub duration: Option<f64>,
    /// Loop duration in units of the inverse minimum gap.
    #[arg(long)]
    pub t_gap: Option<f64>,
}

#[derive(Serialize)]
struct BerryReport {
    gamma_closed: f64,
    gamma_numeric: f64,
    residual: f64,
    relative_error: f64,
    #[serde(rename = "T")]
    duration: f64,
    adiabaticity: f64,
    steps: usize,
    adiabatic_warning: bool,
}

impl BerryArgs {
    pub fn resolve(self) -> Result<Self> {
        let mut out = Self {
            coupling: Some(self.coupling.unwrap_or(1.0)),
            splitting: Some(self.splitting.unwrap_or(1.0)),
            branch: Some(self.branch.unwrap_or(1)),
            winding: Some(self.winding.unwrap_or(1)),
            depth: Some(self.depth.unwrap_or(0.0)),
            duration: self.duration,
            t_gap: Some(self.t_gap.unwrap_or(200.0)),
        };
        if !matches!(out.branch, Some(1 | -1)) {
            return Err(CliError::config("branch", "must be 1 or -1"));
        }
        if out.depth != Some(0.0) && out.winding != Some(1) {
            return Err(CliError::config("winding", "a modulated envelope supports a single winding"));
        }
        if out.duration.is_none() {
            let gap = out.path().min_gap();
            if !(gap > 0.0) {
                return Err(CliError::config("t_gap", "the loop closes the gap; give T instead"));
            }
            out.duration = Some(out.t_gap.expect("resolved") / gap);
        }
        Ok(out)
    }

    fn path(&self) -> BerryLoop {
        let (coupling, splitting, branch) =
            (self.coupling.expect("resolved"), self.splitting.expect("resolved"), self.branch.expect("resolved"));
        let depth = self.depth.expect("resolved");
        if depth == 0.0 {
            BerryLoop::constant(coupling, splitting, branch, self.winding.expect("resolved"))
        } else {
            BerryLoop::modulated(coupling, depth, splitting, branch)
        }
    }

    pub fn run(&self, out: &mut OutputDir) -> Result<String> {
        let path = self.path();
        let closed = berry_phase_closed(&path)?;
        let numeric = berry_phase_numeric(&path, self.duration.expect("resolved"))?;
        let residual = angle_distance(closed, numeric.gamma);
        out.json(
            "berry.json",
            &BerryReport {
                gamma_closed: closed,
                gamma_numeric: numeric.gamma,
                residual,
                relative_error: residual / closed.abs(),
                duration: numeric.duration,
                adiabaticity: numeric.adiabaticity,
                steps: numeric.steps,
                adiabatic_warning: numeric.adiabatic_warning,
            },
        )?;
        Ok(format!("closed {closed:.6}, numeric {:.6}, residual {residual:.3e}", numeric.gamma))
    }
}
