//! `gate-level`.

use clap::Args;
use serde::{Deserialize, Serialize};
use z3pf::gates::{diagonal_gate, dynamical_gate};
use z3pf::hierarchy::{Classifier, Phase, WitnessStep, DEFAULT_K_MAX};

use crate::error::{CliError, Result};
use crate::output::OutputDir;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateArgs {
    /// Phase of diag(1, 1, e^{iθ}) as a fraction `p/q` of 2π.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta_t")]
    pub theta: Option<String>,
    /// Interaction time of the dynamical gate.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_t: Option<f64>,
    /// Highest hierarchy level tested.
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Serialize)]
struct GateReport {
    theta: f64,
    theta_fraction: Option<String>,
    beta_t: Option<f64>,
    k_max: usize,
    level: Option<usize>,
    witness_chain: Vec<WitnessStep>,
}

impl GateArgs {
    pub fn resolve(self) -> Result<Self> {
        match (&self.theta, self.beta_t) {
            (Some(_), Some(_)) => return Err(CliError::config("beta_t", "give either theta or beta_t, not both")),
            (None, None) => return Err(CliError::config("theta", "one of theta or beta_t is required")),
            _ => {}
        }
        if let Some(t) = &self.theta {
            t.parse::<Phase>().map_err(|e| CliError::config("theta", e.to_string()))?;
        }
        Ok(Self { k_max: Some(self.k_max.unwrap_or(DEFAULT_K_MAX)), ..self })
    }

    pub fn run(&self, out: &mut OutputDir) -> Result<String> {
        let k_max = self.k_max.expect("resolved");
        let (gate, theta) = match (&self.theta, self.beta_t) {
            (Some(t), _) => {
                let theta = t.parse::<Phase>().map_err(|e| CliError::config("theta", e.to_string()))?.radians();
                (diagonal_gate(theta), theta)
            }
            (None, Some(bt)) => {
                let g = dynamical_gate(bt);
                (g.matrix, g.theta)
            }
            (None, None) => unreachable!("resolve requires one of theta or beta_t"),
        };
        let mut classifier = Classifier::new();
        let verdict = classifier.classify(&gate, k_max)?;
        let witness_chain = classifier.witness_chain(&gate, k_max)?;
        out.json(
            "gate.json",
            &GateReport {
                theta,
                theta_fraction: self.theta.clone(),
                beta_t: self.beta_t,
                k_max,
                level: verdict.level,
                witness_chain,
            },
        )?;
        Ok(match verdict.level {
            Some(l) => format!("level {l}"),
            None => format!("not in the hierarchy up to level {k_max}"),
        })
    }
}
