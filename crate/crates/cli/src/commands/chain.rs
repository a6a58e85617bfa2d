//! `spectrum` and `effective`.

use clap::Args;
use serde::{Deserialize, Serialize};
use z3pf::chain::{build_hamiltonian, diagonalize, ChainSpec, MAX_SITES};
use z3pf::effective::spectrum_comparison;

use super::DEFAULT_ANGLE;
use crate::config::{Grid, Reals};
use crate::error::{CliError, Result};
use crate::output::OutputDir;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Number of sites.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    /// Flip couplings: one value or L comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<Reals>,
    /// Bond couplings: one value or L-1 comma-separated values.
    #[arg(long = "J", allow_hyphen_values = true)]
    #[serde(rename = "J")]
    pub j: Option<Reals>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_hat: Option<f64>,
    /// Number of lowest levels written (default: all).
    #[arg(long)]
    pub levels: Option<usize>,
}

impl SpectrumArgs {
    pub fn resolve(self) -> Result<Self> {
        let sites = self.sites.unwrap_or(2);
        let out = Self {
            sites: Some(sites),
            f: Some(self.f.unwrap_or(Reals::One(0.0))),
            j: Some(self.j.unwrap_or(Reals::One(1.0))),
            phi: Some(self.phi.unwrap_or(DEFAULT_ANGLE)),
            phi_hat: Some(self.phi_hat.unwrap_or(DEFAULT_ANGLE)),
            levels: self.levels,
        };
        let dim = out.spec()?.dim();
        let levels = out.levels.unwrap_or(dim);
        if levels == 0 || levels > dim {
            return Err(CliError::config("levels", format!("must lie in 1..={dim}")));
        }
        Ok(Self { levels: Some(levels), ..out })
    }

    fn spec(&self) -> Result<ChainSpec> {
        let sites = self.sites.expect("resolved");
        if sites == 0 {
            return Err(CliError::config("L", "a chain needs at least one site"));
        }
        if sites > MAX_SITES {
            return Err(CliError::config("L", format!("at most {MAX_SITES} sites fit the dense solver, got {sites}")));
        }
        let f = self.f.as_ref().expect("resolved").expand(sites, "f")?;
        let j = self.j.as_ref().expect("resolved").expand(sites - 1, "J")?;
        Ok(ChainSpec::new(f, j, self.phi.expect("resolved"), self.phi_hat.expect("resolved"))?)
    }

    pub fn run(&self, out: &mut OutputDir) -> Result<String> {
        let spec = self.spec()?;
        let result = diagonalize(&build_hamiltonian(&spec)?)?;
        let (f, j) = (join(&spec.f), join(&spec.j));
        let rows = (0..self.levels.expect("resolved")).map(|k| SpectrumRow {
            f: f.clone(),
            j: j.clone(),
            phi: spec.phi,
            phi_hat: spec.phi_hat,
            level_index: k,
            eigenvalue: result.eigenvalues[k],
            parity_label: result.parity_labels[k],
        });
        out.csv("spectrum.csv", rows)?;
        Ok(format!(
            "{} levels, ground energy {}, ground degeneracy {}",
            result.eigenvalues.len(),
            result.eigenvalues[0],
            result.ground_dim
        ))
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    f: String,
    #[serde(rename = "J")]
    j: String,
    phi: f64,
    phi_hat: f64,
    level_index: usize,
    eigenvalue: f64,
    parity_label: u8,
}

/// Uniform couplings print as one number, others as `a;b;c`.
fn join(values: &[f64]) -> String {
    match values {
        [] => String::new(),
        [first, rest @ ..] if rest.iter().all(|x| x == first) => first.to_string(),
        _ => values.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveArgs {
    /// Number of sites; the comparison table exists for two sites only.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    /// `start:stop:step` (inclusive) or comma-separated flip couplings.
    #[arg(long)]
    pub f_grid: Option<Grid>,
    #[arg(long = "J", allow_hyphen_values = true)]
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_hat: Option<f64>,
}

impl EffectiveArgs {
    pub fn resolve(self) -> Result<Self> {
        let sites = self.sites.unwrap_or(2);
        if sites != 2 {
            return Err(CliError::config("L", format!("only L = 2 is tabulated, got {sites}")));
        }
        let out = Self {
            sites: Some(sites),
            f_grid: Some(self.f_grid.unwrap_or_else(|| Grid::Range("0:0.3:0.01".into()))),
            j: Some(self.j.unwrap_or(1.0)),
            phi: Some(self.phi.unwrap_or(DEFAULT_ANGLE)),
            phi_hat: Some(self.phi_hat.unwrap_or(DEFAULT_ANGLE)),
        };
        out.grid()?;
        Ok(out)
    }

    fn grid(&self) -> Result<Vec<f64>> {
        self.f_grid.as_ref().expect("resolved").points("f_grid")
    }

    pub fn run(&self, out: &mut OutputDir) -> Result<String> {
        let template = ChainSpec::new(
            vec![0.0; 2],
            vec![self.j.expect("resolved")],
            self.phi.expect("resolved"),
            self.phi_hat.expect("resolved"),
        )?;
        let grid = self.grid()?;
        let rows = spectrum_comparison(&template, &grid)?;
        let flagged = rows.iter().filter(|r| r.nonperturbative).count();
        out.csv(
            "effective.csv",
            rows.iter().map(|r| EffectiveRow {
                f: r.f,
                e0_exact: r.exact[0],
                e1_exact: r.exact[1],
                e2_exact: r.exact[2],
                e0_pert: r.perturbative[0],
                e1_pert: r.perturbative[1],
                e2_pert: r.perturbative[2],
                flag_nonperturbative: r.nonperturbative,
            }),
        )?;
        Ok(format!("{} grid points, {flagged} flagged non-perturbative", rows.len()))
    }
}

#[derive(Serialize)]
struct EffectiveRow {
    f: f64,
    #[serde(rename = "E0_exact")]
    e0_exact: f64,
    #[serde(rename = "E1_exact")]
    e1_exact: f64,
    #[serde(rename = "E2_exact")]
    e2_exact: f64,
    #[serde(rename = "E0_pert")]
    e0_pert: f64,
    #[serde(rename = "E1_pert")]
    e1_pert: f64,
    #[serde(rename = "E2_pert")]
    e2_pert: f64,
    flag_nonperturbative: bool,
}
