//! `sample` and `magic-report`.

use clap::Args;
use serde::{Deserialize, Serialize};
use z3pf::magic::{
    contextuality_score, coverage_stats, nearest_strange_report, stabilizer_states, strange_states, wigner,
    CoverageReport, NearestStrange, QutritState, SampleRecord,
};
use z3pf::sampler::{sample_words, Alphabet, SamplerConfig};

use crate::error::{CliError, Result};
use crate::output::OutputDir;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    /// Number of words.
    #[arg(long)]
    pub n: Option<usize>,
    /// Letters per word.
    #[arg(long)]
    pub len: Option<usize>,
    /// Phase of the non-Clifford letter.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `full` (X, S, H, U) or `clifford` (X, S, H).
    #[arg(long, value_parser = parse_alphabet)]
    pub alphabet: Option<Alphabet>,
    /// Bins per axis of the coverage grids.
    #[arg(long)]
    pub bins: Option<usize>,
}

fn parse_alphabet(s: &str) -> std::result::Result<Alphabet, String> {
    match s.to_ascii_lowercase().as_str() {
        "full" => Ok(Alphabet::Full),
        "clifford" => Ok(Alphabet::Clifford),
        _ => Err(format!("unknown alphabet `{s}`; expected full or clifford")),
    }
}

#[derive(Serialize)]
struct SampleRow {
    word_index: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta1: f64,
    delta2: f64,
    #[serde(rename = "score_M")]
    score_m: f64,
    wigner_min: f64,
    #[serde(rename = "dist_Sa")]
    dist_sa: f64,
    #[serde(rename = "dist_Sb")]
    dist_sb: f64,
    #[serde(rename = "dist_Sc")]
    dist_sc: f64,
}

impl From<&SampleRecord> for SampleRow {
    fn from(r: &SampleRecord) -> Self {
        let c = r.state.coordinates();
        let [dist_sa, dist_sb, dist_sc] = r.strange_distances;
        Self {
            word_index: r.word_index,
            alpha: c.alpha,
            beta: c.beta,
            gamma: c.gamma,
            delta1: c.delta1,
            delta2: c.delta2,
            score_m: r.score_m,
            wigner_min: r.wigner_min,
            dist_sa,
            dist_sb,
            dist_sc,
        }
    }
}

/// Wigner data of a fixed reference state.
#[derive(Serialize)]
struct ReferenceState {
    label: String,
    amplitudes: [[f64; 2]; 3],
    /// Row-major over (x, z).
    wigner: [f64; 9],
    wigner_min: f64,
    #[serde(rename = "score_M")]
    score_m: f64,
}

#[derive(Serialize)]
struct MagicReport {
    reference_states: Vec<ReferenceState>,
    coverage: CoverageReport,
    nearest_strange: Vec<NearestStrange>,
}

impl SampleArgs {
    pub fn resolve(self) -> Result<Self> {
        let d = SamplerConfig::default();
        let out = Self {
            n: Some(self.n.unwrap_or(d.n)),
            len: Some(self.len.unwrap_or(d.len)),
            theta: Some(self.theta.unwrap_or(d.theta)),
            seed: Some(self.seed.unwrap_or(d.seed)),
            alphabet: Some(self.alphabet.unwrap_or(d.alphabet)),
            bins: Some(self.bins.unwrap_or(12)),
        };
        if out.n == Some(0) {
            return Err(CliError::config("n", "at least one word is required"));
        }
        if out.bins == Some(0) {
            return Err(CliError::config("bins", "at least one bin is required"));
        }
        if !out.theta.is_some_and(f64::is_finite) {
            return Err(CliError::config("theta", "must be finite"));
        }
        Ok(out)
    }

    fn sample(&self) -> Result<Vec<SampleRecord>> {
        let cfg = SamplerConfig {
            seed: self.seed.expect("resolved"),
            n: self.n.expect("resolved"),
            len: self.len.expect("resolved"),
            theta: self.theta.expect("resolved"),
            alphabet: self.alphabet.expect("resolved"),
        };
        // Runs on the pool installed by the caller.
        Ok(sample_words(&cfg, 0)?)
    }

    pub fn run_sample(&self, out: &mut OutputDir) -> Result<String> {
        let records = self.sample()?;
        let coverage = coverage_stats(&records, self.bins.expect("resolved"))?;
        out.csv("sampler.csv", records.iter().map(SampleRow::from))?;
        out.json("coverage.json", &coverage)?;
        Ok(format!(
            "{} words, {} distinct states, phase occupancy {:.3}",
            coverage.records, coverage.distinct_states, coverage.phase_occupancy
        ))
    }

    pub fn run_report(&self, out: &mut OutputDir) -> Result<String> {
        let records = self.sample()?;
        let coverage = coverage_stats(&records, self.bins.expect("resolved"))?;
        let nearest_strange = nearest_strange_report(&records)?;
        let mut reference_states = Vec::new();
        for s in strange_states() {
            reference_states.push(reference(s.label.to_string(), &s.state)?);
        }
        for (k, s) in stabilizer_states().iter().enumerate() {
            reference_states.push(reference(format!("stabilizer_{k}"), s)?);
        }
        let summary = nearest_strange
            .iter()
            .map(|n| format!("{} at {:.4}", n.label, n.distance))
            .collect::<Vec<_>>()
            .join(", ");
        out.json("magic_report.json", &MagicReport { reference_states, coverage, nearest_strange })?;
        Ok(format!("nearest sampled states: {summary}"))
    }
}

fn reference(label: String, state: &QutritState) -> Result<ReferenceState> {
    let rho = state.density();
    let table = wigner(&rho)?;
    Ok(ReferenceState {
        label,
        amplitudes: state.amplitudes.map(|a| [a.re, a.im]),
        wigner: table.values,
        wigner_min: table.min(),
        score_m: contextuality_score(&rho)?,
    })
}
