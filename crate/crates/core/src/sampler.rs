//! Seeded random words over `{X, S, H, U(θ)}` applied to `|0⟩`.
//!
//! Word `i` draws its letters from a ChaCha8 stream seeded with `seed` and
//! positioned on stream `i`, so every record depends only on
//! `(seed, i, position)` and the worker count never changes the output.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{clifford_generators, diagonal_gate};
use crate::magic::{strange_states, QutritState, SampleRecord};
use crate::operator::DenseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    X,
    S,
    H,
    U,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Letter::X => "X",
            Letter::S => "S",
            Letter::H => "H",
            Letter::U => "U",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    #[default]
    Full,
    Clifford,
}

impl Alphabet {
    pub fn letters(self) -> &'static [Letter] {
        match self {
            Alphabet::Full => &[Letter::X, Letter::S, Letter::H, Letter::U],
            Alphabet::Clifford => &[Letter::X, Letter::S, Letter::H],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub n: usize,
    pub len: usize,
    pub theta: f64,
    pub alphabet: Alphabet,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { seed: 7, n: 5000, len: 50, theta: 1.0, alphabet: Alphabet::Full }
    }
}

/// `U(θ) = H diag(1, 1, e^{iθ}) H†`, the dynamical gate at `βt = −θ/3` up to
/// a global phase.
pub fn u_letter(theta: f64) -> DenseOperator {
    let (_, _, h) = clifford_generators();
    h.conjugate(&diagonal_gate(theta))
}

struct LetterMatrices {
    x: DenseOperator,
    s: DenseOperator,
    h: DenseOperator,
    u: DenseOperator,
}

impl LetterMatrices {
    fn new(theta: f64) -> Self {
        let (x, s, h) = clifford_generators();
        Self { x, s, h, u: u_letter(theta) }
    }

    fn get(&self, l: Letter) -> &DenseOperator {
        match l {
            Letter::X => &self.x,
            Letter::S => &self.s,
            Letter::H => &self.h,
            Letter::U => &self.u,
        }
    }
}

/// Letters of word `index`, left to right.
pub fn draw_word(seed: u64, index: usize, len: usize, alphabet: Alphabet) -> Vec<Letter> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let letters = alphabet.letters();
    (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect()
}

/// `W|0⟩` for `W = U_1 U_2 ... U_len`.
fn apply_word(word: &[Letter], mats: &LetterMatrices) -> QutritState {
    let mut v = QutritState::basis(0).vector();
    for &l in word.iter().rev() {
        v = mats.get(l).apply(&v);
    }
    QutritState::from_vector(&v).expect("unitary letters preserve the norm")
}

/// `n` records in word-index order, computed on `workers` threads
/// (`0` uses rayon's default pool).
pub fn sample_words(config: &SamplerConfig, workers: usize) -> Result<Vec<SampleRecord>> {
    if config.n == 0 {
        return Err(Error::EmptySample);
    }
    let mats = LetterMatrices::new(config.theta);
    let strange = strange_states();
    let run = || {
        (0..config.n)
            .into_par_iter()
            .map(|i| {
                let word = draw_word(config.seed, i, config.len, config.alphabet);
                let state = apply_word(&word, &mats);
                let text: String = word.iter().map(|l| l.to_string()).collect();
                SampleRecord::from_state(i, text, state, &strange)
            })
            .collect()
    };
    if workers == 0 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
        Ok(pool.install(run))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::dynamical_gate;

    #[test]
    fn u_letter_is_dynamical_gate() {
        let theta = 1.0;
        let g = dynamical_gate(-theta / 3.0);
        assert!(u_letter(theta).approx_eq_up_to_phase(&g.matrix, 1e-12));
    }

    #[test]
    fn empty_words_give_ground_state() {
        let cfg = SamplerConfig { n: 5, len: 0, ..Default::default() };
        let recs = sample_words(&cfg, 1).unwrap();
        assert!(recs.iter().all(|r| r.state == QutritState::basis(0) && r.word.is_empty()));
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = SamplerConfig { n: 0, ..Default::default() };
        assert_eq!(sample_words(&cfg, 1), Err(Error::EmptySample));
    }

    #[test]
    fn words_depend_on_seed_and_index_only() {
        let a = draw_word(3, 17, 20, Alphabet::Full);
        assert_eq!(a, draw_word(3, 17, 20, Alphabet::Full));
        assert_ne!(a, draw_word(3, 18, 20, Alphabet::Full));
        assert_ne!(a, draw_word(4, 17, 20, Alphabet::Full));
        assert_eq!(&draw_word(3, 17, 30, Alphabet::Full)[..20], &a[..]);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = SamplerConfig { n: 64, len: 10, ..Default::default() };
        assert_eq!(sample_words(&cfg, 1).unwrap(), sample_words(&cfg, 4).unwrap());
    }
}
