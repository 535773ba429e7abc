//! Paired bootstrap resampling over per-sentence sufficient statistics.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gleu::GleuStats;
use super::m2::M2Counts;
use super::DEFAULT_BETA;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 1234;

/// Per-sentence statistics whose sum determines a corpus score.
pub trait SufficientStats: Clone {
    fn zero_like(&self) -> Self;
    fn accumulate(&mut self, other: &Self);
    fn corpus_score(&self) -> f64;
}

impl SufficientStats for GleuStats {
    fn zero_like(&self) -> Self {
        GleuStats::zero(self.order())
    }

    fn accumulate(&mut self, other: &Self) {
        self.add(other);
    }

    fn corpus_score(&self) -> f64 {
        self.score()
    }
}

impl SufficientStats for M2Counts {
    fn zero_like(&self) -> Self {
        M2Counts::default()
    }

    fn accumulate(&mut self, other: &Self) {
        self.add(other);
    }

    fn corpus_score(&self) -> f64 {
        self.prf(DEFAULT_BETA).f_beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 50,
            level: 0.05,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub score_a: f64,
    pub score_b: f64,
    pub resamples: usize,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// `(wins_a + ties / 2) / resamples`.
    pub win_fraction: f64,
    pub level: f64,
    /// One system won at least `1 - level` of the resamples.
    pub significant: bool,
    pub seed: u64,
}

fn corpus<S: SufficientStats>(stats: &[S], indices: impl Iterator<Item = usize>) -> f64 {
    let mut total = stats[0].zero_like();
    for i in indices {
        total.accumulate(&stats[i]);
    }
    total.corpus_score()
}

/// Compares two systems scored on the same sentences. Each resample draws
/// `n` sentence indices with replacement and scores both systems on them.
pub fn paired_bootstrap<S: SufficientStats>(a: &[S], b: &[S], config: &BootstrapConfig) -> Result<BootstrapReport> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "system A vs system B sentences",
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Empty("bootstrap sentences"));
    }
    if config.resamples == 0 {
        return Err(Error::Config("bootstrap needs at least one resample".into()));
    }
    if !(0.0..=1.0).contains(&config.level) {
        return Err(Error::Config(format!(
            "significance level {} outside [0, 1]",
            config.level
        )));
    }
    let n = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut wins_a, mut wins_b, mut ties) = (0, 0, 0);
    let mut sample = vec![0usize; n];
    for _ in 0..config.resamples {
        for slot in sample.iter_mut() {
            *slot = rng.random_range(0..n);
        }
        let sa = corpus(a, sample.iter().copied());
        let sb = corpus(b, sample.iter().copied());
        if sa > sb {
            wins_a += 1;
        } else if sb > sa {
            wins_b += 1;
        } else {
            ties += 1;
        }
    }
    let r = config.resamples as f64;
    let threshold = 1.0 - config.level;
    Ok(BootstrapReport {
        score_a: corpus(a, 0..n),
        score_b: corpus(b, 0..n),
        resamples: config.resamples,
        wins_a,
        wins_b,
        ties,
        win_fraction: (wins_a as f64 + 0.5 * ties as f64) / r,
        level: config.level,
        significant: wins_a as f64 / r >= threshold || wins_b as f64 / r >= threshold,
        seed: config.seed,
    })
}
