//! Decoding against a pluggable next-token scorer, with additive biases on
//! the four diff-tag probabilities.
//!
//! Biases only affect which candidates survive the beam. Hypothesis scores
//! are always sums of unbiased log-probabilities.

mod beam;
pub mod kbest;
mod tune;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{is_tag, Tag, TokenSeq};

pub use beam::{beam_decode, DecodeConfig, Hypothesis, StepProbs};
pub use tune::{evaluate_bias, grid_points, grid_search_by, grid_search_tune, CurvePoint, TuneConfig, TuneResult};

/// Tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-6;

/// Output symbol of a scorer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sym {
    Word(String),
    Tag(Tag),
    Eos,
}

impl Sym {
    pub fn tag(&self) -> Option<Tag> {
        match self {
            Sym::Tag(t) => Some(*t),
            _ => None,
        }
    }

    /// Token text; `None` for end of sequence.
    pub fn as_token(&self) -> Option<&str> {
        match self {
            Sym::Word(w) => Some(w),
            Sym::Tag(t) => Some(t.as_str()),
            Sym::Eos => None,
        }
    }

    /// Tags parse to [`Sym::Tag`], anything else is a word.
    pub fn from_token(token: &str) -> Sym {
        match Tag::parse(token) {
            Some(t) => Sym::Tag(t),
            None => Sym::Word(token.to_string()),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Eos => f.write_str("</s>"),
            other => f.write_str(other.as_token().unwrap_or_default()),
        }
    }
}

/// Next-token probabilities. Entry order is meaningful: among candidates
/// with equal ranking value, earlier entries win.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    entries: Vec<(Sym, f64)>,
}

impl Distribution {
    /// Checks the entries: finite non-negative probabilities summing to 1,
    /// no duplicate symbols, no tag spelled as a word, and an entry (possibly
    /// zero) for each tag and for end of sequence.
    pub fn new(entries: Vec<(Sym, f64)>) -> Result<Self> {
        let d = Distribution { entries };
        d.validate()?;
        Ok(d)
    }

    /// Builds a distribution without checks; [`Distribution::validate`]
    /// reports problems later.
    pub fn new_unchecked(entries: Vec<(Sym, f64)>) -> Self {
        Distribution { entries }
    }

    /// Adds a zero entry for every tag and for end of sequence not already
    /// listed, then validates.
    pub fn with_all_tags(mut entries: Vec<(Sym, f64)>) -> Result<Self> {
        for sym in Tag::ALL.iter().map(|t| Sym::Tag(*t)).chain([Sym::Eos]) {
            if !entries.iter().any(|(s, _)| *s == sym) {
                entries.push((sym, 0.0));
            }
        }
        Distribution::new(entries)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        let mut seen = std::collections::HashSet::with_capacity(self.entries.len());
        let mut total = 0.0;
        for (sym, p) in &self.entries {
            if !p.is_finite() || *p < 0.0 {
                return bad(format!("probability {p} for {sym}"));
            }
            if let Sym::Word(w) = sym {
                if is_tag(w) {
                    return bad(format!("tag {w:?} given as a word"));
                }
            }
            if !seen.insert(sym) {
                return bad(format!("duplicate entry for {sym}"));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return bad(format!("probabilities sum to {total}"));
        }
        for sym in Tag::ALL.iter().map(|t| Sym::Tag(*t)).chain([Sym::Eos]) {
            if !seen.contains(&sym) {
                return bad(format!("missing entry for {sym}"));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(Sym, f64)] {
        &self.entries
    }

    pub fn prob(&self, sym: &Sym) -> f64 {
        self.entries.iter().find(|(s, _)| s == sym).map_or(0.0, |(_, p)| *p)
    }

    /// Probabilities of the four tags in [`Tag::ALL`] order.
    pub fn tag_probs(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (sym, p) in &self.entries {
            if let Sym::Tag(t) = sym {
                out[t.index()] = *p;
            }
        }
        out
    }

    /// Highest-probability symbol, first entry on ties.
    pub fn argmax(&self) -> Option<&Sym> {
        let mut best: Option<&(Sym, f64)> = None;
        for e in &self.entries {
            if best.is_none_or(|b| e.1 > b.1) {
                best = Some(e);
            }
        }
        best.map(|(s, _)| s)
    }
}

/// One offset in `[0, 1]` per tag, in [`Tag::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BiasVector([f64; 4]);

impl BiasVector {
    pub fn new(values: [f64; 4]) -> Result<Self> {
        for v in values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("bias component {v} outside [0, 1]")));
            }
        }
        Ok(BiasVector(values))
    }

    pub fn zero() -> Self {
        BiasVector([0.0; 4])
    }

    /// The same value on all four tags.
    pub fn tied(value: f64) -> Result<Self> {
        BiasVector::new([value; 4])
    }

    pub fn get(&self, tag: Tag) -> f64 {
        self.0[tag.index()]
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_tied(&self) -> bool {
        self.0.iter().all(|v| *v == self.0[0])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }
}

impl fmt::Display for BiasVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tied() {
            write!(f, "{:.2}", self.0[0])
        } else {
            let [a, b, c, d] = self.0;
            write!(f, "{a:.2},{b:.2},{c:.2},{d:.2}")
        }
    }
}

/// Ranking value of `p` for `sym` under `bias`.
pub fn biased(sym: &Sym, p: f64, bias: &BiasVector) -> f64 {
    match sym {
        Sym::Tag(t) => p + bias.get(*t),
        _ => p,
    }
}

/// Ranking values: each tag's probability plus its offset, everything else
/// unchanged. The result is not renormalized.
pub fn apply_bias(dist: &Distribution, bias: &BiasVector) -> Vec<(Sym, f64)> {
    dist.entries
        .iter()
        .map(|(s, p)| (s.clone(), biased(s, *p, bias)))
        .collect()
}

/// A stateful next-token model. `start` opens a session for one source
/// sentence; `step` advances it by the chosen symbol; `dist` gives the
/// next-token distribution.
pub trait Scorer: Sync {
    type State: Clone + Send;

    fn start(&self, source: &TokenSeq) -> Self::State;
    fn step(&self, state: &Self::State, sym: &Sym) -> Self::State;
    fn dist(&self, state: &Self::State) -> Distribution;
}

impl<S: Scorer> Scorer for &S {
    type State = S::State;

    fn start(&self, source: &TokenSeq) -> Self::State {
        (**self).start(source)
    }

    fn step(&self, state: &Self::State, sym: &Sym) -> Self::State {
        (**self).step(state, sym)
    }

    fn dist(&self, state: &Self::State) -> Distribution {
        (**self).dist(state)
    }
}
