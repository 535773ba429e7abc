//! Interpolated maximum-likelihood n-gram language model.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const DEFAULT_LM_ORDER: usize = 3;
/// Weight of the uniform distribution over the vocabulary plus unknown.
pub const UNIFORM_WEIGHT: f64 = 0.01;

/// Counts of every n-gram up to `order` over `<s>`-padded, `</s>`-terminated
/// sentences. The probability of `w` after history `h` mixes the ML
/// estimates for each context length `k = 0..order-1` with weight
/// proportional to `2^k`, plus [`UNIFORM_WEIGHT`] on a uniform distribution
/// over the vocabulary and one unknown class. Context lengths whose context
/// was never seen drop out and the remaining weights are renormalized, so
/// probabilities over the vocabulary plus unknown always sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLM {
    order: usize,
    /// n-gram → count, for n in 1..=order
    ngrams: HashMap<Vec<String>, u64>,
    /// context → total count of its continuations
    contexts: HashMap<Vec<String>, u64>,
    /// predictable types, `</s>` included
    vocab_size: usize,
}

impl NGramLM {
    pub fn train<T: AsRef<[String]>>(targets: &[T], order: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Empty("language model training corpus"));
        }
        if order == 0 {
            return Err(Error::Config("language model order must be at least 1".into()));
        }
        let mut ngrams: HashMap<Vec<String>, u64> = HashMap::new();
        for t in targets {
            let mut padded: Vec<String> = vec![BOS.to_string(); order - 1];
            padded.extend(t.as_ref().iter().cloned());
            padded.push(EOS.to_string());
            for i in (order - 1)..padded.len() {
                for n in 1..=order {
                    let gram = &padded[i + 1 - n..=i];
                    *ngrams.entry(gram.to_vec()).or_insert(0) += 1;
                }
            }
        }
        Ok(NGramLM::from_counts(order, ngrams))
    }

    /// Rebuilds a model from its n-gram counts.
    pub fn from_counts(order: usize, ngrams: HashMap<Vec<String>, u64>) -> Self {
        let mut contexts: HashMap<Vec<String>, u64> = HashMap::new();
        let mut vocab_size = 0;
        for (g, c) in &ngrams {
            *contexts.entry(g[..g.len() - 1].to_vec()).or_insert(0) += c;
            if g.len() == 1 {
                vocab_size += 1;
            }
        }
        NGramLM {
            order,
            ngrams,
            contexts,
            vocab_size,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn counts(&self) -> &HashMap<Vec<String>, u64> {
        &self.ngrams
    }

    /// Counts sorted by n-gram, for stable serialization.
    pub fn sorted_counts(&self) -> BTreeMap<&[String], u64> {
        self.ngrams.iter().map(|(g, c)| (g.as_slice(), *c)).collect()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ngrams.contains_key(&[word.to_string()][..])
    }

    /// Maximum-likelihood `P(word | context)`; `None` if the context was
    /// never seen.
    pub fn ml_prob(&self, word: &str, context: &[String]) -> Option<f64> {
        let total = *self.contexts.get(context)?;
        let mut gram = context.to_vec();
        gram.push(word.to_string());
        let c = self.ngrams.get(&gram).copied().unwrap_or(0);
        Some(c as f64 / total as f64)
    }

    /// Interpolated `P(word | history)`. `history` holds preceding tokens;
    /// positions before the sentence start are `<s>`.
    pub fn prob(&self, word: &str, history: &[String]) -> f64 {
        let mut ctx: Vec<String> = vec![BOS.to_string(); (self.order - 1).saturating_sub(history.len())];
        let keep = history.len().min(self.order - 1);
        ctx.extend_from_slice(&history[history.len() - keep..]);
        let mut num = UNIFORM_WEIGHT / (self.vocab_size + 1) as f64;
        let mut weight = UNIFORM_WEIGHT;
        for k in 0..self.order {
            let w = (1.0 - UNIFORM_WEIGHT) * f64::powi(2.0, k as i32);
            if let Some(p) = self.ml_prob(word, &ctx[ctx.len() - k..]) {
                num += w * p;
                weight += w;
            }
        }
        num / weight
    }

    /// Log-probability of `words` continuing `history`.
    pub fn log_prob_seq(&self, words: &[String], history: &[String]) -> f64 {
        let mut h = history.to_vec();
        let mut total = 0.0;
        for w in words {
            total += self.prob(w, &h).ln();
            h.push(w.clone());
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(line: &str) -> Vec<String> {
        line.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn ml_bigram() {
        let lm = NGramLM::train(&[s("a b")], 2).unwrap();
        assert_eq!(lm.ml_prob("b", &s("a")), Some(1.0));
        assert_eq!(lm.ml_prob("b", &s("zzz")), None);
    }

    #[test]
    fn unknown_gets_mass() {
        let lm = NGramLM::train(&[s("a b"), s("b c")], 3).unwrap();
        assert!(lm.prob("nope", &s("a b")) > 0.0);
    }

    #[test]
    fn normalized_everywhere() {
        let lm = NGramLM::train(&[s("a b a c"), s("c a b"), s("b")], 3).unwrap();
        let vocab = ["a", "b", "c", EOS, "<unk>"];
        for h in [s(""), s("a"), s("a b"), s("c c"), s("zz a"), s("q r")] {
            let total: f64 = vocab.iter().map(|w| lm.prob(w, &h)).sum();
            assert!((total - 1.0).abs() < 1e-9, "{h:?}: {total}");
        }
    }

    #[test]
    fn empty_corpus_is_error() {
        let none: Vec<Vec<String>> = vec![];
        assert!(NGramLM::train(&none, 3).is_err());
    }
}
