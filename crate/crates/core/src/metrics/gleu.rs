//! Single-reference GLEU with the source penalty.
//!
//! For each order n, the numerator counts hypothesis n-grams clipped against
//! the reference, minus hypothesis n-grams (clipped) that occur in the source
//! but nowhere in the reference, floored at zero. The denominator is the
//! number of hypothesis n-grams. The score is the brevity penalty times the
//! geometric mean of the per-order ratios.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 4;

/// Per-sentence sufficient statistics; corpus statistics are their sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GleuStats {
    pub hyp_len: u64,
    pub ref_len: u64,
    pub numerators: Vec<u64>,
    pub denominators: Vec<u64>,
}

impl GleuStats {
    pub fn zero(order: usize) -> Self {
        GleuStats {
            hyp_len: 0,
            ref_len: 0,
            numerators: vec![0; order],
            denominators: vec![0; order],
        }
    }

    pub fn order(&self) -> usize {
        self.numerators.len()
    }

    pub fn add(&mut self, other: &GleuStats) {
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        for (a, b) in self.numerators.iter_mut().zip(&other.numerators) {
            *a += b;
        }
        for (a, b) in self.denominators.iter_mut().zip(&other.denominators) {
            *a += b;
        }
    }

    /// Orders without any hypothesis n-gram are add-one smoothed to a ratio
    /// of 1; a zero numerator elsewhere gives a score of 0.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return if self.ref_len == 0 { 1.0 } else { 0.0 };
        }
        let mut log_prec = 0.0;
        for (&num, &den) in self.numerators.iter().zip(&self.denominators) {
            let (num, den) = if den == 0 { (num + 1, den + 1) } else { (num, den) };
            if num == 0 {
                return 0.0;
            }
            log_prec += (num as f64 / den as f64).ln();
        }
        log_prec /= self.order() as f64;
        let bp = (1.0 - self.ref_len as f64 / self.hyp_len as f64).min(0.0);
        (bp + log_prec).exp()
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

pub fn gleu_stats(hyp: &[String], src: &[String], reference: &[String], order: usize) -> GleuStats {
    let mut stats = GleuStats::zero(order);
    stats.hyp_len = hyp.len() as u64;
    stats.ref_len = reference.len() as u64;
    for n in 1..=order {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        let s = ngram_counts(src, n);
        let matches: u64 = h.iter().map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0))).sum();
        let penalty: u64 = s
            .iter()
            .filter(|(g, _)| !r.contains_key(*g))
            .map(|(g, &c)| c.min(h.get(g).copied().unwrap_or(0)))
            .sum();
        stats.numerators[n - 1] = matches.saturating_sub(penalty);
        stats.denominators[n - 1] = (hyp.len() + 1).saturating_sub(n) as u64;
    }
    stats
}

pub fn gleu_sentence(hyp: &[String], src: &[String], reference: &[String]) -> f64 {
    gleu_stats(hyp, src, reference, DEFAULT_ORDER).score()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GleuReport {
    pub score: f64,
    pub sentence_scores: Vec<f64>,
    pub order: usize,
    #[serde(skip)]
    pub sentence_stats: Vec<GleuStats>,
}

pub fn gleu<H, S, R>(hyps: &[H], srcs: &[S], refs: &[R]) -> Result<GleuReport>
where
    H: AsRef<[String]>,
    S: AsRef<[String]>,
    R: AsRef<[String]>,
{
    gleu_with_order(hyps, srcs, refs, DEFAULT_ORDER)
}

pub fn gleu_with_order<H, S, R>(hyps: &[H], srcs: &[S], refs: &[R], order: usize) -> Result<GleuReport>
where
    H: AsRef<[String]>,
    S: AsRef<[String]>,
    R: AsRef<[String]>,
{
    if hyps.len() != srcs.len() {
        return Err(Error::LengthMismatch {
            what: "hypotheses vs sources",
            left: hyps.len(),
            right: srcs.len(),
        });
    }
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            what: "hypotheses vs references",
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::Empty("GLEU corpus"));
    }
    if order == 0 {
        return Err(Error::Config("GLEU order must be at least 1".into()));
    }
    let sentence_stats: Vec<GleuStats> = hyps
        .iter()
        .zip(srcs)
        .zip(refs)
        .map(|((h, s), r)| gleu_stats(h.as_ref(), s.as_ref(), r.as_ref(), order))
        .collect();
    let mut total = GleuStats::zero(order);
    for s in &sentence_stats {
        total.add(s);
    }
    Ok(GleuReport {
        score: total.score(),
        sentence_scores: sentence_stats.iter().map(GleuStats::score).collect(),
        order,
        sentence_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::TokenSeq;

    fn s(line: &str) -> Vec<String> {
        TokenSeq::from_line(line).into_inner()
    }

    #[test]
    fn identity_scores_one() {
        let a = s("the cat sat on the mat");
        assert_eq!(gleu_sentence(&a, &a, &a), 1.0);
        let r = gleu(std::slice::from_ref(&a), &[s("a cat sat")], std::slice::from_ref(&a)).unwrap();
        assert_eq!(r.score, 1.0);
    }

    #[test]
    fn short_identity_uses_smoothing() {
        let a = s("x");
        assert_eq!(gleu_sentence(&a, &a, &a), 1.0);
    }

    #[test]
    fn penalty_counts_source_only_ngrams() {
        let st = gleu_stats(&s("a c"), &s("a c"), &s("a b"), 2);
        // unigrams: match a (1) minus source-only c (1) = 0
        assert_eq!(st.numerators, vec![0, 0]);
        assert_eq!(st.denominators, vec![2, 1]);
    }

    #[test]
    fn errors() {
        let a = s("a");
        assert!(gleu(
            std::slice::from_ref(&a),
            &[a.clone(), a.clone()],
            std::slice::from_ref(&a)
        )
        .is_err());
        let empty: Vec<Vec<String>> = vec![];
        assert!(gleu(&empty, &empty, &empty).is_err());
    }
}
