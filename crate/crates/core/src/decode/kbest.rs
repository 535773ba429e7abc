//! K-best exchange format for offline bias re-ranking.
//!
//! One hypothesis per line, three tab-separated fields:
//!
//! ```text
//! <source id> \t <tokens> \t <step groups>
//! ```
//!
//! `tokens` is the space-joined decoded sequence without the end-of-sequence
//! symbol. `step groups` has one `;`-separated group per decoding step,
//! including a final group for the end-of-sequence step when it was
//! reached. Each group is five comma-separated probabilities: the chosen
//! symbol, then `<del>`, `</del>`, `<ins>`, `</ins>`. Probabilities are
//! written with Rust's shortest round-trip float formatting, so a dump
//! reads back to the same values.

use std::fmt::Write as _;

use serde::Serialize;

use super::{biased, BiasVector, Hypothesis, StepProbs, Sym};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KbestEntry {
    pub source_id: String,
    pub tokens: Vec<String>,
    pub steps: Vec<StepProbs>,
}

impl KbestEntry {
    pub fn from_hypothesis(source_id: &str, hyp: &Hypothesis) -> Self {
        KbestEntry {
            source_id: source_id.to_string(),
            tokens: hyp.raw.clone(),
            steps: hyp.steps.clone(),
        }
    }

    /// Symbol decoded at step `i`; steps past the tokens are end of
    /// sequence.
    fn sym(&self, i: usize) -> Sym {
        self.tokens.get(i).map_or(Sym::Eos, |t| Sym::from_token(t))
    }

    /// Sum of log-probabilities of the chosen symbols.
    pub fn score(&self) -> f64 {
        self.steps.iter().map(|s| s.chosen.ln()).sum()
    }

    /// Sum of log ranking values under `bias`.
    pub fn biased_score(&self, bias: &BiasVector) -> f64 {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| biased(&self.sym(i), s.chosen, bias).ln())
            .sum()
    }

    pub fn to_line(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.source_id);
        out.push('\t');
        out.push_str(&self.tokens.join(" "));
        out.push('\t');
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            let [a, b, c, d] = s.tags;
            let _ = write!(out, "{},{a},{b},{c},{d}", s.chosen);
        }
        out
    }

    pub fn parse_line(line: &str, origin: &str, lineno: usize) -> Result<Self> {
        let err = |msg: String| Error::parse(origin, lineno, msg);
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, toks, groups] = fields[..] else {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let tokens: Vec<String> = toks.split_whitespace().map(str::to_string).collect();
        let mut steps = Vec::new();
        for g in groups.split(';').filter(|g| !g.is_empty()) {
            let vals = g
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|_| err(format!("bad probability {v:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            let [chosen, a, b, c, d] = vals[..] else {
                return Err(err(format!("step group {g:?} needs 5 values")));
            };
            for v in [chosen, a, b, c, d] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(err(format!("probability {v} outside [0, 1]")));
                }
            }
            steps.push(StepProbs {
                chosen,
                tags: [a, b, c, d],
            });
        }
        if steps.len() != tokens.len() && steps.len() != tokens.len() + 1 {
            return Err(err(format!(
                "{} step groups for {} tokens; expected one per token plus an optional end step",
                steps.len(),
                tokens.len()
            )));
        }
        Ok(KbestEntry {
            source_id: id.to_string(),
            tokens,
            steps,
        })
    }
}

pub fn parse_kbest(text: &str, origin: &str) -> Result<Vec<KbestEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| KbestEntry::parse_line(l, origin, i + 1))
        .collect()
}

pub fn render_kbest(entries: &[KbestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&e.to_line());
        out.push('\n');
    }
    out
}

/// Re-orders each source's hypotheses by biased score, best first. Sources
/// keep their order of first appearance; equal scores keep input order.
pub fn rerank(entries: &[KbestEntry], bias: &BiasVector) -> Vec<(KbestEntry, f64)> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: std::collections::HashMap<&str, Vec<(KbestEntry, f64)>> = std::collections::HashMap::new();
    for e in entries {
        let id = e.source_id.as_str();
        if !groups.contains_key(id) {
            order.push(id);
        }
        groups.entry(id).or_default().push((e.clone(), e.biased_score(bias)));
    }
    let mut out = Vec::with_capacity(entries.len());
    for id in order {
        let mut g = groups.remove(id).unwrap_or_default();
        g.sort_by(|a, b| b.1.total_cmp(&a.1));
        out.extend(g);
    }
    out
}
