use serde::Serialize;

use super::{biased, BiasVector, Distribution, Scorer, Sym};
use crate::diff_codec::repair;
use crate::error::{Error, Result};
use crate::seq::{Tag, TaggedSeq, TokenSeq};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeConfig {
    pub beam: usize,
    /// Output length cap in tokens, end of sequence excluded. `None` means
    /// `3 * |source| + 10`.
    pub max_len: Option<usize>,
    /// Mask tokens that would break the tag grammar or depart from the
    /// source outside insertion spans.
    pub constrained: bool,
    /// `None` skips the bias stage entirely.
    pub bias: Option<BiasVector>,
    /// Number of hypotheses returned; `None` returns every finished one.
    pub kbest: Option<usize>,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            beam: 10,
            max_len: None,
            constrained: false,
            bias: Some(BiasVector::zero()),
            kbest: None,
        }
    }
}

impl DecodeConfig {
    pub fn with_bias(mut self, bias: BiasVector) -> Self {
        self.bias = Some(bias);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.beam == 0 {
            return Err(Error::Config("beam width must be at least 1".into()));
        }
        if self.max_len == Some(0) {
            return Err(Error::Config("maximum length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Probability of the chosen symbol and of each tag at one decoding step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepProbs {
    pub chosen: f64,
    pub tags: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    /// Repaired output; always valid against the source.
    pub tagged: TaggedSeq,
    /// Tokens as decoded, before repair.
    pub raw: Vec<String>,
    /// Sum of unbiased log-probabilities of the decoded symbols.
    pub score: f64,
    /// Sum of log ranking values; equals `score` without bias.
    pub rank_score: f64,
    /// One entry per decoded symbol, including end of sequence when reached.
    pub steps: Vec<StepProbs>,
    /// Hit the length cap before end of sequence.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Outside,
    Del { empty: bool },
    Ins { empty: bool },
}

/// Tag-grammar automaton for constrained decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Grammar {
    region: Region,
    cursor: usize,
}

impl Grammar {
    fn allows(&self, sym: &Sym, source: &[String]) -> bool {
        let next_src = source.get(self.cursor);
        match (self.region, sym) {
            (Region::Outside, Sym::Word(w)) | (Region::Del { .. }, Sym::Word(w)) => next_src == Some(w),
            (Region::Outside, Sym::Tag(Tag::DelOpen)) => next_src.is_some(),
            (Region::Outside, Sym::Tag(Tag::InsOpen)) => true,
            (Region::Outside, Sym::Eos) => next_src.is_none(),
            (Region::Del { empty }, Sym::Tag(Tag::DelClose)) => !empty,
            (Region::Ins { .. }, Sym::Word(_)) => true,
            (Region::Ins { empty }, Sym::Tag(Tag::InsClose)) => !empty,
            _ => false,
        }
    }

    fn advance(&mut self, sym: &Sym) {
        self.region = match (self.region, sym) {
            (Region::Outside, Sym::Word(_)) => {
                self.cursor += 1;
                Region::Outside
            }
            (Region::Del { .. }, Sym::Word(_)) => {
                self.cursor += 1;
                Region::Del { empty: false }
            }
            (Region::Ins { .. }, Sym::Word(_)) => Region::Ins { empty: false },
            (Region::Outside, Sym::Tag(Tag::DelOpen)) => Region::Del { empty: true },
            (Region::Outside, Sym::Tag(Tag::InsOpen)) => Region::Ins { empty: true },
            (_, Sym::Tag(Tag::DelClose)) | (_, Sym::Tag(Tag::InsClose)) => Region::Outside,
            (r, _) => r,
        };
    }
}

#[derive(Clone)]
struct Partial<St> {
    state: St,
    syms: Vec<Sym>,
    score: f64,
    rank: f64,
    steps: Vec<StepProbs>,
    grammar: Grammar,
}

/// Beam search. At each step every live hypothesis is expanded by each
/// symbol with positive probability (and, when constrained, allowed by the
/// tag grammar); the `beam - finished` best expansions by accumulated log
/// ranking value survive. Ties keep the earlier hypothesis and, within a
/// hypothesis, the earlier distribution entry, so beam 1 is exactly greedy
/// decoding. Hypotheses still live at the length cap are closed off and
/// marked truncated. Finished hypotheses are returned best first, each
/// passed through [`repair`].
pub fn beam_decode<S: Scorer>(scorer: &S, source: &TokenSeq, cfg: &DecodeConfig) -> Result<Vec<Hypothesis>> {
    cfg.validate()?;
    if source.is_empty() {
        return Err(Error::Empty("decode source"));
    }
    let max_len = cfg.max_len.unwrap_or(3 * source.len() + 10);
    let src = source.as_slice();
    let mut live = vec![Partial {
        state: scorer.start(source),
        syms: Vec::new(),
        score: 0.0,
        rank: 0.0,
        steps: Vec::new(),
        grammar: Grammar {
            region: Region::Outside,
            cursor: 0,
        },
    }];
    let mut finished: Vec<(Partial<S::State>, bool)> = Vec::new();

    while !live.is_empty() && finished.len() < cfg.beam {
        if live[0].syms.len() >= max_len {
            finished.extend(live.drain(..).map(|p| (p, true)));
            break;
        }
        let width = cfg.beam - finished.len();
        // (rank, parent, symbol, p, tag probs)
        let mut cands: Vec<(f64, usize, Sym, f64, [f64; 4])> = Vec::new();
        for (parent, hyp) in live.iter().enumerate() {
            let dist: Distribution = scorer.dist(&hyp.state);
            dist.validate()?;
            let tags = dist.tag_probs();
            for (sym, p) in dist.entries() {
                if *p <= 0.0 || (cfg.constrained && !hyp.grammar.allows(sym, src)) {
                    continue;
                }
                let value = match &cfg.bias {
                    Some(b) => biased(sym, *p, b),
                    None => *p,
                };
                cands.push((hyp.rank + value.ln(), parent, sym.clone(), *p, tags));
            }
        }
        if cands.is_empty() {
            // nothing admissible: close off what is live
            finished.extend(live.drain(..).map(|p| (p, true)));
            break;
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        cands.truncate(width);
        let mut next = Vec::with_capacity(cands.len());
        for (rank, parent, sym, p, tags) in cands {
            let base = &live[parent];
            let mut steps = base.steps.clone();
            steps.push(StepProbs { chosen: p, tags });
            let mut ext = Partial {
                state: base.state.clone(),
                syms: base.syms.clone(),
                score: base.score + p.ln(),
                rank,
                steps,
                grammar: base.grammar,
            };
            if sym == Sym::Eos {
                finished.push((ext, false));
            } else {
                ext.state = scorer.step(&base.state, &sym);
                ext.grammar.advance(&sym);
                ext.syms.push(sym);
                next.push(ext);
            }
        }
        live = next;
    }

    finished.sort_by(|a, b| b.0.rank.total_cmp(&a.0.rank));
    if let Some(k) = cfg.kbest {
        finished.truncate(k);
    }
    Ok(finished
        .into_iter()
        .map(|(p, truncated)| {
            let raw: Vec<String> = p.syms.iter().filter_map(|s| s.as_token().map(str::to_string)).collect();
            Hypothesis {
                tagged: repair(&raw, src),
                raw,
                score: p.score,
                rank_score: p.rank,
                steps: p.steps,
                truncated,
            }
        })
        .collect())
}
