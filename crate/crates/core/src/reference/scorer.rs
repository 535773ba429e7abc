//! Noisy-channel next-token scorer over the diff-tagged vocabulary.
//!
//! At each source position the scorer lists its options: copy the next
//! source token, or apply a lexicon edit to a window of up to three source
//! tokens starting there, or insert a lexicon phrase before it. An edit's
//! weight is its channel probability times how much more likely the
//! language model finds the corrected text than the original, both scored
//! together with the following source token. Copying gets the channel mass
//! left over (at least [`COPY_FLOOR`]). Option weights are normalized, and
//! the next-token distribution is the marginal over options still
//! consistent with the tokens emitted since the decision point.
//!
//! A deletion is folded together with whatever follows it (a copy, a
//! replacement or a further deletion, but never an insertion, which would
//! read back as a replacement). An insertion cannot directly follow another
//! insertion.

use std::sync::Arc;

use super::lexicon::{ConfusionLexicon, MAX_PHRASE};
use super::lm::{NGramLM, BOS, EOS};
use super::ReferenceModel;
use crate::decode::{Distribution, Scorer, Sym};
use crate::seq::{Tag, TokenSeq};

pub const COPY_FLOOR: f64 = 1e-3;

#[derive(Debug)]
struct Opt {
    syms: Vec<Sym>,
    weight: f64,
    /// Source position after the option.
    next_pos: usize,
    /// Target-side words the option emits.
    words: Vec<String>,
    /// A bare insertion; another insertion may not follow it directly.
    pure_ins: bool,
}

#[derive(Debug, Clone)]
pub struct RefState {
    source: Arc<Vec<String>>,
    options: Arc<Vec<Opt>>,
    alive: Vec<usize>,
    progress: usize,
    /// Last target words, `<s>`-padded to the model's context length.
    history: Vec<String>,
    off_track: bool,
    finished: bool,
}

#[derive(Debug, Clone)]
pub struct ReferenceScorer {
    model: Arc<ReferenceModel>,
}

impl ReferenceScorer {
    pub fn new(model: ReferenceModel) -> Self {
        ReferenceScorer { model: Arc::new(model) }
    }

    pub fn from_shared(model: Arc<ReferenceModel>) -> Self {
        ReferenceScorer { model }
    }

    pub fn model(&self) -> &ReferenceModel {
        &self.model
    }

    fn lm(&self) -> &NGramLM {
        &self.model.lm
    }

    fn lex(&self) -> &ConfusionLexicon {
        &self.model.lexicon
    }

    fn options(&self, src: &[String], pos: usize, history: &[String], allow_ins: bool, allow_del: bool) -> Vec<Opt> {
        let lm = self.lm();
        let lex = self.lex();
        let w = |t: &str| Sym::Word(t.to_string());
        let tag = Sym::Tag;
        let follow_at = |i: usize| src.get(i).cloned().unwrap_or_else(|| EOS.to_string());
        // log P(corrected + follow) - log P(original + follow)
        let lm_ratio = |original: &[String], corrected: &[String], follow: &str| {
            let mut a = corrected.to_vec();
            a.push(follow.to_string());
            let mut b = original.to_vec();
            b.push(follow.to_string());
            (lm.log_prob_seq(&a, history) - lm.log_prob_seq(&b, history)).exp()
        };

        let mut edits: Vec<Opt> = Vec::new();
        let mut channel_mass = 0.0;
        for d in 1..=MAX_PHRASE.min(src.len() - pos.min(src.len())) {
            let phrase = &src[pos..pos + d];
            let freq = lex.freq(phrase);
            let follow = follow_at(pos + d);
            let mut del_syms = vec![tag(Tag::DelOpen)];
            del_syms.extend(phrase.iter().map(|t| w(t)));
            del_syms.push(tag(Tag::DelClose));
            if let Some(reps) = lex.replacements.get(phrase) {
                for (rep, &count) in reps {
                    let ch = ConfusionLexicon::channel(count, freq);
                    channel_mass += ch;
                    let mut syms = del_syms.clone();
                    syms.push(tag(Tag::InsOpen));
                    syms.extend(rep.iter().map(|t| w(t)));
                    syms.push(tag(Tag::InsClose));
                    edits.push(Opt {
                        syms,
                        weight: ch * lm_ratio(phrase, rep, &follow),
                        next_pos: pos + d,
                        words: rep.clone(),
                        pure_ins: false,
                    });
                }
            }
            if let Some(&count) = lex.deletions.get(phrase).filter(|_| allow_del) {
                let ch = ConfusionLexicon::channel(count, freq);
                channel_mass += ch;
                let weight = ch * lm_ratio(phrase, &[], &follow);
                // Whatever comes next is folded into the deletion option, so
                // it never completes while a replacement sharing its prefix
                // is still alive. An insertion may not follow directly.
                for f in self.options(src, pos + d, history, false, false) {
                    let mut syms = del_syms.clone();
                    syms.extend(f.syms);
                    edits.push(Opt {
                        syms,
                        weight: weight * f.weight,
                        ..f
                    });
                }
            }
        }
        if allow_ins {
            let ctx = follow_at(pos);
            if let Some(phrases) = lex.insertions.get(&ctx) {
                let freq = lex.freq(std::slice::from_ref(&ctx));
                for (phrase, &count) in phrases {
                    let ch = ConfusionLexicon::channel(count, freq);
                    channel_mass += ch;
                    let mut syms = vec![tag(Tag::InsOpen)];
                    syms.extend(phrase.iter().map(|t| w(t)));
                    syms.push(tag(Tag::InsClose));
                    edits.push(Opt {
                        syms,
                        weight: ch * lm_ratio(&[], phrase, &ctx),
                        next_pos: pos,
                        words: phrase.clone(),
                        pure_ins: true,
                    });
                }
            }
        }

        let copy = match src.get(pos) {
            Some(t) => Opt {
                syms: vec![w(t)],
                weight: 0.0,
                next_pos: pos + 1,
                words: vec![t.clone()],
                pure_ins: false,
            },
            None => Opt {
                syms: vec![Sym::Eos],
                weight: 0.0,
                next_pos: pos,
                words: Vec::new(),
                pure_ins: false,
            },
        };
        let mut opts = Vec::with_capacity(edits.len() + 1);
        opts.push(Opt {
            weight: (1.0 - channel_mass).max(COPY_FLOOR),
            ..copy
        });
        opts.extend(edits.into_iter().filter(|o| o.weight > 0.0 && o.weight.is_finite()));
        let total: f64 = opts.iter().map(|o| o.weight).sum();
        for o in &mut opts {
            o.weight /= total;
        }
        opts
    }

    fn decision_state(&self, source: Arc<Vec<String>>, pos: usize, history: Vec<String>, allow_ins: bool) -> RefState {
        let options = self.options(&source, pos, &history, allow_ins, true);
        let alive = (0..options.len()).collect();
        RefState {
            source,
            options: Arc::new(options),
            alive,
            progress: 0,
            history,
            off_track: false,
            finished: false,
        }
    }

    fn context_len(&self) -> usize {
        self.lm().order().saturating_sub(1)
    }
}

impl Scorer for ReferenceScorer {
    type State = RefState;

    fn start(&self, source: &TokenSeq) -> RefState {
        let history = vec![BOS.to_string(); self.context_len()];
        self.decision_state(Arc::new(source.to_vec()), 0, history, true)
    }

    fn step(&self, state: &RefState, sym: &Sym) -> RefState {
        if state.off_track || state.finished {
            return RefState {
                off_track: true,
                ..state.clone()
            };
        }
        let alive: Vec<usize> = state
            .alive
            .iter()
            .copied()
            .filter(|&i| state.options[i].syms.get(state.progress) == Some(sym))
            .collect();
        if alive.is_empty() {
            return RefState {
                off_track: true,
                ..state.clone()
            };
        }
        let progress = state.progress + 1;
        if let Some(&done) = alive.iter().find(|&&i| state.options[i].syms.len() == progress) {
            let opt = &state.options[done];
            if opt.syms.last() == Some(&Sym::Eos) {
                return RefState {
                    finished: true,
                    ..state.clone()
                };
            }
            let mut history = state.history.clone();
            history.extend(opt.words.iter().cloned());
            let keep = self.context_len();
            let history = history[history.len() - keep..].to_vec();
            return self.decision_state(state.source.clone(), opt.next_pos, history, !opt.pure_ins);
        }
        RefState {
            alive,
            progress,
            ..state.clone()
        }
    }

    fn dist(&self, state: &RefState) -> Distribution {
        if state.off_track || state.finished {
            return Distribution::with_all_tags(vec![(Sym::Eos, 1.0)]).expect("valid");
        }
        let mut entries: Vec<(Sym, f64)> = Vec::new();
        let mut total = 0.0;
        for &i in &state.alive {
            let opt = &state.options[i];
            let sym = &opt.syms[state.progress];
            total += opt.weight;
            match entries.iter_mut().find(|(s, _)| s == sym) {
                Some(e) => e.1 += opt.weight,
                None => entries.push((sym.clone(), opt.weight)),
            }
        }
        for e in &mut entries {
            e.1 /= total;
        }
        for sym in Tag::ALL.iter().map(|t| Sym::Tag(*t)).chain([Sym::Eos]) {
            if !entries.iter().any(|(s, _)| *s == sym) {
                entries.push((sym, 0.0));
            }
        }
        Distribution::new_unchecked(entries)
    }
}
