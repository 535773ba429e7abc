//! Oracles and fixtures shared by the integration tests and the acceptance
//! runner. Nothing here calls into the code under test except to build
//! inputs.

#![allow(dead_code)]

use std::path::PathBuf;

use diffcorrect::decode::{Distribution, Scorer, Sym};
use diffcorrect::edit_extract::{Edit, EditSet};
use diffcorrect::metrics::gold::{GoldAnnotation, GoldEdit};
use diffcorrect::{Tag, TokenSeq};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn toks(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

// ---------------------------------------------------------------------------
// MaxMatch by brute force

#[derive(Debug, Clone, Copy, PartialEq)]
enum Move {
    Match,
    Sub,
    Del,
    Ins,
}

fn suffix_distances(src: &[String], hyp: &[String]) -> Vec<Vec<usize>> {
    let (n, m) = (src.len(), hyp.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            d[i][j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let diag = d[i + 1][j + 1] + usize::from(src[i] != hyp[j]);
                diag.min(d[i + 1][j] + 1).min(d[i][j + 1] + 1)
            };
        }
    }
    d
}

/// Every minimum-cost alignment as a move list.
fn optimal_paths(src: &[String], hyp: &[String]) -> Vec<Vec<Move>> {
    fn walk(
        i: usize,
        j: usize,
        src: &[String],
        hyp: &[String],
        d: &[Vec<usize>],
        cur: &mut Vec<Move>,
        out: &mut Vec<Vec<Move>>,
    ) {
        if i == src.len() && j == hyp.len() {
            out.push(cur.clone());
            return;
        }
        let here = d[i][j];
        if i < src.len() && j < hyp.len() {
            let same = src[i] == hyp[j];
            if d[i + 1][j + 1] + usize::from(!same) == here {
                cur.push(if same { Move::Match } else { Move::Sub });
                walk(i + 1, j + 1, src, hyp, d, cur, out);
                cur.pop();
            }
        }
        if i < src.len() && d[i + 1][j] + 1 == here {
            cur.push(Move::Del);
            walk(i + 1, j, src, hyp, d, cur, out);
            cur.pop();
        }
        if j < hyp.len() && d[i][j + 1] + 1 == here {
            cur.push(Move::Ins);
            walk(i, j + 1, src, hyp, d, cur, out);
            cur.pop();
        }
    }
    let d = suffix_distances(src, hyp);
    let mut out = Vec::new();
    walk(0, 0, src, hyp, &d, &mut Vec::new(), &mut out);
    out
}

/// Every way to cut a path into single skipped matches and edit blocks.
/// Blocks hold at least one change and at most `max_unchanged` matches,
/// must change the text, and two insertion blocks may not be adjacent.
fn segmentations(src: &[String], hyp: &[String], path: &[Move], max_unchanged: usize) -> Vec<Vec<Edit>> {
    // grid position before each move
    let mut pos = vec![(0usize, 0usize)];
    for mv in path {
        let (i, j) = *pos.last().unwrap();
        pos.push(match mv {
            Move::Match | Move::Sub => (i + 1, j + 1),
            Move::Del => (i + 1, j),
            Move::Ins => (i, j + 1),
        });
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        prev_ins: bool,
        path: &[Move],
        pos: &[(usize, usize)],
        src: &[String],
        hyp: &[String],
        max_unchanged: usize,
        cur: &mut Vec<Edit>,
        out: &mut Vec<Vec<Edit>>,
    ) {
        if k == path.len() {
            out.push(cur.clone());
            return;
        }
        if path[k] == Move::Match {
            rec(k + 1, false, path, pos, src, hyp, max_unchanged, cur, out);
        }
        let mut matches = 0;
        let mut changed = false;
        for l in k..path.len() {
            if path[l] == Move::Match {
                matches += 1;
            } else {
                changed = true;
            }
            if matches > max_unchanged {
                break;
            }
            if !changed {
                continue;
            }
            let (a, b) = (pos[k], pos[l + 1]);
            if src[a.0..b.0] == hyp[a.1..b.1] {
                continue;
            }
            let is_ins = a.0 == b.0;
            if is_ins && prev_ins {
                continue;
            }
            cur.push(Edit {
                start: a.0,
                end: b.0,
                replacement: hyp[a.1..b.1].to_vec(),
            });
            rec(l + 1, is_ins, path, pos, src, hyp, max_unchanged, cur, out);
            cur.pop();
        }
    }
    rec(0, false, path, &pos, src, hyp, max_unchanged, &mut cur, &mut out);
    out
}

/// `a` beats `b` on F0.5, compared exactly as fractions
/// `5·tp / (5·tp + 4·fp + fn)` with the 0/0 conventions.
fn f_half_cmp(a: (u64, u64, u64), b: (u64, u64, u64)) -> std::cmp::Ordering {
    let frac = |(tp, fp, fn_): (u64, u64, u64)| -> (u64, u64) {
        if tp == 0 {
            if fp == 0 && fn_ == 0 {
                (1, 1)
            } else {
                (0, 1)
            }
        } else {
            (5 * tp, 5 * tp + 4 * fp + fn_)
        }
    };
    let (an, ad) = frac(a);
    let (bn, bd) = frac(b);
    (an * bd).cmp(&(bn * ad))
}

/// Sentence (tp, fp, fn) by exhaustive search over alignments and edit
/// tilings, scored against each annotator; the best annotator wins with
/// ties going to more tp, fewer fp, fewer fn, then the earlier annotator.
pub fn m2_oracle(src: &[String], hyp: &[String], annotators: &[Vec<Edit>], max_unchanged: usize) -> (u64, u64, u64) {
    let mut candidates: Vec<Vec<Edit>> = Vec::new();
    for path in optimal_paths(src, hyp) {
        candidates.extend(segmentations(src, hyp, &path, max_unchanged));
    }
    let mut winner: Option<(u64, u64, u64)> = None;
    for gold in annotators {
        let mut best: Option<(u64, usize)> = None;
        for cand in &candidates {
            let tp = cand.iter().filter(|e| gold.contains(e)).count() as u64;
            let key = (tp, cand.len());
            best = match best {
                Some((btp, blen)) if (btp, std::cmp::Reverse(blen)) >= (tp, std::cmp::Reverse(key.1)) => {
                    Some((btp, blen))
                }
                _ => Some(key),
            };
        }
        let (tp, len) = best.expect("at least one candidate");
        let counts = (tp, len as u64 - tp, gold.len() as u64 - tp);
        winner = match winner {
            None => Some(counts),
            Some(w) => {
                let ord = f_half_cmp(counts, w)
                    .then(counts.0.cmp(&w.0))
                    .then(w.1.cmp(&counts.1))
                    .then(w.2.cmp(&counts.2));
                if ord == std::cmp::Ordering::Greater {
                    Some(counts)
                } else {
                    Some(w)
                }
            }
        };
    }
    winner.expect("at least one annotator")
}

const ALPHABET: [&str; 5] = ["a", "b", "c", "d", "e"];

fn random_phrase(rng: &mut impl Rng, min: usize, max: usize) -> Vec<String> {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| ALPHABET.choose(rng).unwrap().to_string()).collect()
}

/// Up to `max_edits` non-overlapping, non-trivial edits on `src`.
pub fn random_edits(rng: &mut impl Rng, src: &[String], max_edits: usize) -> Vec<Edit> {
    let mut edits: Vec<Edit> = Vec::new();
    for _ in 0..rng.random_range(0..=max_edits) {
        let start = rng.random_range(0..=src.len());
        let end = (start + rng.random_range(0..=2)).min(src.len());
        let replacement = random_phrase(rng, usize::from(start == end), 2);
        let e = Edit {
            start,
            end,
            replacement,
        };
        if src[start..end] == e.replacement[..] {
            continue;
        }
        // keep edits apart so that they stay distinct after application
        let clash = edits.iter().any(|o| e.start <= o.end && o.start <= e.end);
        if !clash {
            edits.push(e);
        }
    }
    edits.sort_by_key(|e| (e.start, e.end));
    edits
}

pub fn apply(src: &[String], edits: &[Edit]) -> Vec<String> {
    EditSet::new(edits.to_vec(), src.len()).unwrap().apply(src).into_inner()
}

/// A random sentence with one or two annotators and a hypothesis that
/// mixes gold edits with noise.
pub fn random_m2_case(rng: &mut impl Rng) -> (Vec<String>, Vec<String>, GoldAnnotation, Vec<Vec<Edit>>) {
    let src = random_phrase(rng, 1, 8);
    let n_ann = rng.random_range(1..=2);
    let annotators: Vec<Vec<Edit>> = (0..n_ann).map(|_| random_edits(rng, &src, 3)).collect();
    let hyp = match rng.random_range(0..4) {
        0 => src.clone(),
        1 => apply(&src, &annotators[0]),
        2 => {
            let keep: Vec<Edit> = annotators[0].iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
            apply(&src, &keep)
        }
        _ => apply(&src, &random_edits(rng, &src, 3)),
    };
    let mut lines = Vec::new();
    for (id, edits) in annotators.iter().enumerate() {
        if edits.is_empty() {
            lines.push(GoldEdit::noop(id as u32));
        }
        for e in edits {
            lines.push(GoldEdit::from_edit(e, "X", id as u32));
        }
    }
    let gold = GoldAnnotation {
        source: TokenSeq::new(src.clone()).unwrap(),
        lines,
    };
    (src, hyp, gold, annotators)
}

// ---------------------------------------------------------------------------
// GLEU, enumerated by hand

/// One sentence with its n-gram statistics counted by hand. `nums` are the
/// reference-clipped matches minus the source penalty, `dens` the number of
/// hypothesis n-grams, both per order starting at 1.
pub struct GleuCase {
    pub name: &'static str,
    pub hyp: &'static str,
    pub src: &'static str,
    pub reference: &'static str,
    pub order: usize,
    pub hyp_len: u64,
    pub ref_len: u64,
    pub nums: &'static [u64],
    pub dens: &'static [u64],
}

impl GleuCase {
    pub fn expected(&self) -> f64 {
        gleu_formula(self.hyp_len, self.ref_len, self.nums, self.dens)
    }
}

/// `BP · exp(mean log(num/den))` with `BP = exp(min(0, 1 - r/h))`. Orders
/// with no hypothesis n-grams count as 1; a zero numerator gives 0.
pub fn gleu_formula(hyp_len: u64, ref_len: u64, nums: &[u64], dens: &[u64]) -> f64 {
    if hyp_len == 0 {
        return if ref_len == 0 { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0;
    for (&n, &d) in nums.iter().zip(dens) {
        if d == 0 {
            continue;
        }
        if n == 0 {
            return 0.0;
        }
        sum += (n as f64 / d as f64).ln();
    }
    let bp = (1.0 - ref_len as f64 / hyp_len as f64).min(0.0);
    (bp + sum / nums.len() as f64).exp()
}

pub const GLEU_CASES: [GleuCase; 10] = [
    GleuCase {
        name: "hypothesis equals reference",
        hyp: "a b c d",
        src: "a b c x",
        reference: "a b c d",
        order: 4,
        hyp_len: 4,
        ref_len: 4,
        nums: &[4, 3, 2, 1],
        dens: &[4, 3, 2, 1],
    },
    GleuCase {
        // "on mat", "sat on mat" and "cat sat on mat" are kept from the
        // source but absent from the reference: each costs one match
        name: "source penalty on an uncorrected sentence",
        hyp: "the big cat sat on mat",
        src: "the big cat sat on mat",
        reference: "the big cat sat on the mat",
        order: 4,
        hyp_len: 6,
        ref_len: 7,
        nums: &[6, 3, 2, 1],
        dens: &[6, 5, 4, 3],
    },
    GleuCase {
        name: "wrong fix",
        hyp: "the big cat sat on a mat",
        src: "the big cat sat on mat",
        reference: "the big cat sat on the mat",
        order: 4,
        hyp_len: 7,
        ref_len: 7,
        nums: &[6, 4, 3, 2],
        dens: &[7, 6, 5, 4],
    },
    GleuCase {
        name: "clipping zeroes the bigram order",
        hyp: "the the the",
        src: "the cat",
        reference: "the cat",
        order: 4,
        hyp_len: 3,
        ref_len: 2,
        nums: &[1, 0, 0, 0],
        dens: &[3, 2, 1, 0],
    },
    GleuCase {
        name: "empty hypothesis",
        hyp: "",
        src: "a b",
        reference: "a b",
        order: 4,
        hyp_len: 0,
        ref_len: 2,
        nums: &[0, 0, 0, 0],
        dens: &[0, 0, 0, 0],
    },
    GleuCase {
        name: "short hypothesis with brevity penalty",
        hyp: "a b",
        src: "a b c",
        reference: "a b c",
        order: 4,
        hyp_len: 2,
        ref_len: 3,
        nums: &[2, 1, 0, 0],
        dens: &[2, 1, 0, 0],
    },
    GleuCase {
        name: "longer hypothesis has no brevity penalty",
        hyp: "a b c d e",
        src: "a b c d",
        reference: "a b c d",
        order: 4,
        hyp_len: 5,
        ref_len: 4,
        nums: &[4, 3, 2, 1],
        dens: &[5, 4, 3, 2],
    },
    GleuCase {
        // x occurs twice in the source but once in the hypothesis, so the
        // penalty is clipped to 1 at every order that reaches it
        name: "clipped source penalty",
        hyp: "x a b c d e",
        src: "x x a b c d",
        reference: "a b c d e",
        order: 4,
        hyp_len: 6,
        ref_len: 5,
        nums: &[4, 3, 2, 1],
        dens: &[6, 5, 4, 3],
    },
    GleuCase {
        name: "bigram order with repeated tokens",
        hyp: "a a b",
        src: "a b b",
        reference: "a b b",
        order: 2,
        hyp_len: 3,
        ref_len: 3,
        nums: &[2, 1],
        dens: &[3, 2],
    },
    GleuCase {
        name: "corrected sentence",
        hyp: "the big cat sat on the mat",
        src: "the big cat sat on mat",
        reference: "the big cat sat on the mat",
        order: 4,
        hyp_len: 7,
        ref_len: 7,
        nums: &[7, 6, 5, 4],
        dens: &[7, 6, 5, 4],
    },
];

// ---------------------------------------------------------------------------
// Bias tuning curve on the CoNLL-2013 dev set, in percent:
// (bias, precision, recall, F0.5)

pub const CONLL_DEV_CURVE: [(f64, f64, f64, f64); 11] = [
    (0.0, 72.34, 0.97, 4.60),
    (0.1, 69.74, 1.51, 6.96),
    (0.2, 72.00, 2.57, 11.23),
    (0.3, 69.05, 4.14, 16.68),
    (0.4, 67.19, 6.08, 22.31),
    (0.5, 61.03, 8.76, 27.82),
    (0.6, 51.75, 11.41, 30.31),
    (0.7, 46.66, 15.35, 33.14),
    (0.8, 40.01, 18.68, 32.57),
    (0.9, 34.49, 22.08, 31.00),
    (1.0, 30.17, 24.90, 28.94),
];

/// A scorer for one-token sentences `L<k>` or `F<k>`: the only edit on
/// offer replaces the token by `fix`, and greedy decoding takes it exactly
/// when the tied bias is at least `k / 10` (`k = 11` never fires). `L`
/// sentences have that edit as gold; `F` sentences have no gold edits.
pub struct ThresholdScorer;

pub const STUB_FIX: &str = "fix";

fn level_of(source: &TokenSeq) -> u32 {
    source[0][1..].parse().expect("level token")
}

#[derive(Clone)]
pub struct ThresholdState {
    level: u32,
    emitted: Vec<Sym>,
    source: String,
}

impl Scorer for ThresholdScorer {
    type State = ThresholdState;

    fn start(&self, source: &TokenSeq) -> ThresholdState {
        ThresholdState {
            level: level_of(source),
            emitted: Vec::new(),
            source: source[0].clone(),
        }
    }

    fn step(&self, state: &ThresholdState, sym: &Sym) -> ThresholdState {
        let mut s = state.clone();
        s.emitted.push(sym.clone());
        s
    }

    fn dist(&self, state: &ThresholdState) -> Distribution {
        let w = |t: &str| Sym::Word(t.to_string());
        let edit = [
            Sym::Tag(Tag::DelOpen),
            w(&state.source),
            Sym::Tag(Tag::DelClose),
            Sym::Tag(Tag::InsOpen),
            w(STUB_FIX),
            Sym::Tag(Tag::InsClose),
        ];
        let entries = match state.emitted.as_slice() {
            [] => {
                // biased `<del>` is p + b against 1 - p for the copy, so it
                // wins once b > 1 - 2p = k/10 - 1e-9
                let p = (1.0 - f64::from(state.level) / 10.0 + 1e-9) / 2.0;
                if p <= 0.0 {
                    vec![(w(&state.source), 1.0)]
                } else {
                    vec![(w(&state.source), 1.0 - p), (Sym::Tag(Tag::DelOpen), p)]
                }
            }
            done if done.len() < edit.len() && done == &edit[..done.len()] => vec![(edit[done.len()].clone(), 1.0)],
            _ => vec![(Sym::Eos, 1.0)],
        };
        Distribution::with_all_tags(entries).expect("valid stub distribution")
    }
}

/// Sentences and gold for [`ThresholdScorer`] such that the tuning curve
/// matches [`CONLL_DEV_CURVE`] up to rounding of counts, with `gold_edits` gold
/// edits in total.
pub fn curve_dev(gold_edits: u64) -> Vec<(TokenSeq, GoldAnnotation)> {
    let mut prev_tp = 0u64;
    let mut prev_fp = 0u64;
    let mut dev = Vec::new();
    let push = |kind: char, level: u32, count: u64, dev: &mut Vec<(TokenSeq, GoldAnnotation)>| {
        for _ in 0..count {
            let source = TokenSeq::from_line(&format!("{kind}{level}"));
            let lines = if kind == 'L' {
                vec![GoldEdit::from_edit(
                    &Edit {
                        start: 0,
                        end: 1,
                        replacement: vec![STUB_FIX.to_string()],
                    },
                    "X",
                    0,
                )]
            } else {
                vec![GoldEdit::noop(0)]
            };
            dev.push((source.clone(), GoldAnnotation { source, lines }));
        }
    };
    for (k, &(_, p, r, _)) in CONLL_DEV_CURVE.iter().enumerate() {
        let tp = (r / 100.0 * gold_edits as f64).round() as u64;
        let fp = (tp as f64 * (100.0 / p - 1.0)).round() as u64;
        assert!(tp >= prev_tp && fp >= prev_fp, "curve counts must grow with bias");
        push('L', k as u32, tp - prev_tp, &mut dev);
        push('F', k as u32, fp - prev_fp, &mut dev);
        prev_tp = tp;
        prev_fp = fp;
    }
    push('L', 11, gold_edits - prev_tp, &mut dev);
    dev
}

// ---------------------------------------------------------------------------
// Fuzz inputs for the diff codec

/// A random tagged stream over a small vocabulary: words from the source
/// and elsewhere, stray and unbalanced tags, occasionally a domain token.
pub fn corrupt_tagged(rng: &mut impl Rng, source: &[String]) -> Vec<String> {
    let len = rng.random_range(0..=source.len() * 2 + 4);
    let tags = ["<del>", "</del>", "<ins>", "</ins>"];
    let mut out: Vec<String> = Vec::new();
    if rng.random_bool(0.05) {
        out.push("<dom:x>".to_string());
    }
    for _ in 0..len {
        let tok = match rng.random_range(0..10) {
            0..=3 if !source.is_empty() => source.choose(rng).unwrap().clone(),
            4..=6 => tags.choose(rng).unwrap().to_string(),
            7 => "<dom:y>".to_string(),
            _ => format!("w{}", rng.random_range(0..20)),
        };
        out.push(tok);
    }
    out
}

pub fn random_tokens(rng: &mut impl Rng, vocab: usize, max_len: usize) -> Vec<String> {
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| format!("t{}", rng.random_range(0..vocab))).collect()
}

// ---------------------------------------------------------------------------
// Scorers with arbitrary distributions

/// Every state gets its own pseudo-random distribution over a few source
/// words, outside words, the four tags and end of sequence, derived from
/// the seed and the symbols emitted so far. Some entries are exactly zero.
pub struct FuzzScorer {
    pub seed: u64,
}

#[derive(Clone)]
pub struct FuzzState {
    source: Vec<String>,
    emitted: Vec<Sym>,
}

impl Scorer for FuzzScorer {
    type State = FuzzState;

    fn start(&self, source: &TokenSeq) -> FuzzState {
        FuzzState {
            source: source.to_vec(),
            emitted: Vec::new(),
        }
    }

    fn step(&self, state: &FuzzState, sym: &Sym) -> FuzzState {
        let mut s = state.clone();
        s.emitted.push(sym.clone());
        s
    }

    fn dist(&self, state: &FuzzState) -> Distribution {
        use rand::SeedableRng;
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.seed.hash(&mut h);
        for s in &state.emitted {
            format!("{s:?}").hash(&mut h);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(h.finish());
        let mut syms: Vec<Sym> = Vec::new();
        for t in state.source.iter().take(3) {
            let sym = Sym::Word(t.clone());
            if !syms.contains(&sym) {
                syms.push(sym);
            }
        }
        syms.extend((0..2).map(|i| Sym::Word(format!("o{i}"))));
        syms.extend(Tag::ALL.iter().map(|t| Sym::Tag(*t)));
        syms.push(Sym::Eos);
        let mut weights: Vec<f64> = syms
            .iter()
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        // lean towards ending so hypotheses finish
        let eos = weights.len() - 1;
        weights[eos] += 0.05 * state.emitted.len() as f64;
        let total: f64 = weights.iter().sum();
        let entries = syms.into_iter().zip(weights).map(|(s, w)| (s, w / total)).collect();
        Distribution::with_all_tags(entries).expect("valid fuzz distribution")
    }
}
