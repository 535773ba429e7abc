//! MaxMatch scoring.
//!
//! The hypothesis is aligned to the source on the grid of all minimum-cost
//! Levenshtein alignments. Any stretch of an optimal alignment path with at
//! least one change and at most `max_unchanged` matched tokens is a
//! candidate system edit. A path from the start to the end of the grid
//! takes matched tokens one at a time and everything else through edits;
//! among all such paths the scorer picks the one with the most gold matches
//! and, after that, the fewest edits. Two insertions may not follow each
//! other directly, since their merge is itself a candidate.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::gold::GoldAnnotation;
use super::{Prf, DEFAULT_BETA};
use crate::edit_extract::{Edit, EditSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct M2Params {
    pub max_unchanged: usize,
    pub beta: f64,
}

impl Default for M2Params {
    fn default() -> Self {
        M2Params {
            max_unchanged: 2,
            beta: DEFAULT_BETA,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct M2Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl M2Counts {
    pub fn add(&mut self, other: &M2Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn prf(&self, beta: f64) -> Prf {
        Prf::from_counts(self.tp, self.fp, self.fn_, beta)
    }
}

/// A node of the alignment grid: `(source position, hypothesis position)`.
pub type Node = (usize, usize);

/// A candidate system edit between two grid nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeEdge {
    pub from: Node,
    pub to: Node,
    pub edit: Edit,
}

impl LatticeEdge {
    pub fn is_insertion(&self) -> bool {
        self.edit.start == self.edit.end
    }
}

/// Grid moves lying on some minimum-cost alignment, with unit costs for
/// substitution, deletion and insertion. Returns, per node, the optimal
/// successor moves as `(next node, is_match)`.
fn optimal_moves(src: &[String], hyp: &[String]) -> Vec<Vec<(Node, bool)>> {
    let (n, m) = (src.len(), hyp.len());
    let w = m + 1;
    let mut fwd = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        for j in 0..=m {
            fwd[i * w + j] = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                let diag = fwd[(i - 1) * w + j - 1] + usize::from(src[i - 1] != hyp[j - 1]);
                diag.min(fwd[(i - 1) * w + j] + 1).min(fwd[i * w + j - 1] + 1)
            };
        }
    }
    let mut bwd = vec![0usize; (n + 1) * w];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            bwd[i * w + j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let diag = bwd[(i + 1) * w + j + 1] + usize::from(src[i] != hyp[j]);
                diag.min(bwd[(i + 1) * w + j] + 1).min(bwd[i * w + j + 1] + 1)
            };
        }
    }
    let total = fwd[n * w + m];
    let on_path = |i: usize, j: usize| fwd[i * w + j] + bwd[i * w + j] == total;
    let mut moves = vec![Vec::new(); (n + 1) * w];
    for i in 0..=n {
        for j in 0..=m {
            if !on_path(i, j) {
                continue;
            }
            let here = fwd[i * w + j];
            let mut push = |ni: usize, nj: usize, cost: usize, is_match: bool| {
                if on_path(ni, nj) && fwd[ni * w + nj] == here + cost {
                    moves[i * w + j].push(((ni, nj), is_match));
                }
            };
            if i < n && j < m {
                let same = src[i] == hyp[j];
                push(i + 1, j + 1, usize::from(!same), same);
            }
            if i < n {
                push(i + 1, j, 1, false);
            }
            if j < m {
                push(i, j + 1, 1, false);
            }
        }
    }
    moves
}

/// All lattice edges for `src` against `hyp`: for every pair of grid nodes
/// joined by an optimal alignment path with at least one change and at most
/// `max_unchanged` matched tokens, the edit rewriting the spanned source
/// tokens into the spanned hypothesis tokens. Edits that change nothing are
/// left out. Edges are ordered by start node, then end node.
pub fn lattice_edges(src: &[String], hyp: &[String], max_unchanged: usize) -> Vec<LatticeEdge> {
    let moves = optimal_moves(src, hyp);
    let w = hyp.len() + 1;
    let mut edges = Vec::new();
    for (idx, out) in moves.iter().enumerate() {
        if out.is_empty() {
            continue;
        }
        let from = (idx / w, idx % w);
        // fewest matches used to reach a node with at least one change
        let mut reach: std::collections::BTreeMap<Node, usize> = std::collections::BTreeMap::new();
        let mut stack: Vec<(Node, usize, bool)> = vec![(from, 0, false)];
        let mut seen: HashSet<(Node, usize, bool)> = HashSet::new();
        while let Some((node, matches, changed)) = stack.pop() {
            if !seen.insert((node, matches, changed)) {
                continue;
            }
            if changed {
                let e = reach.entry(node).or_insert(matches);
                *e = (*e).min(matches);
            }
            for &(next, is_match) in &moves[node.0 * w + node.1] {
                let nm = matches + usize::from(is_match);
                if nm <= max_unchanged {
                    stack.push((next, nm, changed || !is_match));
                }
            }
        }
        for &to in reach.keys() {
            let deleted = &src[from.0..to.0];
            let replacement = &hyp[from.1..to.1];
            if deleted == replacement {
                continue;
            }
            edges.push(LatticeEdge {
                from,
                to,
                edit: Edit {
                    start: from.0,
                    end: to.0,
                    replacement: replacement.to_vec(),
                },
            });
        }
    }
    edges
}

/// Best path through the lattice for one gold edit set: the number of
/// matched gold edits and the indices of the chosen edges.
fn best_path(
    src_len: usize,
    hyp_len: usize,
    edges: &[LatticeEdge],
    matches: &[(Node, Node)],
    gold: &HashSet<&Edit>,
) -> (u64, Vec<usize>) {
    #[derive(Clone, Copy)]
    enum Choice {
        End,
        Skip(Node),
        Edge(usize),
    }
    // (tp, -edits, choice); indexed by node and whether the node was
    // entered through an insertion
    type Cell = Option<(u64, i64, Choice)>;
    let w = hyp_len + 1;
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); (src_len + 1) * w];
    for (idx, e) in edges.iter().enumerate() {
        out_edges[e.from.0 * w + e.from.1].push(idx);
    }
    let mut skips: Vec<Option<Node>> = vec![None; (src_len + 1) * w];
    for &(a, b) in matches {
        skips[a.0 * w + a.1] = Some(b);
    }
    let mut best: Vec<[Cell; 2]> = vec![[None, None]; (src_len + 1) * w];
    best[src_len * w + hyp_len] = [Some((0, 0, Choice::End)); 2];
    // every move increases i + j, so decreasing anti-diagonals are a
    // topological order
    for diag in (0..src_len + hyp_len).rev() {
        for i in diag.saturating_sub(hyp_len)..=diag.min(src_len) {
            let j = diag - i;
            let idx = i * w + j;
            for flag in 0..2 {
                let mut cell: Cell = None;
                let consider = |tp: u64, neg: i64, choice: Choice, cell: &mut Cell| {
                    if cell.is_none_or(|(btp, bneg, _)| (tp, neg) > (btp, bneg)) {
                        *cell = Some((tp, neg, choice));
                    }
                };
                if let Some(next) = skips[idx] {
                    if let Some((tp, neg, _)) = best[next.0 * w + next.1][0] {
                        consider(tp, neg, Choice::Skip(next), &mut cell);
                    }
                }
                for &e_idx in &out_edges[idx] {
                    let e = &edges[e_idx];
                    if flag == 1 && e.is_insertion() {
                        continue;
                    }
                    let next_flag = usize::from(e.is_insertion());
                    if let Some((tp, neg, _)) = best[e.to.0 * w + e.to.1][next_flag] {
                        let hit = u64::from(gold.contains(&e.edit));
                        consider(tp + hit, neg - 1, Choice::Edge(e_idx), &mut cell);
                    }
                }
                best[idx][flag] = cell;
            }
        }
    }
    let (tp, _, _) = best[0][0].expect("a path always exists");
    let mut chosen = Vec::new();
    let (mut node, mut flag) = ((0, 0), 0);
    loop {
        match best[node.0 * w + node.1][flag].expect("reachable").2 {
            Choice::End => break,
            Choice::Skip(next) => {
                node = next;
                flag = 0;
            }
            Choice::Edge(idx) => {
                chosen.push(idx);
                flag = usize::from(edges[idx].is_insertion());
                node = edges[idx].to;
            }
        }
    }
    (tp, chosen)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceM2 {
    pub counts: M2Counts,
    /// Id of the annotator the sentence was scored against.
    pub annotator: u32,
    pub system_edits: EditSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M2Report {
    pub prf: Prf,
    pub sentences: Vec<SentenceM2>,
}

fn match_moves(src: &[String], hyp: &[String]) -> Vec<(Node, Node)> {
    let w = hyp.len() + 1;
    optimal_moves(src, hyp)
        .iter()
        .enumerate()
        .flat_map(|(idx, out)| {
            out.iter()
                .filter(|(_, is_match)| *is_match)
                .map(move |&(next, _)| ((idx / w, idx % w), next))
        })
        .collect()
}

/// Scores one hypothesis against a gold annotation whose source is the
/// hypothesis' source. With several annotators the one giving the highest
/// sentence F-beta wins; ties go to more true positives, then fewer false
/// positives, then fewer false negatives, then the lower id.
pub fn m2_maxmatch(hyp: &[String], gold: &GoldAnnotation, params: M2Params) -> Result<SentenceM2> {
    let src = gold.source.as_slice();
    let edges = lattice_edges(src, hyp, params.max_unchanged);
    let matches = match_moves(src, hyp);
    let mut winner: Option<(Prf, SentenceM2)> = None;
    for ann in gold.annotators()? {
        let set: HashSet<&Edit> = ann.edits.iter().collect();
        let (tp, chosen) = best_path(src.len(), hyp.len(), &edges, &matches, &set);
        let n_sys = chosen.len() as u64;
        let counts = M2Counts {
            tp,
            fp: n_sys - tp,
            fn_: ann.edits.len() as u64 - tp,
        };
        let prf = counts.prf(params.beta);
        let better = match &winner {
            None => true,
            Some((wp, w)) => {
                let key = |p: &Prf, c: &M2Counts| (p.f_beta, c.tp as i64, -(c.fp as i64), -(c.fn_ as i64));
                key(&prf, &counts) > key(wp, &w.counts)
            }
        };
        if better {
            let edits = chosen.iter().map(|&i| edges[i].edit.clone()).collect();
            let system_edits = EditSet::new(edits, src.len()).expect("lattice paths do not overlap");
            winner = Some((
                prf,
                SentenceM2 {
                    counts,
                    annotator: ann.id,
                    system_edits,
                },
            ));
        }
    }
    Ok(winner.expect("at least one annotator").1)
}

/// Like [`m2_maxmatch`], first checking that `source` is the gold source.
pub fn m2_with_source(
    source: &[String],
    hyp: &[String],
    gold: &GoldAnnotation,
    params: M2Params,
    sentence: usize,
) -> Result<SentenceM2> {
    if source != gold.source.as_slice() {
        return Err(Error::SourceMismatch { sentence });
    }
    m2_maxmatch(hyp, gold, params)
}

/// Corpus scoring: raw counts are summed over sentences before computing
/// precision and recall. Sentences are scored in parallel.
pub fn m2_corpus<H: AsRef<[String]> + Sync>(
    hyps: &[H],
    golds: &[GoldAnnotation],
    params: M2Params,
) -> Result<M2Report> {
    if hyps.len() != golds.len() {
        return Err(Error::LengthMismatch {
            what: "hypotheses vs gold sentences",
            left: hyps.len(),
            right: golds.len(),
        });
    }
    let sentences = hyps
        .par_iter()
        .zip(golds.par_iter())
        .map(|(h, g)| m2_maxmatch(h.as_ref(), g, params))
        .collect::<Result<Vec<_>>>()?;
    let mut total = M2Counts::default();
    for s in &sentences {
        total.add(&s.counts);
    }
    Ok(M2Report {
        prf: total.prf(params.beta),
        sentences,
    })
}
