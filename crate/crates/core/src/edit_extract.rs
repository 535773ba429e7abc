//! Span-level edits from alignments or from tagged sequences.

use serde::{Deserialize, Serialize};

use crate::diff_codec::{span_tokens, Span};
use crate::error::{Error, Result};
use crate::seq::TokenSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignKind {
    Equal,
    Substitute,
    Delete,
    Insert,
}

/// One aligned block: source span `[src.0, src.1)` against target span
/// `[tgt.0, tgt.1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignOp {
    pub kind: AlignKind,
    pub src: (usize, usize),
    pub tgt: (usize, usize),
}

/// Blocks tiling both sequences in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentOps {
    pub ops: Vec<AlignOp>,
    pub target: Vec<String>,
}

impl AlignmentOps {
    /// Number of substitute, delete and insert tokens.
    pub fn distance(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| op.kind != AlignKind::Equal)
            .map(|op| (op.src.1 - op.src.0).max(op.tgt.1 - op.tgt.0))
            .sum()
    }

    /// One entry per aligned token, each advancing the source and/or target
    /// by at most one position.
    pub fn atomic(&self) -> Vec<AlignOp> {
        let mut out = Vec::new();
        for op in &self.ops {
            let n = (op.src.1 - op.src.0).max(op.tgt.1 - op.tgt.0);
            for k in 0..n {
                let (ds, dt) = match op.kind {
                    AlignKind::Equal | AlignKind::Substitute => (1, 1),
                    AlignKind::Delete => (1, 0),
                    AlignKind::Insert => (0, 1),
                };
                let s0 = op.src.0 + k * ds;
                let t0 = op.tgt.0 + k * dt;
                out.push(AlignOp {
                    kind: op.kind,
                    src: (s0, s0 + ds),
                    tgt: (t0, t0 + dt),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Delete,
    Insert,
    Replace,
}

/// Replace `source[start..end]` by `replacement`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: Vec<String>) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidEdits(format!("span [{start}, {end}) is reversed")));
        }
        if start == end && replacement.is_empty() {
            return Err(Error::InvalidEdits(format!("empty edit at {start}")));
        }
        Ok(Edit {
            start,
            end,
            replacement,
        })
    }

    pub fn kind(&self) -> EditKind {
        if self.start == self.end {
            EditKind::Insert
        } else if self.replacement.is_empty() {
            EditKind::Delete
        } else {
            EditKind::Replace
        }
    }

    /// Two pure insertions at the same point overlap, as does an insertion
    /// strictly inside another edit's span.
    pub fn overlaps(&self, other: &Edit) -> bool {
        let (a, b) = (self.start == self.end, other.start == other.end);
        match (a, b) {
            (true, true) => self.start == other.start,
            (true, false) => other.start < self.start && self.start < other.end,
            (false, true) => self.start < other.start && other.start < self.end,
            (false, false) => self.start.max(other.start) < self.end.min(other.end),
        }
    }

    /// Tokens removed from `source` by this edit.
    pub fn deleted<'a>(&self, source: &'a [String]) -> &'a [String] {
        &source[self.start..self.end]
    }
}

/// Non-overlapping edits sorted by `(start, end)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditSet(Vec<Edit>);

impl EditSet {
    /// Sorts the edits and checks bounds and overlap against a source of
    /// `source_len` tokens.
    pub fn new(mut edits: Vec<Edit>, source_len: usize) -> Result<Self> {
        edits.sort_by_key(|a| (a.start, a.end));
        for e in &edits {
            if e.end > source_len {
                return Err(Error::InvalidEdits(format!(
                    "edit [{}, {}) exceeds source length {source_len}",
                    e.start, e.end
                )));
            }
        }
        for pair in edits.windows(2) {
            if pair[0].overlaps(&pair[1]) {
                return Err(Error::InvalidEdits(format!(
                    "edits [{}, {}) and [{}, {}) overlap",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                )));
            }
        }
        Ok(EditSet(edits))
    }

    pub fn edits(&self) -> &[Edit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edit> {
        self.0.iter()
    }

    /// Applies the edits left to right.
    pub fn apply(&self, source: &[String]) -> TokenSeq {
        let mut out = Vec::with_capacity(source.len());
        let mut cursor = 0;
        for e in &self.0 {
            out.extend_from_slice(&source[cursor..e.start]);
            out.extend(e.replacement.iter().cloned());
            cursor = e.end;
        }
        out.extend_from_slice(&source[cursor..]);
        TokenSeq::new(out).expect("tokens come from valid sequences")
    }
}

impl<'a> IntoIterator for &'a EditSet {
    type Item = &'a Edit;
    type IntoIter = std::slice::Iter<'a, Edit>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Unit-cost Levenshtein alignment. Among optimal alignments the backtrace
/// prefers a match, then substitution, then deletion, then insertion.
pub fn levenshtein_align(s: &[String], t: &[String]) -> AlignmentOps {
    let (n, m) = (s.len(), t.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        d[i * w] = i;
    }
    for (j, cell) in d.iter_mut().take(m + 1).enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[(i - 1) * w + j - 1] + usize::from(s[i - 1] != t[j - 1]);
            let up = d[(i - 1) * w + j] + 1;
            let left = d[i * w + j - 1] + 1;
            d[i * w + j] = diag.min(up).min(left);
        }
    }

    let mut rev = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cur = d[i * w + j];
        let kind = if i > 0 && j > 0 && s[i - 1] == t[j - 1] && d[(i - 1) * w + j - 1] == cur {
            AlignKind::Equal
        } else if i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == cur {
            AlignKind::Substitute
        } else if i > 0 && d[(i - 1) * w + j] + 1 == cur {
            AlignKind::Delete
        } else {
            AlignKind::Insert
        };
        let (ds, dt) = match kind {
            AlignKind::Equal | AlignKind::Substitute => (1, 1),
            AlignKind::Delete => (1, 0),
            AlignKind::Insert => (0, 1),
        };
        rev.push(AlignOp {
            kind,
            src: (i - ds, i),
            tgt: (j - dt, j),
        });
        i -= ds;
        j -= dt;
    }

    let mut ops: Vec<AlignOp> = Vec::new();
    for op in rev.into_iter().rev() {
        match ops.last_mut() {
            Some(last) if last.kind == op.kind => {
                last.src.1 = op.src.1;
                last.tgt.1 = op.tgt.1;
            }
            _ => ops.push(op),
        }
    }
    AlignmentOps {
        ops,
        target: t.to_vec(),
    }
}

/// Groups non-equal blocks into edits. Blocks separated by at most
/// `max_unchanged` equal tokens are merged, the equal tokens becoming part
/// of the replacement; `max_unchanged = 0` merges only adjacent blocks.
pub fn extract_edits(align: &AlignmentOps, max_unchanged: usize) -> EditSet {
    // (src_start, src_end, tgt_start, tgt_end)
    let mut groups: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut gap = usize::MAX;
    for op in &align.ops {
        if op.kind == AlignKind::Equal {
            gap = gap.saturating_add(op.src.1 - op.src.0);
            continue;
        }
        match groups.last_mut() {
            Some(g) if gap <= max_unchanged => {
                g.1 = op.src.1;
                g.3 = op.tgt.1;
            }
            _ => groups.push((op.src.0, op.src.1, op.tgt.0, op.tgt.1)),
        }
        gap = 0;
    }
    let edits = groups
        .into_iter()
        .map(|(s0, s1, t0, t1)| Edit {
            start: s0,
            end: s1,
            replacement: align.target[t0..t1].to_vec(),
        })
        .collect();
    EditSet(edits)
}

/// Reads edits directly off the tag spans. A deletion span immediately
/// followed by an insertion span forms one replacement; empty spans are
/// ignored.
pub fn edits_from_tagged(tagged: &[String]) -> Result<EditSet> {
    let toks = span_tokens(tagged).map_err(|v| Error::MalformedTags {
        position: v.position,
        kind: v.kind,
    })?;
    let mut edits = Vec::new();
    let mut cursor = 0;
    let mut current: Option<Edit> = None;
    let mut prev_span = Span::Outside;
    for t in &toks {
        match t.span {
            Span::Outside => {
                if let Some(e) = current.take() {
                    edits.push(e);
                }
                cursor += 1;
            }
            Span::Del => {
                match &mut current {
                    Some(e) if prev_span == Span::Del && e.replacement.is_empty() => e.end += 1,
                    _ => {
                        if let Some(e) = current.take() {
                            edits.push(e);
                        }
                        current = Some(Edit {
                            start: cursor,
                            end: cursor + 1,
                            replacement: Vec::new(),
                        });
                    }
                }
                cursor += 1;
            }
            Span::Ins => match &mut current {
                Some(e) if prev_span != Span::Outside => e.replacement.push(t.token.to_string()),
                _ => {
                    if let Some(e) = current.take() {
                        edits.push(e);
                    }
                    current = Some(Edit {
                        start: cursor,
                        end: cursor,
                        replacement: vec![t.token.to_string()],
                    });
                }
            },
        }
        prev_span = t.span;
    }
    edits.extend(current);
    let n = cursor;
    EditSet::new(edits, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff_codec::encode_diffs;

    fn s(line: &str) -> Vec<String> {
        TokenSeq::from_line(line).into_inner()
    }

    fn kinds(a: &AlignmentOps) -> Vec<AlignKind> {
        a.ops.iter().map(|o| o.kind).collect()
    }

    #[test]
    fn align_examples() {
        let a = levenshtein_align(&s("a b c"), &s("a b c"));
        assert_eq!(kinds(&a), [AlignKind::Equal]);
        let a = levenshtein_align(&s("a b c"), &s("a x c"));
        assert_eq!(kinds(&a), [AlignKind::Equal, AlignKind::Substitute, AlignKind::Equal]);
        assert_eq!(a.ops[1].src, (1, 2));
        let a = levenshtein_align(&[], &s("x"));
        assert_eq!(kinds(&a), [AlignKind::Insert]);
        assert!(levenshtein_align(&[], &[]).ops.is_empty());
    }

    #[test]
    fn extract_examples() {
        let a = levenshtein_align(&s("a b c"), &s("a b c"));
        assert!(extract_edits(&a, 0).is_empty());

        let a = levenshtein_align(&s("a b c"), &s("a x c"));
        let e = extract_edits(&a, 0);
        assert_eq!(e.edits(), &[Edit::new(1, 2, s("x")).unwrap()]);
        assert_eq!(e.edits()[0].kind(), EditKind::Replace);

        // adjacent delete + insert blocks merge into one replacement
        let a = AlignmentOps {
            ops: vec![
                AlignOp {
                    kind: AlignKind::Equal,
                    src: (0, 1),
                    tgt: (0, 1),
                },
                AlignOp {
                    kind: AlignKind::Delete,
                    src: (1, 2),
                    tgt: (1, 1),
                },
                AlignOp {
                    kind: AlignKind::Insert,
                    src: (2, 2),
                    tgt: (1, 2),
                },
                AlignOp {
                    kind: AlignKind::Equal,
                    src: (2, 3),
                    tgt: (2, 3),
                },
            ],
            target: s("a x c"),
        };
        assert_eq!(extract_edits(&a, 0).edits(), &[Edit::new(1, 2, s("x")).unwrap()]);
    }

    #[test]
    fn extract_merges_across_unchanged() {
        let a = levenshtein_align(&s("a b c d"), &s("x b y d"));
        assert_eq!(extract_edits(&a, 0).len(), 2);
        let merged = extract_edits(&a, 1);
        assert_eq!(merged.edits(), &[Edit::new(0, 3, s("x b y")).unwrap()]);
        assert_eq!(merged.apply(&s("a b c d")).to_line(), "x b y d");
    }

    #[test]
    fn tagged_examples() {
        let tagged = encode_diffs(
            &s("Some key points are worth emphasiz ."),
            &s("Some key points are worth emphasizing ."),
        )
        .unwrap();
        let e = edits_from_tagged(&tagged).unwrap();
        assert_eq!(e.edits(), &[Edit::new(5, 6, s("emphasizing")).unwrap()]);
        assert!(edits_from_tagged(&s("a b")).unwrap().is_empty());
        let e = edits_from_tagged(&s("<ins> x </ins> a")).unwrap();
        assert_eq!(e.edits(), &[Edit::new(0, 0, s("x")).unwrap()]);
        assert!(edits_from_tagged(&s("<ins> x")).is_err());
    }

    #[test]
    fn insertion_then_deletion_stays_two_edits() {
        let e = edits_from_tagged(&s("<ins> x </ins> <del> a </del> b")).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.apply(&s("a b")).to_line(), "x b");
    }

    #[test]
    fn edit_set_rejects_overlap() {
        let a = Edit::new(0, 2, vec![]).unwrap();
        let b = Edit::new(1, 3, s("x")).unwrap();
        assert!(EditSet::new(vec![a.clone(), b], 4).is_err());
        let i1 = Edit::new(1, 1, s("x")).unwrap();
        let i2 = Edit::new(1, 1, s("y")).unwrap();
        assert!(EditSet::new(vec![i1.clone(), i2], 4).is_err());
        assert!(EditSet::new(vec![a.clone(), Edit::new(1, 1, s("x")).unwrap()], 4).is_err());
        assert!(EditSet::new(vec![a, Edit::new(2, 2, s("x")).unwrap()], 4).is_ok());
        assert!(EditSet::new(vec![Edit::new(3, 5, vec![]).unwrap()], 4).is_err());
    }
}
