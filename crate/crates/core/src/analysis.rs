//! Error-type breakdowns of system output against gold edits.
//!
//! Matching here is exact: a system edit is a true positive only if a gold
//! edit has the same span and the same replacement. Replacement errors are
//! bucketed by content: single punctuation symbols first, then single
//! articles, then by how often the same (deleted, inserted) pair occurs in
//! training data. False positives are bucketed by the system edit's own
//! content.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::diff_codec::encode_diffs;
use crate::edit_extract::{edits_from_tagged, Edit, EditKind, EditSet};
use crate::error::{Error, Result};
use crate::metrics::{micro_prf, micro_prf_with_buckets, Outcome, Prf};

pub const PUNCTUATION: [&str; 11] = [",", ":", ".", "-", "'", "\"", ";", "!", "?", "``", "''"];
pub const ARTICLES: [&str; 3] = ["a", "an", "the"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Bucket {
    Punctuation,
    Articles,
    Over100,
    From5To100,
    From2To5,
    Once,
    Never,
}

impl Bucket {
    pub const ALL: [Bucket; 7] = [
        Bucket::Punctuation,
        Bucket::Articles,
        Bucket::Over100,
        Bucket::From5To100,
        Bucket::From2To5,
        Bucket::Once,
        Bucket::Never,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Bucket::Punctuation => "Punctuation",
            Bucket::Articles => "Articles",
            Bucket::Over100 => ">100",
            Bucket::From5To100 => "[5,100]",
            Bucket::From2To5 => "[2,5)",
            Bucket::Once => "1",
            Bucket::Never => "0",
        }
    }

    fn from_freq(f: u64) -> Bucket {
        match f {
            0 => Bucket::Never,
            1 => Bucket::Once,
            2..=4 => Bucket::From2To5,
            5..=100 => Bucket::From5To100,
            _ => Bucket::Over100,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Training frequency of each replacement, keyed by (deleted phrase,
/// inserted phrase), both space-joined.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreqTable(HashMap<(String, String), u64>);

impl FreqTable {
    pub fn new() -> Self {
        FreqTable::default()
    }

    pub fn add(&mut self, deleted: &[String], inserted: &[String], count: u64) {
        *self.0.entry((deleted.join(" "), inserted.join(" "))).or_insert(0) += count;
    }

    pub fn get(&self, deleted: &[String], inserted: &[String]) -> u64 {
        self.0
            .get(&(deleted.join(" "), inserted.join(" ")))
            .copied()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Counts replacement edits in the diff encoding of each pair.
    pub fn from_pairs<S: AsRef<[String]>, T: AsRef<[String]>>(pairs: &[(S, T)]) -> Result<Self> {
        let mut table = FreqTable::new();
        for (s, t) in pairs {
            let s = s.as_ref();
            for e in &edits_from_tagged(&encode_diffs(s, t.as_ref())?)? {
                if e.kind() == EditKind::Replace {
                    table.add(e.deleted(s), &e.replacement, 1);
                }
            }
        }
        Ok(table)
    }
}

fn single_in(side: &[String], set: &[&str], fold_case: bool) -> bool {
    match side {
        [tok] if fold_case => set.contains(&tok.to_lowercase().as_str()),
        [tok] => set.contains(&tok.as_str()),
        _ => false,
    }
}

/// Bucket of a replacement edit on `source`.
pub fn bucket_replacement(edit: &Edit, source: &[String], freq: &FreqTable) -> Result<Bucket> {
    if edit.kind() != EditKind::Replace {
        return Err(Error::NotReplacement);
    }
    let deleted = edit.deleted(source);
    let inserted = edit.replacement.as_slice();
    if single_in(deleted, &PUNCTUATION, false) || single_in(inserted, &PUNCTUATION, false) {
        Ok(Bucket::Punctuation)
    } else if single_in(deleted, &ARTICLES, true) || single_in(inserted, &ARTICLES, true) {
        Ok(Bucket::Articles)
    } else {
        Ok(Bucket::from_freq(freq.get(deleted, inserted)))
    }
}

/// Exact multiset matching of one sentence's edits.
fn match_edits<'a>(system: &'a EditSet, gold: &'a EditSet) -> Vec<(&'a Edit, Outcome)> {
    let mut remaining: HashMap<&Edit, usize> = HashMap::new();
    for g in gold {
        *remaining.entry(g).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    for s in system {
        match remaining.get_mut(s) {
            Some(n) if *n > 0 => {
                *n -= 1;
                out.push((s, Outcome::Tp));
            }
            _ => out.push((s, Outcome::Fp)),
        }
    }
    for (g, n) in remaining {
        for _ in 0..n {
            out.push((g, Outcome::Fn));
        }
    }
    out
}

fn check_lengths(sources: usize, system: usize, gold: usize) -> Result<()> {
    if sources != system {
        return Err(Error::LengthMismatch {
            what: "sources vs system edit sets",
            left: sources,
            right: system,
        });
    }
    if sources != gold {
        return Err(Error::LengthMismatch {
            what: "sources vs gold edit sets",
            left: sources,
            right: gold,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketRow {
    pub bucket: Bucket,
    pub label: &'static str,
    /// Gold replacements in the bucket.
    pub raw_frequency: usize,
    /// Distinct (deleted, inserted) pairs among them.
    pub unique_instances: usize,
    pub prf: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketReport {
    pub rows: Vec<BucketRow>,
}

/// Deleted and inserted tokens of one replacement.
type Replacement = (Vec<String>, Vec<String>);

/// Micro F0.5 per replacement bucket. Every bucket gets a row.
pub fn bucket_report<S: AsRef<[String]>>(
    sources: &[S],
    system: &[EditSet],
    gold: &[EditSet],
    freq: &FreqTable,
) -> Result<BucketReport> {
    check_lengths(sources.len(), system.len(), gold.len())?;
    let mut decisions = Vec::new();
    let mut raw: BTreeMap<Bucket, usize> = BTreeMap::new();
    let mut unique: BTreeMap<Bucket, BTreeSet<Replacement>> = BTreeMap::new();
    for ((src, sys), g) in sources.iter().zip(system).zip(gold) {
        let src = src.as_ref();
        for e in g.iter().filter(|e| e.kind() == EditKind::Replace) {
            let b = bucket_replacement(e, src, freq)?;
            *raw.entry(b).or_insert(0) += 1;
            unique
                .entry(b)
                .or_default()
                .insert((e.deleted(src).to_vec(), e.replacement.clone()));
        }
        for (e, outcome) in match_edits(sys, g) {
            if e.kind() == EditKind::Replace {
                decisions.push((bucket_replacement(e, src, freq)?, outcome));
            }
        }
    }
    let prfs = micro_prf_with_buckets(Bucket::ALL, decisions);
    let rows = Bucket::ALL
        .iter()
        .map(|b| BucketRow {
            bucket: *b,
            label: b.label(),
            raw_frequency: raw.get(b).copied().unwrap_or(0),
            unique_instances: unique.get(b).map_or(0, BTreeSet::len),
            prf: prfs[b],
        })
        .collect();
    Ok(BucketReport { rows })
}

/// Micro F0.5 per edit kind, for kinds that occur in either side.
pub fn kind_report(system: &[EditSet], gold: &[EditSet]) -> Result<BTreeMap<EditKind, Prf>> {
    if system.len() != gold.len() {
        return Err(Error::LengthMismatch {
            what: "system vs gold edit sets",
            left: system.len(),
            right: gold.len(),
        });
    }
    let decisions = system.iter().zip(gold).flat_map(|(s, g)| {
        match_edits(s, g)
            .into_iter()
            .map(|(e, o)| (e.kind(), o))
            .collect::<Vec<_>>()
    });
    Ok(micro_prf(decisions))
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

impl BucketReport {
    /// Aligned table, one column per bucket.
    pub fn to_table(&self) -> String {
        let mut head = vec!["".to_string()];
        let mut rows: Vec<Vec<String>> = vec![
            vec!["Raw frequency".into()],
            vec!["Unique instances".into()],
            vec!["Precision".into()],
            vec!["Recall".into()],
            vec!["F0.5".into()],
        ];
        for r in &self.rows {
            head.push(r.label.to_string());
            rows[0].push(r.raw_frequency.to_string());
            rows[1].push(r.unique_instances.to_string());
            rows[2].push(pct(r.prf.precision));
            rows[3].push(pct(r.prf.recall));
            rows[4].push(pct(r.prf.f_beta));
        }
        let mut all = vec![head];
        all.extend(rows);
        render_table(&all)
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(out, "{}", serde_json::to_string(r).expect("serializable"));
        }
        out
    }
}

pub fn kind_table(report: &BTreeMap<EditKind, Prf>) -> String {
    let mut all = vec![vec!["".to_string(), "Precision".into(), "Recall".into(), "F0.5".into()]];
    for (k, p) in report {
        let name = match k {
            EditKind::Delete => "Deletions",
            EditKind::Insert => "Insertions",
            EditKind::Replace => "Replacements",
        };
        all.push(vec![name.into(), pct(p.precision), pct(p.recall), pct(p.f_beta)]);
    }
    render_table(&all)
}

pub fn kind_json_lines(report: &BTreeMap<EditKind, Prf>) -> String {
    #[derive(Serialize)]
    struct Row<'a> {
        kind: EditKind,
        #[serde(flatten)]
        prf: &'a Prf,
    }
    let mut out = String::new();
    for (kind, prf) in report {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&Row { kind: *kind, prf }).expect("serializable")
        );
    }
    out
}

fn render_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
