//! Confusion lexicon harvested from training pairs.

use std::collections::{BTreeMap, HashMap};

use crate::diff_codec::encode_diffs;
use crate::edit_extract::{edits_from_tagged, EditKind};
use crate::error::Result;

use super::lm::EOS;

/// Longest source phrase (and replacement phrase) kept in the lexicon.
pub const MAX_PHRASE: usize = 3;

type Phrase = Vec<String>;

/// Edit counts from training diffs, plus how often each candidate source
/// phrase occurs at all. Insertions are keyed by the source token they
/// precede (`</s>` at the end of a sentence).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfusionLexicon {
    pub replacements: HashMap<Phrase, BTreeMap<Phrase, u64>>,
    pub deletions: HashMap<Phrase, u64>,
    pub insertions: HashMap<String, BTreeMap<Phrase, u64>>,
    /// Occurrences of source n-grams up to [`MAX_PHRASE`] tokens, and of
    /// `</s>` once per sentence.
    pub phrase_freq: HashMap<Phrase, u64>,
}

impl ConfusionLexicon {
    /// Harvests one entry per edit between each source and target. Edits
    /// touching more than [`MAX_PHRASE`] tokens on either side are left out.
    pub fn harvest<S: AsRef<[String]>, T: AsRef<[String]>>(pairs: &[(S, T)]) -> Result<Self> {
        let mut lex = ConfusionLexicon::default();
        for (s, t) in pairs {
            let (s, t) = (s.as_ref(), t.as_ref());
            for n in 1..=MAX_PHRASE {
                for w in s.windows(n) {
                    *lex.phrase_freq.entry(w.to_vec()).or_insert(0) += 1;
                }
            }
            *lex.phrase_freq.entry(vec![EOS.to_string()]).or_insert(0) += 1;
            let edits = edits_from_tagged(&encode_diffs(s, t)?)?;
            for e in &edits {
                let deleted = e.deleted(s);
                if deleted.len() > MAX_PHRASE || e.replacement.len() > MAX_PHRASE {
                    continue;
                }
                match e.kind() {
                    EditKind::Replace => {
                        *lex.replacements
                            .entry(deleted.to_vec())
                            .or_default()
                            .entry(e.replacement.clone())
                            .or_insert(0) += 1;
                    }
                    EditKind::Delete => *lex.deletions.entry(deleted.to_vec()).or_insert(0) += 1,
                    EditKind::Insert => {
                        let ctx = s.get(e.start).map_or(EOS, String::as_str).to_string();
                        *lex.insertions
                            .entry(ctx)
                            .or_default()
                            .entry(e.replacement.clone())
                            .or_insert(0) += 1;
                    }
                }
            }
        }
        Ok(lex)
    }

    pub fn is_empty(&self) -> bool {
        self.replacements.is_empty() && self.deletions.is_empty() && self.insertions.is_empty()
    }

    /// Number of distinct (kind, phrase, replacement) entries.
    pub fn len(&self) -> usize {
        self.replacements.values().map(BTreeMap::len).sum::<usize>()
            + self.deletions.len()
            + self.insertions.values().map(BTreeMap::len).sum::<usize>()
    }

    pub fn freq(&self, phrase: &[String]) -> u64 {
        self.phrase_freq.get(phrase).copied().unwrap_or(0)
    }

    /// Channel probability of an edit seen `count` times on a phrase that
    /// occurs `freq` times: `count / (freq + 1)`.
    pub fn channel(count: u64, freq: u64) -> f64 {
        count as f64 / (freq + 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(line: &str) -> Vec<String> {
        line.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn identical_pairs_give_empty_lexicon() {
        let lex = ConfusionLexicon::harvest(&[(s("a b"), s("a b"))]).unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn counts_replacements() {
        let pair = (
            s("Some key points are worth emphasiz ."),
            s("Some key points are worth emphasizing ."),
        );
        let lex = ConfusionLexicon::harvest(std::slice::from_ref(&pair)).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.replacements[&s("emphasiz")][&s("emphasizing")], 1);
        let lex = ConfusionLexicon::harvest(&[pair.clone(), pair]).unwrap();
        assert_eq!(lex.replacements[&s("emphasiz")][&s("emphasizing")], 2);
        assert_eq!(lex.freq(&s("emphasiz")), 2);
    }

    #[test]
    fn insertion_and_deletion_keys() {
        let lex = ConfusionLexicon::harvest(&[(s("on table"), s("on the table")), (s("a a b"), s("a b"))]).unwrap();
        assert_eq!(lex.insertions["table"][&s("the")], 1);
        assert_eq!(lex.deletions.values().sum::<u64>(), 1);
        assert_eq!(lex.freq(&s("</s>")), 2);
    }
}
