use std::collections::BTreeMap;

use serde::Serialize;

use super::SentencePair;
use crate::diff_codec::encode_diffs;
use crate::edit_extract::{edits_from_tagged, EditKind};
use crate::error::Result;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub pairs: usize,
    pub edited_pairs: usize,
    pub edit_fraction: f64,
    /// Mean number of tokens inside diff spans (deleted plus inserted),
    /// over pairs with at least one edit.
    pub mean_words_in_change: f64,
    pub unique_deletion_types: usize,
    pub unique_insertion_types: usize,
    pub unique_replacement_types: usize,
    /// Phrase (`a b`, or `a b -> c` for replacements) to frequency.
    #[serde(skip)]
    pub deletion_types: BTreeMap<String, usize>,
    #[serde(skip)]
    pub insertion_types: BTreeMap<String, usize>,
    #[serde(skip)]
    pub replacement_types: BTreeMap<String, usize>,
}

/// Edit statistics over the diff encoding of each pair.
pub fn corpus_stats(pairs: &[SentencePair]) -> Result<CorpusStats> {
    let mut st = CorpusStats {
        pairs: pairs.len(),
        ..Default::default()
    };
    let mut words_total = 0usize;
    for p in pairs {
        let edits = edits_from_tagged(&encode_diffs(&p.source, &p.target)?)?;
        if edits.is_empty() {
            continue;
        }
        st.edited_pairs += 1;
        for e in &edits {
            let deleted = e.deleted(&p.source);
            words_total += deleted.len() + e.replacement.len();
            let (map, key) = match e.kind() {
                EditKind::Delete => (&mut st.deletion_types, deleted.join(" ")),
                EditKind::Insert => (&mut st.insertion_types, e.replacement.join(" ")),
                EditKind::Replace => (
                    &mut st.replacement_types,
                    format!("{} -> {}", deleted.join(" "), e.replacement.join(" ")),
                ),
            };
            *map.entry(key).or_insert(0) += 1;
        }
    }
    if st.pairs > 0 {
        st.edit_fraction = st.edited_pairs as f64 / st.pairs as f64;
    }
    if st.edited_pairs > 0 {
        st.mean_words_in_change = words_total as f64 / st.edited_pairs as f64;
    }
    st.unique_deletion_types = st.deletion_types.len();
    st.unique_insertion_types = st.insertion_types.len();
    st.unique_replacement_types = st.replacement_types.len();
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::TokenSeq;

    fn pair(s: &str, t: &str) -> SentencePair {
        SentencePair::new(TokenSeq::from_line(s), TokenSeq::from_line(t))
    }

    #[test]
    fn identity_corpus() {
        let st = corpus_stats(&[pair("a b", "a b")]).unwrap();
        assert_eq!((st.edit_fraction, st.mean_words_in_change), (0.0, 0.0));
    }

    #[test]
    fn single_replacement_counts_two_words() {
        let st = corpus_stats(&[pair("a b c", "a x c")]).unwrap();
        assert_eq!(st.mean_words_in_change, 2.0);
        assert_eq!(st.unique_replacement_types, 1);
    }

    #[test]
    fn duplicates_raise_frequency_only() {
        let p = pair("a b c", "a c d");
        let st = corpus_stats(&[p.clone(), p]).unwrap();
        assert_eq!((st.unique_deletion_types, st.unique_insertion_types), (1, 1));
        assert_eq!(st.deletion_types["b"], 2);
        assert_eq!(st.edit_fraction, 1.0);
    }
}
