//! A small statistical corrector usable wherever a [`crate::decode::Scorer`]
//! is expected: a confusion lexicon harvested from training diffs combined
//! with an n-gram language model over the corrected side.

mod lexicon;
mod lm;
mod scorer;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use lexicon::{ConfusionLexicon, MAX_PHRASE};
pub use lm::{NGramLM, BOS, DEFAULT_LM_ORDER, EOS, UNIFORM_WEIGHT};
pub use scorer::{RefState, ReferenceScorer, COPY_FLOOR};

pub const MODEL_HEADER: &str = "diffcorrect-refmodel v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub lexicon: ConfusionLexicon,
    pub lm: NGramLM,
}

impl ReferenceModel {
    /// Harvests the lexicon from all pairs and trains the language model on
    /// the targets.
    pub fn train<S: AsRef<[String]>, T: AsRef<[String]>>(pairs: &[(S, T)], order: usize) -> Result<Self> {
        let lexicon = ConfusionLexicon::harvest(pairs)?;
        let targets: Vec<&[String]> = pairs.iter().map(|(_, t)| t.as_ref()).collect();
        let lm = NGramLM::train(&targets, order)?;
        Ok(ReferenceModel { lexicon, lm })
    }

    /// Text dump, one record per line with tab-separated fields and
    /// space-separated phrases, sorted so equal models give equal bytes:
    ///
    /// ```text
    /// diffcorrect-refmodel v1
    /// order   3
    /// R   <count> <source phrase> <replacement>
    /// D   <count> <deleted phrase>
    /// I   <count> <next token>    <inserted phrase>
    /// F   <count> <source phrase>
    /// N   <count> <n-gram>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let j = |p: &[String]| p.join(" ");
        let _ = writeln!(out, "{MODEL_HEADER}");
        let _ = writeln!(out, "order\t{}", self.lm.order());
        let lex = &self.lexicon;
        let reps: BTreeMap<_, _> = lex.replacements.iter().collect();
        for (src, map) in reps {
            for (rep, c) in map {
                let _ = writeln!(out, "R\t{c}\t{}\t{}", j(src), j(rep));
            }
        }
        let dels: BTreeMap<_, _> = lex.deletions.iter().collect();
        for (p, c) in dels {
            let _ = writeln!(out, "D\t{c}\t{}", j(p));
        }
        let ins: BTreeMap<_, _> = lex.insertions.iter().collect();
        for (ctx, map) in ins {
            for (p, c) in map {
                let _ = writeln!(out, "I\t{c}\t{ctx}\t{}", j(p));
            }
        }
        let freq: BTreeMap<_, _> = lex.phrase_freq.iter().collect();
        for (p, c) in freq {
            let _ = writeln!(out, "F\t{c}\t{}", j(p));
        }
        for (g, c) in self.lm.sorted_counts() {
            let _ = writeln!(out, "N\t{c}\t{}", j(g));
        }
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, MODEL_HEADER)) => {}
            Some((_, other)) => {
                return Err(Error::Model(format!(
                    "{origin}: unsupported header {other:?}, expected {MODEL_HEADER:?}"
                )))
            }
            None => return Err(Error::Model(format!("{origin}: empty model file"))),
        }
        let mut order = None;
        let mut lex = ConfusionLexicon::default();
        let mut ngrams: HashMap<Vec<String>, u64> = HashMap::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let err = |msg: &str| Error::parse(origin, lineno, msg);
            let fields: Vec<&str> = line.split('\t').collect();
            let phrase = |f: &str| -> Result<Vec<String>> {
                let p: Vec<String> = f.split(' ').map(str::to_string).collect();
                if p.iter().any(|t| t.is_empty()) {
                    return Err(err("empty token in phrase"));
                }
                Ok(p)
            };
            let count = |f: &str| -> Result<u64> {
                match f.parse::<u64>() {
                    Ok(c) if c > 0 => Ok(c),
                    _ => Err(err("count must be a positive integer")),
                }
            };
            match fields[..] {
                ["order", n] => {
                    let n: usize = n.parse().map_err(|_| err("bad order"))?;
                    if n == 0 {
                        return Err(err("order must be at least 1"));
                    }
                    order = Some(n);
                }
                ["R", c, src, rep] => {
                    let src = phrase(src)?;
                    if src.len() > MAX_PHRASE {
                        return Err(err("source phrase too long"));
                    }
                    lex.replacements.entry(src).or_default().insert(phrase(rep)?, count(c)?);
                }
                ["D", c, p] => {
                    let p = phrase(p)?;
                    if p.len() > MAX_PHRASE {
                        return Err(err("deleted phrase too long"));
                    }
                    lex.deletions.insert(p, count(c)?);
                }
                ["I", c, ctx, p] => {
                    if ctx.is_empty() || ctx.contains(' ') {
                        return Err(err("bad insertion context"));
                    }
                    lex.insertions
                        .entry(ctx.to_string())
                        .or_default()
                        .insert(phrase(p)?, count(c)?);
                }
                ["F", c, p] => {
                    lex.phrase_freq.insert(phrase(p)?, count(c)?);
                }
                ["N", c, g] => {
                    let g = phrase(g)?;
                    match order {
                        Some(n) if g.len() <= n => {}
                        Some(_) => return Err(err("n-gram longer than the model order")),
                        None => return Err(err("`order` must precede n-gram records")),
                    }
                    ngrams.insert(g, count(c)?);
                }
                _ => return Err(err("unrecognized record")),
            }
        }
        let order = order.ok_or_else(|| Error::Model(format!("{origin}: missing order record")))?;
        if ngrams.is_empty() {
            return Err(Error::Model(format!("{origin}: no n-gram counts")));
        }
        Ok(ReferenceModel {
            lexicon: lex,
            lm: NGramLM::from_counts(order, ngrams),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ReferenceModel::from_text(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(line: &str) -> Vec<String> {
        line.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn text_round_trip() {
        let pairs = vec![
            (s("he go to school ."), s("he goes to school .")),
            (s("on table ."), s("on the table .")),
            (s("it is is good ."), s("it is good .")),
        ];
        let m = ReferenceModel::train(&pairs, 3).unwrap();
        let text = m.to_text();
        let back = ReferenceModel::from_text(&text, "m").unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ReferenceModel::from_text("diffcorrect-refmodel v0\n", "m").is_err());
        assert!(ReferenceModel::from_text("diffcorrect-refmodel v1\norder\t3\n", "m").is_err());
        assert!(ReferenceModel::from_text("diffcorrect-refmodel v1\norder\t3\nN\t0\ta\n", "m").is_err());
        assert!(ReferenceModel::from_text("diffcorrect-refmodel v1\nN\t1\ta\n", "m").is_err());
    }
}
