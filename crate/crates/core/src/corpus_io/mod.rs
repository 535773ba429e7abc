//! Reading, writing, filtering and summarizing parallel correction corpora.

mod filter;
mod lang8;
mod stats;

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seq::{DomainLabel, TaggedSeq, TokenSeq};
use crate::text_norm::{detokenize, tokenize};

pub use crate::metrics::gold::{load_m2_gold, parse_m2, render_m2, write_m2_gold};
pub use filter::{length_filter, FilterReport, LengthCaps, View};
pub use lang8::{filter_lang8, Lang8Config, Lang8Rule};
pub use stats::{corpus_stats, CorpusStats};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SentencePair {
    pub source: TokenSeq,
    pub target: TokenSeq,
    pub domain: Option<DomainLabel>,
    pub paragraph: Option<String>,
}

impl SentencePair {
    pub fn new(source: TokenSeq, target: TokenSeq) -> Self {
        SentencePair {
            source,
            target,
            domain: None,
            paragraph: None,
        }
    }
}

/// How lines of a text file map to tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TextFormat {
    /// Untokenized text, run through [`tokenize`] on load and
    /// [`detokenize`] on write.
    Raw,
    /// Already tokenized, space-separated; reserved tokens are rejected.
    #[default]
    Tokenized,
}

pub fn read_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Writes one line per item, each terminated by `\n`.
pub fn write_lines<I, S>(path: impl AsRef<Path>, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let path = path.as_ref();
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn parse_line(line: &str, format: TextFormat, origin: &Path, lineno: usize) -> Result<TokenSeq> {
    match format {
        TextFormat::Raw => Ok(tokenize(line)),
        TextFormat::Tokenized => {
            let seq = TokenSeq::from_line(line);
            seq.ensure_plain()
                .map_err(|e| Error::parse(origin.display(), lineno, e.to_string()))?;
            Ok(seq)
        }
    }
}

pub fn load_tokens(path: impl AsRef<Path>, format: TextFormat) -> Result<Vec<TokenSeq>> {
    let path = path.as_ref();
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| parse_line(l, format, path, i + 1))
        .collect()
}

pub fn load_tagged(path: impl AsRef<Path>) -> Result<Vec<TaggedSeq>> {
    Ok(read_lines(path)?.iter().map(|l| TaggedSeq::from_line(l)).collect())
}

pub fn render_tokens(seq: &[String], format: TextFormat) -> Result<String> {
    match format {
        TextFormat::Raw => detokenize(seq),
        TextFormat::Tokenized => Ok(seq.join(" ")),
    }
}

/// Loads line-aligned source and target files, plus an optional file of
/// domain labels (one per line).
pub fn load_parallel(
    src_path: impl AsRef<Path>,
    tgt_path: impl AsRef<Path>,
    dom_path: Option<&Path>,
    format: TextFormat,
) -> Result<Vec<SentencePair>> {
    let srcs = load_tokens(src_path, format)?;
    let tgts = load_tokens(tgt_path, format)?;
    if srcs.len() != tgts.len() {
        return Err(Error::LengthMismatch {
            what: "source vs target lines",
            left: srcs.len(),
            right: tgts.len(),
        });
    }
    let doms = match dom_path {
        Some(p) => {
            let lines = read_lines(p)?;
            if lines.len() != srcs.len() {
                return Err(Error::LengthMismatch {
                    what: "source vs domain lines",
                    left: srcs.len(),
                    right: lines.len(),
                });
            }
            let labels = lines
                .iter()
                .enumerate()
                .map(|(i, l)| DomainLabel::new(l.trim()).map_err(|e| Error::parse(p.display(), i + 1, e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            labels.into_iter().map(Some).collect()
        }
        None => vec![None; srcs.len()],
    };
    Ok(srcs
        .into_iter()
        .zip(tgts)
        .zip(doms)
        .map(|((source, target), domain)| SentencePair {
            source,
            target,
            domain,
            paragraph: None,
        })
        .collect())
}

/// Inverse of [`load_parallel`]. The domain file is written only when a
/// path is given; pairs without a label are an error then.
pub fn write_parallel(
    pairs: &[SentencePair],
    src_path: impl AsRef<Path>,
    tgt_path: impl AsRef<Path>,
    dom_path: Option<&Path>,
    format: TextFormat,
) -> Result<()> {
    let srcs = pairs
        .iter()
        .map(|p| render_tokens(&p.source, format))
        .collect::<Result<Vec<_>>>()?;
    let tgts = pairs
        .iter()
        .map(|p| render_tokens(&p.target, format))
        .collect::<Result<Vec<_>>>()?;
    write_lines(src_path, srcs)?;
    write_lines(tgt_path, tgts)?;
    if let Some(dp) = dom_path {
        let doms = pairs
            .iter()
            .map(|p| {
                p.domain
                    .as_ref()
                    .map(|d| d.name().to_string())
                    .ok_or_else(|| Error::Config("pair without domain label".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        write_lines(dp, doms)?;
    }
    Ok(())
}
