//! M²-style gold annotation files.
//!
//! ```text
//! S This are a sentence .
//! A 1 2|||SVA|||is|||REQUIRED|||-NONE-|||0
//! A 2 3|||ArtOrDet||||||REQUIRED|||-NONE-|||1
//!
//! S Nothing wrong here .
//! A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0
//! ```
//!
//! Each block is one `S` line with the tokenized source, followed by zero or
//! more `A` lines, followed by a blank line. The `A` payload is six fields
//! separated by `|||`: `start end`, error type, correction (space-separated
//! tokens, empty for a deletion), requirement flag, comment, annotator id.
//! Reading then writing a file reproduces it byte for byte when it uses
//! single spaces and a blank line after every block.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::edit_extract::{Edit, EditSet};
use crate::error::{Error, Result};
use crate::seq::TokenSeq;

pub const FIELD_SEP: &str = "|||";
const NOOP_TYPE: &str = "noop";
const NONE: &str = "-NONE-";
const REQUIRED: &str = "REQUIRED";

/// One `A` line, kept verbatim apart from the parsed span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldEdit {
    /// `None` for a `-1 -1` no-op line.
    pub span: Option<(usize, usize)>,
    pub error_type: String,
    pub correction: String,
    pub required: String,
    pub comment: String,
    pub annotator: u32,
}

impl GoldEdit {
    pub fn noop(annotator: u32) -> Self {
        GoldEdit {
            span: None,
            error_type: NOOP_TYPE.into(),
            correction: NONE.into(),
            required: REQUIRED.into(),
            comment: NONE.into(),
            annotator,
        }
    }

    pub fn from_edit(edit: &Edit, error_type: &str, annotator: u32) -> Self {
        GoldEdit {
            span: Some((edit.start, edit.end)),
            error_type: error_type.into(),
            correction: edit.replacement.join(" "),
            required: REQUIRED.into(),
            comment: NONE.into(),
            annotator,
        }
    }

    pub fn edit(&self) -> Option<Edit> {
        self.span.map(|(start, end)| Edit {
            start,
            end,
            replacement: self.correction.split_whitespace().map(str::to_string).collect(),
        })
    }

    fn render(&self) -> String {
        let (s, e) = match self.span {
            Some((s, e)) => (s as i64, e as i64),
            None => (-1, -1),
        };
        format!(
            "A {s} {e}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}",
            self.error_type, self.correction, self.required, self.comment, self.annotator
        )
    }
}

/// One annotator's edits for a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotator {
    pub id: u32,
    pub edits: EditSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldAnnotation {
    pub source: TokenSeq,
    pub lines: Vec<GoldEdit>,
}

impl GoldAnnotation {
    /// A single-annotator annotation; an empty edit set is written as a
    /// no-op line.
    pub fn single(source: TokenSeq, edits: &EditSet) -> Self {
        let lines = if edits.is_empty() {
            vec![GoldEdit::noop(0)]
        } else {
            edits.iter().map(|e| GoldEdit::from_edit(e, "-", 0)).collect()
        };
        GoldAnnotation { source, lines }
    }

    /// Edits grouped per annotator, ordered by id. A block without `A`
    /// lines has one annotator (id 0) with no edits.
    pub fn annotators(&self) -> Result<Vec<Annotator>> {
        let mut by_id: BTreeMap<u32, Vec<Edit>> = BTreeMap::new();
        for line in &self.lines {
            let entry = by_id.entry(line.annotator).or_default();
            if let Some(e) = line.edit() {
                entry.push(e);
            }
        }
        if by_id.is_empty() {
            by_id.insert(0, Vec::new());
        }
        by_id
            .into_iter()
            .map(|(id, edits)| {
                Ok(Annotator {
                    id,
                    edits: EditSet::new(edits, self.source.len())?,
                })
            })
            .collect()
    }

    fn render(&self, out: &mut String) {
        out.push('S');
        out.push(' ');
        out.push_str(&self.source.to_line());
        out.push('\n');
        for line in &self.lines {
            out.push_str(&line.render());
            out.push('\n');
        }
        out.push('\n');
    }
}

fn parse_a_line(payload: &str, src_len: usize, path: &str, lineno: usize) -> Result<GoldEdit> {
    let fields: Vec<&str> = payload.split(FIELD_SEP).collect();
    if fields.len() != 6 {
        return Err(Error::parse(
            path,
            lineno,
            format!("expected 6 fields, found {}", fields.len()),
        ));
    }
    let mut bounds = fields[0].split(' ');
    let (Some(s), Some(e), None) = (bounds.next(), bounds.next(), bounds.next()) else {
        return Err(Error::parse(path, lineno, "expected `start end`"));
    };
    let s: i64 = s.parse().map_err(|_| Error::parse(path, lineno, "bad start offset"))?;
    let e: i64 = e.parse().map_err(|_| Error::parse(path, lineno, "bad end offset"))?;
    let span = match (s, e) {
        (-1, -1) => None,
        (s, e) if s >= 0 && e >= s && (e as usize) <= src_len => Some((s as usize, e as usize)),
        _ => return Err(Error::parse(path, lineno, format!("span {s} {e} out of range"))),
    };
    let annotator: u32 = fields[5]
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad annotator id"))?;
    if span.is_some_and(|(s, e)| s == e) && fields[2].split_whitespace().next().is_none() {
        return Err(Error::parse(path, lineno, "empty insertion"));
    }
    Ok(GoldEdit {
        span,
        error_type: fields[1].into(),
        correction: fields[2].into(),
        required: fields[3].into(),
        comment: fields[4].into(),
        annotator,
    })
}

/// Parses M² text. `origin` labels error messages.
pub fn parse_m2(text: &str, origin: &str) -> Result<Vec<GoldAnnotation>> {
    let mut out: Vec<GoldAnnotation> = Vec::new();
    let mut current: Option<(GoldAnnotation, usize)> = None;
    let finish = |cur: Option<(GoldAnnotation, usize)>, out: &mut Vec<GoldAnnotation>| -> Result<()> {
        if let Some((ann, lineno)) = cur {
            ann.annotators()
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            out.push(ann);
        }
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            finish(current.take(), &mut out)?;
        } else if let Some(rest) = line.strip_prefix('S').filter(|r| r.is_empty() || r.starts_with(' ')) {
            finish(current.take(), &mut out)?;
            let source = TokenSeq::from_line(rest);
            source
                .ensure_plain()
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            current = Some((
                GoldAnnotation {
                    source,
                    lines: Vec::new(),
                },
                lineno,
            ));
        } else if let Some(rest) = line.strip_prefix("A ") {
            let Some((ann, _)) = current.as_mut() else {
                return Err(Error::parse(origin, lineno, "`A` line outside a sentence block"));
            };
            let edit = parse_a_line(rest, ann.source.len(), origin, lineno)?;
            ann.lines.push(edit);
            if let Err(e) = ann.annotators() {
                return Err(Error::parse(origin, lineno, e.to_string()));
            }
        } else {
            return Err(Error::parse(origin, lineno, "expected an `S` or `A` line"));
        }
    }
    finish(current.take(), &mut out)?;
    Ok(out)
}

pub fn render_m2(golds: &[GoldAnnotation]) -> String {
    let mut out = String::new();
    for g in golds {
        g.render(&mut out);
    }
    out
}

pub fn load_m2_gold(path: impl AsRef<Path>) -> Result<Vec<GoldAnnotation>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_m2(&text, &path.display().to_string())
}

pub fn write_m2_gold(path: impl AsRef<Path>, golds: &[GoldAnnotation]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_m2(golds)).map_err(|e| Error::io(path, e))
}

impl std::fmt::Display for GoldAnnotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        self.render(&mut s);
        f.write_str(&s)
    }
}
