//! Inline diff-tag representation of a correction.
//!
//! A tagged sequence interleaves the unchanged tokens with `<del> … </del>`
//! and `<ins> … </ins>` spans. A replacement is a deletion span immediately
//! followed by an insertion span. Dropping the insertion spans (and the tag
//! tokens) yields the source; dropping the deletion spans yields the target.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcher::{opcodes, OpTag};
use crate::seq::{
    is_domain_token, is_reserved, DomainLabel, Tag, TaggedSeq, TokenSeq, Tokens, DEL_CLOSE, DEL_OPEN, INS_CLOSE,
    INS_OPEN,
};

/// Whitespace delimiter token of the character view.
pub const CHAR_DELIM: &str = "\u{2423}";
/// A literal delimiter character inside a word, in the character view.
const ESCAPED_DELIM: &str = "\\\u{2423}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    UnbalancedTag,
    OutOfSourceToken,
    SourceOrderViolation,
    LeftoverSource,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::UnbalancedTag => "unbalanced-tag",
            ViolationKind::OutOfSourceToken => "out-of-source-token",
            ViolationKind::SourceOrderViolation => "source-order-violation",
            ViolationKind::LeftoverSource => "leftover-source",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub position: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidityReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Span {
    Outside,
    Del,
    Ins,
}

/// One token of a well-formed tagged sequence, classified by the span it
/// sits in. Tag and domain tokens are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SpanToken<'a> {
    pub span: Span,
    pub token: &'a str,
}

/// Checks well-formedness and returns the content tokens with their spans.
pub(crate) fn span_tokens(tagged: &[String]) -> std::result::Result<Vec<SpanToken<'_>>, Violation> {
    let mut state = Span::Outside;
    let mut out = Vec::with_capacity(tagged.len());
    for (position, token) in tagged.iter().enumerate() {
        let bad = Violation {
            position,
            kind: ViolationKind::UnbalancedTag,
        };
        if let Some(tag) = Tag::parse(token) {
            state = match (state, tag) {
                (Span::Outside, Tag::DelOpen) => Span::Del,
                (Span::Outside, Tag::InsOpen) => Span::Ins,
                (Span::Del, Tag::DelClose) | (Span::Ins, Tag::InsClose) => Span::Outside,
                _ => return Err(bad),
            };
        } else if is_domain_token(token) {
            if position != 0 {
                return Err(bad);
            }
        } else {
            out.push(SpanToken { span: state, token });
        }
    }
    if state != Span::Outside {
        return Err(Violation {
            position: tagged.len(),
            kind: ViolationKind::UnbalancedTag,
        });
    }
    Ok(out)
}

fn malformed(v: Violation) -> Error {
    Error::MalformedTags {
        position: v.position,
        kind: v.kind,
    }
}

/// Builds the tagged form of `target` relative to `source`.
pub fn encode_diffs(source: &[String], target: &[String]) -> Result<TaggedSeq> {
    for t in source.iter().chain(target) {
        if is_reserved(t) {
            return Err(Error::ReservedToken { token: t.clone() });
        }
    }
    let mut out = Vec::with_capacity(source.len().max(target.len()) + 4);
    for op in opcodes(source, target) {
        let del = &source[op.a_start..op.a_end];
        let ins = &target[op.b_start..op.b_end];
        match op.tag {
            OpTag::Equal => out.extend_from_slice(del),
            OpTag::Delete => push_span(&mut out, DEL_OPEN, del, DEL_CLOSE),
            OpTag::Insert => push_span(&mut out, INS_OPEN, ins, INS_CLOSE),
            OpTag::Replace => {
                push_span(&mut out, DEL_OPEN, del, DEL_CLOSE);
                push_span(&mut out, INS_OPEN, ins, INS_CLOSE);
            }
        }
    }
    Ok(TaggedSeq::from_tokens_unchecked(out))
}

fn push_span(out: &mut Vec<String>, open: &str, body: &[String], close: &str) {
    out.push(open.to_string());
    out.extend_from_slice(body);
    out.push(close.to_string());
}

/// The corrected sequence: deletion spans and all tags removed.
pub fn strip_to_target(tagged: &[String]) -> Result<TokenSeq> {
    let toks = span_tokens(tagged).map_err(malformed)?;
    Ok(TokenSeq::from_tokens_unchecked(
        toks.into_iter()
            .filter(|t| t.span != Span::Del)
            .map(|t| t.token.to_string())
            .collect(),
    ))
}

/// The original sequence: insertion spans and all tags removed.
pub fn strip_to_source(tagged: &[String]) -> Result<TokenSeq> {
    let toks = span_tokens(tagged).map_err(malformed)?;
    Ok(TokenSeq::from_tokens_unchecked(
        toks.into_iter()
            .filter(|t| t.span != Span::Ins)
            .map(|t| t.token.to_string())
            .collect(),
    ))
}

pub fn validate_tagged(tagged: &[String], source: &[String]) -> ValidityReport {
    let toks = match span_tokens(tagged) {
        Ok(t) => t,
        Err(v) => return ValidityReport::from_violations(vec![v]),
    };
    let mut violations = Vec::new();
    let mut cursor = 0;
    // positions of content tokens in `tagged`
    let positions = tagged
        .iter()
        .enumerate()
        .filter(|(i, t)| !(Tag::parse(t).is_some() || (*i == 0 && is_domain_token(t))))
        .map(|(i, _)| i);
    for (tok, position) in toks.iter().zip(positions) {
        if tok.span == Span::Ins {
            continue;
        }
        if cursor < source.len() && source[cursor] == tok.token {
            cursor += 1;
        } else if source[cursor.min(source.len())..].iter().any(|s| s == tok.token) {
            violations.push(Violation {
                position,
                kind: ViolationKind::SourceOrderViolation,
            });
        } else {
            violations.push(Violation {
                position,
                kind: ViolationKind::OutOfSourceToken,
            });
        }
    }
    if cursor < source.len() {
        violations.push(Violation {
            position: tagged.len(),
            kind: ViolationKind::LeftoverSource,
        });
    }
    ValidityReport::from_violations(violations)
}

/// Greedy left-to-right repair of an arbitrary token stream against its
/// source.
///
/// Outside insertion spans every word is replaced by the next unconsumed
/// source token; words past the end of the source are dropped and any
/// unconsumed source suffix is appended untagged. Insertion contents are kept
/// verbatim. Stray closing tags are dropped, an opening tag inside the other
/// kind of span closes that span first, and spans still open at the end are
/// closed. A domain token survives only in leading position.
pub fn repair(tagged: &[String], source: &[String]) -> TaggedSeq {
    let mut out = Vec::with_capacity(tagged.len() + 2);
    let mut state = Span::Outside;
    let mut cursor = 0;
    for (i, token) in tagged.iter().enumerate() {
        match Tag::parse(token) {
            Some(Tag::DelOpen) => match state {
                Span::Outside => {
                    out.push(DEL_OPEN.to_string());
                    state = Span::Del;
                }
                Span::Ins => {
                    out.push(INS_CLOSE.to_string());
                    out.push(DEL_OPEN.to_string());
                    state = Span::Del;
                }
                Span::Del => {}
            },
            Some(Tag::InsOpen) => match state {
                Span::Outside => {
                    out.push(INS_OPEN.to_string());
                    state = Span::Ins;
                }
                Span::Del => {
                    out.push(DEL_CLOSE.to_string());
                    out.push(INS_OPEN.to_string());
                    state = Span::Ins;
                }
                Span::Ins => {}
            },
            Some(Tag::DelClose) => {
                if state == Span::Del {
                    out.push(DEL_CLOSE.to_string());
                    state = Span::Outside;
                }
            }
            Some(Tag::InsClose) => {
                if state == Span::Ins {
                    out.push(INS_CLOSE.to_string());
                    state = Span::Outside;
                }
            }
            None if is_domain_token(token) => {
                if i == 0 {
                    out.push(token.clone());
                }
            }
            None => {
                if state == Span::Ins {
                    out.push(token.clone());
                } else if cursor < source.len() {
                    out.push(source[cursor].clone());
                    cursor += 1;
                }
            }
        }
    }
    match state {
        Span::Del => out.push(DEL_CLOSE.to_string()),
        Span::Ins => out.push(INS_CLOSE.to_string()),
        Span::Outside => {}
    }
    out.extend_from_slice(&source[cursor..]);
    TaggedSeq::from_tokens_unchecked(out)
}

/// Expands word tokens into characters separated by [`CHAR_DELIM`]; tag and
/// domain tokens stay atomic.
pub fn to_char_view(tagged: &[String]) -> TokenSeq {
    let mut out = Vec::new();
    for (i, token) in tagged.iter().enumerate() {
        if i > 0 {
            out.push(CHAR_DELIM.to_string());
        }
        if is_reserved(token) {
            out.push(token.clone());
        } else {
            for c in token.chars() {
                if c.to_string() == CHAR_DELIM {
                    out.push(ESCAPED_DELIM.to_string());
                } else {
                    out.push(c.to_string());
                }
            }
        }
    }
    TokenSeq::from_tokens_unchecked(out)
}

/// Inverse of [`to_char_view`]. A delimiter-only input collapses to the
/// empty sequence.
pub fn from_char_view(chars: &[String]) -> Result<TaggedSeq> {
    if chars.iter().all(|t| t == CHAR_DELIM) {
        return Ok(TaggedSeq::empty());
    }
    let mut out = Vec::new();
    let mut word = String::new();
    let mut group_len = 0;
    let mut group_reserved = false;
    let flush = |out: &mut Vec<String>, word: &mut String, len: usize, at: usize| {
        if len == 0 {
            return Err(Error::MalformedCharView {
                position: at,
                reason: "empty token between delimiters",
            });
        }
        if !word.is_empty() {
            out.push(std::mem::take(word));
        }
        Ok(())
    };
    for (position, token) in chars.iter().enumerate() {
        if token == CHAR_DELIM {
            flush(&mut out, &mut word, group_len, position)?;
            group_len = 0;
            group_reserved = false;
            continue;
        }
        if group_reserved {
            return Err(Error::MalformedCharView {
                position,
                reason: "tag token must stand alone between delimiters",
            });
        }
        if is_reserved(token) {
            if group_len > 0 {
                return Err(Error::MalformedCharView {
                    position,
                    reason: "tag token must stand alone between delimiters",
                });
            }
            out.push(token.clone());
            group_reserved = true;
        } else if token == ESCAPED_DELIM {
            word.push_str(CHAR_DELIM);
        } else if token.chars().count() == 1 {
            word.push_str(token);
        } else {
            return Err(Error::MalformedCharView {
                position,
                reason: "expected a single character",
            });
        }
        group_len += 1;
    }
    flush(&mut out, &mut word, group_len, chars.len())?;
    Ok(TaggedSeq::from_tokens_unchecked(out))
}

/// Prepends `<dom:NAME>`; fails when a domain token is already present.
pub fn prepend_domain<S: Tokens>(seq: &S, dom: &DomainLabel) -> Result<S> {
    if seq.first().is_some_and(|t| is_domain_token(t)) {
        return Err(Error::DuplicateDomain);
    }
    let mut tokens = Vec::with_capacity(seq.len() + 1);
    tokens.push(dom.token());
    tokens.extend_from_slice(seq);
    Ok(S::from_tokens_unchecked(tokens))
}
