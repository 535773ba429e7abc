//! Rule-based tokenization and detokenization.
//!
//! The rules approximate Penn Treebank conventions closely enough that both
//! sides of a sentence pair land in the same canonical token stream:
//!
//! * split on whitespace;
//! * detach the characters `, . ; : ! ? " ( ) [ ]` from the start and end of
//!   each whitespace chunk, one token per character;
//! * split a contraction once: `don't` becomes `do n't`, `it's` becomes
//!   `it 's`; a leading apostrophe is never split off;
//! * hyphenated words and any other symbol runs stay intact.
//!
//! Reserved tokens (`<del>`, `<dom:x>`, ...) never come out of `tokenize`.
//! A literal occurrence is escaped by prefixing a backslash; tokens that
//! already look like escaped reserved tokens receive one more backslash, so
//! the escape is reversible. `detokenize` removes exactly one backslash.

use crate::error::{Error, Result};
use crate::seq::{is_reserved, TokenSeq};

const DETACHED: &[char] = &[',', '.', ';', ':', '!', '?', '"', '(', ')', '[', ']'];
const ESCAPE: char = '\\';

fn is_detached(c: char) -> bool {
    DETACHED.contains(&c)
}

/// True when the token is a reserved token preceded by zero or more escapes.
fn is_escapable(token: &str) -> bool {
    is_reserved(token.trim_start_matches(ESCAPE))
}

fn escape(token: &str) -> String {
    if is_escapable(token) {
        format!("{ESCAPE}{token}")
    } else {
        token.to_string()
    }
}

fn unescape(token: &str) -> &str {
    if token.starts_with(ESCAPE) && is_escapable(token) {
        &token[ESCAPE.len_utf8()..]
    } else {
        token
    }
}

fn split_contraction(core: &str) -> (&str, Option<&str>) {
    let Some(pos) = core.find('\'') else {
        return (core, None);
    };
    if core.eq_ignore_ascii_case("n't") {
        return (core, None);
    }
    let lower = core.to_lowercase();
    if lower.len() == core.len() && core.len() > 3 && lower.ends_with("n't") && pos == core.len() - 2 {
        let cut = core.len() - 3;
        return (&core[..cut], Some(&core[cut..]));
    }
    if pos > 0 && pos + 1 < core.len() {
        return (&core[..pos], Some(&core[pos..]));
    }
    (core, None)
}

pub fn tokenize(raw: &str) -> TokenSeq {
    let mut out = Vec::new();
    for chunk in raw.split_whitespace() {
        let mut core = chunk;
        let mut leading = Vec::new();
        while let Some(c) = core.chars().next().filter(|&c| is_detached(c)) {
            leading.push(c);
            core = &core[c.len_utf8()..];
        }
        let mut trailing = Vec::new();
        while let Some(c) = core.chars().next_back().filter(|&c| is_detached(c)) {
            trailing.push(c);
            core = &core[..core.len() - c.len_utf8()];
        }
        out.extend(leading.into_iter().map(String::from));
        if !core.is_empty() {
            let (head, tail) = split_contraction(core);
            out.push(escape(head));
            if let Some(tail) = tail {
                out.push(escape(tail));
            }
        }
        out.extend(trailing.into_iter().rev().map(String::from));
    }
    TokenSeq::new(out).expect("whitespace split yields valid tokens")
}

fn attaches_left(token: &str) -> bool {
    matches!(token, "," | "." | ";" | ":" | "!" | "?" | ")" | "]")
        || token.starts_with('\'')
        || token.eq_ignore_ascii_case("n't")
}

fn attaches_right(token: &str) -> bool {
    matches!(token, "(" | "[")
}

/// Renders tokens as text with punctuation reattached. Fails on unescaped
/// reserved tokens: strip tags first.
pub fn detokenize(seq: &[String]) -> Result<String> {
    let mut out = String::new();
    let mut glue_next = true;
    let mut open_quote = false;
    for token in seq {
        if is_reserved(token) {
            return Err(Error::ReservedToken { token: token.clone() });
        }
        let glue = if token == "\"" {
            let g = glue_next || open_quote;
            open_quote = !open_quote;
            g
        } else {
            glue_next || attaches_left(token)
        };
        if !glue {
            out.push(' ');
        }
        out.push_str(unescape(token));
        glue_next = attaches_right(token) || (token == "\"" && open_quote);
    }
    Ok(out)
}
