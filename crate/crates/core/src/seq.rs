//! Token sequences and the reserved tag vocabulary.
//!
//! Every pipeline stage works on whitespace-free, non-empty string tokens.
//! Four tag tokens mark deletion and insertion spans inline, and an optional
//! leading `<dom:NAME>` token carries the domain of a sentence.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEL_OPEN: &str = "<del>";
pub const DEL_CLOSE: &str = "</del>";
pub const INS_OPEN: &str = "<ins>";
pub const INS_CLOSE: &str = "</ins>";

const DOMAIN_PREFIX: &str = "<dom:";

/// One of the four diff tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    DelOpen,
    DelClose,
    InsOpen,
    InsClose,
}

impl Tag {
    pub const ALL: [Tag; 4] = [Tag::DelOpen, Tag::DelClose, Tag::InsOpen, Tag::InsClose];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::DelOpen => DEL_OPEN,
            Tag::DelClose => DEL_CLOSE,
            Tag::InsOpen => INS_OPEN,
            Tag::InsClose => INS_CLOSE,
        }
    }

    pub fn parse(token: &str) -> Option<Tag> {
        match token {
            DEL_OPEN => Some(Tag::DelOpen),
            DEL_CLOSE => Some(Tag::DelClose),
            INS_OPEN => Some(Tag::InsOpen),
            INS_CLOSE => Some(Tag::InsClose),
            _ => None,
        }
    }

    /// Position of this tag in a [`crate::decode::BiasVector`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn is_tag(token: &str) -> bool {
    Tag::parse(token).is_some()
}

pub fn is_domain_token(token: &str) -> bool {
    token.len() > DOMAIN_PREFIX.len() + 1 && token.starts_with(DOMAIN_PREFIX) && token.ends_with('>')
}

/// Tag tokens and domain tokens.
pub fn is_reserved(token: &str) -> bool {
    is_tag(token) || is_domain_token(token)
}

fn check_token(token: &str) -> Result<()> {
    if token.is_empty() {
        return Err(Error::InvalidToken {
            token: token.to_string(),
            reason: "empty token",
        });
    }
    if token.chars().any(char::is_whitespace) {
        return Err(Error::InvalidToken {
            token: token.to_string(),
            reason: "token contains whitespace",
        });
    }
    Ok(())
}

/// Shared construction hook for the two sequence newtypes.
pub trait Tokens: Deref<Target = [String]> + Sized {
    #[doc(hidden)]
    fn from_tokens_unchecked(tokens: Vec<String>) -> Self;
}

macro_rules! token_vec_newtype {
    ($name:ident) => {
        impl $name {
            /// Validates that every token is non-empty and whitespace-free.
            pub fn new(tokens: Vec<String>) -> Result<Self> {
                for t in &tokens {
                    check_token(t)?;
                }
                Ok(Self(tokens))
            }

            /// Splits a line on whitespace. Cannot fail.
            pub fn from_line(line: &str) -> Self {
                Self(line.split_whitespace().map(str::to_string).collect())
            }

            pub fn empty() -> Self {
                Self(Vec::new())
            }

            pub fn into_inner(self) -> Vec<String> {
                self.0
            }

            pub fn as_slice(&self) -> &[String] {
                &self.0
            }

            /// Space-joined rendering used by every line-oriented file format.
            pub fn to_line(&self) -> String {
                self.0.join(" ")
            }
        }

        impl Tokens for $name {
            fn from_tokens_unchecked(tokens: Vec<String>) -> Self {
                Self(tokens)
            }
        }

        impl Deref for $name {
            type Target = [String];

            fn deref(&self) -> &[String] {
                &self.0
            }
        }

        impl AsRef<[String]> for $name {
            fn as_ref(&self) -> &[String] {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_line())
            }
        }

        impl<'a> IntoIterator for &'a $name {
            type Item = &'a String;
            type IntoIter = std::slice::Iter<'a, String>;

            fn into_iter(self) -> Self::IntoIter {
                self.0.iter()
            }
        }
    };
}

/// An ordered sequence of word tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenSeq(Vec<String>);

token_vec_newtype!(TokenSeq);

impl TokenSeq {
    /// Like [`TokenSeq::new`] but also rejects tag and domain tokens.
    pub fn plain(tokens: Vec<String>) -> Result<Self> {
        let seq = Self::new(tokens)?;
        seq.ensure_plain()?;
        Ok(seq)
    }

    pub fn ensure_plain(&self) -> Result<()> {
        match self.0.iter().find(|t| is_reserved(t)) {
            Some(t) => Err(Error::ReservedToken { token: t.clone() }),
            None => Ok(()),
        }
    }
}

/// A target sequence carrying inline diff tags and optionally a leading
/// domain token.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedSeq(Vec<String>);

token_vec_newtype!(TaggedSeq);

impl TaggedSeq {
    pub fn domain(&self) -> Option<&str> {
        self.0
            .first()
            .filter(|t| is_domain_token(t))
            .map(|t| &t[DOMAIN_PREFIX.len()..t.len() - 1])
    }
}

impl From<TokenSeq> for TaggedSeq {
    fn from(seq: TokenSeq) -> Self {
        TaggedSeq(seq.0)
    }
}

/// A domain (subject category) name, rendered as `<dom:NAME>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DomainLabel(String);

impl DomainLabel {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '<' || c == '>') {
            return Err(Error::InvalidDomain(name));
        }
        Ok(DomainLabel(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn token(&self) -> String {
        format!("{DOMAIN_PREFIX}{}>", self.0)
    }
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
