//! Diff-tagged sentence correction.
//!
//! Corrections are represented as the source sentence with inline
//! `<del> … </del>` and `<ins> … </ins>` spans. This crate provides the
//! codec for that representation, deterministic repair of malformed model
//! output, beam decoding with additive tag biases, a small statistical
//! reference corrector, M²/GLEU evaluation, corpus filtering and error
//! analysis.

pub mod analysis;
pub mod corpus_io;
pub mod decode;
pub mod diff_codec;
pub mod edit_extract;
pub mod error;
pub mod matcher;
pub mod metrics;
pub mod reference;
pub mod seq;
pub mod synthetic;
pub mod text_norm;

pub use error::{Error, Result};
pub use seq::{DomainLabel, Tag, TaggedSeq, TokenSeq};
