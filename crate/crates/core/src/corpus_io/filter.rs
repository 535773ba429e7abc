use serde::Serialize;

use super::SentencePair;
use crate::diff_codec::{encode_diffs, to_char_view};
use crate::error::Result;

/// Input, retained and per-rule drop counts. Each dropped pair is counted
/// once, under the first rule it fails, so `input = retained + Σ drops`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub input: usize,
    pub retained: usize,
    /// Rule name and drop count, in rule order; every rule is listed.
    pub drops: Vec<(String, usize)>,
}

impl FilterReport {
    pub fn new(rules: &[&str]) -> Self {
        FilterReport {
            input: 0,
            retained: 0,
            drops: rules.iter().map(|r| (r.to_string(), 0)).collect(),
        }
    }

    pub fn dropped(&self) -> usize {
        self.drops.iter().map(|(_, n)| n).sum()
    }

    pub fn drops_for(&self, rule: &str) -> usize {
        self.drops.iter().find(|(r, _)| r == rule).map_or(0, |(_, n)| *n)
    }

    pub fn balanced(&self) -> bool {
        self.input == self.retained + self.dropped()
    }

    pub(crate) fn record(&mut self, rule: Option<usize>) {
        self.input += 1;
        match rule {
            Some(i) => self.drops[i].1 += 1,
            None => self.retained += 1,
        }
    }

    /// Sums reports of the same rules; appends the other's rules otherwise.
    pub fn merge(&mut self, other: &FilterReport) {
        self.input += other.input;
        self.retained += other.retained;
        for (rule, n) in &other.drops {
            match self.drops.iter_mut().find(|(r, _)| r == rule) {
                Some(e) => e.1 += n,
                None => self.drops.push((rule.clone(), *n)),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Word,
    /// Character view with word delimiters, as fed to character models.
    Char,
}

/// Length caps in tokens of the chosen view. With `tagged`, the target is
/// measured as its diff-tagged encoding against the source. Caps apply to
/// sequences without a domain token; a model that prepends one should use
/// caps one larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthCaps {
    pub src_max: usize,
    pub tgt_max: usize,
    pub view: View,
    pub tagged: bool,
}

impl LengthCaps {
    /// 126 word tokens on both sides, or 421 characters in the character
    /// view; the target is measured tagged.
    pub fn aesw(view: View) -> Self {
        let cap = match view {
            View::Word => 126,
            View::Char => 421,
        };
        LengthCaps {
            src_max: cap,
            tgt_max: cap,
            view,
            tagged: true,
        }
    }

    /// Sources up to 79 tokens, plain targets up to 100.
    pub fn conll() -> Self {
        LengthCaps {
            src_max: 79,
            tgt_max: 100,
            view: View::Word,
            tagged: false,
        }
    }

    /// Caps one larger on both sides, for inputs carrying a domain token.
    pub fn with_domain_token(self) -> Self {
        LengthCaps {
            src_max: self.src_max + 1,
            tgt_max: self.tgt_max + 1,
            ..self
        }
    }
}

pub const SOURCE_TOO_LONG: &str = "source-too-long";
pub const TARGET_TOO_LONG: &str = "target-too-long";

fn measure(tokens: &[String], view: View) -> usize {
    match view {
        View::Word => tokens.len(),
        View::Char => to_char_view(tokens).len(),
    }
}

/// Drops pairs whose source or (possibly tagged) target exceeds its cap.
pub fn length_filter(pairs: Vec<SentencePair>, caps: &LengthCaps) -> Result<(Vec<SentencePair>, FilterReport)> {
    if caps.src_max == 0 || caps.tgt_max == 0 {
        return Err(crate::error::Error::Config("length caps must be at least 1".into()));
    }
    let mut report = FilterReport::new(&[SOURCE_TOO_LONG, TARGET_TOO_LONG]);
    let mut kept = Vec::with_capacity(pairs.len());
    for p in pairs {
        let src_len = measure(&p.source, caps.view);
        let tgt_len = if caps.tagged {
            measure(&encode_diffs(&p.source, &p.target)?, caps.view)
        } else {
            measure(&p.target, caps.view)
        };
        let rule = if src_len > caps.src_max {
            Some(0)
        } else if tgt_len > caps.tgt_max {
            Some(1)
        } else {
            None
        };
        report.record(rule);
        if rule.is_none() {
            kept.push(p);
        }
    }
    Ok((kept, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::TokenSeq;

    fn pair(s: &str, t: &str) -> SentencePair {
        SentencePair::new(TokenSeq::from_line(s), TokenSeq::from_line(t))
    }

    #[test]
    fn presets() {
        assert_eq!(
            (
                LengthCaps::aesw(View::Word).src_max,
                LengthCaps::aesw(View::Char).tgt_max
            ),
            (126, 421)
        );
        let c = LengthCaps::conll();
        assert_eq!((c.src_max, c.tgt_max), (79, 100));
        assert_eq!(c.with_domain_token().src_max, 80);
    }

    #[test]
    fn tagged_target_is_measured() {
        let caps = LengthCaps {
            src_max: 3,
            tgt_max: 3,
            view: View::Word,
            tagged: true,
        };
        let (kept, rep) = length_filter(
            vec![pair("a b", "a b"), pair("a b", "a c"), pair("a b c d", "a")],
            &caps,
        )
        .unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(
            rep.drops,
            vec![(SOURCE_TOO_LONG.into(), 1), (TARGET_TOO_LONG.into(), 1)]
        );
        assert!(rep.balanced());
    }

    #[test]
    fn within_caps_drops_nothing() {
        let (kept, rep) = length_filter(vec![pair("a", "b")], &LengthCaps::conll()).unwrap();
        assert_eq!((kept.len(), rep.dropped()), (1, 0));
    }
}
