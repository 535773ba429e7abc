//! Cleanup rules for crowd-sourced learner corpora, applied to the target
//! side in a fixed order.
//!
//! The emoticon patterns and colloquial word list are approximations: the
//! lists used for the original cleanup were never published.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

use super::filter::FilterReport;
use super::SentencePair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lang8Rule {
    /// Same source and target tokens as an earlier pair.
    Duplicate,
    Emoticon,
    Colloquial,
    NonAscii,
    /// First character of the target is not an uppercase letter.
    CapitalStart,
    /// Last target token is not `.`, `?`, `!` or a quotation mark.
    TerminalPunct,
    /// Target closes a parenthesis right before its final punctuation,
    /// as in `… ( editor comment ) .`. Targets ending in a bare `)` already
    /// fail [`Lang8Rule::TerminalPunct`].
    ParenEnd,
}

impl Lang8Rule {
    pub const ALL: [Lang8Rule; 7] = [
        Lang8Rule::Duplicate,
        Lang8Rule::Emoticon,
        Lang8Rule::Colloquial,
        Lang8Rule::NonAscii,
        Lang8Rule::CapitalStart,
        Lang8Rule::TerminalPunct,
        Lang8Rule::ParenEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lang8Rule::Duplicate => "duplicate",
            Lang8Rule::Emoticon => "emoticon",
            Lang8Rule::Colloquial => "colloquial",
            Lang8Rule::NonAscii => "non-ascii",
            Lang8Rule::CapitalStart => "capital-start",
            Lang8Rule::TerminalPunct => "terminal-punct",
            Lang8Rule::ParenEnd => "paren-end",
        }
    }

    pub fn from_name(name: &str) -> Option<Lang8Rule> {
        let norm = name.replace('_', "-");
        Lang8Rule::ALL.into_iter().find(|r| r.name() == norm)
    }
}

pub const DEFAULT_COLLOQUIAL: [&str; 3] = ["haha", "lol", "yay"];
pub const DEFAULT_TERMINALS: [&str; 5] = [".", "?", "!", "\"", "''"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lang8Config {
    pub enabled: Vec<Lang8Rule>,
    /// Matched case-insensitively against whole tokens.
    pub colloquial: Vec<String>,
    pub terminals: Vec<String>,
}

impl Default for Lang8Config {
    fn default() -> Self {
        Lang8Config {
            enabled: Lang8Rule::ALL.to_vec(),
            colloquial: DEFAULT_COLLOQUIAL.iter().map(|s| s.to_string()).collect(),
            terminals: DEFAULT_TERMINALS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Lang8Config {
    /// Every rule off: the identity filter.
    pub fn none() -> Self {
        Lang8Config {
            enabled: Vec::new(),
            ..Default::default()
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys are rule names
    /// (`on`/`off`, `true`/`false`, `1`/`0`), `colloquial` and `terminals`
    /// (whitespace- or comma-separated lists replacing the defaults).
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = Lang8Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse(origin, i + 1, msg);
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let list = || -> Vec<String> {
                value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            match key {
                "colloquial" => cfg.colloquial = list(),
                "terminals" => cfg.terminals = list(),
                _ => {
                    let rule = Lang8Rule::from_name(key).ok_or_else(|| err(format!("unknown key {key:?}")))?;
                    let on = match value {
                        "on" | "true" | "1" => true,
                        "off" | "false" | "0" => false,
                        _ => return Err(err(format!("expected on/off for {key}, got {value:?}"))),
                    };
                    cfg.enabled.retain(|r| *r != rule);
                    if on {
                        cfg.enabled.push(rule);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lang8Config::parse(&text, &path.display().to_string())
    }

    fn is_on(&self, rule: Lang8Rule) -> bool {
        self.enabled.contains(&rule)
    }
}

fn emoticon_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        // Tokenization splits ":)" into ": )", so optional single spaces are
        // allowed between the parts of a face.
        let faces = [
            r"[:;=] ?[-o'^]? ?[)(\]\[DPpOo/\\|*]",
            r"[)(\]\[/\\|] ?[-o'^]? ?[:;=]",
            r"\^ ?[_.\-]* ?\^",
            r"[>Tt;oO\-] ?_+ ?[<Tt;oO\-]",
            r"[xX] ?D",
            r"< ?3",
        ];
        Regex::new(&format!(r"(?:^| )(?:{})(?: |$)", faces.join("|"))).expect("valid emoticon pattern")
    })
}

pub fn has_emoticon(target: &[String]) -> bool {
    emoticon_re().is_match(&target.join(" "))
}

fn fails(rule: Lang8Rule, p: &SentencePair, cfg: &Lang8Config, colloquial: &HashSet<String>) -> bool {
    let t = p.target.as_slice();
    let is_terminal = |tok: &String| cfg.terminals.iter().any(|x| x == tok);
    match rule {
        Lang8Rule::Duplicate => false,
        Lang8Rule::Emoticon => has_emoticon(t),
        Lang8Rule::Colloquial => t.iter().any(|tok| colloquial.contains(&tok.to_lowercase())),
        Lang8Rule::NonAscii => t.iter().any(|tok| !tok.is_ascii()),
        Lang8Rule::CapitalStart => !t
            .first()
            .and_then(|tok| tok.chars().next())
            .is_some_and(char::is_uppercase),
        Lang8Rule::TerminalPunct => !t.last().is_some_and(is_terminal),
        Lang8Rule::ParenEnd => {
            t.last().is_some_and(|x| x == ")")
                || (t.len() >= 2 && t[t.len() - 2] == ")" && is_terminal(&t[t.len() - 1]))
        }
    }
}

/// Applies the enabled rules in [`Lang8Rule::ALL`] order. Kept pairs stay
/// in input order.
pub fn filter_lang8(pairs: Vec<SentencePair>, cfg: &Lang8Config) -> (Vec<SentencePair>, FilterReport) {
    let names: Vec<&str> = Lang8Rule::ALL.iter().map(|r| r.name()).collect();
    let mut report = FilterReport::new(&names);
    let colloquial: HashSet<String> = cfg.colloquial.iter().map(|w| w.to_lowercase()).collect();
    let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();
    let mut kept = Vec::with_capacity(pairs.len());
    for p in pairs {
        let mut hit = None;
        for (i, rule) in Lang8Rule::ALL.into_iter().enumerate() {
            if !cfg.is_on(rule) {
                continue;
            }
            let failed = if rule == Lang8Rule::Duplicate {
                !seen.insert((p.source.to_vec(), p.target.to_vec()))
            } else {
                fails(rule, &p, cfg, &colloquial)
            };
            if failed {
                hit = Some(i);
                break;
            }
        }
        report.record(hit);
        if hit.is_none() {
            kept.push(p);
        }
    }
    (kept, report)
}
