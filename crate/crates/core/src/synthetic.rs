//! A small generated parallel corpus with planted errors.
//!
//! Correct sentences come from a handful of templates over fixed word
//! lists. A fraction of them get one or two errors at non-adjacent sites:
//! known misspellings, swapped articles, `at` for `to`, a dropped article,
//! a doubled `also`, or a random typo. Article and preposition swaps are
//! ambiguous because the correct side uses both forms, so a corrector that
//! applies every edit it knows pays in precision. Random typos almost never
//! repeat, so they cap recall the way unseen errors do on real data.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus_io::SentencePair;
use crate::seq::TokenSeq;

const ADJS: [&str; 8] = [
    "small", "old", "quiet", "bright", "heavy", "strange", "happy", "careful",
];
const NOUNS: [&str; 10] = [
    "student", "teacher", "doctor", "farmer", "writer", "engineer", "child", "neighbor", "driver", "visitor",
];
const VERBS: [&str; 8] = [
    "walked",
    "drove",
    "returned",
    "moved",
    "travelled",
    "hurried",
    "went",
    "came",
];
const TRANS: [&str; 8] = [
    "received",
    "wrote",
    "believed",
    "found",
    "carried",
    "opened",
    "remembered",
    "described",
];
const OBJECTS: [&str; 8] = [
    "letter", "message", "book", "story", "package", "window", "picture", "answer",
];
const STAYS: [&str; 5] = ["stayed", "waited", "arrived", "worked", "slept"];
const PLACES: [&str; 8] = [
    "station", "library", "market", "office", "hospital", "garden", "school", "river",
];

const ALSO_RATE: f64 = 0.5;

/// (correct, misspelled)
const MISSPELLINGS: [(&str, &str); 12] = [
    ("received", "recieved"),
    ("believed", "beleived"),
    ("library", "libary"),
    ("remembered", "rememberd"),
    ("neighbor", "nieghbor"),
    ("engineer", "enginer"),
    ("travelled", "traveled"),
    ("described", "discribed"),
    ("careful", "carefull"),
    ("strange", "strage"),
    ("hospital", "hospitel"),
    ("message", "mesage"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub sentences: usize,
    /// Fraction of sentences that receive errors.
    pub error_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            sentences: 10_000,
            error_rate: 0.3,
            seed: 1234,
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("nonempty list")
}

/// Article for a noun. Nouns differ in how strongly they prefer `the`, so
/// the language model has graded evidence about article errors.
fn article(rng: &mut ChaCha8Rng, noun: &str, lists: &[&str]) -> &'static str {
    let idx = lists.iter().position(|n| *n == noun).unwrap_or(0);
    let p_the = [0.75, 0.25, 0.5][idx % 3];
    if rng.random_bool(p_the) {
        "the"
    } else {
        "a"
    }
}

/// One correct sentence, plus the index of the `the` that may be dropped.
fn correct_sentence(rng: &mut ChaCha8Rng) -> (Vec<&'static str>, Option<usize>) {
    let noun = pick(rng, &NOUNS);
    let mut s = vec![article(rng, noun, &NOUNS)];
    if rng.random_bool(0.5) {
        s.push(pick(rng, &ADJS));
    }
    s.push(noun);
    if rng.random_bool(ALSO_RATE) {
        s.push("also");
    }
    let mut droppable = None;
    let form: f64 = rng.random();
    if form < 0.6 {
        if form < 0.4 {
            s.push(pick(rng, &VERBS));
            // mostly `to`; `at` is possible but rare after a motion verb
            let r: f64 = rng.random();
            s.push(match r {
                r if r < 0.7 => "to",
                r if r < 0.8 => "at",
                r if r < 0.9 => "from",
                _ => "near",
            });
        } else {
            s.push(pick(rng, &STAYS));
            s.push("at");
        }
        droppable = Some(s.len());
        s.push("the");
        s.push(pick(rng, &PLACES));
    } else {
        s.push(pick(rng, &TRANS));
        let obj = pick(rng, &OBJECTS);
        s.push(article(rng, obj, &OBJECTS));
        s.push(obj);
    }
    s.push(".");
    (s, droppable)
}

#[derive(Debug, Clone, Copy)]
enum Site {
    Misspell(usize, &'static str),
    SwapArticle(usize),
    DropThe(usize),
    Doubled(usize),
    /// `to` written as `at` after a motion verb.
    WrongPrep(usize),
    /// A random slip in a content word; almost never seen twice.
    Typo(usize),
}

impl Site {
    /// Relative chance of planting this kind of error.
    fn weight(self) -> f64 {
        match self {
            Site::Misspell(..) => 0.3,
            Site::WrongPrep(_) => 0.4,
            Site::DropThe(_) => 0.6,
            Site::SwapArticle(_) => 0.1,
            Site::Doubled(_) => 0.15,
            Site::Typo(_) => 2.5,
        }
    }

    fn pos(self) -> usize {
        match self {
            Site::Misspell(i, _)
            | Site::SwapArticle(i)
            | Site::DropThe(i)
            | Site::Doubled(i)
            | Site::WrongPrep(i)
            | Site::Typo(i) => i,
        }
    }
}

fn candidate_sites(s: &[&str], droppable: Option<usize>) -> Vec<Site> {
    let mut out = Vec::new();
    for (i, w) in s.iter().enumerate() {
        if let Some((_, bad)) = MISSPELLINGS.iter().find(|(good, _)| good == w) {
            out.push(Site::Misspell(i, bad));
        }
        if *w == "a" || (*w == "the" && Some(i) != droppable) {
            out.push(Site::SwapArticle(i));
        }
        if w.len() > 4 {
            out.push(Site::Typo(i));
        }
        if *w == "to" {
            out.push(Site::WrongPrep(i));
        }
        if *w == "also" {
            out.push(Site::Doubled(i));
        }
    }
    if let Some(i) = droppable {
        out.push(Site::DropThe(i));
    }
    out
}

/// Inserts two random letters inside the word. With thousands of possible
/// results per word, a slip seen in training rarely recurs.
fn typo(rng: &mut ChaCha8Rng, word: &str) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let i = rng.random_range(1..chars.len());
    for _ in 0..2 {
        chars.insert(i, (b'a' + rng.random_range(0..26u8)) as char);
    }
    chars.into_iter().collect()
}

fn corrupt(rng: &mut ChaCha8Rng, s: &[&str], sites: &[Site]) -> Vec<String> {
    let mut sites = sites.to_vec();
    // apply right to left so earlier positions stay valid
    sites.sort_by_key(|x| std::cmp::Reverse(x.pos()));
    let mut out: Vec<String> = s.iter().map(|w| w.to_string()).collect();
    for site in sites {
        match site {
            Site::Misspell(i, bad) => out[i] = bad.to_string(),
            Site::SwapArticle(i) => out[i] = if out[i] == "a" { "the" } else { "a" }.to_string(),
            Site::DropThe(i) => {
                out.remove(i);
            }
            Site::Doubled(i) => out.insert(i, out[i].clone()),
            Site::WrongPrep(i) => out[i] = "at".to_string(),
            Site::Typo(i) => out[i] = typo(rng, &out[i]),
        }
    }
    out
}

/// Generates `(erroneous source, correct target)` pairs.
pub fn generate(cfg: &SyntheticConfig) -> Vec<SentencePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.sentences)
        .map(|_| {
            let (target, droppable) = correct_sentence(&mut rng);
            let mut chosen: Vec<Site> = Vec::new();
            if rng.random_bool(cfg.error_rate) {
                let mut sites = candidate_sites(&target, droppable);
                let want = if rng.random_bool(0.3) { 2 } else { 1 };
                while chosen.len() < want && !sites.is_empty() {
                    let i = sites
                        .choose_weighted(&mut rng, |s| s.weight())
                        .map(|s| sites.iter().position(|x| x.pos() == s.pos()).expect("present"))
                        .expect("positive weights");
                    let site = sites.swap_remove(i);
                    // a site and its neighbors stay clean of other errors
                    if chosen.iter().all(|c| c.pos().abs_diff(site.pos()) > 1) {
                        chosen.push(site);
                    }
                }
            }
            let source = corrupt(&mut rng, &target, &chosen);
            SentencePair::new(
                TokenSeq::from_line(&source.join(" ")),
                TokenSeq::from_line(&target.join(" ")),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_rate() {
        let cfg = SyntheticConfig::default();
        let a = generate(&cfg);
        assert_eq!(a, generate(&cfg));
        let edited = a.iter().filter(|p| p.source != p.target).count() as f64 / a.len() as f64;
        assert!((edited - 0.3).abs() < 0.04, "{edited}");
    }

    #[test]
    fn corruption_positions() {
        let s = ["the", "child", "also", "went", "to", "the", "school", "."];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = corrupt(&mut rng, &s, &[Site::DropThe(5), Site::Doubled(2), Site::WrongPrep(4)]);
        assert_eq!(out, ["the", "child", "also", "also", "went", "at", "school", "."]);
        let out = corrupt(&mut rng, &s, &[Site::SwapArticle(0)]);
        assert_eq!(out[0], "a");
    }
}
