use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diffcorrect::decode::BiasVector;
use diffcorrect::metrics::DEFAULT_SEED;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "diffcorrect", version, about = "Diff-tagged sentence correction toolkit")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Where to write the run manifest (default: next to the first output,
    /// or `diffcorrect-run.manifest.json`).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Seed for stochastic steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tokenize raw text, or detokenize with --detok.
    Tokenize(TokenizeArgs),
    /// Encode source/target pairs as diff-tagged sequences.
    Diff(DiffArgs),
    /// Recover the target (or source) side of tagged sequences.
    Strip(StripArgs),
    /// Make tagged sequences valid against their sources.
    Repair(RepairArgs),
    /// Report tag-grammar and source-consistency violations.
    Validate(ValidateArgs),
    /// Apply length or learner-corpus cleanup filters to a parallel corpus.
    Filter(FilterArgs),
    /// Edit statistics of a parallel corpus.
    Stats(StatsArgs),
    /// Train the reference scorer (confusion lexicon and n-gram model).
    TrainRef(TrainRefArgs),
    /// Decode sources with the reference scorer.
    Decode(DecodeArgs),
    /// Grid-search the bias vector on a development set.
    Tune(TuneArgs),
    /// Corpus GLEU.
    Gleu(GleuArgs),
    /// MaxMatch precision, recall and F-beta against M2 gold.
    M2(M2Args),
    /// Paired bootstrap significance test between two systems.
    Bootstrap(BootstrapArgs),
    /// Per-bucket and per-kind edit analysis.
    Analyze(AnalyzeArgs),
    /// Re-rank a k-best dump under a bias vector.
    Rerank(RerankArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tokenize(_) => "tokenize",
            Command::Diff(_) => "diff",
            Command::Strip(_) => "strip",
            Command::Repair(_) => "repair",
            Command::Validate(_) => "validate",
            Command::Filter(_) => "filter",
            Command::Stats(_) => "stats",
            Command::TrainRef(_) => "train-ref",
            Command::Decode(_) => "decode",
            Command::Tune(_) => "tune",
            Command::Gleu(_) => "gleu",
            Command::M2(_) => "m2",
            Command::Bootstrap(_) => "bootstrap",
            Command::Analyze(_) => "analyze",
            Command::Rerank(_) => "rerank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Untokenized text.
    Raw,
    /// Space-separated tokens.
    Tokenized,
}

impl From<Format> for diffcorrect::corpus_io::TextFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Raw => diffcorrect::corpus_io::TextFormat::Raw,
            Format::Tokenized => diffcorrect::corpus_io::TextFormat::Tokenized,
        }
    }
}

/// `0.3` for all four tags, or `a,b,c,d` in `<del>,</del>,<ins>,</ins>` order.
pub fn parse_bias(s: &str) -> Result<BiasVector, String> {
    let vals = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad bias value {v:?}")))
        .collect::<Result<Vec<f64>, String>>()?;
    let bias = match vals[..] {
        [v] => BiasVector::tied(v),
        [a, b, c, d] => BiasVector::new([a, b, c, d]),
        _ => return Err("bias takes one value or four comma-separated values".into()),
    };
    bias.map_err(|e| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct TokenizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Render tokenized input as text instead.
    #[arg(long)]
    pub detok: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DiffArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// Domain labels, one per line; prepends `<dom:NAME>`.
    #[arg(long)]
    pub dom: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tokenized)]
    pub format: Format,
    /// Write the character view instead of word tokens.
    #[arg(long)]
    pub char_view: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Target,
    Source,
}

#[derive(Debug, Args, Serialize)]
pub struct StripArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Side::Target)]
    pub side: Side,
    /// Input is in the character view.
    #[arg(long)]
    pub char_view: bool,
    /// Output format of the stripped tokens.
    #[arg(long, value_enum, default_value_t = Format::Tokenized)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct RepairArgs {
    /// Tagged sequences, one per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Tokenized sources, line-aligned with the input.
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub src: PathBuf,
    /// One JSON report per line; default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Length caps of 126 tokens (421 characters with --view char), target measured tagged.
    Aesw,
    /// Sources up to 79 tokens, targets up to 100.
    Conll,
    /// Learner-corpus cleanup rules.
    Lang8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewArg {
    Word,
    Char,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    #[arg(long)]
    pub dom: Option<PathBuf>,
    #[arg(long)]
    pub out_src: PathBuf,
    #[arg(long)]
    pub out_tgt: PathBuf,
    /// Requires --dom.
    #[arg(long, requires = "dom")]
    pub out_dom: Option<PathBuf>,
    /// Counts per rule as JSON; default: standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ViewArg::Word)]
    pub view: ViewArg,
    /// `key = value` rule settings for the lang8 preset.
    #[arg(long)]
    pub lang8_config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tokenized)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// JSON summary; default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tokenized)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainRefArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Language model order.
    #[arg(long, default_value_t = diffcorrect::reference::DEFAULT_LM_ORDER)]
    pub order: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DecodeOpts {
    #[arg(long, default_value_t = 10)]
    pub beam: usize,
    /// Output length cap in tokens (default: 3 * source length + 10).
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Mask symbols that break the tag grammar or depart from the source.
    #[arg(long)]
    pub constrained: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DecodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// 1-best per line; default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// One value for all tags or four comma-separated values.
    #[arg(long, value_parser = parse_bias, default_value = "0")]
    pub bias: BiasVector,
    #[command(flatten)]
    pub opts: DecodeOpts,
    /// Number of hypotheses kept per sentence.
    #[arg(long)]
    pub kbest: Option<usize>,
    /// Write the kept hypotheses with their step probabilities here.
    #[arg(long)]
    pub kbest_out: Option<PathBuf>,
    /// Write tagged sequences instead of corrected text.
    #[arg(long)]
    pub tagged: bool,
    #[arg(long, value_enum, default_value_t = Format::Tokenized)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct TuneArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Development set in M2 format.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Sweep each tag in turn instead of one shared value.
    #[arg(long)]
    pub untied: bool,
    #[command(flatten)]
    pub opts: DecodeOpts,
    /// Curve table; default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON lines instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GleuArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Also print per-sentence scores.
    #[arg(long)]
    pub sentences: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct M2Args {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_unchanged: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Also print per-sentence counts and chosen edits.
    #[arg(long)]
    pub verbose: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Gleu,
    M2,
}

#[derive(Debug, Args, Serialize)]
pub struct BootstrapArgs {
    #[arg(long, value_enum)]
    pub metric: Metric,
    #[arg(long)]
    pub hyp_a: PathBuf,
    #[arg(long)]
    pub hyp_b: PathBuf,
    /// M2 gold (for --metric m2).
    #[arg(long, required_if_eq("metric", "m2"))]
    pub gold: Option<PathBuf>,
    /// Sources (for --metric gleu).
    #[arg(long, required_if_eq("metric", "gleu"))]
    pub src: Option<PathBuf>,
    /// References (for --metric gleu).
    #[arg(long = "ref", required_if_eq("metric", "gleu"))]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Training pairs for replacement frequencies; without them every
    /// replacement outside the closed classes counts as never seen.
    #[arg(long, requires = "train_tgt")]
    pub train_src: Option<PathBuf>,
    #[arg(long, requires = "train_src")]
    pub train_tgt: Option<PathBuf>,
    /// Unchanged tokens allowed inside one edit.
    #[arg(long, default_value_t = 0)]
    pub max_unchanged: usize,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RerankArgs {
    /// K-best dump as written by `decode --kbest-out`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_bias)]
    pub bias: BiasVector,
    /// Re-ordered dump; default: standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Top hypothesis per source as `id<TAB>tokens`.
    #[arg(long)]
    pub best: Option<PathBuf>,
}
