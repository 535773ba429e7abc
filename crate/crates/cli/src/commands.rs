use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use diffcorrect::analysis::{bucket_report, kind_json_lines, kind_report, kind_table, FreqTable};
use diffcorrect::corpus_io::{
    corpus_stats, filter_lang8, length_filter, load_m2_gold, load_parallel, load_tagged, load_tokens, read_lines,
    render_tokens, Lang8Config, LengthCaps, SentencePair, TextFormat, View,
};
use diffcorrect::decode::kbest::{parse_kbest, render_kbest, rerank, KbestEntry};
use diffcorrect::decode::{beam_decode, grid_search_tune, DecodeConfig, Hypothesis, TuneConfig};
use diffcorrect::diff_codec::{
    encode_diffs, from_char_view, prepend_domain, repair, strip_to_source, strip_to_target, to_char_view,
    validate_tagged,
};
use diffcorrect::edit_extract::{extract_edits, levenshtein_align, EditSet};
use diffcorrect::metrics::{gleu_with_order, m2_corpus, paired_bootstrap, BootstrapConfig, M2Params};
use diffcorrect::reference::{ReferenceModel, ReferenceScorer};
use diffcorrect::text_norm::{detokenize, tokenize};
use diffcorrect::{TaggedSeq, TokenSeq};

use crate::args::*;
use crate::output::Outputs;

/// What a subcommand read, what it staged for writing, and its headline
/// results.
pub struct Run {
    pub inputs: Vec<PathBuf>,
    pub outputs: Outputs,
    pub summary: Value,
}

impl Run {
    fn new(inputs: &[&Path]) -> Self {
        Run {
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            outputs: Outputs::default(),
            summary: Value::Null,
        }
    }
}

fn lines_text<I: IntoIterator<Item = String>>(lines: I) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn same_len(what: &str, a: usize, b: usize) -> Result<()> {
    ensure!(a == b, "{what}: {a} vs {b} lines");
    Ok(())
}

pub fn run(cmd: &Command, seed: u64) -> Result<Run> {
    match cmd {
        Command::Tokenize(a) => tokenize_cmd(a),
        Command::Diff(a) => diff_cmd(a),
        Command::Strip(a) => strip_cmd(a),
        Command::Repair(a) => repair_cmd(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Filter(a) => filter_cmd(a),
        Command::Stats(a) => stats_cmd(a),
        Command::TrainRef(a) => train_ref_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Tune(a) => tune_cmd(a),
        Command::Gleu(a) => gleu_cmd(a),
        Command::M2(a) => m2_cmd(a),
        Command::Bootstrap(a) => bootstrap_cmd(a, seed),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Rerank(a) => rerank_cmd(a),
    }
}

fn tokenize_cmd(a: &TokenizeArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.input]);
    let lines = read_lines(&a.input)?;
    let out = if a.detok {
        lines
            .iter()
            .map(|l| detokenize(&TokenSeq::from_line(l)))
            .collect::<diffcorrect::Result<Vec<_>>>()?
    } else {
        lines.iter().map(|l| tokenize(l).to_line()).collect()
    };
    run.summary = json!({ "lines": out.len() });
    run.outputs.put(a.output.as_deref(), lines_text(out))?;
    Ok(run)
}

fn diff_cmd(a: &DiffArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.src, &a.tgt]);
    if let Some(d) = &a.dom {
        run.inputs.push(d.clone());
    }
    let pairs = load_parallel(&a.src, &a.tgt, a.dom.as_deref(), a.format.into())?;
    let mut edited = 0;
    let mut out = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let mut tagged = encode_diffs(&p.source, &p.target)?;
        edited += usize::from(tagged.as_slice() != p.source.as_slice());
        if let Some(dom) = &p.domain {
            tagged = prepend_domain(&tagged, dom)?;
        }
        out.push(if a.char_view {
            to_char_view(&tagged).to_line()
        } else {
            tagged.to_line()
        });
    }
    run.summary = json!({ "pairs": pairs.len(), "edited": edited });
    run.outputs.put(a.output.as_deref(), lines_text(out))?;
    Ok(run)
}

fn strip_cmd(a: &StripArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.input]);
    let mut out = Vec::new();
    for (i, line) in read_lines(&a.input)?.iter().enumerate() {
        let ctx = || format!("{}:{}", a.input.display(), i + 1);
        let tagged = if a.char_view {
            from_char_view(&TokenSeq::from_line(line)).with_context(ctx)?
        } else {
            TaggedSeq::from_line(line)
        };
        let side = match a.side {
            Side::Target => strip_to_target(&tagged),
            Side::Source => strip_to_source(&tagged),
        }
        .with_context(ctx)?;
        out.push(render_tokens(&side, a.format.into())?);
    }
    run.summary = json!({ "lines": out.len() });
    run.outputs.put(a.output.as_deref(), lines_text(out))?;
    Ok(run)
}

fn load_tagged_with_sources(input: &Path, src: &Path) -> Result<(Vec<TaggedSeq>, Vec<TokenSeq>)> {
    let tagged = load_tagged(input)?;
    let sources = load_tokens(src, TextFormat::Tokenized)?;
    same_len("tagged vs source", tagged.len(), sources.len())?;
    Ok((tagged, sources))
}

fn repair_cmd(a: &RepairArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.input, &a.src]);
    let (tagged, sources) = load_tagged_with_sources(&a.input, &a.src)?;
    let fixed: Vec<TaggedSeq> = tagged.iter().zip(&sources).map(|(t, s)| repair(t, s)).collect();
    let changed = fixed.iter().zip(&tagged).filter(|(f, t)| f != t).count();
    run.summary = json!({ "lines": fixed.len(), "changed": changed });
    run.outputs
        .put(a.output.as_deref(), lines_text(fixed.iter().map(TaggedSeq::to_line)))?;
    Ok(run)
}

fn validate_cmd(a: &ValidateArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.input, &a.src]);
    let (tagged, sources) = load_tagged_with_sources(&a.input, &a.src)?;
    let mut invalid = 0;
    let mut out = Vec::with_capacity(tagged.len());
    for (i, (t, s)) in tagged.iter().zip(&sources).enumerate() {
        let report = validate_tagged(t, s);
        invalid += usize::from(!report.valid);
        out.push(json!({ "line": i + 1, "valid": report.valid, "violations": report.violations }).to_string());
    }
    run.summary = json!({ "lines": tagged.len(), "invalid": invalid });
    run.outputs.put(a.output.as_deref(), lines_text(out))?;
    Ok(run)
}

fn filter_cmd(a: &FilterArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.src, &a.tgt]);
    if let Some(d) = &a.dom {
        run.inputs.push(d.clone());
    }
    let format: TextFormat = a.format.into();
    let pairs = load_parallel(&a.src, &a.tgt, a.dom.as_deref(), format)?;
    let view = match a.view {
        ViewArg::Word => View::Word,
        ViewArg::Char => View::Char,
    };
    let (kept, report) = match a.preset {
        Preset::Aesw => length_filter(pairs, &LengthCaps::aesw(view))?,
        Preset::Conll => length_filter(pairs, &LengthCaps::conll())?,
        Preset::Lang8 => {
            let cfg = match &a.lang8_config {
                Some(p) => {
                    run.inputs.push(p.clone());
                    Lang8Config::load(p)?
                }
                None => Lang8Config::default(),
            };
            filter_lang8(pairs, &cfg)
        }
    };
    let render = |f: fn(&SentencePair) -> &TokenSeq| -> Result<String> {
        let lines = kept
            .iter()
            .map(|p| render_tokens(f(p), format))
            .collect::<diffcorrect::Result<Vec<_>>>()?;
        Ok(lines_text(lines))
    };
    run.outputs.put(Some(&a.out_src), render(|p| &p.source)?)?;
    run.outputs.put(Some(&a.out_tgt), render(|p| &p.target)?)?;
    if let Some(out_dom) = &a.out_dom {
        let doms = kept
            .iter()
            .map(|p| {
                p.domain
                    .as_ref()
                    .map(|d| d.name().to_string())
                    .context("pair without domain label")
            })
            .collect::<Result<Vec<_>>>()?;
        run.outputs.put(Some(out_dom), lines_text(doms))?;
    }
    let report_json = serde_json::to_value(&report)?;
    run.outputs
        .put(a.report.as_deref(), serde_json::to_string_pretty(&report_json)? + "\n")?;
    run.summary = report_json;
    Ok(run)
}

fn stats_cmd(a: &StatsArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.src, &a.tgt]);
    let pairs = load_parallel(&a.src, &a.tgt, None, a.format.into())?;
    let stats = serde_json::to_value(corpus_stats(&pairs)?)?;
    run.outputs
        .put(a.output.as_deref(), serde_json::to_string_pretty(&stats)? + "\n")?;
    run.summary = stats;
    Ok(run)
}

fn train_ref_cmd(a: &TrainRefArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.src, &a.tgt]);
    let pairs: Vec<(TokenSeq, TokenSeq)> = load_parallel(&a.src, &a.tgt, None, TextFormat::Tokenized)?
        .into_iter()
        .map(|p| (p.source, p.target))
        .collect();
    let model = ReferenceModel::train(&pairs, a.order)?;
    run.summary = json!({
        "pairs": pairs.len(),
        "lexicon_entries": model.lexicon.len(),
        "lm_order": model.lm.order(),
        "vocab": model.lm.vocab_size(),
    });
    run.outputs.put(Some(&a.output), model.to_text())?;
    Ok(run)
}

fn decode_config(opts: &DecodeOpts) -> DecodeConfig {
    DecodeConfig {
        beam: opts.beam,
        max_len: opts.max_len,
        constrained: opts.constrained,
        ..Default::default()
    }
}

fn decode_cmd(a: &DecodeArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.model, &a.input]);
    let scorer = ReferenceScorer::new(ReferenceModel::load(&a.model)?);
    let sources = load_tokens(&a.input, a.format.into())?;
    let cfg = DecodeConfig {
        kbest: a.kbest,
        ..decode_config(&a.opts)
    }
    .with_bias(a.bias);
    let decoded: Vec<Vec<Hypothesis>> = sources
        .par_iter()
        .map(|s| {
            if s.is_empty() {
                Ok(Vec::new())
            } else {
                beam_decode(&scorer, s, &cfg)
            }
        })
        .collect::<diffcorrect::Result<_>>()?;
    let mut out = Vec::with_capacity(sources.len());
    let mut changed = 0;
    for (src, hyps) in sources.iter().zip(&decoded) {
        let tagged = hyps
            .first()
            .map_or_else(|| TaggedSeq::from(src.clone()), |h| h.tagged.clone());
        changed += usize::from(tagged.as_slice() != src.as_slice());
        out.push(if a.tagged {
            tagged.to_line()
        } else {
            render_tokens(&strip_to_target(&tagged)?, a.format.into())?
        });
    }
    run.outputs.put(a.output.as_deref(), lines_text(out))?;
    if let Some(path) = &a.kbest_out {
        let entries: Vec<KbestEntry> = decoded
            .iter()
            .enumerate()
            .flat_map(|(i, hyps)| {
                hyps.iter()
                    .map(move |h| KbestEntry::from_hypothesis(&(i + 1).to_string(), h))
            })
            .collect();
        run.outputs.put(Some(path), render_kbest(&entries))?;
    }
    run.summary = json!({ "sentences": sources.len(), "changed": changed, "bias": a.bias });
    Ok(run)
}

fn tune_cmd(a: &TuneArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.model, &a.gold]);
    let scorer = ReferenceScorer::new(ReferenceModel::load(&a.model)?);
    let dev: Vec<_> = load_m2_gold(&a.gold)?
        .into_iter()
        .filter(|g| !g.source.is_empty())
        .map(|g| (g.source.clone(), g))
        .collect();
    let cfg = TuneConfig {
        grid_step: a.grid_step,
        tied: !a.untied,
        decode: decode_config(&a.opts),
        m2: M2Params::default(),
    };
    let res = grid_search_tune(&scorer, &dev, &cfg)?;
    let text = if a.json {
        lines_text(
            res.curve
                .iter()
                .map(|c| json!({ "bias": c.bias, "prf": c.prf }).to_string()),
        )
    } else {
        let mut rows = vec![format!("{:<24}{:>10}{:>10}{:>10}", "bias", "P", "R", "F0.5")];
        for c in &res.curve {
            rows.push(format!(
                "{:<24}{:>10.2}{:>10.2}{:>10.2}",
                c.bias.to_string(),
                100.0 * c.prf.precision,
                100.0 * c.prf.recall,
                100.0 * c.prf.f_beta
            ));
        }
        lines_text(rows)
    };
    eprintln!("best bias {} (F0.5 {:.4})", res.best, res.best_prf.f_beta);
    run.outputs.put(a.output.as_deref(), text)?;
    run.summary = json!({ "sentences": dev.len(), "best": res.best, "best_prf": res.best_prf });
    Ok(run)
}

fn load_plain(path: &Path) -> Result<Vec<TokenSeq>> {
    Ok(load_tokens(path, TextFormat::Tokenized)?)
}

fn gleu_cmd(a: &GleuArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.hyp, &a.src, &a.reference]);
    let (hyps, srcs, refs) = (load_plain(&a.hyp)?, load_plain(&a.src)?, load_plain(&a.reference)?);
    let report = gleu_with_order(&hyps, &srcs, &refs, a.order)?;
    let mut lines = vec![format!("GLEU\t{:.6}", report.score)];
    if a.sentences {
        lines.extend(
            report
                .sentence_scores
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{}\t{s:.6}", i + 1)),
        );
    }
    run.outputs.put(a.output.as_deref(), lines_text(lines))?;
    run.summary = json!({ "gleu": report.score, "sentences": hyps.len(), "order": a.order });
    Ok(run)
}

fn m2_cmd(a: &M2Args) -> Result<Run> {
    let mut run = Run::new(&[&a.hyp, &a.gold]);
    let hyps = load_plain(&a.hyp)?;
    let golds = load_m2_gold(&a.gold)?;
    let params = M2Params {
        max_unchanged: a.max_unchanged,
        beta: a.beta,
    };
    let report = m2_corpus(&hyps, &golds, params)?;
    let mut lines = Vec::new();
    if a.verbose {
        for (i, s) in report.sentences.iter().enumerate() {
            let edits: Vec<String> = s
                .system_edits
                .iter()
                .map(|e| format!("{}-{}:{}", e.start, e.end, e.replacement.join(" ")))
                .collect();
            lines.push(format!(
                "{}\ttp={} fp={} fn={}\tannotator={}\t{}",
                i + 1,
                s.counts.tp,
                s.counts.fp,
                s.counts.fn_,
                s.annotator,
                edits.join(" | ")
            ));
        }
    }
    lines.push(format!("Precision   : {:.4}", report.prf.precision));
    lines.push(format!("Recall      : {:.4}", report.prf.recall));
    lines.push(format!("F_{:<10}: {:.4}", a.beta, report.prf.f_beta));
    run.outputs.put(a.output.as_deref(), lines_text(lines))?;
    run.summary = serde_json::to_value(report.prf)?;
    Ok(run)
}

fn bootstrap_cmd(a: &BootstrapArgs, seed: u64) -> Result<Run> {
    let mut run = Run::new(&[&a.hyp_a, &a.hyp_b]);
    let (hyp_a, hyp_b) = (load_plain(&a.hyp_a)?, load_plain(&a.hyp_b)?);
    let cfg = BootstrapConfig {
        resamples: a.resamples,
        level: a.level,
        seed,
    };
    let report = match a.metric {
        Metric::M2 => {
            let gold_path = a.gold.as_deref().context("--gold is required for m2")?;
            run.inputs.push(gold_path.to_path_buf());
            let golds = load_m2_gold(gold_path)?;
            let stats = |hyps: &[TokenSeq]| -> Result<Vec<_>> {
                let r = m2_corpus(hyps, &golds, M2Params::default())?;
                Ok(r.sentences.into_iter().map(|s| s.counts).collect())
            };
            paired_bootstrap(&stats(&hyp_a)?, &stats(&hyp_b)?, &cfg)?
        }
        Metric::Gleu => {
            let (Some(src), Some(reference)) = (&a.src, &a.reference) else {
                bail!("--src and --ref are required for gleu");
            };
            run.inputs.extend([src.clone(), reference.clone()]);
            let (srcs, refs) = (load_plain(src)?, load_plain(reference)?);
            let a_stats = gleu_with_order(&hyp_a, &srcs, &refs, 4)?.sentence_stats;
            let b_stats = gleu_with_order(&hyp_b, &srcs, &refs, 4)?.sentence_stats;
            paired_bootstrap(&a_stats, &b_stats, &cfg)?
        }
    };
    let value = serde_json::to_value(&report)?;
    run.outputs
        .put(a.output.as_deref(), serde_json::to_string_pretty(&value)? + "\n")?;
    run.summary = value;
    Ok(run)
}

fn analyze_cmd(a: &AnalyzeArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.src, &a.hyp, &a.reference]);
    let srcs = load_plain(&a.src)?;
    let hyps = load_plain(&a.hyp)?;
    let refs = load_plain(&a.reference)?;
    same_len("source vs hypothesis", srcs.len(), hyps.len())?;
    same_len("source vs reference", srcs.len(), refs.len())?;
    let freq = match (&a.train_src, &a.train_tgt) {
        (Some(s), Some(t)) => {
            run.inputs.extend([s.clone(), t.clone()]);
            let pairs: Vec<(TokenSeq, TokenSeq)> = load_parallel(s, t, None, TextFormat::Tokenized)?
                .into_iter()
                .map(|p| (p.source, p.target))
                .collect();
            FreqTable::from_pairs(&pairs)?
        }
        _ => FreqTable::new(),
    };
    let edits = |side: &[TokenSeq]| -> Vec<EditSet> {
        srcs.iter()
            .zip(side)
            .map(|(s, t)| extract_edits(&levenshtein_align(s, t), a.max_unchanged))
            .collect()
    };
    let (system, gold) = (edits(&hyps), edits(&refs));
    let buckets = bucket_report(&srcs, &system, &gold, &freq)?;
    let kinds = kind_report(&system, &gold)?;
    let text = if a.json {
        buckets.to_json_lines() + &kind_json_lines(&kinds)
    } else {
        format!("{}\n{}", buckets.to_table(), kind_table(&kinds))
    };
    run.outputs.put(a.output.as_deref(), text)?;
    run.summary = json!({ "buckets": buckets, "sentences": srcs.len() });
    Ok(run)
}

fn rerank_cmd(a: &RerankArgs) -> Result<Run> {
    let mut run = Run::new(&[&a.input]);
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let entries = parse_kbest(&text, &a.input.display().to_string())?;
    let ranked = rerank(&entries, &a.bias);
    let reordered: Vec<KbestEntry> = ranked.iter().map(|(e, _)| e.clone()).collect();
    run.outputs.put(a.output.as_deref(), render_kbest(&reordered))?;
    let mut best = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (e, _) in &ranked {
        if seen.insert(e.source_id.as_str()) {
            best.push(format!("{}\t{}", e.source_id, e.tokens.join(" ")));
        }
    }
    if let Some(p) = &a.best {
        run.outputs.put(Some(p), lines_text(best.iter().cloned()))?;
    }
    run.summary = json!({ "hypotheses": entries.len(), "sources": best.len(), "bias": a.bias });
    Ok(run)
}
