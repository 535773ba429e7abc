//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diffcorrect::corpus_io::{
    corpus_stats, filter_lang8, load_parallel, read_lines, Lang8Config, SentencePair, TextFormat,
};
use diffcorrect::decode::{beam_decode, grid_search_tune, BiasVector, DecodeConfig, TuneConfig};
use diffcorrect::diff_codec::{encode_diffs, repair, strip_to_source, strip_to_target, validate_tagged};
use diffcorrect::edit_extract::edits_from_tagged;
use diffcorrect::metrics::{
    f_beta, gleu_stats, m2_maxmatch, paired_bootstrap, BootstrapConfig, GleuStats, GoldAnnotation, M2Counts, M2Params,
};
use diffcorrect::reference::{ReferenceModel, ReferenceScorer, DEFAULT_LM_ORDER};
use diffcorrect::synthetic::{generate, SyntheticConfig};
use diffcorrect::TokenSeq;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Tolerance on F computed from the rounded P/R columns, in f_beta's own
/// units (fractions, not percentage points).
const F_TOL: f64 = 0.01;

fn fbeta_rows() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut worst_pp: f64 = 0.0;
    let mut consistent = true;
    for &(_, p, r, f) in &CONLL_DEV_CURVE {
        let got = f_beta(p / 100.0, r / 100.0, 0.5);
        worst_ratio = worst_ratio.max((got - f / 100.0).abs());
        worst_pp = worst_pp.max((100.0 * got - f).abs());
        // P and R are rounded to two decimals; F is monotone in both, so the
        // printed F must lie within the range they allow
        let lo = 100.0 * f_beta((p - 0.005) / 100.0, (r - 0.005) / 100.0, 0.5);
        let hi = 100.0 * f_beta((p + 0.005) / 100.0, (r + 0.005) / 100.0, 0.5);
        consistent &= lo - 0.005 <= f && f <= hi + 0.005;
    }
    outcome(
        worst_ratio <= F_TOL && consistent,
        format!(
            "11 rows, max |dF| = {worst_ratio:.5} (ratio), {worst_pp:.4} pp; every row within its rounding interval: {consistent}"
        ),
    )
}

fn tuner_stub() -> Outcome {
    let dev = curve_dev(100_000);
    let mut cfg = TuneConfig::default();
    cfg.decode.beam = 1;
    let res = match grid_search_tune(&ThresholdScorer, &dev, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("tuning failed: {e}")),
    };
    let mut worst: f64 = 0.0;
    for (pt, &(b, p, r, _)) in res.curve.iter().zip(&CONLL_DEV_CURVE) {
        let bias = pt.bias.values()[0];
        if (bias - b).abs() > 1e-12 {
            return outcome(false, format!("curve out of order at {bias}"));
        }
        worst = worst.max((100.0 * pt.prf.precision - p).abs());
        worst = worst.max((100.0 * pt.prf.recall - r).abs());
    }
    let want = BiasVector::tied(0.7).unwrap();
    outcome(
        res.best == want && worst <= 0.01,
        format!(
            "{} sentences, best bias {:?}, F0.5 {:.4}; curve P/R within {worst:.4} pp of the table",
            dev.len(),
            res.best.values(),
            res.best_prf.f_beta
        ),
    )
}

fn m2_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = M2Params::default();
    let cases = 2000;
    let mut mismatches = 0;
    let mut first = String::new();
    for _ in 0..cases {
        let (src, hyp, gold, annotators) = random_m2_case(&mut rng);
        let want = m2_oracle(&src, &hyp, &annotators, params.max_unchanged);
        let got = match m2_maxmatch(&hyp, &gold, params) {
            Ok(s) => (s.counts.tp, s.counts.fp, s.counts.fn_),
            Err(e) => {
                mismatches += 1;
                first = format!("error {e}");
                continue;
            }
        };
        if got != want {
            if mismatches == 0 {
                first = format!("src {src:?} hyp {hyp:?}: got {got:?}, oracle {want:?}");
            }
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{cases} sentences, {mismatches} mismatches {first}"),
    )
}

fn codec_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = 100_000;
    let mut failures = 0;
    for _ in 0..cases {
        let vocab = rng.random_range(1..=20);
        let s = random_tokens(&mut rng, vocab, 30);
        let t = random_tokens(&mut rng, vocab, 30);
        let ok = encode_diffs(&s, &t).is_ok_and(|tagged| {
            strip_to_target(&tagged).is_ok_and(|x| x.as_slice() == t.as_slice())
                && strip_to_source(&tagged).is_ok_and(|x| x.as_slice() == s.as_slice())
        });
        failures += usize::from(!ok);
    }
    outcome(failures == 0, format!("{cases} pairs, {failures} failures"))
}

fn repair_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cases = 100_000;
    let (mut invalid, mut unstable) = (0, 0);
    for _ in 0..cases {
        let source = random_tokens(&mut rng, 8, 12);
        let noisy = corrupt_tagged(&mut rng, &source);
        let fixed = repair(&noisy, &source);
        invalid += usize::from(!validate_tagged(&fixed, &source).valid);
        unstable += usize::from(repair(&fixed, &source) != fixed);
    }
    outcome(
        invalid == 0 && unstable == 0,
        format!("{cases} streams, {invalid} invalid, {unstable} not idempotent"),
    )
}

fn tuning_curve_shape() -> Outcome {
    let corpus = generate(&SyntheticConfig::default());
    let half = corpus.len() / 2;
    let train: Vec<(TokenSeq, TokenSeq)> = corpus[..half]
        .iter()
        .map(|p| (p.source.clone(), p.target.clone()))
        .collect();
    let model = match ReferenceModel::train(&train, DEFAULT_LM_ORDER) {
        Ok(m) => m,
        Err(e) => return outcome(false, format!("training failed: {e}")),
    };
    let mut dev = Vec::new();
    for p in &corpus[half..] {
        let gold = encode_diffs(&p.source, &p.target).and_then(|t| edits_from_tagged(&t));
        match gold {
            Ok(edits) => dev.push((p.source.clone(), GoldAnnotation::single(p.source.clone(), &edits))),
            Err(e) => return outcome(false, format!("gold extraction failed: {e}")),
        }
    }
    let mut cfg = TuneConfig::default();
    cfg.decode.beam = 1;
    let res = match grid_search_tune(&ReferenceScorer::new(model), &dev, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("tuning failed: {e}")),
    };
    let recalls: Vec<f64> = res.curve.iter().map(|c| c.prf.recall).collect();
    let monotone = recalls.windows(2).all(|w| w[1] >= w[0]);
    let (p0, p1) = (res.curve[0].prf.precision, res.curve[res.curve.len() - 1].prf.precision);
    let best = res.best.values()[0];
    let interior = best > 0.0 && best < 1.0;
    let curve: Vec<String> = res
        .curve
        .iter()
        .map(|c| format!("{:.1}:{:.3}", c.bias.values()[0], c.prf.f_beta))
        .collect();
    outcome(
        monotone && p1 <= p0 && interior,
        format!(
            "{} train / {} dev sentences; recall non-decreasing: {monotone}; P(1)={p1:.3} <= P(0)={p0:.3}; argmax {best:.1}; F0.5 [{}]",
            half,
            dev.len(),
            curve.join(" ")
        ),
    )
}

fn zero_bias_neutrality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cases = 1000;
    let mut diffs = 0;
    for i in 0..cases {
        let scorer = FuzzScorer { seed: i };
        let mut words = random_tokens(&mut rng, 6, 5);
        words.push("t0".to_string());
        let src = TokenSeq::new(words).unwrap();
        let beam = rng.random_range(1..=6);
        let with = DecodeConfig {
            beam,
            max_len: Some(12),
            bias: Some(BiasVector::zero()),
            ..Default::default()
        };
        let without = DecodeConfig {
            bias: None,
            ..with.clone()
        };
        let a = beam_decode(&scorer, &src, &with);
        let b = beam_decode(&scorer, &src, &without);
        let same = match (a, b) {
            (Ok(a), Ok(b)) => {
                a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.raw == y.raw && x.tagged == y.tagged)
            }
            _ => false,
        };
        diffs += usize::from(!same);
    }
    outcome(diffs == 0, format!("{cases} fuzzed scorers, {diffs} differing outputs"))
}

fn gleu_hand_cases() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut stat_mismatch = Vec::new();
    for case in &GLEU_CASES {
        let st = gleu_stats(&toks(case.hyp), &toks(case.src), &toks(case.reference), case.order);
        let want = GleuStats {
            hyp_len: case.hyp_len,
            ref_len: case.ref_len,
            numerators: case.nums.to_vec(),
            denominators: case.dens.to_vec(),
        };
        if st != want {
            stat_mismatch.push(case.name);
        }
        worst = worst.max((st.score() - case.expected()).abs());
    }
    let identity = GLEU_CASES[0].expected() == 1.0;
    outcome(
        worst <= 1e-9 && stat_mismatch.is_empty() && identity,
        format!(
            "{} cases, max |dGLEU| = {worst:.2e}, n-gram count mismatches {stat_mismatch:?}",
            GLEU_CASES.len()
        ),
    )
}

fn bootstrap_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let sys = |rng: &mut ChaCha8Rng| -> Vec<M2Counts> {
        (0..200)
            .map(|_| M2Counts {
                tp: rng.random_range(0..3),
                fp: rng.random_range(0..3),
                fn_: rng.random_range(0..3),
            })
            .collect()
    };
    let a = sys(&mut rng);
    let b = sys(&mut rng);
    let cfg = |seed| BootstrapConfig {
        resamples: 50,
        level: 0.05,
        seed,
    };
    let r1 = paired_bootstrap(&a, &b, &cfg(5)).unwrap();
    let r2 = paired_bootstrap(&a, &b, &cfg(5)).unwrap();
    let bitwise = serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap()
        && r1.score_a.to_bits() == r2.score_a.to_bits()
        && r1.win_fraction.to_bits() == r2.win_fraction.to_bits();
    let swapped = paired_bootstrap(&b, &a, &cfg(5)).unwrap();
    let mirror = swapped.wins_a == r1.wins_b && swapped.wins_b == r1.wins_a && swapped.ties == r1.ties;
    let mut false_alarms = 0;
    for seed in 0..200 {
        let sys_a = sys(&mut rng);
        if paired_bootstrap(&sys_a, &sys_a.clone(), &cfg(seed))
            .unwrap()
            .significant
        {
            false_alarms += 1;
        }
    }
    outcome(
        bitwise && mirror && false_alarms == 0,
        format!("repeat run identical: {bitwise}; swapped systems mirror: {mirror}; identical systems significant in {false_alarms}/200 runs"),
    )
}

fn words_in_change() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut all_ok = true;
    let mut report = Vec::new();
    for k in 1..=6usize {
        let mut pairs = Vec::new();
        for i in 0..50 {
            // distinct tokens so the alignment is unambiguous
            let src: Vec<String> = (0..12).map(|j| format!("s{j}")).collect();
            if i % 5 == 0 {
                pairs.push(SentencePair::new(
                    TokenSeq::new(src.clone()).unwrap(),
                    TokenSeq::new(src).unwrap(),
                ));
                continue;
            }
            // split k into spans at well-separated positions: a deletion of
            // d tokens and an insertion of k - d tokens
            let d = rng.random_range(0..=k);
            let mut tgt: Vec<String> = Vec::new();
            for (j, tok) in src.iter().enumerate() {
                if (2..2 + d).contains(&j) {
                    continue;
                }
                if j == 9 {
                    tgt.extend((0..k - d).map(|x| format!("n{x}")));
                }
                tgt.push(tok.clone());
            }
            pairs.push(SentencePair::new(
                TokenSeq::new(src).unwrap(),
                TokenSeq::new(tgt).unwrap(),
            ));
        }
        let st = corpus_stats(&pairs).unwrap();
        let ok = st.mean_words_in_change == k as f64 && st.edited_pairs == 40;
        all_ok &= ok;
        report.push(format!("k={k}:{}", st.mean_words_in_change));
    }
    outcome(all_ok, format!("means {}", report.join(" ")))
}

fn lang8_conservation() -> Outcome {
    let pairs = match load_parallel(fixture("lang8.src"), fixture("lang8.tgt"), None, TextFormat::Tokenized) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("fixture: {e}")),
    };
    let expect = read_lines(fixture("lang8.expect")).unwrap();
    let cfg = Lang8Config::default();
    let (kept, rep) = filter_lang8(pairs.clone(), &cfg);
    let sum: usize = rep.drops.iter().map(|(_, n)| n).sum();
    let reconciles = rep.input == pairs.len() && rep.retained == kept.len() && rep.input == rep.retained + sum;
    // attribute each line by filtering growing prefixes
    let mut wrong = Vec::new();
    let mut prev = filter_lang8(Vec::new(), &cfg).1;
    for i in 0..pairs.len() {
        let (_, r) = filter_lang8(pairs[..=i].to_vec(), &cfg);
        let fired: Vec<&str> = r
            .drops
            .iter()
            .zip(&prev.drops)
            .filter(|((_, n), (_, m))| n > m)
            .map(|((name, _), _)| name.as_str())
            .collect();
        let got = fired.first().copied().unwrap_or("keep");
        if got != expect[i] {
            wrong.push(format!("line {}: {got} != {}", i + 1, expect[i]));
        }
        prev = r;
    }
    let all_rules = rep.drops.iter().all(|(_, n)| *n >= 1);
    outcome(
        reconciles && wrong.is_empty() && all_rules,
        format!(
            "{} in, {} kept, drops {:?}; reconciles: {reconciles}; misattributed {wrong:?}",
            rep.input, rep.retained, rep.drops
        ),
    )
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let checks: [(&str, Check); 11] = [
        ("f_beta table rows", fbeta_rows),
        ("tuner argmax on stub curve", tuner_stub),
        ("M2 oracle equivalence", m2_oracle_equivalence),
        ("codec round-trip fuzz", codec_round_trip),
        ("repair soundness fuzz", repair_soundness),
        ("end-to-end tuning curve shape", tuning_curve_shape),
        ("zero-bias neutrality", zero_bias_neutrality),
        ("GLEU hand cases", gleu_hand_cases),
        ("bootstrap determinism and symmetry", bootstrap_checks),
        ("words-in-change mean", words_in_change),
        ("Lang-8 filter conservation", lang8_conservation),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {name} ({:.1}s): {}", t.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
