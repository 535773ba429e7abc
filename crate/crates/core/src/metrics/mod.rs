//! Evaluation metrics: F-beta arithmetic, GLEU, the MaxMatch (M²) scorer and
//! paired bootstrap resampling.
//!
//! Ratios are reported in `[0, 1]`; multiply by 100 for display.

mod bootstrap;
mod gleu;
pub mod gold;
mod m2;

use std::collections::BTreeMap;

use serde::Serialize;

pub use bootstrap::{paired_bootstrap, BootstrapConfig, BootstrapReport, SufficientStats, DEFAULT_SEED};
pub use gleu::{gleu, gleu_sentence, gleu_stats, gleu_with_order, GleuReport, GleuStats};
pub use gold::{Annotator, GoldAnnotation, GoldEdit};
pub use m2::{
    lattice_edges, m2_corpus, m2_maxmatch, m2_with_source, LatticeEdge, M2Counts, M2Params, M2Report, SentenceM2,
};

pub const DEFAULT_BETA: f64 = 0.5;

/// `(1 + β²)·p·r / (β²·p + r)`, or 0 when the denominator is 0.
pub fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

/// Precision, recall and F-beta with the raw counts behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
}

impl Prf {
    /// 0/0 precision and 0/0 recall both count as 1.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, beta: f64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Prf {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f_beta: f_beta(precision, recall, beta),
            beta,
        }
    }

    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tp,
    Fp,
    Fn,
}

/// Pools outcomes per bucket and scores each bucket at β = 0.5.
pub fn micro_prf<B: Ord + Clone>(decisions: impl IntoIterator<Item = (B, Outcome)>) -> BTreeMap<B, Prf> {
    micro_prf_with_buckets(std::iter::empty(), decisions)
}

/// Like [`micro_prf`], but every bucket in `buckets` is reported even when no
/// decision falls into it (P = R = F = 1 with zero support).
pub fn micro_prf_with_buckets<B: Ord + Clone>(
    buckets: impl IntoIterator<Item = B>,
    decisions: impl IntoIterator<Item = (B, Outcome)>,
) -> BTreeMap<B, Prf> {
    let mut counts: BTreeMap<B, [u64; 3]> = buckets.into_iter().map(|b| (b, [0; 3])).collect();
    for (bucket, outcome) in decisions {
        let c = counts.entry(bucket).or_default();
        match outcome {
            Outcome::Tp => c[0] += 1,
            Outcome::Fp => c[1] += 1,
            Outcome::Fn => c[2] += 1,
        }
    }
    counts
        .into_iter()
        .map(|(b, [tp, fp, fn_])| (b, Prf::from_counts(tp, fp, fn_, DEFAULT_BETA)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_beta_table_rows() {
        assert!((f_beta(0.4666, 0.1535, 0.5) - 0.3314).abs() < 1e-4);
        assert!((f_beta(0.7234, 0.0097, 0.5) - 0.0460).abs() < 1e-4);
        assert_eq!(f_beta(1.0, 1.0, 0.5), 1.0);
        assert_eq!(f_beta(0.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn zero_conventions() {
        let p = Prf::from_counts(0, 0, 3, 0.5);
        assert_eq!((p.precision, p.recall, p.f_beta), (1.0, 0.0, 0.0));
        let p = Prf::from_counts(0, 0, 0, 0.5);
        assert_eq!((p.precision, p.recall, p.f_beta), (1.0, 1.0, 1.0));
    }

    #[test]
    fn micro_examples() {
        let m = micro_prf([("x", Outcome::Tp), ("x", Outcome::Tp)]);
        assert_eq!(m["x"].f_beta, 1.0);

        let m = micro_prf([("x", Outcome::Tp), ("x", Outcome::Fp)]);
        assert_eq!(m["x"].precision, 0.5);
        assert_eq!(m["x"].recall, 1.0);
        assert!((m["x"].f_beta - 0.5556).abs() < 1e-4);

        let m = micro_prf_with_buckets(["empty"], std::iter::empty());
        let p = m["empty"];
        assert_eq!((p.precision, p.recall, p.f_beta, p.support()), (1.0, 1.0, 1.0, 0));
    }
}
