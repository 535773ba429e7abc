use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{beam_decode, BiasVector, DecodeConfig, Scorer};
use crate::diff_codec::strip_to_target;
use crate::error::{Error, Result};
use crate::metrics::{m2_maxmatch, GoldAnnotation, M2Counts, M2Params, Prf};
use crate::seq::TokenSeq;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneConfig {
    pub grid_step: f64,
    /// One scalar for all four tags; otherwise each tag is swept in turn.
    pub tied: bool,
    pub decode: DecodeConfig,
    pub m2: M2Params,
}

impl Default for TuneConfig {
    fn default() -> Self {
        TuneConfig {
            grid_step: 0.1,
            tied: true,
            decode: DecodeConfig::default(),
            m2: M2Params::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub bias: BiasVector,
    pub prf: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub best: BiasVector,
    pub best_prf: Prf,
    /// Every evaluated point in evaluation order.
    pub curve: Vec<CurvePoint>,
}

/// `0, 1/n, …, 1` for `n = 1 / step`; the step must divide 1.
pub fn grid_points(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Config(format!("grid step {step} must lie in (0, 1]")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("grid step {step} does not divide 1")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Smaller total offset first, then lexicographically smaller.
fn smaller(a: &BiasVector, b: &BiasVector) -> bool {
    let (sa, sb): (f64, f64) = (a.values().iter().sum(), b.values().iter().sum());
    sa < sb || (sa == sb && a.values() < b.values())
}

fn pick_best(curve: &[CurvePoint]) -> Option<&CurvePoint> {
    let mut best: Option<&CurvePoint> = None;
    for p in curve {
        let better = match best {
            None => true,
            Some(b) => p.prf.f_beta > b.prf.f_beta || (p.prf.f_beta == b.prf.f_beta && smaller(&p.bias, &b.bias)),
        };
        if better {
            best = Some(p);
        }
    }
    best
}

/// Grid search with an arbitrary evaluation function. Tied mode scores
/// each grid value on all four tags. Untied mode starts from zero and
/// sweeps one tag at a time in [`crate::seq::Tag::ALL`] order, fixing each
/// tag at its best value before moving on. The highest F-beta wins; ties go
/// to the smaller bias.
pub fn grid_search_by<F>(grid_step: f64, tied: bool, eval: F) -> Result<TuneResult>
where
    F: Fn(&BiasVector) -> Result<Prf> + Sync,
{
    let grid = grid_points(grid_step)?;
    let run = |points: Vec<BiasVector>| -> Result<Vec<CurvePoint>> {
        points
            .into_par_iter()
            .map(|bias| eval(&bias).map(|prf| CurvePoint { bias, prf }))
            .collect()
    };
    let curve = if tied {
        run(grid.iter().map(|&v| BiasVector::tied(v)).collect::<Result<_>>()?)?
    } else {
        let mut curve = Vec::new();
        let mut seen: BTreeMap<[u64; 4], Prf> = BTreeMap::new();
        let mut current = [0.0; 4];
        for c in 0..4 {
            let points = grid
                .iter()
                .map(|&v| {
                    let mut vals = current;
                    vals[c] = v;
                    BiasVector::new(vals)
                })
                .collect::<Result<Vec<_>>>()?;
            let fresh: Vec<BiasVector> = points
                .iter()
                .filter(|b| !seen.contains_key(&b.values().map(f64::to_bits)))
                .copied()
                .collect();
            for p in run(fresh)? {
                seen.insert(p.bias.values().map(f64::to_bits), p.prf);
                curve.push(p);
            }
            let sweep: Vec<CurvePoint> = points
                .iter()
                .map(|b| CurvePoint {
                    bias: *b,
                    prf: seen[&b.values().map(f64::to_bits)],
                })
                .collect();
            current = pick_best(&sweep).expect("grid is nonempty").bias.values();
        }
        curve
    };
    let best = pick_best(&curve).expect("grid is nonempty").clone();
    Ok(TuneResult {
        best: best.bias,
        best_prf: best.prf,
        curve,
    })
}

/// Decodes `dev` under a bias vector and scores the 1-best outputs with M².
pub fn evaluate_bias<S: Scorer>(
    scorer: &S,
    dev: &[(TokenSeq, GoldAnnotation)],
    bias: &BiasVector,
    cfg: &TuneConfig,
) -> Result<Prf> {
    let decode = cfg.decode.clone().with_bias(*bias);
    let counts = dev
        .par_iter()
        .map(|(src, gold)| {
            let hyps = beam_decode(scorer, src, &decode)?;
            let hyp = match hyps.first() {
                Some(h) => strip_to_target(&h.tagged)?,
                None => src.clone(),
            };
            Ok(m2_maxmatch(&hyp, gold, cfg.m2)?.counts)
        })
        .collect::<Result<Vec<M2Counts>>>()?;
    let mut total = M2Counts::default();
    for c in &counts {
        total.add(c);
    }
    Ok(total.prf(cfg.m2.beta))
}

/// Picks the bias that maximizes M² F-beta of 1-best decodes on `dev`.
pub fn grid_search_tune<S: Scorer>(
    scorer: &S,
    dev: &[(TokenSeq, GoldAnnotation)],
    cfg: &TuneConfig,
) -> Result<TuneResult> {
    if dev.is_empty() {
        return Err(Error::Empty("tuning set"));
    }
    grid_search_by(cfg.grid_step, cfg.tied, |b| evaluate_bias(scorer, dev, b, cfg))
}
