//! Decoders: inclusion decoding for disjunct codes and an exhaustive
//! consistency / maximum-likelihood decoder for arbitrary designs.

use alloc::format;
use alloc::vec::Vec;

use itertools::Itertools;

use crate::error::{domain, Error, Result};
use crate::info::{ModelKind, TestModel};
use crate::ternary::{column_sum, tail_mask, threshold_word, CodeMatrix, SubjectSet, TernaryWord};

/// Default cap on the number of candidate sets, `C(30, 1) + C(30, 2) + C(30, 3)`.
pub const EXHAUSTIVE_MAX_CANDIDATES: u64 = 4525;

/// Likelihood scores closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// Every subject whose column is included in `y`. On a symmetric
/// `m`-disjunct code with a noise-free observation of at most `m`
/// defectives this is exactly the defective set; on other codes the result
/// may be too large.
pub fn decode_inclusion(code: &CodeMatrix, y: &TernaryWord) -> Result<SubjectSet> {
    if y.len() != code.rows() {
        return Err(Error::LengthMismatch { expected: code.rows(), found: y.len() });
    }
    let mut found = Vec::new();
    for j in 0..code.cols() {
        if y.includes(&column_sum(code, &[j]))? {
            found.push(j);
        }
    }
    Ok(SubjectSet::from_sorted(found))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Allow more candidates than [`EXHAUSTIVE_MAX_CANDIDATES`].
    pub force: bool,
}

/// Noise-free outcome the model would produce for `subjects`.
pub(crate) fn model_observation(code: &CodeMatrix, subjects: &[usize], kind: ModelKind) -> TernaryWord {
    match kind {
        ModelKind::Sgt => column_sum(code, subjects),
        ModelKind::Agt => threshold_word(code, subjects, 0, 0),
        ModelKind::Ggt { eta1, eta2 } => threshold_word(code, subjects, eta1, eta2),
    }
}

pub fn decode_exhaustive(code: &CodeMatrix, y_obs: &TernaryWord, m: usize, model: &TestModel) -> Result<SubjectSet> {
    decode_exhaustive_with(code, y_obs, m, model, DecodeOptions::default())
}

/// Searches every subject set of size `1..=m`.
///
/// Without noise the unique set reproducing `y_obs` is returned. With noise
/// the set maximizing the likelihood of `y_obs` is returned. Several equally
/// good sets, or none with positive likelihood, give [`Error::Ambiguous`].
pub fn decode_exhaustive_with(
    code: &CodeMatrix,
    y_obs: &TernaryWord,
    m: usize,
    model: &TestModel,
    opts: DecodeOptions,
) -> Result<SubjectSet> {
    if y_obs.len() != code.rows() {
        return Err(Error::LengthMismatch { expected: code.rows(), found: y_obs.len() });
    }
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    if let Some(q) = model.q {
        crate::error::check_probability("q", q)?;
        if matches!(model.kind, ModelKind::Ggt { .. }) {
            return Err(domain("no noise channel defined for two-threshold tests"));
        }
    }
    if let ModelKind::Ggt { eta1, eta2 } = model.kind {
        if eta1 > eta2 || eta2 + 1 > m {
            return Err(Error::Thresholds { eta1, eta2, m });
        }
    }
    let n = code.cols();
    let count: u64 = (1..=m.min(n) as u64)
        .map(|s| (0..s).fold(1u64, |acc, t| acc.saturating_mul(n as u64 - t) / (t + 1)))
        .fold(0, u64::saturating_add);
    if !opts.force && count > EXHAUSTIVE_MAX_CANDIDATES {
        return Err(Error::Guard(format!(
            "{count} candidate sets exceed the limit of {EXHAUSTIVE_MAX_CANDIDATES}"
        )));
    }
    let candidates = (1..=m.min(n)).flat_map(|s| (0..n).combinations(s));

    match model.q {
        None => {
            let mut hit: Option<Vec<usize>> = None;
            let mut matches = 0;
            for set in candidates {
                if model_observation(code, &set, model.kind) == *y_obs {
                    matches += 1;
                    hit.get_or_insert(set);
                }
            }
            match (matches, hit) {
                (1, Some(set)) => Ok(SubjectSet::from_sorted(set)),
                _ => Err(Error::Ambiguous { best: matches }),
            }
        }
        Some(q) => {
            let channel = Channel::new(model.kind, q);
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut tied = 0;
            for set in candidates {
                let y = model_observation(code, &set, model.kind);
                let Some(score) = channel.log_likelihood(&y, y_obs) else { continue };
                match &best {
                    Some((b, _)) if score < b - TIE_TOLERANCE => {}
                    Some((b, _)) if score <= b + TIE_TOLERANCE => tied += 1,
                    _ => {
                        best = Some((score, set));
                        tied = 1;
                    }
                }
            }
            match best {
                Some((_, set)) if tied == 1 => Ok(SubjectSet::from_sorted(set)),
                _ => Err(Error::Ambiguous { best: tied }),
            }
        }
    }
}

/// Per-test noise channel `P(observed | clean)`.
struct Channel {
    kind: ModelKind,
    ln_q: f64,
    ln_not_q: f64,
}

impl Channel {
    fn new(kind: ModelKind, q: f64) -> Self {
        Self { kind, ln_q: libm::log(q), ln_not_q: libm::log(1.0 - q) }
    }

    /// Log-likelihood of `obs` given the clean outcome `y`; `None` when zero.
    ///
    /// Symmetric tests (ternary sum with the noise bit): 0 stays 0 w.p. 1-q
    /// and reads 2 w.p. q; 1 stays 1 w.p. q and reads 2 w.p. 1-q; 2 stays 2.
    /// Asymmetric tests (OR with the noise bit): 0 stays 0 w.p. 1-q and reads
    /// 1 w.p. q; 1 stays 1.
    fn log_likelihood(&self, y: &TernaryWord, obs: &TernaryWord) -> Option<f64> {
        let words = y.ones_plane().len();
        let (mut with_q, mut with_not_q) = (0u32, 0u32);
        for k in 0..words {
            let mask = if k + 1 == words { tail_mask(y.len()) } else { u64::MAX };
            let (yo, yn) = (y.ones_plane()[k], y.nonzero_plane()[k]);
            let (oo, on) = (obs.ones_plane()[k], obs.nonzero_plane()[k]);
            let (y0, y1, y2) = (!yn & mask, yo, yn & !yo);
            let (o0, o1, o2) = (!on & mask, oo, on & !oo);
            let (stay_0, to_1, to_2) = (y0 & o0, y0 & o1, y0 & o2);
            match self.kind {
                ModelKind::Agt => {
                    if (y1 & !o1) != 0 || (y2 != 0) || o2 != 0 {
                        return None;
                    }
                    with_not_q += stay_0.count_ones();
                    with_q += to_1.count_ones();
                }
                _ => {
                    if to_1 != 0 || (y1 & o0) != 0 || (y2 & !o2) != 0 {
                        return None;
                    }
                    with_not_q += stay_0.count_ones() + (y1 & o2).count_ones();
                    with_q += to_2.count_ones() + (y1 & o1).count_ones();
                }
            }
        }
        let term = |count: u32, ln: f64| if count == 0 { Some(0.0) } else if ln.is_finite() { Some(count as f64 * ln) } else { None };
        Some(term(with_q, self.ln_q)? + term(with_not_q, self.ln_not_q)?)
    }
}
