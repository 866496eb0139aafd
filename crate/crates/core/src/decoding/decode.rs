use alloc::vec::Vec;

use super::codebook::Codebook;
use super::metric::{rank_cmp, within_threshold, DecoderKind, Scorer};
use crate::model::{HmmKernel, SystemModel};
use crate::{Error, Result};

/// Decoder output. Message indices are 0-based codebook positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Message(usize),
    Erasure,
}

/// Decodes `z` against `codebook` with the given decoder.
pub fn decode(model: &SystemModel, codebook: &Codebook, z: &[u8], kind: DecoderKind) -> Result<Decision> {
    check_inputs(codebook, z)?;
    for w in &codebook.words {
        model.check_pair(w, z)?;
    }
    let a = model.alphabet();
    let mut scorer = Scorer::new(a.y_size, a.z_size);
    let prior = model.induced().hmm();
    let mut scores = Vec::with_capacity(codebook.len());
    for w in &codebook.words {
        let lp = scorer.log_prior(prior, w);
        scores.push(match kind {
            DecoderKind::Universal => scorer.universal(lp, w, z),
            _ => scorer.ml(model, lp, w, z),
        });
    }
    Ok(match kind {
        DecoderKind::Threshold(alpha) => threshold_select(&scores, alpha.ln()),
        _ => Decision::Message(rank_select(&scores, &codebook.words)),
    })
}

/// Universal decoding with `ln P(y)` taken from `prior` instead of the true
/// induced kernel.
pub fn decode_with_prior(prior: &HmmKernel, codebook: &Codebook, z: &[u8]) -> Result<Decision> {
    check_inputs(codebook, z)?;
    for w in &codebook.words {
        prior.check_symbols(w)?;
        if w.len() != z.len() {
            return Err(Error::LengthMismatch {
                left: w.len(),
                right: z.len(),
            });
        }
    }
    let z_size = z.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut scorer = Scorer::new(prior.symbols(), z_size);
    let scores: Vec<f64> = codebook
        .words
        .iter()
        .map(|w| {
            let lp = scorer.log_prior(prior, w);
            scorer.universal(lp, w, z)
        })
        .collect();
    Ok(Decision::Message(rank_select(&scores, &codebook.words)))
}

fn check_inputs(codebook: &Codebook, z: &[u8]) -> Result<()> {
    if codebook.is_empty() {
        return Err(Error::Empty("codebook"));
    }
    if z.len() != codebook.n {
        return Err(Error::LengthMismatch {
            left: codebook.n,
            right: z.len(),
        });
    }
    Ok(())
}

/// Best-ranked index: smallest bucketed score, then lexicographic codeword,
/// then smallest index.
pub(crate) fn rank_select(scores: &[f64], words: &[Vec<u8>]) -> usize {
    let mut best = 0;
    for j in 1..scores.len() {
        if rank_cmp(scores[j], &words[j], scores[best], &words[best]).is_lt() {
            best = j;
        }
    }
    best
}

/// Unique index whose likelihood beats every other by the threshold factor.
pub(crate) fn threshold_select(ml_scores: &[f64], ln_alpha: f64) -> Decision {
    let best = (0..ml_scores.len())
        .min_by(|&a, &b| ml_scores[a].total_cmp(&ml_scores[b]))
        .unwrap();
    let clear = ml_scores
        .iter()
        .enumerate()
        .all(|(j, &s)| j == best || !within_threshold(s, ml_scores[best], ln_alpha));
    if clear {
        Decision::Message(best)
    } else {
        Decision::Erasure
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoding::Alpha;
    use alloc::vec;

    fn bsc() -> SystemModel {
        SystemModel::binary_symmetric(0.05, 0.1).unwrap()
    }

    #[test]
    fn single_codeword_always_decodes_to_it() {
        let model = bsc();
        let cb = Codebook::from_words(vec![vec![0, 1, 1, 0]], 0.0, 0).unwrap();
        for kind in [DecoderKind::MaximumLikelihood, DecoderKind::Universal] {
            assert_eq!(decode(&model, &cb, &[1, 1, 1, 1], kind).unwrap(), Decision::Message(0));
        }
    }

    #[test]
    fn duplicates_resolve_to_first_index() {
        let model = bsc();
        let w = vec![0u8, 1, 1, 0, 1];
        let cb = Codebook::from_words(vec![vec![1, 1, 1, 1, 1], w.clone(), w.clone()], 0.2, 0).unwrap();
        for kind in [DecoderKind::MaximumLikelihood, DecoderKind::Universal] {
            assert_eq!(decode(&model, &cb, &w, kind).unwrap(), Decision::Message(1));
        }
        let alpha = DecoderKind::Threshold(Alpha::new(1.5).unwrap());
        assert_eq!(decode(&model, &cb, &w, alpha).unwrap(), Decision::Erasure);
    }

    #[test]
    fn huge_threshold_erases_near_ties() {
        let model = bsc();
        let cb = Codebook::from_words(vec![vec![0, 0, 0, 0], vec![0, 0, 0, 1]], 0.2, 0).unwrap();
        let z = [0u8, 0, 0, 0];
        let ml = decode(&model, &cb, &z, DecoderKind::MaximumLikelihood).unwrap();
        assert_eq!(ml, Decision::Message(0));
        let small = DecoderKind::Threshold(Alpha::new(1.01).unwrap());
        assert_eq!(decode(&model, &cb, &z, small).unwrap(), Decision::Message(0));
        let huge = DecoderKind::Threshold(Alpha::new(1e12).unwrap());
        assert_eq!(decode(&model, &cb, &z, huge).unwrap(), Decision::Erasure);
    }

    #[test]
    fn rejects_bad_inputs() {
        let model = bsc();
        let cb = Codebook::from_words(vec![vec![0, 1]], 0.0, 0).unwrap();
        assert!(decode(&model, &cb, &[0, 1, 1], DecoderKind::Universal).is_err());
        assert!(decode(&model, &cb, &[0, 2], DecoderKind::Universal).is_err());
    }
}
