use alloc::vec::Vec;

use crate::math::{ceil, exp, fabs, round};
use crate::model::SystemModel;
use crate::{rng, Error, Result};

/// Largest codebook size accepted, `2^53`.
const MAX_CODEBOOK: f64 = 9_007_199_254_740_992.0;

/// `M = ceil(e^{nR})`. Values within `1e-9` relative of an integer are
/// rounded to it first, so `R = ln(2)/n` gives exactly 2.
pub fn codebook_size(n: usize, rate: f64) -> Result<u64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
        });
    }
    let raw = exp(n as f64 * rate);
    if raw > MAX_CODEBOOK {
        return Err(Error::TooLarge {
            what: "codebook size",
            size: raw,
            limit: MAX_CODEBOOK,
        });
    }
    let nearest = round(raw);
    let m = if fabs(raw - nearest) <= 1e-9 * nearest {
        nearest
    } else {
        ceil(raw)
    };
    Ok(m.max(1.0) as u64)
}

/// A noisy codebook: `M` codewords drawn independently from `P(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    pub n: usize,
    pub rate: f64,
    pub seed: u64,
    pub words: Vec<Vec<u8>>,
}

impl Codebook {
    /// Draws `ceil(e^{nR})` codewords. Each codeword is sampled from the
    /// induced kernel, which has the law of `x ~ G` followed by `y ~ V(.|x)`.
    pub fn generate(model: &SystemModel, n: usize, rate: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("block length"));
        }
        let m = codebook_size(n, rate)?;
        let mut r = rng::stream_rng(seed, 0);
        let words = (0..m)
            .map(|_| {
                let mut w = Vec::with_capacity(n);
                model.sample_y_into(n, &mut r, &mut w);
                w
            })
            .collect();
        Ok(Self {
            n,
            rate,
            seed,
            words,
        })
    }

    /// Codebook from explicit codewords (all of length `n`).
    pub fn from_words(words: Vec<Vec<u8>>, rate: f64, seed: u64) -> Result<Self> {
        let n = words.first().map(Vec::len).ok_or(Error::Empty("codebook"))?;
        if let Some(w) = words.iter().find(|w| w.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: w.len(),
            });
        }
        Ok(Self {
            n,
            rate,
            seed,
            words,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
