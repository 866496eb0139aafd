//! Average error probabilities by full enumeration of `Y^n x Z^n`.

use alloc::vec;
use alloc::vec::Vec;

use super::codebook::codebook_size;
use super::metric::{tie_bucket, within_threshold, DecoderKind, Scorer};
use super::report::{ErrorProbReport, Method};
use crate::enumerate::{SequenceSpace, ENUMERATION_LIMIT};
use crate::math::{exp, expm1, log, log1p};
use crate::model::SystemModel;
use crate::{Error, Result};

/// `f(t) = 1 - (1 - t)^{M-1}`: probability that at least one of `M - 1`
/// independent competitors falls in a set of probability `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorFunction {
    m: u64,
}

impl ErrorFunction {
    pub fn new(n: usize, rate: f64) -> Result<Self> {
        Ok(Self {
            m: codebook_size(n, rate)?,
        })
    }

    pub fn with_size(m: u64) -> Self {
        Self { m: m.max(1) }
    }

    pub fn codebook_size(&self) -> u64 {
        self.m
    }

    /// Evaluates `f(t)`, clamping `t` into `[0, 1]`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if self.m <= 1 || t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        -expm1((self.m - 1) as f64 * log1p(-t))
    }
}

/// `f(t)` for a codebook of `ceil(e^{nR})` words.
pub fn f_of_t(t: f64, n: usize, rate: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain { what: "t", value: t });
    }
    Ok(ErrorFunction::new(n, rate)?.eval(t))
}

/// Ranking of all of `Y^n` for one `z`, with the probability of every
/// pairwise error set `E(y, z) = {y' : M(y', z) <= M(y, z)}`.
#[derive(Clone, Debug)]
pub struct Ranking {
    /// Sequence indices from best to worst.
    pub order: Vec<usize>,
    /// `P[E(y, z)]`, indexed by sequence index.
    pub set_prob: Vec<f64>,
}

impl Ranking {
    /// Ranks by `scores` (lower is better), then by sequence index, which is
    /// lexicographic order.
    pub fn from_scores(scores: &[f64], probs: &[f64]) -> Self {
        let buckets: Vec<i64> = scores.iter().map(|&s| tie_bucket(s)).collect();
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| buckets[a].cmp(&buckets[b]).then(a.cmp(&b)));
        let mut set_prob = vec![0.0; scores.len()];
        let mut acc = 0.0;
        for &i in &order {
            acc += probs[i];
            set_prob[i] = acc;
        }
        Self { order, set_prob }
    }

    /// Position of sequence `index` in the ranking, 0 being best.
    pub fn position(&self, index: usize) -> usize {
        self.order.iter().position(|&i| i == index).unwrap()
    }
}

/// `P[E_t(y, z)]` for every `y`, where
/// `E_t(y, z) = {y' : P(z|y') >= P(z|y) / alpha}`.
pub fn threshold_set_probs(ml_scores: &[f64], probs: &[f64], ln_alpha: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..ml_scores.len()).collect();
    order.sort_by(|&a, &b| ml_scores[a].total_cmp(&ml_scores[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| ml_scores[i]).collect();
    let mut prefix = Vec::with_capacity(order.len());
    let mut acc = 0.0;
    for &i in &order {
        acc += probs[i];
        prefix.push(acc);
    }
    ml_scores
        .iter()
        .map(|&s| {
            let k = sorted.partition_point(|&o| within_threshold(o, s, ln_alpha));
            prefix[k - 1]
        })
        .collect()
}

/// Per-`z` quantities over all `y`: joint log-probabilities and the scores
/// of both ranking decoders.
#[derive(Clone, Debug)]
pub struct ZColumn {
    pub z: Vec<u8>,
    pub log_pyz: Vec<f64>,
    /// `-ln P(z|y)`.
    pub ml: Vec<f64>,
    /// `log2 P(y) + v(y, z)`.
    pub universal: Vec<f64>,
    /// `ln P(z)`.
    pub log_pz: f64,
}

/// Enumeration tables for one model and block length.
#[derive(Clone, Debug)]
pub struct ExactContext<'a> {
    model: &'a SystemModel,
    y_space: SequenceSpace,
    z_space: SequenceSpace,
    ys: Vec<u8>,
    log_py: Vec<f64>,
    py: Vec<f64>,
}

impl<'a> ExactContext<'a> {
    /// Fails with `TooLarge` when `|Y|^n |Z|^n` exceeds the enumeration limit.
    pub fn new(model: &'a SystemModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("block length"));
        }
        let a = model.alphabet();
        let y_space = SequenceSpace::new(a.y_size, n)?;
        let z_space = SequenceSpace::new(a.z_size, n)?;
        let pairs = (y_space.size() as f64) * (z_space.size() as f64);
        if pairs > ENUMERATION_LIMIT as f64 {
            return Err(Error::TooLarge {
                what: "sequence pair space",
                size: pairs,
                limit: ENUMERATION_LIMIT as f64,
            });
        }
        let ys = y_space.flat();
        let prior = model.induced().hmm();
        let mut scorer = Scorer::new(a.y_size, a.z_size);
        let log_py: Vec<f64> = ys
            .chunks_exact(n)
            .map(|y| scorer.log_prior(prior, y))
            .collect();
        let py = log_py.iter().map(|&l| exp(l)).collect();
        Ok(Self {
            model,
            y_space,
            z_space,
            ys,
            log_py,
            py,
        })
    }

    pub fn model(&self) -> &'a SystemModel {
        self.model
    }

    pub fn n(&self) -> usize {
        self.y_space.len()
    }

    pub fn y_space(&self) -> SequenceSpace {
        self.y_space
    }

    pub fn z_space(&self) -> SequenceSpace {
        self.z_space
    }

    /// The `index`-th sequence of `Y^n` in lexicographic order.
    pub fn y(&self, index: usize) -> &[u8] {
        let n = self.n();
        &self.ys[index * n..(index + 1) * n]
    }

    pub fn log_py(&self) -> &[f64] {
        &self.log_py
    }

    pub fn py(&self) -> &[f64] {
        &self.py
    }

    /// Scores and joint probabilities of every `y` against `z`.
    pub fn column(&self, z: &[u8]) -> Result<ZColumn> {
        if z.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: z.len(),
            });
        }
        self.model.check_pair(self.y(0), z)?;
        let a = self.model.alphabet();
        let mut scorer = Scorer::new(a.y_size, a.z_size);
        let size = self.y_space.size();
        let mut log_pyz = Vec::with_capacity(size);
        let mut ml = Vec::with_capacity(size);
        let mut universal = Vec::with_capacity(size);
        let mut cache = crate::model::LogProbCache::default();
        for i in 0..size {
            let y = self.y(i);
            let lp = self.log_py[i];
            let lj = cache.log_prob_yz(self.model, y, z);
            log_pyz.push(lj);
            ml.push(if lp == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                lp - lj
            });
            universal.push(scorer.universal(lp, y, z));
        }
        let log_pz = log_sum_exp(&log_pyz);
        Ok(ZColumn {
            z: z.to_vec(),
            log_pyz,
            ml,
            universal,
            log_pz,
        })
    }

    /// `P[E(y, z)]` for every `y` under the decoder's pairwise error set.
    pub fn set_probs(&self, column: &ZColumn, kind: DecoderKind) -> Vec<f64> {
        match kind {
            DecoderKind::MaximumLikelihood => Ranking::from_scores(&column.ml, &self.py).set_prob,
            DecoderKind::Universal => Ranking::from_scores(&column.universal, &self.py).set_prob,
            DecoderKind::Threshold(alpha) => threshold_set_probs(&column.ml, &self.py, alpha.ln()),
        }
    }

    /// `sum_y P(y|z) f(P[E(y, z)])`.
    pub fn conditional_error(&self, column: &ZColumn, set_prob: &[f64], f: &ErrorFunction) -> f64 {
        if column.log_pz == f64::NEG_INFINITY {
            return 0.0;
        }
        column
            .log_pyz
            .iter()
            .zip(set_prob)
            .map(|(&lj, &t)| exp(lj - column.log_pz) * f.eval(t))
            .sum()
    }

    /// `sum_{y,z} P(y, z) f(P[E(y, z)])` for a decoder.
    pub fn avg_error(&self, kind: DecoderKind, f: &ErrorFunction) -> Result<f64> {
        let mut z = vec![0u8; self.n()];
        let mut total = 0.0;
        for j in 0..self.z_space.size() {
            self.z_space.decode_into(j, &mut z);
            let column = self.column(&z)?;
            let sp = self.set_probs(&column, kind);
            total += weighted(&column, &sp, f);
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Average error of the ranking decoder induced by an arbitrary score
    /// (lower is better) of `(y, z)`.
    pub fn avg_error_by_scores<S>(&self, f: &ErrorFunction, mut score: S) -> Result<f64>
    where
        S: FnMut(&[u8], &[u8]) -> f64,
    {
        let mut z = vec![0u8; self.n()];
        let mut total = 0.0;
        for j in 0..self.z_space.size() {
            self.z_space.decode_into(j, &mut z);
            let column = self.column(&z)?;
            let scores: Vec<f64> = (0..self.y_space.size()).map(|i| score(self.y(i), &z)).collect();
            let sp = Ranking::from_scores(&scores, &self.py).set_prob;
            total += weighted(&column, &sp, f);
        }
        Ok(total.clamp(0.0, 1.0))
    }
}

fn weighted(column: &ZColumn, set_prob: &[f64], f: &ErrorFunction) -> f64 {
    column
        .log_pyz
        .iter()
        .zip(set_prob)
        .map(|(&lj, &t)| exp(lj) * f.eval(t))
        .sum()
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + log(values.iter().map(|&v| exp(v - m)).sum::<f64>())
}

/// `P[E(y, z)]` for one pair, by ranking all of `Y^n`.
pub fn pairwise_set_prob(model: &SystemModel, z: &[u8], kind: DecoderKind, y: &[u8]) -> Result<f64> {
    model.check_pair(y, z)?;
    let ctx = ExactContext::new(model, y.len())?;
    let column = ctx.column(z)?;
    Ok(ctx.set_probs(&column, kind)[ctx.y_space.encode(y)])
}

/// Exact average error probability at block length `n` and rate `R`.
pub fn exact_avg_error(model: &SystemModel, n: usize, rate: f64, kind: DecoderKind) -> Result<ErrorProbReport> {
    let f = ErrorFunction::new(n, rate)?;
    let ctx = ExactContext::new(model, n)?;
    let value = ctx.avg_error(kind, &f)?;
    Ok(ErrorProbReport {
        decoder: kind,
        value,
        method: Method::Exact,
        n,
        rate,
        m: f.codebook_size(),
        seed: None,
    })
}

/// Exact average error of the ranking decoder given by `score`.
pub fn exact_avg_error_by_scores<S>(model: &SystemModel, n: usize, rate: f64, score: S) -> Result<f64>
where
    S: FnMut(&[u8], &[u8]) -> f64,
{
    let f = ErrorFunction::new(n, rate)?;
    ExactContext::new(model, n)?.avg_error_by_scores(&f, score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoding::Alpha;
    use crate::model::{AlphabetSpec, StateSpec};

    fn two_state(seed: u64) -> SystemModel {
        SystemModel::random(seed, AlphabetSpec::binary(), StateSpec::new(2, 2, 2)).unwrap()
    }

    #[test]
    fn f_endpoints() {
        assert_eq!(f_of_t(0.0, 4, 0.3).unwrap(), 0.0);
        assert_eq!(f_of_t(1.0, 4, 0.3).unwrap(), 1.0);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(f_of_t(t, 10, 0.0).unwrap(), 0.0);
        }
        assert!(f_of_t(1.5, 4, 0.3).is_err());
        assert!(f_of_t(-0.1, 4, 0.3).is_err());
    }

    #[test]
    fn f_small_t_is_linear() {
        let f = ErrorFunction::with_size(1001);
        let t = 1e-15;
        assert!((f.eval(t) / (1000.0 * t) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn top_and_bottom_ranks() {
        let model = two_state(3);
        let ctx = ExactContext::new(&model, 4).unwrap();
        let column = ctx.column(&[0, 1, 1, 0]).unwrap();
        let ranking = Ranking::from_scores(&column.universal, ctx.py());
        let top = ranking.order[0];
        let bottom = *ranking.order.last().unwrap();
        assert_eq!(ranking.set_prob[top], ctx.py()[top]);
        assert!((ranking.set_prob[bottom] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_gives_zero_error() {
        let model = two_state(5);
        for kind in [
            DecoderKind::MaximumLikelihood,
            DecoderKind::Universal,
            DecoderKind::Threshold(Alpha::new(2.0).unwrap()),
        ] {
            assert_eq!(exact_avg_error(&model, 3, 0.0, kind).unwrap().value, 0.0);
        }
    }

    #[test]
    fn ml_not_worse_than_universal() {
        let model = two_state(9);
        let ml = exact_avg_error(&model, 4, 0.2, DecoderKind::MaximumLikelihood).unwrap();
        let un = exact_avg_error(&model, 4, 0.2, DecoderKind::Universal).unwrap();
        assert!((0.0..=1.0).contains(&ml.value));
        assert!(ml.value <= un.value + 1e-12);
    }

    #[test]
    fn threshold_set_contains_ml_set() {
        let model = two_state(2);
        let ctx = ExactContext::new(&model, 4).unwrap();
        let column = ctx.column(&[1, 0, 0, 1]).unwrap();
        let eo = ctx.set_probs(&column, DecoderKind::MaximumLikelihood);
        let et = ctx.set_probs(&column, DecoderKind::Threshold(Alpha::new(1.0001).unwrap()));
        for (o, t) in eo.iter().zip(&et) {
            assert!(o <= &(t + 1e-15));
        }
    }

    #[test]
    fn guard() {
        let model = two_state(1);
        assert!(matches!(
            ExactContext::new(&model, 13),
            Err(Error::TooLarge { .. })
        ));
    }
}
