use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use crate::lz::{JointParser, PhraseParse};
use crate::math::{log, round, LN_2};
use crate::model::{HmmKernel, LogProbCache, SystemModel};
use crate::{Error, Result};

/// Score resolution of every ranking: scores within this distance tie.
pub const TIE_QUANTUM: f64 = 1e-9;

/// Integer bucket of a score on the [`TIE_QUANTUM`] grid.
#[inline]
pub fn tie_bucket(score: f64) -> i64 {
    if score.is_nan() {
        return i64::MAX;
    }
    let q = round(score / TIE_QUANTUM);
    if q >= i64::MAX as f64 {
        i64::MAX
    } else if q <= i64::MIN as f64 {
        i64::MIN
    } else {
        q as i64
    }
}

/// Ranking order of two candidates given their scores: bucketed score, then
/// lexicographic sequence.
#[inline]
pub fn rank_cmp(score_a: f64, a: &[u8], score_b: f64, b: &[u8]) -> Ordering {
    tie_bucket(score_a)
        .cmp(&tie_bucket(score_b))
        .then_with(|| a.cmp(b))
}

/// True when candidate `a` is ranked at or before `b` (`M(a) <= M(b)`).
#[inline]
pub fn ranks_before(score_a: f64, a: &[u8], score_b: f64, b: &[u8]) -> bool {
    rank_cmp(score_a, a, score_b, b) != Ordering::Greater
}

/// Threshold-set membership on ML scores (`-ln P(z|y)`): true when
/// `P(z|y') >= P(z|y) / alpha`, up to [`TIE_QUANTUM`].
#[inline]
pub fn within_threshold(ml_other: f64, ml_reference: f64, ln_alpha: f64) -> bool {
    ml_other <= ml_reference + ln_alpha + TIE_QUANTUM
}

/// Threshold factor `alpha > 1` of the threshold decoder, held as `ln alpha`
/// so that very large factors stay representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha {
    ln: f64,
}

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
            });
        }
        Ok(Self { ln: log(alpha) })
    }

    pub fn from_ln(ln_alpha: f64) -> Result<Self> {
        if !(ln_alpha > 0.0) || ln_alpha.is_nan() {
            return Err(Error::Domain {
                what: "ln alpha",
                value: ln_alpha,
            });
        }
        Ok(Self { ln: ln_alpha })
    }

    /// `alpha = (K / pi_min)^(2 cbar)`.
    pub fn from_phrase_bound(k: usize, pi_min: f64, cbar: usize) -> Result<Self> {
        if !(pi_min > 0.0) {
            return Err(Error::PositivityViolation { pi_min });
        }
        Self::from_ln(2.0 * cbar as f64 * log(k as f64 / pi_min))
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn value(&self) -> f64 {
        crate::math::exp(self.ln)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecoderKind {
    /// Maximizes `P(z | y_m)`.
    MaximumLikelihood,
    /// Minimizes `u(y_m, z) = log2 P(y_m) + v(y_m, z)`.
    Universal,
    /// Outputs `m` only if `P(z|y_m) > alpha P(z|y_m')` for every `m' != m`.
    Threshold(Alpha),
}

impl DecoderKind {
    pub fn label(&self) -> String {
        match self {
            Self::MaximumLikelihood => "ml".into(),
            Self::Universal => "universal".into(),
            Self::Threshold(_) => "threshold".into(),
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `u(y, z) = log2 P(y) + v(y, z)`.
pub fn u_metric(model: &SystemModel, y: &[u8], z: &[u8]) -> Result<f64> {
    model.check_pair(y, z)?;
    let lp = model.log_prob_y(y)?;
    if lp == f64::NEG_INFINITY {
        return Err(Error::ConditioningOnNull);
    }
    let parse = crate::lz::joint_parse(y, z)?;
    Ok(lp / LN_2 + parse.v())
}

/// `(1/n) log2 (1/P(y)) - (1/n) v(y, z)`; maximizing it is minimizing `u`.
pub fn mmi_objective(model: &SystemModel, y: &[u8], z: &[u8]) -> Result<f64> {
    let n = y.len() as f64;
    let lp = model.log_prob_y(y)?;
    if lp == f64::NEG_INFINITY {
        return Err(Error::ConditioningOnNull);
    }
    let parse = crate::lz::joint_parse(y, z)?;
    Ok(-lp / LN_2 / n - parse.v() / n)
}

/// Score evaluator with reusable parse and forward buffers.
#[derive(Clone, Debug)]
pub(crate) struct Scorer {
    parser: JointParser,
    parse: PhraseParse,
    cache: LogProbCache,
}

impl Scorer {
    pub(crate) fn new(y_size: usize, z_size: usize) -> Self {
        Self {
            parser: JointParser::new(y_size, z_size),
            parse: PhraseParse::default(),
            cache: LogProbCache::default(),
        }
    }

    /// `ln P(y)` under `prior`.
    #[inline]
    pub(crate) fn log_prior(&mut self, prior: &HmmKernel, y: &[u8]) -> f64 {
        self.cache.log_prob(prior, y)
    }

    /// ML score `-ln P(z|y)` given `ln P(y)`.
    #[inline]
    pub(crate) fn ml(&mut self, model: &SystemModel, log_py: f64, y: &[u8], z: &[u8]) -> f64 {
        if log_py == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        -(self.cache.log_prob_yz(model, y, z) - log_py)
    }

    /// `v(y, z)`.
    #[inline]
    pub(crate) fn v(&mut self, y: &[u8], z: &[u8]) -> f64 {
        self.parser.parse_into(y, z, &mut self.parse);
        self.parse.v()
    }

    /// Universal score `log2 P(y) + v(y, z)` given `ln P(y)`.
    #[inline]
    pub(crate) fn universal(&mut self, log_py: f64, y: &[u8], z: &[u8]) -> f64 {
        log_py / LN_2 + self.v(y, z)
    }
}
