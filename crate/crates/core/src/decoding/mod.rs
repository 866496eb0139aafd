//! Decoders for the noisy-codebook system and their average error
//! probabilities.
//!
//! Every ranking decoder orders candidate codewords by a score (lower is
//! better). Scores are compared after rounding to multiples of
//! [`TIE_QUANTUM`], so values equal up to floating-point noise tie; ties are
//! broken by the lexicographic order of the codeword, then by codebook index.
//! An error event for message `m` is any other codeword ranked at or before
//! `y_m`; in particular a duplicate of `y_m` is always an error.

mod codebook;
mod decode;
mod exact;
mod metric;
mod monte_carlo;
mod report;

pub use codebook::{codebook_size, Codebook};
pub use decode::{decode, decode_with_prior, Decision};
pub use exact::{
    exact_avg_error, exact_avg_error_by_scores, f_of_t, pairwise_set_prob, threshold_set_probs,
    ErrorFunction, ExactContext, Ranking, ZColumn,
};
pub use metric::{
    mmi_objective, rank_cmp, ranks_before, tie_bucket, u_metric, within_threshold, Alpha, DecoderKind,
    TIE_QUANTUM,
};
pub use monte_carlo::{
    monte_carlo_error, monte_carlo_errors, DecoderSpec, MonteCarloSetup, Tally, TrialRunner,
};
pub use report::{wilson_interval, ErrorProbReport, Method};
