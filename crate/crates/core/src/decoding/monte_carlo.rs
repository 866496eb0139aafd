//! Monte-Carlo estimation of average error probabilities over random noisy
//! codebooks.
//!
//! A trial draws the transmitted triple `(x, y_m, z)` from the physical
//! source/channel chain, which gives `y_m ~ P(y)` and `z ~ P(z | y_m)`, then
//! draws the `M - 1` competing codewords independently from `P(y)`. A trial
//! is an error for a decoder when some competitor ranks at or before `y_m`
//! (for the threshold decoder: when some competitor has
//! `P(z|y') >= P(z|y_m) / alpha`). Under this rule the position of `y_m`
//! inside the codebook does not affect the outcome, so none is drawn.

use alloc::vec;
use alloc::vec::Vec;

use super::codebook::codebook_size;
use super::metric::{ranks_before, within_threshold, DecoderKind, Scorer};
use super::report::{wilson_interval, ErrorProbReport, Method};
use crate::model::{HmmKernel, SystemModel, Triple, TripleSampler};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// A decoder under test, optionally with a replacement prior for the
/// `log2 P(y)` term of the universal metric.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    pub prior: Option<HmmKernel>,
}

impl DecoderSpec {
    pub fn new(kind: DecoderKind) -> Self {
        Self { kind, prior: None }
    }

    /// Universal decoder using `prior` for `P(y)`.
    pub fn plug_in(prior: HmmKernel) -> Self {
        Self {
            kind: DecoderKind::Universal,
            prior: Some(prior),
        }
    }

    pub fn label(&self) -> alloc::string::String {
        match self.prior {
            Some(_) => "plug-in".into(),
            None => self.kind.label(),
        }
    }
}

impl From<DecoderKind> for DecoderSpec {
    fn from(kind: DecoderKind) -> Self {
        Self::new(kind)
    }
}

/// Block length and rate of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloSetup {
    pub n: usize,
    pub rate: f64,
    pub m: u64,
}

impl MonteCarloSetup {
    pub fn new(n: usize, rate: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("block length"));
        }
        Ok(Self {
            n,
            rate,
            m: codebook_size(n, rate)?,
        })
    }
}

/// Error counts per decoder over a block of trials. Tallies of disjoint
/// trial ranges merge by addition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub errors: Vec<u64>,
}

impl Tally {
    pub fn new(decoders: usize) -> Self {
        Self {
            trials: 0,
            errors: vec![0; decoders],
        }
    }

    pub fn merge(mut self, other: &Tally) -> Self {
        if self.errors.len() < other.errors.len() {
            self.errors.resize(other.errors.len(), 0);
        }
        self.trials += other.trials;
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        self
    }

    pub fn reports(&self, setup: &MonteCarloSetup, decoders: &[DecoderSpec], seed: u64) -> Vec<ErrorProbReport> {
        decoders
            .iter()
            .zip(&self.errors)
            .map(|(d, &errors)| ErrorProbReport {
                decoder: d.kind,
                value: if self.trials == 0 {
                    0.0
                } else {
                    errors as f64 / self.trials as f64
                },
                method: Method::MonteCarlo {
                    trials: self.trials,
                    errors,
                    interval: wilson_interval(errors, self.trials, 1.96),
                },
                n: setup.n,
                rate: setup.rate,
                m: setup.m,
                seed: Some(seed),
            })
            .collect()
    }
}

/// Runs individual trials. Trial `t` draws all of its randomness from
/// stream `t` of the seed, so any partition of the trial range into blocks
/// gives the same totals.
pub struct TrialRunner<'a> {
    model: &'a SystemModel,
    setup: MonteCarloSetup,
    decoders: &'a [DecoderSpec],
    seed: u64,
    sampler: TripleSampler<'a>,
    scorer: Scorer,
    sent: Triple,
    word: Vec<u8>,
    sent_scores: Vec<f64>,
    failed: Vec<bool>,
}

impl<'a> TrialRunner<'a> {
    pub fn new(model: &'a SystemModel, setup: MonteCarloSetup, decoders: &'a [DecoderSpec], seed: u64) -> Result<Self> {
        for d in decoders {
            if let Some(p) = &d.prior {
                if p.symbols() != model.alphabet().y_size {
                    return Err(Error::Shape {
                        kernel: "prior",
                        detail: alloc::format!(
                            "prior has {} symbols, model has |Y| = {}",
                            p.symbols(),
                            model.alphabet().y_size
                        ),
                    });
                }
            }
        }
        let a = model.alphabet();
        Ok(Self {
            model,
            setup,
            decoders,
            seed,
            sampler: TripleSampler::new(model),
            scorer: Scorer::new(a.y_size, a.z_size),
            sent: Triple::default(),
            word: Vec::with_capacity(setup.n),
            sent_scores: vec![0.0; decoders.len()],
            failed: vec![false; decoders.len()],
        })
    }

    fn score(&mut self, index: usize, y_is_sent: bool) -> f64 {
        let Self {
            model,
            decoders,
            scorer,
            sent,
            word,
            ..
        } = self;
        let y: &[u8] = if y_is_sent { &sent.y } else { word };
        let d = &decoders[index];
        let prior = d.prior.as_ref().unwrap_or(model.induced().hmm());
        let lp = scorer.log_prior(prior, y);
        match d.kind {
            DecoderKind::Universal => scorer.universal(lp, y, &sent.z),
            _ => scorer.ml(model, lp, y, &sent.z),
        }
    }

    /// Runs trial `t`; returns, per decoder, whether it erred.
    pub fn run_trial(&mut self, t: u64) -> &[bool] {
        let mut r = stream_rng(self.seed, t);
        self.sampler.sample_into(self.setup.n, &mut r, &mut self.sent);
        for i in 0..self.decoders.len() {
            self.sent_scores[i] = self.score(i, true);
            self.failed[i] = false;
        }
        let prior = self.model.induced().hmm();
        for _ in 1..self.setup.m {
            self.word.clear();
            prior.sample_into(self.setup.n, &mut r, &mut self.word);
            for i in 0..self.decoders.len() {
                if self.failed[i] {
                    continue;
                }
                let s = self.score(i, false);
                self.failed[i] = match self.decoders[i].kind {
                    DecoderKind::Threshold(alpha) => within_threshold(s, self.sent_scores[i], alpha.ln()),
                    _ => ranks_before(s, &self.word, self.sent_scores[i], &self.sent.y),
                };
            }
        }
        &self.failed
    }

    /// Runs trials `range` and tallies errors.
    pub fn run_range(&mut self, range: core::ops::Range<u64>) -> Tally {
        let mut tally = Tally::new(self.decoders.len());
        for t in range {
            let failed = self.run_trial(t);
            for (e, &f) in tally.errors.iter_mut().zip(failed) {
                *e += f as u64;
            }
            tally.trials += 1;
        }
        tally
    }
}

/// Monte-Carlo error estimates for several decoders on common codebooks.
pub fn monte_carlo_errors(
    model: &SystemModel,
    n: usize,
    rate: f64,
    decoders: &[DecoderSpec],
    trials: u64,
    seed: u64,
) -> Result<Vec<ErrorProbReport>> {
    if trials == 0 {
        return Err(Error::Empty("trials"));
    }
    let setup = MonteCarloSetup::new(n, rate)?;
    let tally = TrialRunner::new(model, setup, decoders, seed)?.run_range(0..trials);
    Ok(tally.reports(&setup, decoders, seed))
}

/// Monte-Carlo error estimate for one decoder.
pub fn monte_carlo_error(
    model: &SystemModel,
    n: usize,
    rate: f64,
    kind: DecoderKind,
    trials: u64,
    seed: u64,
) -> Result<ErrorProbReport> {
    Ok(monte_carlo_errors(model, n, rate, &[DecoderSpec::new(kind)], trials, seed)?.remove(0))
}
