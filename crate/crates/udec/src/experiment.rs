//! Experiment configuration and dispatch.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use udec_core::decoding::{exact_avg_error, Alpha, DecoderKind, DecoderSpec, ErrorFunction, ErrorProbReport, Method};
use udec_core::estimation::{baum_welch, EstimationConfig};
use udec_core::lz::{cbar, joint_parse};
use udec_core::model::SystemModel;
use udec_core::rng;
use udec_core::verification::{check_f_ratio, default_alpha, epsilon_ladder, Verifier};

use crate::format::{load_codebook, load_model, load_prior, save_prior, word_from_str};
use crate::output::Row;
use crate::parallel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
    BoundsCheck,
    Estimate,
    Parse,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
            Mode::BoundsCheck => "bounds-check",
            Mode::Estimate => "estimate",
            Mode::Parse => "parse",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderName {
    Ml,
    Universal,
    Threshold,
    /// Universal decoder with the prior read from `prior`.
    PlugIn,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Codebook file to train on; sequences are sampled from the model when absent.
    pub training: Option<PathBuf>,
    #[serde(default = "default_sequences")]
    pub sequences: usize,
    #[serde(default = "default_length")]
    pub length: usize,
    /// Where to write the estimated prior.
    pub prior_out: Option<PathBuf>,
}

fn default_hidden() -> usize {
    EstimationConfig::default().hidden
}
fn default_floor() -> f64 {
    EstimationConfig::default().floor
}
fn default_iterations() -> usize {
    EstimationConfig::default().max_iterations
}
fn default_tolerance() -> f64 {
    EstimationConfig::default().tolerance
}
fn default_sequences() -> usize {
    1000
}
fn default_length() -> usize {
    200
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            hidden: default_hidden(),
            floor: default_floor(),
            max_iterations: default_iterations(),
            tolerance: default_tolerance(),
            training: None,
            sequences: default_sequences(),
            length: default_length(),
            prior_out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub decoders: Vec<DecoderName>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Threshold factor; defaults to `(K / pi_min)^(2 cbar_n)`.
    pub alpha: Option<f64>,
    pub prior: Option<PathBuf>,
    #[serde(default)]
    pub estimate: EstimateSection,
    /// Sequences for `parse` mode, as digit strings.
    pub y: Option<String>,
    pub z: Option<String>,
}

fn default_trials() -> u64 {
    10_000
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            model: None,
            n: Vec::new(),
            rate: 0.0,
            decoders: Vec::new(),
            trials: default_trials(),
            seed: 0,
            out: None,
            alpha: None,
            prior: None,
            estimate: EstimateSection::default(),
            y: None,
            z: None,
        }
    }

    /// Reads a TOML config; relative paths are taken relative to its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(path.display().to_string(), e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Parse(path.display().to_string(), e.to_string()))?;
        if let Some(dir) = path.parent() {
            cfg.resolve(dir);
        }
        Ok(cfg)
    }

    fn resolve(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = dir.join(&*q);
                }
            }
        };
        fix(&mut self.model);
        fix(&mut self.out);
        fix(&mut self.prior);
        fix(&mut self.estimate.training);
        fix(&mut self.estimate.prior_out);
    }

    pub fn validate(&self) -> Result<()> {
        let needs_model = !matches!(self.mode, Mode::Parse);
        if needs_model && self.model.is_none() {
            return Err(Error::Validation(format!("{} mode needs a model file", self.mode.label())));
        }
        if !(self.rate >= 0.0) || !self.rate.is_finite() {
            return Err(Error::Validation(format!("rate {} must be finite and non-negative", self.rate)));
        }
        if matches!(self.mode, Mode::Exact | Mode::MonteCarlo | Mode::BoundsCheck) {
            if self.n.is_empty() {
                return Err(Error::Validation("no block length given".into()));
            }
            if self.n.contains(&0) {
                return Err(Error::Validation("block lengths must be at least 1".into()));
            }
        }
        if matches!(self.mode, Mode::Exact | Mode::MonteCarlo) && self.decoders.is_empty() {
            return Err(Error::Validation("no decoder given".into()));
        }
        if self.mode == Mode::MonteCarlo && self.trials == 0 {
            return Err(Error::Validation("trials must be at least 1".into()));
        }
        if let Some(a) = self.alpha {
            if !(a > 1.0) {
                return Err(Error::Validation(format!("alpha {a} must exceed 1")));
            }
        }
        if self.decoders.contains(&DecoderName::PlugIn) {
            if self.mode != Mode::MonteCarlo {
                return Err(Error::Validation("the plug-in decoder is only available in monte-carlo mode".into()));
            }
            if self.prior.is_none() {
                return Err(Error::Validation("the plug-in decoder needs a prior file".into()));
            }
        }
        if self.mode == Mode::Parse && (self.y.is_none() || self.z.is_none()) {
            return Err(Error::Validation("parse mode needs y and z".into()));
        }
        Ok(())
    }
}

/// Rows produced by [`run`], plus the number of bound violations found.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub violations: usize,
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    if config.mode == Mode::Parse {
        return run_parse(config);
    }
    let model = load_model(config.model.as_ref().expect("validated"))?;
    match config.mode {
        Mode::Exact => run_exact(config, &model),
        Mode::MonteCarlo => run_monte_carlo(config, &model),
        Mode::BoundsCheck => run_bounds(config, &model),
        Mode::Estimate => run_estimate(config, &model),
        Mode::Parse => unreachable!(),
    }
}

fn threshold(config: &ExperimentConfig, model: &SystemModel, n: usize) -> Result<Alpha> {
    Ok(match config.alpha {
        Some(a) => Alpha::new(a)?,
        None => default_alpha(model, n)?,
    })
}

fn kind_of(config: &ExperimentConfig, model: &SystemModel, n: usize, name: DecoderName) -> Result<DecoderKind> {
    Ok(match name {
        DecoderName::Ml => DecoderKind::MaximumLikelihood,
        DecoderName::Universal | DecoderName::PlugIn => DecoderKind::Universal,
        DecoderName::Threshold => DecoderKind::Threshold(threshold(config, model, n)?),
    })
}

fn name_label(name: DecoderName) -> &'static str {
    match name {
        DecoderName::Ml => "ml",
        DecoderName::Universal => "universal",
        DecoderName::Threshold => "threshold",
        DecoderName::PlugIn => "plug-in",
    }
}

fn report_row(mode: Mode, decoder: &str, r: &ErrorProbReport) -> Row {
    let mut row = Row::new(mode.label(), r.n, decoder, "avg_error", r.value);
    row.rate = Some(r.rate);
    row.m = Some(r.m);
    row.seed = r.seed;
    if let Method::MonteCarlo {
        trials,
        errors,
        interval,
    } = r.method
    {
        row.trials = Some(trials);
        row.errors = Some(errors);
        row.lower = Some(interval.0);
        row.upper = Some(interval.1);
    }
    row
}

fn run_exact(config: &ExperimentConfig, model: &SystemModel) -> Result<Outcome> {
    let mut rows = Vec::new();
    for &n in &config.n {
        for &name in &config.decoders {
            let r = exact_avg_error(model, n, config.rate, kind_of(config, model, n, name)?)?;
            rows.push(report_row(Mode::Exact, name_label(name), &r));
        }
    }
    Ok(Outcome { rows, violations: 0 })
}

fn run_monte_carlo(config: &ExperimentConfig, model: &SystemModel) -> Result<Outcome> {
    let prior = match &config.prior {
        Some(p) if config.decoders.contains(&DecoderName::PlugIn) => Some(load_prior(p)?),
        _ => None,
    };
    let workers = parallel::worker_count()?;
    let mut rows = Vec::new();
    for &n in &config.n {
        let mut specs = Vec::new();
        for &name in &config.decoders {
            specs.push(match name {
                DecoderName::PlugIn => DecoderSpec::plug_in(prior.clone().expect("loaded above")),
                _ => DecoderSpec::new(kind_of(config, model, n, name)?),
            });
        }
        let reports = parallel::monte_carlo(model, n, config.rate, &specs, config.trials, config.seed, workers)?;
        for (&name, r) in config.decoders.iter().zip(&reports) {
            rows.push(report_row(Mode::MonteCarlo, name_label(name), r));
        }
    }
    Ok(Outcome { rows, violations: 0 })
}

fn run_bounds(config: &ExperimentConfig, model: &SystemModel) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut violations = 0;
    for &n in &config.n {
        let verifier = Verifier::new(model, n)?;
        let f = ErrorFunction::new(n, config.rate)?;
        let alpha = threshold(config, model, n)?;
        let mut reports = verifier.sweep(alpha, &f)?;
        for i in 1..=100 {
            for j in 1..=100 {
                reports.push(check_f_ratio(i as f64 / 100.0, j as f64 / 100.0, n, config.rate)?);
            }
        }
        for r in &reports {
            violations += r.is_violation() as usize;
            let decoder = if r.advisory { "bounds-advisory" } else { "bounds" };
            let mut row = Row::new(Mode::BoundsCheck.label(), n, decoder, r.name, r.slack);
            row.lower = Some(r.left);
            row.upper = Some(r.right);
            row.errors = Some(!r.holds as u64);
            row.rate = Some(config.rate);
            rows.push(row);
        }
        let ladder = epsilon_ladder(model, n)?;
        let mut terms = vec![
            ("cbar", ladder.cbar as f64),
            ("ln_alpha", alpha.ln()),
            ("eps2_prime", ladder.eps2_prime),
            ("eps2", ladder.eps2),
            ("eps3", ladder.eps3),
        ];
        if let Some(e) = ladder.eps_n {
            terms.push(("eps_n", e));
        }
        if let (Some(k), Some(t)) = (ladder.kappa, ladder.total) {
            terms.push(("kappa", k));
            terms.push(("eps_total", t));
        }
        for (metric, value) in terms {
            rows.push(Row::new(Mode::BoundsCheck.label(), n, "epsilon", metric, value));
        }
    }
    Ok(Outcome { rows, violations })
}

fn run_estimate(config: &ExperimentConfig, model: &SystemModel) -> Result<Outcome> {
    let e = &config.estimate;
    let sequences = match &e.training {
        Some(path) => load_codebook(path)?.words,
        None => {
            let mut r = rng::stream_rng(config.seed, 0);
            (0..e.sequences)
                .map(|_| {
                    let mut s = Vec::with_capacity(e.length);
                    model.sample_y_into(e.length, &mut r, &mut s);
                    s
                })
                .collect()
        }
    };
    let cfg = EstimationConfig {
        hidden: e.hidden,
        floor: e.floor,
        max_iterations: e.max_iterations,
        tolerance: e.tolerance,
        seed: config.seed,
    };
    let est = baum_welch(&sequences, model.alphabet().y_size, &cfg)?;
    if let Some(path) = &e.prior_out {
        save_prior(&est.kernel, path)?;
    }
    let length = sequences.first().map_or(0, Vec::len);
    let mode = Mode::Estimate.label();
    let mut rows: Vec<Row> = est
        .trace
        .iter()
        .enumerate()
        .map(|(i, &ll)| {
            let mut row = Row::new(mode, length, "trace", &format!("log_likelihood_{i}"), ll);
            row.seed = Some(config.seed);
            row
        })
        .collect();
    let truth: f64 = sequences.iter().map(|s| model.induced().hmm().log_prob(s)).sum();
    for (metric, value) in [
        ("true_log_likelihood", truth),
        ("iterations", (est.trace.len() - 1) as f64),
        ("converged", est.converged as u8 as f64),
        ("min_entry", est.kernel.min_entry()),
    ] {
        let mut row = Row::new(mode, length, "baum-welch", metric, value);
        row.seed = Some(config.seed);
        rows.push(row);
    }
    Ok(Outcome { rows, violations: 0 })
}

/// Joint parse summary of a pair of digit strings.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseSummary {
    pub boundaries: Vec<usize>,
    pub c_yz: usize,
    pub c_z: usize,
    pub c_ell: Vec<usize>,
    pub v: f64,
    pub cbar: usize,
}

pub fn parse_pair(y: &str, z: &str) -> Result<ParseSummary> {
    let (y, z) = (word_from_str(y)?, word_from_str(z)?);
    let p = joint_parse(&y, &z)?;
    let ys = y.iter().copied().max().unwrap_or(0) as usize + 1;
    let zs = z.iter().copied().max().unwrap_or(0) as usize + 1;
    Ok(ParseSummary {
        boundaries: p.boundaries().to_vec(),
        c_yz: p.c_yz(),
        c_z: p.c_z(),
        c_ell: p.c_ell().to_vec(),
        v: p.v(),
        cbar: cbar(y.len(), ys.max(2) * zs.max(2)),
    })
}

fn run_parse(config: &ExperimentConfig) -> Result<Outcome> {
    let (y, z) = (config.y.as_deref().expect("validated"), config.z.as_deref().expect("validated"));
    let s = parse_pair(y, z)?;
    let n = s.boundaries.last().copied().unwrap_or(0);
    let mode = Mode::Parse.label();
    let mut rows = vec![
        Row::new(mode, n, "lz", "c_yz", s.c_yz as f64),
        Row::new(mode, n, "lz", "c_z", s.c_z as f64),
    ];
    for (l, &c) in s.c_ell.iter().enumerate() {
        rows.push(Row::new(mode, n, "lz", &format!("c_ell_{}", l + 1), c as f64));
    }
    rows.push(Row::new(mode, n, "lz", "v", s.v));
    rows.push(Row::new(mode, n, "lz", "cbar", s.cbar as f64));
    Ok(Outcome { rows, violations: 0 })
}
