use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use super::hmm::{Extremum, ForwardScratch, HmmKernel};
use super::kernels::{AlphabetSpec, ChannelKernel, InducedKernel, JointKernel, SourceKernel, StateSpec};
use crate::math::log;
use crate::{rng, Error, Result};

/// Hidden states at the phrase ends `n_1, ..., n_c`, one flattened state
/// index per phrase. The state at `n_0 = 0` is the fixed initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryStates {
    pub states: Vec<usize>,
}

/// One realization of the clean codeword, noisy codeword and channel output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Triple {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub z: Vec<u8>,
}

/// The complete source / secondary channel / primary channel system together
/// with its induced kernels. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    alphabet: AlphabetSpec,
    states: StateSpec,
    source: SourceKernel,
    secondary: ChannelKernel,
    primary: ChannelKernel,
    induced: InducedKernel,
    joint: JointKernel,
}

impl SystemModel {
    pub fn new(
        alphabet: AlphabetSpec,
        states: StateSpec,
        source: SourceKernel,
        secondary: ChannelKernel,
        primary: ChannelKernel,
    ) -> Result<Self> {
        states.validate()?;
        let shape = |kernel, ok: bool, detail: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Shape {
                    kernel,
                    detail: detail.into(),
                })
            }
        };
        shape(
            "G",
            source.x_size() == alphabet.x_size && source.omega_size() == states.omega_size,
            "does not match |X| and |Omega|",
        )?;
        shape(
            "V",
            secondary.input_size() == alphabet.x_size
                && secondary.output_size() == alphabet.y_size
                && secondary.state_size() == states.theta_size,
            "does not match |X|, |Y| and |Theta|",
        )?;
        shape(
            "W",
            primary.input_size() == alphabet.x_size
                && primary.output_size() == alphabet.z_size
                && primary.state_size() == states.sigma_size,
            "does not match |X|, |Z| and |Sigma|",
        )?;
        shape(
            "Pi",
            alphabet.y_size * alphabet.z_size <= 256 && alphabet.x_size <= 256,
            "alphabets must fit in a byte (|Y||Z| <= 256)",
        )?;
        let induced = InducedKernel::build(&source, &secondary, &states)?;
        let joint = JointKernel::build(&source, &secondary, &primary, &states)?;
        Ok(Self {
            alphabet,
            states,
            source,
            secondary,
            primary,
            induced,
            joint,
        })
    }

    /// Single-state model from a source distribution `g[x]` and channel
    /// matrices `v[x][y]`, `w[x][z]` (flattened row-major).
    pub fn memoryless(g: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let x = g.len();
        if x == 0 || v.len() % x != 0 || w.len() % x != 0 {
            return Err(Error::Shape {
                kernel: "memoryless model",
                detail: "channel matrices must have |X| rows".into(),
            });
        }
        let alphabet = AlphabetSpec {
            x_size: x,
            y_size: v.len() / x,
            z_size: w.len() / x,
        };
        let states = StateSpec::single();
        Self::new(
            alphabet,
            states,
            SourceKernel::new(x, 1, g)?,
            ChannelKernel::secondary(x, alphabet.y_size, 1, v)?,
            ChannelKernel::primary(x, alphabet.z_size, 1, w)?,
        )
    }

    /// Uniform binary source sent through binary symmetric secondary and
    /// primary channels with the given crossover probabilities.
    pub fn binary_symmetric(secondary_flip: f64, primary_flip: f64) -> Result<Self> {
        let (p, q) = (secondary_flip, primary_flip);
        Self::memoryless(
            vec![0.5, 0.5],
            vec![1.0 - p, p, p, 1.0 - p],
            vec![1.0 - q, q, q, 1.0 - q],
        )
    }

    /// Model with every kernel row drawn from a flat Dirichlet distribution.
    pub fn random(seed: u64, alphabet: AlphabetSpec, states: StateSpec) -> Result<Self> {
        let mut r = rng::stream_rng(seed, 0x6d6f64656c);
        let mut draw = |rows: usize, width: usize| -> Vec<f64> {
            let mut out = Vec::with_capacity(rows * width);
            for _ in 0..rows {
                let row: Vec<f64> = (0..width)
                    .map(|_| -log(1.0 - rng::uniform(&mut r)))
                    .collect();
                let s: f64 = row.iter().sum();
                out.extend(row.iter().map(|v| v / s));
            }
            out
        };
        let g = draw(states.omega_size, alphabet.x_size * states.omega_size);
        let v = draw(
            alphabet.x_size * states.theta_size,
            alphabet.y_size * states.theta_size,
        );
        let w = draw(
            alphabet.x_size * states.sigma_size,
            alphabet.z_size * states.sigma_size,
        );
        Self::new(
            alphabet,
            states,
            SourceKernel::new(alphabet.x_size, states.omega_size, g)?,
            ChannelKernel::secondary(alphabet.x_size, alphabet.y_size, states.theta_size, v)?,
            ChannelKernel::primary(alphabet.x_size, alphabet.z_size, states.sigma_size, w)?,
        )
    }

    pub fn alphabet(&self) -> AlphabetSpec {
        self.alphabet
    }

    pub fn states(&self) -> StateSpec {
        self.states
    }

    pub fn source(&self) -> &SourceKernel {
        &self.source
    }

    pub fn secondary(&self) -> &ChannelKernel {
        &self.secondary
    }

    pub fn primary(&self) -> &ChannelKernel {
        &self.primary
    }

    pub fn induced(&self) -> &InducedKernel {
        &self.induced
    }

    pub fn joint(&self) -> &JointKernel {
        &self.joint
    }

    /// `|Theta x Sigma x Omega|`.
    pub fn k(&self) -> usize {
        self.joint.k()
    }

    pub fn pi_min(&self) -> f64 {
        self.induced.pi_min()
    }

    pub fn check_positivity(&self) -> Result<f64> {
        self.induced.check_positivity()
    }

    /// Validates symbol ranges of a `(y, z)` pair.
    pub fn check_pair(&self, y: &[u8], z: &[u8]) -> Result<()> {
        if y.len() != z.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: z.len(),
            });
        }
        self.check_y(y)?;
        check_range(z, self.alphabet.z_size)
    }

    pub fn check_y(&self, y: &[u8]) -> Result<()> {
        check_range(y, self.alphabet.y_size)
    }

    /// `ln P(y)` by a forward recursion over `(theta, omega)`.
    pub fn log_prob_y(&self, y: &[u8]) -> Result<f64> {
        self.check_y(y)?;
        Ok(self.induced.hmm().log_prob(y))
    }

    /// `ln P(y, z)` by a forward recursion over `(theta, sigma, omega)`.
    pub fn log_prob_yz(&self, y: &[u8], z: &[u8]) -> Result<f64> {
        self.check_pair(y, z)?;
        let mut pairs = Vec::with_capacity(y.len());
        self.joint.pairs_into(y, z, &mut pairs);
        Ok(self.joint.hmm().log_prob(&pairs))
    }

    /// `ln P(z | y) = ln P(y, z) - ln P(y)`.
    pub fn log_cond_z_given_y(&self, y: &[u8], z: &[u8]) -> Result<f64> {
        let ly = self.log_prob_y(y)?;
        if ly == f64::NEG_INFINITY {
            return Err(Error::ConditioningOnNull);
        }
        Ok(self.log_prob_yz(y, z)? - ly)
    }

    /// Samples `(x, y, z)` by running the source and both channels forward.
    pub fn sample_triple(&self, n: usize, seed: u64) -> Triple {
        self.sample_triple_with(n, &mut rng::stream_rng(seed, 0))
    }

    pub fn sample_triple_with<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Triple {
        let mut sampler = TripleSampler::new(self);
        let mut t = Triple {
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
        };
        sampler.sample_into(n, rng, &mut t);
        t
    }

    /// Samples a noisy codeword `y ~ P(y)` directly from the induced kernel
    /// (the clean codeword is marginalized out).
    pub fn sample_y_into<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Vec<u8>) {
        self.induced.hmm().sample_into(n, rng, out);
    }

    /// Boundary states maximizing `P(y, z, t)` over the joint states at the
    /// phrase ends, with `ln P(y, z, t_hat)`.
    pub fn t_hat(&self, y: &[u8], z: &[u8], boundaries: &[usize]) -> Result<(BoundaryStates, f64)> {
        self.check_pair(y, z)?;
        check_boundaries(boundaries, y.len())?;
        let mut pairs = Vec::with_capacity(y.len());
        self.joint.pairs_into(y, z, &mut pairs);
        let (states, v) = self
            .joint
            .hmm()
            .phrase_extremum(&pairs, boundaries, Extremum::Max);
        Ok((BoundaryStates { states }, v))
    }

    /// Boundary states maximizing `P(y, s)` over `(theta, omega)` at the
    /// phrase ends, with `ln P(y, s_tilde)`.
    pub fn s_tilde(&self, y: &[u8], boundaries: &[usize]) -> Result<(BoundaryStates, f64)> {
        self.check_y(y)?;
        check_boundaries(boundaries, y.len())?;
        let (states, v) = self
            .induced
            .hmm()
            .phrase_extremum(y, boundaries, Extremum::Max);
        Ok((BoundaryStates { states }, v))
    }

    /// `min_s ln P(y, s)` and its minimizer: the worst boundary assignment.
    pub fn s_worst(&self, y: &[u8], boundaries: &[usize]) -> Result<(BoundaryStates, f64)> {
        self.check_y(y)?;
        check_boundaries(boundaries, y.len())?;
        let (states, v) = self
            .induced
            .hmm()
            .phrase_extremum(y, boundaries, Extremum::Min);
        Ok((BoundaryStates { states }, v))
    }

    /// `ln P(y, s)`: product over phrases of within-phrase forward sums
    /// pinned at the boundary states.
    pub fn log_prob_y_s(&self, y: &[u8], boundaries: &[usize], s: &BoundaryStates) -> Result<f64> {
        self.check_y(y)?;
        check_boundaries(boundaries, y.len())?;
        check_pinned(s, boundaries, self.induced.state_count())?;
        Ok(self.induced.hmm().pinned_log_prob(y, boundaries, &s.states))
    }

    /// `ln P(y, z, t)` with joint states pinned at the phrase ends.
    pub fn log_prob_yz_t(
        &self,
        y: &[u8],
        z: &[u8],
        boundaries: &[usize],
        t: &BoundaryStates,
    ) -> Result<f64> {
        self.check_pair(y, z)?;
        check_boundaries(boundaries, y.len())?;
        check_pinned(t, boundaries, self.k())?;
        let mut pairs = Vec::with_capacity(y.len());
        self.joint.pairs_into(y, z, &mut pairs);
        Ok(self.joint.hmm().pinned_log_prob(&pairs, boundaries, &t.states))
    }
}

impl StateSpec {
    fn validate(&self) -> Result<()> {
        for (which, index, size) in [
            ("omega", self.omega0, self.omega_size),
            ("sigma", self.sigma0, self.sigma_size),
            ("theta", self.theta0, self.theta_size),
        ] {
            if size == 0 || index >= size {
                return Err(Error::InitialState { which, index, size });
            }
        }
        Ok(())
    }
}

fn check_range(seq: &[u8], size: usize) -> Result<()> {
    match seq.iter().find(|&&s| s as usize >= size) {
        Some(&s) => Err(Error::SymbolOutOfRange {
            symbol: s as usize,
            size,
        }),
        None => Ok(()),
    }
}

fn check_boundaries(boundaries: &[usize], n: usize) -> Result<()> {
    let ok = boundaries.len() >= 2
        && boundaries[0] == 0
        && *boundaries.last().unwrap() == n
        && boundaries.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::Shape {
            kernel: "phrase boundaries",
            detail: alloc::format!("{boundaries:?} is not 0 = n_0 < ... < n_c = {n}"),
        })
    }
}

fn check_pinned(s: &BoundaryStates, boundaries: &[usize], k: usize) -> Result<()> {
    if s.states.len() + 1 != boundaries.len() || s.states.iter().any(|&v| v >= k) {
        return Err(Error::Shape {
            kernel: "boundary states",
            detail: alloc::format!(
                "{} states for {} phrases over {k} states",
                s.states.len(),
                boundaries.len() - 1
            ),
        });
    }
    Ok(())
}

/// Physical-chain sampler for `(x, y, z)` with precomputed cumulative rows.
pub(crate) struct TripleSampler<'a> {
    model: &'a SystemModel,
    g_cdf: Vec<f64>,
    v_cdf: Vec<f64>,
    w_cdf: Vec<f64>,
}

fn cumulative(table: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    table
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

fn row_cdfs(table: &[f64], width: usize) -> Vec<f64> {
    table.chunks_exact(width).flat_map(cumulative).collect()
}

impl<'a> TripleSampler<'a> {
    pub(crate) fn new(model: &'a SystemModel) -> Self {
        let a = model.alphabet;
        let s = model.states;
        Self {
            model,
            g_cdf: row_cdfs(model.source.table(), a.x_size * s.omega_size),
            v_cdf: row_cdfs(model.secondary.table(), a.y_size * s.theta_size),
            w_cdf: row_cdfs(model.primary.table(), a.z_size * s.sigma_size),
        }
    }

    pub(crate) fn sample_into<R: RngCore + ?Sized>(&mut self, n: usize, rng: &mut R, out: &mut Triple) {
        let a = self.model.alphabet;
        let s = self.model.states;
        let (gw, vw, ww) = (
            a.x_size * s.omega_size,
            a.y_size * s.theta_size,
            a.z_size * s.sigma_size,
        );
        let (mut omega, mut theta, mut sigma) = (s.omega0, s.theta0, s.sigma0);
        out.x.clear();
        out.y.clear();
        out.z.clear();
        for _ in 0..n {
            let cell = rng::pick(&self.g_cdf[omega * gw..(omega + 1) * gw], rng::uniform(rng));
            let x = cell / s.omega_size;
            omega = cell % s.omega_size;
            let row = x * s.theta_size + theta;
            let cell = rng::pick(&self.v_cdf[row * vw..(row + 1) * vw], rng::uniform(rng));
            let y = cell / s.theta_size;
            theta = cell % s.theta_size;
            let row = x * s.sigma_size + sigma;
            let cell = rng::pick(&self.w_cdf[row * ww..(row + 1) * ww], rng::uniform(rng));
            let z = cell / s.sigma_size;
            sigma = cell % s.sigma_size;
            out.x.push(x as u8);
            out.y.push(y as u8);
            out.z.push(z as u8);
        }
    }
}

/// Log-probability evaluator with reusable buffers for hot loops.
#[derive(Default, Debug, Clone)]
pub struct LogProbCache {
    scratch: ForwardScratch,
    pairs: Vec<u8>,
}

impl LogProbCache {
    /// `ln P(y)` under an arbitrary codeword prior kernel.
    pub fn log_prob(&mut self, prior: &HmmKernel, y: &[u8]) -> f64 {
        prior.log_prob_with(y, &mut self.scratch)
    }

    /// `ln P(y, z)` under the model's joint kernel.
    pub fn log_prob_yz(&mut self, model: &SystemModel, y: &[u8], z: &[u8]) -> f64 {
        model.joint.pairs_into(y, z, &mut self.pairs);
        model
            .joint
            .hmm()
            .log_prob_with(&self.pairs, &mut self.scratch)
    }
}
