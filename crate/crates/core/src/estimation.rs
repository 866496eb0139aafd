//! Baum-Welch estimation of the codeword kernel `pi(y, h | h')` from
//! observed noisy codewords, with every parameter held at or above a floor.
//!
//! The hidden state `h` stands for the pair `(theta, omega)`; only its
//! count `H` is configured. Each M-step maximizes the expected complete-data
//! log-likelihood subject to the floor: within a row, entries are
//! proportional to their expected counts except those that would fall
//! below the floor, which sit exactly on it. Since the previous parameters
//! are feasible, the log-likelihood never decreases.

use alloc::vec;
use alloc::vec::Vec;

use crate::decoding::{decode_with_prior, Codebook, Decision};
use crate::math::log;
use crate::model::HmmKernel;
use crate::{rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimationConfig {
    /// Number of hidden states `H`.
    pub hidden: usize,
    /// Smallest allowed parameter value.
    pub floor: f64,
    pub max_iterations: usize,
    /// Stop once an iteration improves the log-likelihood by less than this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            hidden: 2,
            floor: 1e-6,
            max_iterations: 200,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl EstimationConfig {
    fn validate(&self, symbols: usize) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::Domain {
                what: "hidden states",
                value: 0.0,
            });
        }
        if !(self.floor > 0.0) {
            return Err(Error::Domain {
                what: "floor",
                value: self.floor,
            });
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain {
                what: "tolerance",
                value: self.tolerance,
            });
        }
        let mass = self.floor * (self.hidden * symbols) as f64;
        if mass > 1.0 {
            return Err(Error::Degenerate(alloc::format!(
                "floor mass {mass} over {} entries per row exceeds 1",
                self.hidden * symbols
            )));
        }
        Ok(())
    }
}

/// Result of a Baum-Welch run.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub kernel: HmmKernel,
    /// Log-likelihood (nats) of the training data under the parameters at
    /// the start of each iteration, followed by the final parameters.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Total log-likelihood of `sequences` under `kernel`.
pub fn log_likelihood(kernel: &HmmKernel, sequences: &[Vec<u8>]) -> f64 {
    sequences.iter().map(|s| kernel.log_prob(s)).sum()
}

/// Feasible point of `max sum_j w_j ln p_j` over `p >= floor`, `sum p = 1`:
/// `p_j = max(floor, w_j / lambda)`. A row with no weight keeps `fallback`.
pub fn floored_normalize(weights: &[f64], floor: f64, fallback: &[f64], out: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        out.copy_from_slice(fallback);
        return;
    }
    let mut clamped = vec![false; weights.len()];
    loop {
        let free_weight: f64 = weights
            .iter()
            .zip(&clamped)
            .filter(|(_, &c)| !c)
            .map(|(w, _)| w)
            .sum();
        let n_clamped = clamped.iter().filter(|&&c| c).count();
        let free_mass = 1.0 - floor * n_clamped as f64;
        let mut changed = false;
        for (j, &w) in weights.iter().enumerate() {
            if !clamped[j] && w * free_mass < floor * free_weight {
                clamped[j] = true;
                changed = true;
            }
        }
        if !changed {
            for (j, &w) in weights.iter().enumerate() {
                out[j] = if clamped[j] {
                    floor
                } else {
                    w * free_mass / free_weight
                };
            }
            return;
        }
    }
}

fn initial_table(hidden: usize, symbols: usize, floor: f64, seed: u64) -> Vec<f64> {
    let width = hidden * symbols;
    let mut r = rng::stream_rng(seed, 0x6573_7469_6d61_7465);
    let mut table = vec![0.0; hidden * width];
    for row in table.chunks_exact_mut(width) {
        let w: Vec<f64> = (0..width)
            .map(|_| 1.0 + 0.2 * (rng::uniform(&mut r) - 0.5))
            .collect();
        let uniform = vec![1.0 / width as f64; width];
        floored_normalize(&w, floor, &uniform, row);
    }
    table
}

/// Expected transition counts `[h'][y][h]` and log-likelihood of one
/// sequence, by scaled forward-backward.
fn accumulate(kernel: &HmmKernel, seq: &[u8], counts: &mut [f64]) -> f64 {
    let k = kernel.states();
    let n = seq.len();
    if n == 0 {
        return 0.0;
    }
    let mut alpha = vec![0.0; (n + 1) * k];
    let mut scale = vec![0.0; n + 1];
    alpha[kernel.initial()] = 1.0;
    scale[0] = 1.0;
    for t in 0..n {
        let y = seq[t] as usize;
        let (head, tail) = alpha.split_at_mut((t + 1) * k);
        let prev = &head[t * k..];
        let next = &mut tail[..k];
        for (p, &a) in prev.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (h, slot) in next.iter_mut().enumerate() {
                *slot += a * kernel.prob(p, y, h);
            }
        }
        let s: f64 = next.iter().sum();
        scale[t + 1] = s;
        if s > 0.0 {
            next.iter_mut().for_each(|v| *v /= s);
        }
    }
    let ll: f64 = scale[1..].iter().map(|&s| log(s)).sum();
    if !ll.is_finite() {
        return ll;
    }
    let mut beta = vec![1.0; k];
    let mut beta_prev = vec![0.0; k];
    let symbols = kernel.symbols();
    for t in (0..n).rev() {
        let y = seq[t] as usize;
        let a_prev = &alpha[t * k..(t + 1) * k];
        let s = scale[t + 1];
        for (p, &a) in a_prev.iter().enumerate() {
            let mut b = 0.0;
            for h in 0..k {
                let m = kernel.prob(p, y, h) * beta[h] / s;
                counts[(p * symbols + y) * k + h] += a * m;
                b += m;
            }
            beta_prev[p] = b;
        }
        core::mem::swap(&mut beta, &mut beta_prev);
    }
    ll
}

/// Runs floored Baum-Welch on `sequences` over a `symbols`-ary alphabet.
pub fn baum_welch(sequences: &[Vec<u8>], symbols: usize, config: &EstimationConfig) -> Result<Estimate> {
    if sequences.is_empty() || sequences.iter().all(Vec::is_empty) {
        return Err(Error::Empty("training sequences"));
    }
    if symbols == 0 || symbols > 256 {
        return Err(Error::Domain {
            what: "symbols",
            value: symbols as f64,
        });
    }
    for s in sequences {
        if let Some(&bad) = s.iter().find(|&&v| v as usize >= symbols) {
            return Err(Error::SymbolOutOfRange { symbol: bad as usize, size: symbols });
        }
    }
    config.validate(symbols)?;
    let h = config.hidden;
    let width = h * symbols;
    let mut kernel = HmmKernel::new("pi_hat", h, symbols, 0, initial_table(h, symbols, config.floor, config.seed))?;
    let mut trace = Vec::new();
    let mut counts = vec![0.0; h * width];
    let mut converged = false;
    for _ in 0..config.max_iterations {
        counts.iter_mut().for_each(|c| *c = 0.0);
        let ll: f64 = sequences.iter().map(|s| accumulate(&kernel, s, &mut counts)).sum();
        if let Some(&last) = trace.last() {
            if ll - last < config.tolerance {
                trace.push(ll);
                converged = true;
                break;
            }
        }
        trace.push(ll);
        let mut table = vec![0.0; h * width];
        for p in 0..h {
            let row = p * width..(p + 1) * width;
            floored_normalize(&counts[row.clone()], config.floor, &kernel.table()[row.clone()], &mut table[row]);
        }
        kernel = HmmKernel::new("pi_hat", h, symbols, 0, table)?;
    }
    if !converged {
        trace.push(log_likelihood(&kernel, sequences));
    }
    Ok(Estimate {
        kernel,
        trace,
        converged,
    })
}

/// Universal decoding with `ln P(y)` taken from the estimated kernel.
pub fn plug_in_decode(estimate: &HmmKernel, codebook: &Codebook, z: &[u8]) -> Result<Decision> {
    decode_with_prior(estimate, codebook, z)
}
