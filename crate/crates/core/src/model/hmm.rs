//! Hidden Markov kernels whose transitions emit symbols,
//! `p(symbol, next | prev)`, with a fixed initial state.
//!
//! Both the induced codeword kernel `pi(y, theta, omega | theta', omega')` and
//! the joint kernel `Pi(y, z, theta, sigma, omega | theta', sigma', omega')`
//! have this form after flattening the state tuple into one index.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::math::{fabs, log};
use crate::{rng, Error, Result};

/// Row-sum tolerance for kernel validation.
pub const ROW_TOLERANCE: f64 = 1e-12;

/// Single-step probabilities below this are folded into the log
/// accumulator immediately rather than multiplied into the running scale.
const SCALE_FLOOR: f64 = 1e-250;

#[derive(Clone, Debug, PartialEq)]
pub struct HmmKernel {
    states: usize,
    symbols: usize,
    initial: usize,
    /// `[prev][symbol][next]`, row-major.
    table: Vec<f64>,
    /// Per `prev`, cumulative weights over `(symbol, next)`.
    cdf: Vec<f64>,
}

/// Reusable buffers for forward recursions.
#[derive(Clone, Debug, Default)]
pub struct ForwardScratch {
    cur: Vec<f64>,
    next: Vec<f64>,
}

/// Which extremum a boundary-state dynamic program looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl HmmKernel {
    /// Builds a kernel from `[prev][symbol][next]` probabilities. Rows must sum
    /// to one within [`ROW_TOLERANCE`]; they are then renormalized exactly.
    pub fn new(
        kernel: &'static str,
        states: usize,
        symbols: usize,
        initial: usize,
        mut table: Vec<f64>,
    ) -> Result<Self> {
        if states == 0 || symbols == 0 {
            return Err(Error::Shape {
                kernel,
                detail: format!("states = {states}, symbols = {symbols}"),
            });
        }
        if table.len() != states * symbols * states {
            return Err(Error::Shape {
                kernel,
                detail: format!(
                    "expected {} entries, found {}",
                    states * symbols * states,
                    table.len()
                ),
            });
        }
        if initial >= states {
            return Err(Error::InitialState {
                which: kernel,
                index: initial,
                size: states,
            });
        }
        let width = symbols * states;
        for (prev, row) in table.chunks_exact_mut(width).enumerate() {
            normalize_row(kernel, row, || format!("prev state {prev}"))?;
        }
        let cdf = table
            .chunks_exact(width)
            .flat_map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(move |&p| {
                        acc += p;
                        acc
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            states,
            symbols,
            initial,
            table,
            cdf,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn prob(&self, prev: usize, symbol: usize, next: usize) -> f64 {
        self.table[(prev * self.symbols + symbol) * self.states + next]
    }

    /// `p(symbol, . | prev)` over next states.
    #[inline]
    pub fn row(&self, prev: usize, symbol: usize) -> &[f64] {
        let start = (prev * self.symbols + symbol) * self.states;
        &self.table[start..start + self.states]
    }

    /// Smallest entry of the table.
    pub fn min_entry(&self) -> f64 {
        self.table.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_symbols(&self, seq: &[u8]) -> Result<()> {
        match seq.iter().find(|&&s| s as usize >= self.symbols) {
            Some(&s) => Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                size: self.symbols,
            }),
            None => Ok(()),
        }
    }

    /// Natural log of the probability of `seq` from the initial state,
    /// summing over all state paths.
    pub fn log_prob(&self, seq: &[u8]) -> f64 {
        self.log_prob_with(seq, &mut ForwardScratch::default())
    }

    /// [`Self::log_prob`] with caller-provided buffers.
    ///
    /// The recursion runs on normalized linear-domain vectors and accumulates
    /// the normalizers in log domain, which is equivalent to a log-sum-exp
    /// recursion without a logarithm per state.
    pub fn log_prob_with(&self, seq: &[u8], scratch: &mut ForwardScratch) -> f64 {
        let k = self.states;
        if k == 1 {
            return self.single_state_log_prob(seq);
        }
        scratch.cur.clear();
        scratch.cur.resize(k, 0.0);
        scratch.next.clear();
        scratch.next.resize(k, 0.0);
        scratch.cur[self.initial] = 1.0;
        let mut log_total = 0.0;
        let mut scale = 1.0;
        for &sym in seq {
            let sym = sym as usize;
            scratch.next.iter_mut().for_each(|v| *v = 0.0);
            for (prev, &mass) in scratch.cur.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let row = self.row(prev, sym);
                for (acc, &p) in scratch.next.iter_mut().zip(row) {
                    *acc += mass * p;
                }
            }
            let norm: f64 = scratch.next.iter().sum();
            if norm == 0.0 {
                return f64::NEG_INFINITY;
            }
            let inv = 1.0 / norm;
            scratch.next.iter_mut().for_each(|v| *v *= inv);
            core::mem::swap(&mut scratch.cur, &mut scratch.next);
            accumulate(&mut log_total, &mut scale, norm);
        }
        log_total + log(scale)
    }

    fn single_state_log_prob(&self, seq: &[u8]) -> f64 {
        let mut log_total = 0.0;
        let mut scale = 1.0;
        for &sym in seq {
            let p = self.table[sym as usize];
            if p == 0.0 {
                return f64::NEG_INFINITY;
            }
            accumulate(&mut log_total, &mut scale, p);
        }
        log_total + log(scale)
    }

    /// Log transfer matrix of a segment: entry `[start * states + end]` is the
    /// log probability of emitting `segment` starting in `start` and ending
    /// in `end`, summed over interior states.
    pub fn segment_log_transfer(&self, segment: &[u8]) -> Vec<f64> {
        let k = self.states;
        let mut out = vec![f64::NEG_INFINITY; k * k];
        let mut cur = vec![0.0; k];
        let mut next = vec![0.0; k];
        for start in 0..k {
            cur.iter_mut().for_each(|v| *v = 0.0);
            cur[start] = 1.0;
            let mut log_scale = 0.0;
            let mut dead = false;
            for &sym in segment {
                next.iter_mut().for_each(|v| *v = 0.0);
                for (prev, &mass) in cur.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    for (acc, &p) in next.iter_mut().zip(self.row(prev, sym as usize)) {
                        *acc += mass * p;
                    }
                }
                let norm: f64 = next.iter().sum();
                if norm == 0.0 {
                    dead = true;
                    break;
                }
                next.iter_mut().for_each(|v| *v /= norm);
                log_scale += log(norm);
                core::mem::swap(&mut cur, &mut next);
            }
            if dead {
                continue;
            }
            for (end, &mass) in cur.iter().enumerate() {
                if mass > 0.0 {
                    out[start * k + end] = log(mass) + log_scale;
                }
            }
        }
        out
    }

    /// Transfer matrices for every phrase delimited by `boundaries`
    /// (`0 = n_0 < n_1 < ... < n_c = len`).
    pub fn phrase_log_transfers(&self, seq: &[u8], boundaries: &[usize]) -> Vec<Vec<f64>> {
        boundaries
            .windows(2)
            .map(|w| self.segment_log_transfer(&seq[w[0]..w[1]]))
            .collect()
    }

    /// Log probability of `seq` jointly with the states at the phrase ends
    /// `n_1..n_c` pinned to `states` (one per phrase).
    pub fn pinned_log_prob(&self, seq: &[u8], boundaries: &[usize], states: &[usize]) -> f64 {
        assert_eq!(states.len() + 1, boundaries.len());
        let k = self.states;
        let mut prev = self.initial;
        let mut total = 0.0;
        for (w, &end) in boundaries.windows(2).zip(states) {
            let t = self.segment_log_transfer(&seq[w[0]..w[1]]);
            total += t[prev * k + end];
            prev = end;
        }
        total
    }

    /// Boundary-state assignment (states at `n_1..n_c`) maximizing or
    /// minimizing the pinned probability, with its log value.
    ///
    /// Among assignments within `1e-12` relative of the optimum, the
    /// lexicographically smallest is returned (earliest boundary first).
    pub fn phrase_extremum(
        &self,
        seq: &[u8],
        boundaries: &[usize],
        which: Extremum,
    ) -> (Vec<usize>, f64) {
        let transfers = self.phrase_log_transfers(seq, boundaries);
        extremal_path(&transfers, self.states, self.initial, which)
    }

    /// Draws `n` symbols from the initial state, appending to `out`.
    pub fn sample_into<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Vec<u8>) {
        let width = self.symbols * self.states;
        let mut state = self.initial;
        for _ in 0..n {
            let cdf = &self.cdf[state * width..(state + 1) * width];
            let cell = rng::pick(cdf, rng::uniform(rng));
            out.push((cell / self.states) as u8);
            state = cell % self.states;
        }
    }

    /// Draws `n` symbols and the state after each.
    pub fn sample_with_states<R: RngCore + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> (Vec<u8>, Vec<usize>) {
        let width = self.symbols * self.states;
        let mut state = self.initial;
        let mut symbols = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            let cdf = &self.cdf[state * width..(state + 1) * width];
            let cell = rng::pick(cdf, rng::uniform(rng));
            symbols.push((cell / self.states) as u8);
            state = cell % self.states;
            states.push(state);
        }
        (symbols, states)
    }
}

#[inline]
fn accumulate(log_total: &mut f64, scale: &mut f64, factor: f64) {
    if factor < SCALE_FLOOR {
        *log_total += log(factor);
        return;
    }
    *scale *= factor;
    if *scale < SCALE_FLOOR {
        *log_total += log(*scale);
        *scale = 1.0;
    }
}

pub(crate) fn normalize_row(
    kernel: &'static str,
    row: &mut [f64],
    describe: impl Fn() -> alloc::string::String,
) -> Result<()> {
    if let Some(&bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::Entry {
            kernel,
            row: describe(),
            value: bad,
        });
    }
    let sum: f64 = row.iter().sum();
    if fabs(sum - 1.0) > ROW_TOLERANCE {
        return Err(Error::RowSum {
            kernel,
            row: describe(),
            sum,
        });
    }
    row.iter_mut().for_each(|p| *p /= sum);
    Ok(())
}

fn better(which: Extremum, candidate: f64, incumbent: f64) -> bool {
    match which {
        Extremum::Max => candidate > incumbent,
        Extremum::Min => candidate < incumbent,
    }
}

fn near(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    fabs(a - b) <= 1e-12 * (1.0 + fabs(a).max(fabs(b)))
}

/// Optimal path through layered transfer matrices starting from `initial`,
/// ties resolved towards the lexicographically smallest path.
pub(crate) fn extremal_path(
    transfers: &[Vec<f64>],
    k: usize,
    initial: usize,
    which: Extremum,
) -> (Vec<usize>, f64) {
    let c = transfers.len();
    let worst = match which {
        Extremum::Max => f64::NEG_INFINITY,
        Extremum::Min => f64::INFINITY,
    };
    // to_go[i][s]: best continuation value from state s at boundary i.
    let mut to_go = vec![vec![0.0; k]; c + 1];
    for i in (0..c).rev() {
        for s in 0..k {
            let mut best = worst;
            for e in 0..k {
                let v = transfers[i][s * k + e] + to_go[i + 1][e];
                if better(which, v, best) {
                    best = v;
                }
            }
            to_go[i][s] = best;
        }
    }
    let mut path = Vec::with_capacity(c);
    let mut prev = initial;
    for (i, t) in transfers.iter().enumerate() {
        let target = to_go[i][prev];
        let choice = (0..k)
            .find(|&e| near(t[prev * k + e] + to_go[i + 1][e], target))
            .unwrap_or(0);
        path.push(choice);
        prev = choice;
    }
    (path, to_go[0][initial])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn two_state() -> HmmKernel {
        // prev 0: mostly emits 0 and stays; prev 1: mostly emits 1.
        let table = alloc::vec![
            0.5, 0.2, 0.1, 0.2, //
            0.1, 0.2, 0.2, 0.5,
        ];
        HmmKernel::new("test", 2, 2, 0, table).unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        let err = HmmKernel::new("k", 1, 2, 0, alloc::vec![0.5, 0.48]).unwrap_err();
        assert!(matches!(err, Error::RowSum { .. }));
        let err = HmmKernel::new("k", 1, 2, 0, alloc::vec![1.5, -0.5]).unwrap_err();
        assert!(matches!(err, Error::Entry { .. }));
        let err = HmmKernel::new("k", 1, 2, 3, alloc::vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::InitialState { .. }));
    }

    #[test]
    fn within_tolerance_rows_are_renormalized() {
        let k = HmmKernel::new("k", 1, 2, 0, alloc::vec![0.5, 0.5 + 5e-13]).unwrap();
        assert_eq!(k.table().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn pinned_sums_recover_marginal() {
        let k = two_state();
        let seq = [0u8, 1, 1, 0, 1];
        let b = [0usize, 2, 5];
        let mut total = f64::NEG_INFINITY;
        for s1 in 0..2 {
            for s2 in 0..2 {
                total = crate::math::log_add_exp(total, k.pinned_log_prob(&seq, &b, &[s1, s2]));
            }
        }
        assert!((total - k.log_prob(&seq)).abs() < 1e-12);
    }

    #[test]
    fn scaled_forward_survives_long_sequences() {
        let k = two_state();
        let mut rng = stream_rng(3, 0);
        let mut seq = Vec::new();
        k.sample_into(5000, &mut rng, &mut seq);
        let lp = k.log_prob(&seq);
        assert!(lp.is_finite() && lp < -1000.0);
        // Cross-check with the phrase-level transfer route.
        let b = [0usize, 2500, 5000];
        let t = k.phrase_log_transfers(&seq, &b);
        let mut total = f64::NEG_INFINITY;
        for s1 in 0..2 {
            for s2 in 0..2 {
                total = crate::math::log_add_exp(total, t[0][s1] + t[1][s1 * 2 + s2]);
            }
        }
        assert!((total - lp).abs() < 1e-8 * lp.abs());
    }

    #[test]
    fn extremal_path_prefers_lexicographically_smallest_tie() {
        // Two identical layers with all-equal entries: every path ties.
        let flat = alloc::vec![0.0; 4];
        let (path, v) = extremal_path(&[flat.clone(), flat], 2, 0, Extremum::Max);
        assert_eq!(path, alloc::vec![0, 0]);
        assert_eq!(v, 0.0);
    }
}
