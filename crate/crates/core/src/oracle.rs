//! Brute-force reference implementations used to cross-check the library.
//!
//! Nothing here shares code with the forward recursions, parser or ranking
//! of the main modules: kernels are rebuilt from `G`, `V`, `W` by direct
//! sums, probabilities are sums over every hidden-state path, phrases are
//! found by linear search, and sets are built by pairwise comparison. Costs
//! are exponential in `n`; use only at small block lengths.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{log, round};
use crate::model::SystemModel;

/// `pi(y, theta, omega | theta', omega')` by direct sum over `x`.
pub fn pi(model: &SystemModel, y: usize, theta: usize, omega: usize, theta_p: usize, omega_p: usize) -> f64 {
    (0..model.alphabet().x_size)
        .map(|x| model.source().prob(x, omega, omega_p) * model.secondary().prob(y, theta, x, theta_p))
        .sum()
}

/// `Pi(y, z, theta, sigma, omega | theta', sigma', omega')` by direct sum.
#[allow(clippy::too_many_arguments)]
pub fn big_pi(
    model: &SystemModel,
    y: usize,
    z: usize,
    theta: usize,
    sigma: usize,
    omega: usize,
    theta_p: usize,
    sigma_p: usize,
    omega_p: usize,
) -> f64 {
    (0..model.alphabet().x_size)
        .map(|x| {
            model.source().prob(x, omega, omega_p)
                * model.secondary().prob(y, theta, x, theta_p)
                * model.primary().prob(z, sigma, x, sigma_p)
        })
        .sum()
}

/// Odometer over `len` digits of radix `radix`; calls `visit` with every
/// digit string in lexicographic order.
pub fn for_each_tuple(radix: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; len];
    loop {
        visit(&digits);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radix {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Kernels rebuilt by direct sums, states numbered `theta |Omega| + omega`
/// for the codeword chain and `(theta |Sigma| + sigma) |Omega| + omega` for
/// the joint chain.
pub struct Tables {
    y_states: usize,
    yz_states: usize,
    y_size: usize,
    z_size: usize,
    y_initial: usize,
    yz_initial: usize,
    /// `[prev][y][next]`.
    pi: Vec<f64>,
    /// `[prev][y][z][next]`.
    big_pi: Vec<f64>,
}

impl Tables {
    pub fn new(model: &SystemModel) -> Self {
        let s = model.states();
        let a = model.alphabet();
        let (th, si, om) = (s.theta_size, s.sigma_size, s.omega_size);
        let y_states = th * om;
        let yz_states = th * si * om;
        let mut pi_t = vec![0.0; y_states * a.y_size * y_states];
        for tp in 0..th {
            for op in 0..om {
                for y in 0..a.y_size {
                    for t in 0..th {
                        for o in 0..om {
                            pi_t[((tp * om + op) * a.y_size + y) * y_states + t * om + o] = pi(model, y, t, o, tp, op);
                        }
                    }
                }
            }
        }
        let mut big = vec![0.0; yz_states * a.y_size * a.z_size * yz_states];
        for prev in 0..yz_states {
            let (tp, sp, op) = (prev / (si * om), (prev / om) % si, prev % om);
            for y in 0..a.y_size {
                for z in 0..a.z_size {
                    for next in 0..yz_states {
                        let (t, sg, o) = (next / (si * om), (next / om) % si, next % om);
                        big[((prev * a.y_size + y) * a.z_size + z) * yz_states + next] =
                            big_pi(model, y, z, t, sg, o, tp, sp, op);
                    }
                }
            }
        }
        Self {
            y_states,
            yz_states,
            y_size: a.y_size,
            z_size: a.z_size,
            y_initial: s.theta0 * om + s.omega0,
            yz_initial: (s.theta0 * si + s.sigma0) * om + s.omega0,
            pi: pi_t,
            big_pi: big,
        }
    }

    fn pi_step(&self, prev: usize, y: u8, next: usize) -> f64 {
        self.pi[(prev * self.y_size + y as usize) * self.y_states + next]
    }

    fn big_step(&self, prev: usize, y: u8, z: u8, next: usize) -> f64 {
        self.big_pi[((prev * self.y_size + y as usize) * self.z_size + z as usize) * self.yz_states + next]
    }

    /// `P(y)` as a sum over every hidden path.
    pub fn prob_y(&self, y: &[u8]) -> f64 {
        let mut total = 0.0;
        let mut path = vec![0; y.len()];
        dfs(self.y_states, self.y_initial, y.len(), 1.0, 0, &mut path, &|t, p, q| self.pi_step(p, y[t], q), &mut |_, w| total += w);
        total
    }

    /// `P(y, z)` as a sum over every hidden path.
    pub fn prob_yz(&self, y: &[u8], z: &[u8]) -> f64 {
        let mut total = 0.0;
        let mut path = vec![0; y.len()];
        dfs(self.yz_states, self.yz_initial, y.len(), 1.0, 0, &mut path, &|t, p, q| self.big_step(p, y[t], z[t], q), &mut |_, w| total += w);
        total
    }

    /// `t_hat` and `ln P(y, z, t_hat)` by accumulating every path's weight
    /// onto its boundary-state assignment.
    pub fn t_hat(&self, y: &[u8], z: &[u8], boundaries: &[usize]) -> (Vec<usize>, f64) {
        let step = |t: usize, p: usize, q: usize| self.big_step(p, y[t], z[t], q);
        best_assignment(&boundary_masses(self.yz_states, self.yz_initial, y.len(), boundaries, &step), self.yz_states, boundaries.len() - 1)
    }

    /// `s_tilde` and `ln P(y, s_tilde)`.
    pub fn s_tilde(&self, y: &[u8], boundaries: &[usize]) -> (Vec<usize>, f64) {
        let step = |t: usize, p: usize, q: usize| self.pi_step(p, y[t], q);
        best_assignment(&boundary_masses(self.y_states, self.y_initial, y.len(), boundaries, &step), self.y_states, boundaries.len() - 1)
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    states: usize,
    prev: usize,
    len: usize,
    weight: f64,
    depth: usize,
    path: &mut [usize],
    step: &dyn Fn(usize, usize, usize) -> f64,
    leaf: &mut dyn FnMut(&[usize], f64),
) {
    if depth == len {
        leaf(path, weight);
        return;
    }
    for next in 0..states {
        let w = weight * step(depth, prev, next);
        path[depth] = next;
        dfs(states, next, len, w, depth + 1, path, step, leaf);
    }
}

/// Path mass per boundary-state assignment, indexed as a base-`states`
/// numeral over the phrase-end states.
fn boundary_masses(
    states: usize,
    initial: usize,
    len: usize,
    boundaries: &[usize],
    step: &dyn Fn(usize, usize, usize) -> f64,
) -> Vec<f64> {
    let c = boundaries.len() - 1;
    let mut masses = vec![0.0; states.pow(c as u32)];
    let mut path = vec![0; len];
    dfs(states, initial, len, 1.0, 0, &mut path, step, &mut |p, w| {
        let idx = boundaries[1..].iter().fold(0, |acc, &b| acc * states + p[b - 1]);
        masses[idx] += w;
    });
    masses
}

/// Maximum mass, lexicographically smallest assignment among those within
/// `1e-12` relative of it.
fn best_assignment(masses: &[f64], states: usize, c: usize) -> (Vec<usize>, f64) {
    let top = masses.iter().copied().fold(0.0, f64::max);
    let idx = masses.iter().position(|&m| top - m <= 1e-12 * top).unwrap();
    let mut digits = vec![0; c];
    let mut rest = idx;
    for d in digits.iter_mut().rev() {
        *d = rest % states;
        rest /= states;
    }
    (digits, log(masses[idx]))
}

/// `P(y)` by summing over every `(theta, omega)` path.
pub fn prob_y(model: &SystemModel, y: &[u8]) -> f64 {
    Tables::new(model).prob_y(y)
}

/// `P(y, z)` by summing over every `(theta, sigma, omega)` path.
pub fn prob_yz(model: &SystemModel, y: &[u8], z: &[u8]) -> f64 {
    Tables::new(model).prob_yz(y, z)
}

/// See [`Tables::t_hat`].
pub fn t_hat(model: &SystemModel, y: &[u8], z: &[u8], boundaries: &[usize]) -> (Vec<usize>, f64) {
    Tables::new(model).t_hat(y, z, boundaries)
}

/// See [`Tables::s_tilde`].
pub fn s_tilde(model: &SystemModel, y: &[u8], boundaries: &[usize]) -> (Vec<usize>, f64) {
    Tables::new(model).s_tilde(y, boundaries)
}

/// Joint incremental parse by linear search over the phrase list. Returns
/// the boundaries and `c_l(y|z)` in order of first appearance of `z(l)`.
pub fn parse(y: &[u8], z: &[u8]) -> (Vec<usize>, Vec<usize>) {
    let mut phrases: Vec<Vec<(u8, u8)>> = Vec::new();
    let mut boundaries = vec![0];
    let mut start = 0;
    while start < y.len() {
        let mut end = start + 1;
        loop {
            let candidate: Vec<(u8, u8)> = (start..end).map(|i| (y[i], z[i])).collect();
            if end == y.len() || !phrases.contains(&candidate) {
                phrases.push(candidate);
                break;
            }
            end += 1;
        }
        boundaries.push(end);
        start = end;
    }
    let mut z_phrases: Vec<Vec<u8>> = Vec::new();
    let mut y_sets: Vec<Vec<Vec<u8>>> = Vec::new();
    for p in &phrases {
        let zp: Vec<u8> = p.iter().map(|t| t.1).collect();
        let yp: Vec<u8> = p.iter().map(|t| t.0).collect();
        let l = match z_phrases.iter().position(|q| *q == zp) {
            Some(l) => l,
            None => {
                z_phrases.push(zp);
                y_sets.push(Vec::new());
                z_phrases.len() - 1
            }
        };
        y_sets[l].push(yp);
    }
    (boundaries, y_sets.iter().map(Vec::len).collect())
}

/// `v(y, z) = sum_l c_l log2 c_l` from [`parse`].
pub fn v(y: &[u8], z: &[u8]) -> f64 {
    parse(y, z)
        .1
        .iter()
        .map(|&c| if c > 1 { c as f64 * log(c as f64) / log(2.0) } else { 0.0 })
        .sum()
}

/// All sequences of `Y^n` in lexicographic order.
pub fn all_sequences(alphabet: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for_each_tuple(alphabet, n, |d| out.push(d.iter().map(|&s| s as u8).collect()));
    out
}

/// Which ranking a score belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMetric {
    /// `-ln P(z|y)`.
    Ml,
    /// `log2 P(y) + v(y, z)`.
    Universal,
}

/// Scores of every `y` against `z`.
pub fn scores(model: &SystemModel, z: &[u8], metric: OracleMetric) -> Vec<f64> {
    let a = model.alphabet();
    let tables = Tables::new(model);
    all_sequences(a.y_size, z.len())
        .iter()
        .map(|y| {
            let py = tables.prob_y(y);
            match metric {
                OracleMetric::Ml => -log(tables.prob_yz(y, z) / py),
                OracleMetric::Universal => log(py) / log(2.0) + v(y, z),
            }
        })
        .collect()
}

/// `y'` ranks at or before `y`: bucketed score on a `1e-9` grid, then
/// lexicographic order (index order of [`all_sequences`]).
pub fn at_or_before(scores: &[f64], other: usize, this: usize) -> bool {
    let b = |s: f64| round(s / 1e-9);
    let (bo, bt) = (b(scores[other]), b(scores[this]));
    bo < bt || (bo == bt && other <= this)
}

/// `P[E(y, z)]` for every `y` by pairwise comparison.
pub fn set_probs(py: &[f64], scores: &[f64]) -> Vec<f64> {
    (0..py.len())
        .map(|i| (0..py.len()).filter(|&j| at_or_before(scores, j, i)).map(|j| py[j]).sum())
        .collect()
}

/// `P[E_t(y, z)]`: mass of `y'` with `P(z|y') >= P(z|y) / alpha`.
pub fn threshold_set_probs(py: &[f64], ml: &[f64], ln_alpha: f64) -> Vec<f64> {
    (0..py.len())
        .map(|i| {
            (0..py.len())
                .filter(|&j| ml[j] <= ml[i] + ln_alpha + 1e-9)
                .map(|j| py[j])
                .sum()
        })
        .collect()
}

/// `1 - (1 - t)^k` as the positive geometric sum `t sum_{i<k} (1-t)^i`.
pub fn f(t: f64, k: u64) -> f64 {
    let mut acc = 0.0;
    let mut term = 1.0;
    for _ in 0..k {
        acc += term;
        term *= 1.0 - t;
    }
    t * acc
}

/// Average error `sum_{y,z} P(y, z) f(P[E(y, z)])` with `M` codewords, for
/// the ranking given by `metric`, or for the threshold set when `ln_alpha`
/// is given (then `metric` is ignored).
pub fn avg_error(model: &SystemModel, n: usize, m: u64, metric: OracleMetric, ln_alpha: Option<f64>) -> f64 {
    let a = model.alphabet();
    let tables = Tables::new(model);
    let ys = all_sequences(a.y_size, n);
    let py: Vec<f64> = ys.iter().map(|y| tables.prob_y(y)).collect();
    let mut total = 0.0;
    for z in all_sequences(a.z_size, n) {
        let pyz: Vec<f64> = ys.iter().map(|y| tables.prob_yz(y, &z)).collect();
        let sp = match ln_alpha {
            Some(la) => {
                let ml: Vec<f64> = pyz.iter().zip(&py).map(|(j, p)| -log(j / p)).collect();
                threshold_set_probs(&py, &ml, la)
            }
            None => {
                let sc: Vec<f64> = match metric {
                    OracleMetric::Ml => pyz.iter().zip(&py).map(|(j, p)| -log(j / p)).collect(),
                    OracleMetric::Universal => ys
                        .iter()
                        .zip(&py)
                        .map(|(y, p)| log(*p) / log(2.0) + v(y, &z))
                        .collect(),
                };
                set_probs(&py, &sc)
            }
        };
        total += pyz.iter().zip(&sp).map(|(j, t)| j * f(*t, m.saturating_sub(1))).sum::<f64>();
    }
    total
}

/// `ln P(y)` via [`prob_y`].
pub fn log_prob_y(model: &SystemModel, y: &[u8]) -> f64 {
    log(prob_y(model, y))
}

/// `ln P(y, z)` via [`prob_yz`].
pub fn log_prob_yz(model: &SystemModel, y: &[u8], z: &[u8]) -> f64 {
    log(prob_yz(model, y, z))
}

/// Largest `c(y, z)` over all pair sequences of length `n` over an
/// `alphabet`-ary pair alphabet, by exhaustive parsing.
pub fn max_phrase_count(n: usize, alphabet: usize) -> usize {
    let mut best = 0;
    for_each_tuple(alphabet, n, |d| {
        let y: Vec<u8> = d.iter().map(|&s| s as u8).collect();
        let zero = vec![0u8; n];
        best = best.max(parse(&y, &zero).0.len() - 1);
    });
    best
}

/// `I(Y; Z)` of a memoryless model as a direct double sum over `(y, z)`.
pub fn mutual_information(model: &SystemModel) -> f64 {
    let a = model.alphabet();
    let joint = |y: usize, z: usize| -> f64 {
        (0..a.x_size)
            .map(|x| model.source().prob(x, 0, 0) * model.secondary().prob(y, 0, x, 0) * model.primary().prob(z, 0, x, 0))
            .sum()
    };
    let mut total = 0.0;
    for y in 0..a.y_size {
        let py: f64 = (0..a.z_size).map(|z| joint(y, z)).sum();
        for z in 0..a.z_size {
            let pz: f64 = (0..a.y_size).map(|w| joint(w, z)).sum();
            let p = joint(y, z);
            if p > 0.0 {
                total += p * log(p / (py * pz));
            }
        }
    }
    total
}
