//! Source and channel kernels of the communication model, plus the two
//! induced kernels built from them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::hmm::{normalize_row, HmmKernel};
use crate::{Error, Result};

/// Alphabet sizes `|X|`, `|Y|`, `|Z|`. Symbols are `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphabetSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub z_size: usize,
}

impl AlphabetSpec {
    pub fn new(x_size: usize, y_size: usize, z_size: usize) -> Self {
        Self {
            x_size,
            y_size,
            z_size,
        }
    }

    pub fn binary() -> Self {
        Self::new(2, 2, 2)
    }
}

/// State space sizes and fixed initial states of the source (`omega`),
/// primary channel (`sigma`) and secondary channel (`theta`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpec {
    pub omega_size: usize,
    pub sigma_size: usize,
    pub theta_size: usize,
    pub omega0: usize,
    pub sigma0: usize,
    pub theta0: usize,
}

impl StateSpec {
    /// State sizes with all initial states at index 0.
    pub fn new(omega_size: usize, sigma_size: usize, theta_size: usize) -> Self {
        Self {
            omega_size,
            sigma_size,
            theta_size,
            omega0: 0,
            sigma0: 0,
            theta0: 0,
        }
    }

    pub fn single() -> Self {
        Self::new(1, 1, 1)
    }

    pub fn is_memoryless(&self) -> bool {
        self.omega_size == 1 && self.sigma_size == 1 && self.theta_size == 1
    }
}

/// Source kernel `G(x, omega | omega')`, stored as `[omega'][x][omega]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceKernel {
    x_size: usize,
    omega_size: usize,
    table: Vec<f64>,
}

impl SourceKernel {
    pub fn new(x_size: usize, omega_size: usize, mut table: Vec<f64>) -> Result<Self> {
        let width = x_size * omega_size;
        if width == 0 || table.len() != omega_size * width {
            return Err(Error::Shape {
                kernel: "G",
                detail: format!(
                    "expected {} entries for |X| = {x_size}, |Omega| = {omega_size}, found {}",
                    omega_size * width,
                    table.len()
                ),
            });
        }
        for (prev, row) in table.chunks_exact_mut(width).enumerate() {
            normalize_row("G", row, || format!("(omega'={prev})"))?;
        }
        Ok(Self {
            x_size,
            omega_size,
            table,
        })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn omega_size(&self) -> usize {
        self.omega_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn prob(&self, x: usize, omega: usize, omega_prev: usize) -> f64 {
        self.table[(omega_prev * self.x_size + x) * self.omega_size + omega]
    }
}

/// Finite-state channel `V(y, theta | x, theta')` (or `W(z, sigma | x, sigma')`),
/// stored as `[x][state'][output][state]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelKernel {
    name: &'static str,
    input_size: usize,
    output_size: usize,
    state_size: usize,
    table: Vec<f64>,
}

impl ChannelKernel {
    pub fn new(
        name: &'static str,
        input_size: usize,
        output_size: usize,
        state_size: usize,
        mut table: Vec<f64>,
    ) -> Result<Self> {
        let width = output_size * state_size;
        let rows = input_size * state_size;
        if width == 0 || rows == 0 || table.len() != rows * width {
            return Err(Error::Shape {
                kernel: name,
                detail: format!(
                    "expected {} entries for {input_size} inputs, {output_size} outputs, {state_size} states, found {}",
                    rows * width,
                    table.len()
                ),
            });
        }
        for (r, row) in table.chunks_exact_mut(width).enumerate() {
            let (x, prev) = (r / state_size, r % state_size);
            normalize_row(name, row, || format!("(x={x}, state'={prev})"))?;
        }
        Ok(Self {
            name,
            input_size,
            output_size,
            state_size,
            table,
        })
    }

    /// Secondary channel `V`, producing the noisy codeword.
    pub fn secondary(x: usize, y: usize, theta: usize, table: Vec<f64>) -> Result<Self> {
        Self::new("V", x, y, theta, table)
    }

    /// Primary channel `W`, producing the received vector.
    pub fn primary(x: usize, z: usize, sigma: usize, table: Vec<f64>) -> Result<Self> {
        Self::new("W", x, z, sigma, table)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn state_size(&self) -> usize {
        self.state_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn prob(&self, output: usize, state: usize, x: usize, state_prev: usize) -> f64 {
        let row = x * self.state_size + state_prev;
        self.table[(row * self.output_size + output) * self.state_size + state]
    }
}

/// The induced kernel `pi(y, theta, omega | theta', omega')`, a hidden Markov
/// model for the noisy codewords with state index `theta * |Omega| + omega`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedKernel {
    hmm: HmmKernel,
    theta_size: usize,
    omega_size: usize,
    pi_min: f64,
}

impl InducedKernel {
    /// `pi(y, theta, omega | theta', omega') = sum_x G(x, omega | omega') V(y, theta | x, theta')`.
    pub fn build(source: &SourceKernel, secondary: &ChannelKernel, states: &StateSpec) -> Result<Self> {
        let (nt, no) = (states.theta_size, states.omega_size);
        let ny = secondary.output_size();
        let k = nt * no;
        let mut table = vec![0.0; k * ny * k];
        for tp in 0..nt {
            for op in 0..no {
                let prev = tp * no + op;
                for y in 0..ny {
                    for t in 0..nt {
                        for o in 0..no {
                            let mut acc = 0.0;
                            for x in 0..source.x_size() {
                                acc += source.prob(x, o, op) * secondary.prob(y, t, x, tp);
                            }
                            table[(prev * ny + y) * k + t * no + o] = acc;
                        }
                    }
                }
            }
        }
        let hmm = HmmKernel::new("pi", k, ny, states.theta0 * no + states.omega0, table)?;
        let pi_min = hmm.min_entry();
        Ok(Self {
            hmm,
            theta_size: nt,
            omega_size: no,
            pi_min,
        })
    }

    pub fn hmm(&self) -> &HmmKernel {
        &self.hmm
    }

    pub fn pi_min(&self) -> f64 {
        self.pi_min
    }

    pub fn theta_size(&self) -> usize {
        self.theta_size
    }

    pub fn omega_size(&self) -> usize {
        self.omega_size
    }

    /// `|Theta x Omega|`.
    pub fn state_count(&self) -> usize {
        self.hmm.states()
    }

    pub fn prob(&self, y: usize, theta: usize, omega: usize, theta_prev: usize, omega_prev: usize) -> f64 {
        let no = self.omega_size;
        self.hmm
            .prob(theta_prev * no + omega_prev, y, theta * no + omega)
    }

    /// `(theta, omega)` of a flattened state.
    pub fn state_of(&self, s: usize) -> (usize, usize) {
        (s / self.omega_size, s % self.omega_size)
    }

    /// Returns `pi_min`, or [`Error::PositivityViolation`] when some entry is 0.
    pub fn check_positivity(&self) -> Result<f64> {
        if self.pi_min > 0.0 {
            Ok(self.pi_min)
        } else {
            Err(Error::PositivityViolation {
                pi_min: self.pi_min,
            })
        }
    }
}

/// The joint kernel `Pi(y, z, theta, sigma, omega | theta', sigma', omega')`
/// over pair symbols `y * |Z| + z` and states `(theta * |Sigma| + sigma) * |Omega| + omega`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointKernel {
    hmm: HmmKernel,
    y_size: usize,
    z_size: usize,
    theta_size: usize,
    sigma_size: usize,
    omega_size: usize,
}

impl JointKernel {
    pub fn build(
        source: &SourceKernel,
        secondary: &ChannelKernel,
        primary: &ChannelKernel,
        states: &StateSpec,
    ) -> Result<Self> {
        let (nt, ns, no) = (states.theta_size, states.sigma_size, states.omega_size);
        let (ny, nz) = (secondary.output_size(), primary.output_size());
        let k = nt * ns * no;
        let a = ny * nz;
        let idx = |t: usize, s: usize, o: usize| (t * ns + s) * no + o;
        let mut table = vec![0.0; k * a * k];
        for tp in 0..nt {
            for sp in 0..ns {
                for op in 0..no {
                    let prev = idx(tp, sp, op);
                    for y in 0..ny {
                        for z in 0..nz {
                            for t in 0..nt {
                                for s in 0..ns {
                                    for o in 0..no {
                                        let mut acc = 0.0;
                                        for x in 0..source.x_size() {
                                            acc += source.prob(x, o, op)
                                                * secondary.prob(y, t, x, tp)
                                                * primary.prob(z, s, x, sp);
                                        }
                                        table[(prev * a + y * nz + z) * k + idx(t, s, o)] = acc;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let init = idx(states.theta0, states.sigma0, states.omega0);
        let hmm = HmmKernel::new("Pi", k, a, init, table)?;
        Ok(Self {
            hmm,
            y_size: ny,
            z_size: nz,
            theta_size: nt,
            sigma_size: ns,
            omega_size: no,
        })
    }

    pub fn hmm(&self) -> &HmmKernel {
        &self.hmm
    }

    /// `K = |Theta x Sigma x Omega|`.
    pub fn k(&self) -> usize {
        self.hmm.states()
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    #[inline]
    pub fn pair_symbol(&self, y: u8, z: u8) -> u8 {
        (y as usize * self.z_size + z as usize) as u8
    }

    /// Pair-symbol sequence for `(y, z)`, written into `out`.
    pub fn pairs_into(&self, y: &[u8], z: &[u8], out: &mut Vec<u8>) {
        out.clear();
        out.extend(y.iter().zip(z).map(|(&a, &b)| self.pair_symbol(a, b)));
    }

    /// `(theta, sigma, omega)` of a flattened state.
    pub fn state_of(&self, s: usize) -> (usize, usize, usize) {
        let o = s % self.omega_size;
        let rest = s / self.omega_size;
        (rest / self.sigma_size, rest % self.sigma_size, o)
    }

    /// Flattened `(theta, omega)` index of a joint state, matching
    /// [`InducedKernel`]'s numbering.
    pub fn induced_state(&self, s: usize) -> usize {
        let (t, _, o) = self.state_of(s);
        t * self.omega_size + o
    }

    /// Sums out `(z, sigma)`, returning a table laid out like the induced
    /// kernel's (`[theta' omega'][y][theta omega]`, with `sigma' = sigma0`).
    pub fn marginal_over_output(&self, sigma_prev: usize) -> Vec<f64> {
        let (nt, ns, no) = (self.theta_size, self.sigma_size, self.omega_size);
        let kk = nt * no;
        let mut out = vec![0.0; kk * self.y_size * kk];
        for tp in 0..nt {
            for op in 0..no {
                let prev = (tp * ns + sigma_prev) * no + op;
                for y in 0..self.y_size {
                    for z in 0..self.z_size {
                        let sym = y * self.z_size + z;
                        for (next, &p) in self.hmm.row(prev, sym).iter().enumerate() {
                            let small = self.induced_state(next);
                            out[((tp * no + op) * self.y_size + y) * kk + small] += p;
                        }
                    }
                }
            }
        }
        out
    }
}
