//! Exhaustive checks of the finite-`n` inequalities relating the universal,
//! threshold and ML decoders.
//!
//! Every check produces a [`BoundReport`] comparing a left and a right side.
//! Probabilities are compared in natural-log scale where they can underflow.
//! A report marked `advisory` records a comparison that is not expected to
//! hold at small `n` (short phrases, the phrase-permutation count bound) and
//! never counts as a violation.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::decoding::{rank_cmp, within_threshold, Alpha, DecoderKind, ErrorFunction, ExactContext, ZColumn};
use crate::enumerate::{SequenceSpace, ENUMERATION_LIMIT};
use crate::lz::{cbar, cbar_back_solved_epsilon, JointParser, PhraseParse};
use crate::math::{exp, fabs, log, log1p, log2, LN_2};
use crate::model::{BoundaryStates, SystemModel};
use crate::{Error, Result};

/// Relative tolerance of every comparison.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Largest phrase-permutation class [`Verifier::t_set`] will build.
pub const PERMUTATION_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `left <= right`.
    AtMost,
    /// `left == right`.
    Equal,
}

/// Outcome of one inequality check on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
    pub relation: Relation,
    /// Sides are natural logarithms of the compared quantities.
    pub log_scale: bool,
    pub holds: bool,
    /// `right - left`.
    pub slack: f64,
    pub advisory: bool,
    pub n: usize,
    pub y: Option<Vec<u8>>,
    pub z: Option<Vec<u8>>,
}

impl BoundReport {
    fn new(name: &'static str, left: f64, right: f64, relation: Relation, log_scale: bool) -> Self {
        let tol = if log_scale {
            BOUND_TOLERANCE * left.abs().max(right.abs()).max(1.0)
        } else {
            BOUND_TOLERANCE * left.abs().max(right.abs()) + 1e-300
        };
        let holds = match relation {
            Relation::AtMost => left <= right + tol,
            Relation::Equal => fabs(left - right) <= tol || left == right,
        };
        Self {
            name,
            left,
            right,
            relation,
            log_scale,
            holds,
            slack: right - left,
            advisory: false,
            n: 0,
            y: None,
            z: None,
        }
    }

    pub fn at_most(name: &'static str, left: f64, right: f64) -> Self {
        Self::new(name, left, right, Relation::AtMost, false)
    }

    pub fn log_at_most(name: &'static str, left: f64, right: f64) -> Self {
        Self::new(name, left, right, Relation::AtMost, true)
    }

    pub fn equal(name: &'static str, left: f64, right: f64, log_scale: bool) -> Self {
        Self::new(name, left, right, Relation::Equal, log_scale)
    }

    fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    fn at(mut self, n: usize, y: Option<&[u8]>, z: Option<&[u8]>) -> Self {
        self.n = n;
        self.y = y.map(<[u8]>::to_vec);
        self.z = z.map(<[u8]>::to_vec);
        self
    }

    /// Failed and not advisory.
    pub fn is_violation(&self) -> bool {
        !self.holds && !self.advisory
    }
}

/// `sum_{y'} 2^{-v(y', z)}` and `kappa = (1/n) log2` of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KraftSum {
    pub sum: f64,
    pub kappa: f64,
}

/// Kraft-type sum over all `y' in Y^n` for a fixed `z`.
pub fn kraft_sum(z: &[u8], y_size: usize) -> Result<KraftSum> {
    let n = z.len();
    if n == 0 {
        return Err(Error::Empty("z"));
    }
    let space = SequenceSpace::new(y_size, n)?;
    let z_size = z.iter().copied().max().unwrap() as usize + 1;
    let mut parser = JointParser::new(y_size, z_size);
    let mut parse = PhraseParse::default();
    let mut y = vec![0u8; n];
    let mut sum = 0.0;
    for i in 0..space.size() {
        space.decode_into(i, &mut y);
        parser.parse_into(&y, z, &mut parse);
        sum += exp(-parse.v() * LN_2);
    }
    Ok(KraftSum {
        sum,
        kappa: log2(sum) / n as f64,
    })
}

/// `kappa(n) = max_z kappa(n, z)`, or `None` past the enumeration limit.
pub fn max_kappa(n: usize, y_size: usize, z_size: usize) -> Result<Option<f64>> {
    let pairs = SequenceSpace::new(y_size, n)
        .and_then(|ys| SequenceSpace::new(z_size, n).map(|zs| ys.size() as f64 * zs.size() as f64));
    match pairs {
        Ok(p) if p <= ENUMERATION_LIMIT as f64 => {}
        _ => return Ok(None),
    }
    let zs = SequenceSpace::new(z_size, n)?;
    let mut best = f64::NEG_INFINITY;
    for z in zs.iter() {
        best = best.max(kraft_sum(&z, y_size)?.kappa);
    }
    Ok(Some(best))
}

/// `f(a) / f(b) <= max(1, a / b)` for `a, b in (0, 1]`.
pub fn check_f_ratio(a: f64, b: f64, n: usize, rate: f64) -> Result<BoundReport> {
    for (what, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain { what, value: v });
        }
    }
    let f = ErrorFunction::new(n, rate)?;
    let (fa, fb) = (f.eval(a), f.eval(b));
    let ratio = if fa == 0.0 { 0.0 } else { fa / fb };
    Ok(BoundReport::at_most("f_ratio", ratio, (a / b).max(1.0)).at(n, None, None))
}

/// `u / (1 + u) <= ln(1 + u)` for `u >= 0`.
pub fn check_log_ratio_inequality(u: f64) -> Result<BoundReport> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain { what: "u", value: u });
    }
    Ok(BoundReport::at_most("log1p_lower", u / (1.0 + u), log1p(u)))
}

/// The epsilon terms of the universality bound at one block length.
///
/// `kappa` and `eps2` are exponents to base 2, `eps3` to base `e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonLadder {
    pub n: usize,
    pub cbar: usize,
    /// `eps_n` solving `cbar = n log|Y x Z| / ((1 - eps_n) log n)`.
    pub eps_n: Option<f64>,
    /// Measured stand-in for `eps1`: `max_z (1/n) log2 sum_{y'} 2^{-v(y', z)}`.
    pub kappa: Option<f64>,
    pub eps2_prime: f64,
    pub eps2: f64,
    pub eps3: f64,
    /// `kappa + eps2 + eps3`, when `kappa` is available.
    pub total: Option<f64>,
}

/// `n ln(1 / (pi_min |Theta| |Omega|)) + 1`, the bound on `L_n(z)`.
pub fn harmonic_bound(model: &SystemModel, n: usize) -> Result<f64> {
    let pi_min = model.check_positivity()?;
    let s = model.states();
    Ok(n as f64 * log(1.0 / (pi_min * (s.theta_size * s.omega_size) as f64)) + 1.0)
}

/// The prescribed threshold `alpha = (K / pi_min)^{2 cbar_n}`.
pub fn default_alpha(model: &SystemModel, n: usize) -> Result<Alpha> {
    let pi_min = model.check_positivity()?;
    let a = model.alphabet();
    Alpha::from_phrase_bound(model.k(), pi_min, cbar(n, a.y_size * a.z_size))
}

/// `ln(alpha B + 1)` for the threshold-lemma factor with `B` the harmonic
/// bound.
fn ln_lemma_factor(ln_alpha: f64, bound: f64) -> f64 {
    let x = ln_alpha + log(bound);
    if x > 0.0 {
        x + log1p(exp(-x))
    } else {
        log1p(exp(x))
    }
}

pub fn epsilon_ladder(model: &SystemModel, n: usize) -> Result<EpsilonLadder> {
    if n == 0 {
        return Err(Error::Empty("block length"));
    }
    let pi_min = model.check_positivity()?;
    let a = model.alphabet();
    let s = model.states();
    let pair = a.y_size * a.z_size;
    let cb = cbar(n, pair);
    let nf = n as f64;
    let (th, om, si) = (s.theta_size as f64, s.omega_size as f64, s.sigma_size as f64);
    let eps2_prime = cb as f64 / nf * (4.0 * log2(th) + 4.0 * log2(om) + 2.0 * log2(si) + core::f64::consts::LOG2_E);
    let eps2 = eps2_prime + cb as f64 * log2(model.k() as f64) / nf;
    let ln_alpha = 2.0 * cb as f64 * log(model.k() as f64 / pi_min);
    let eps3 = ln_lemma_factor(ln_alpha, harmonic_bound(model, n)?) / nf;
    let kappa = max_kappa(n, a.y_size, a.z_size)?;
    Ok(EpsilonLadder {
        n,
        cbar: cb,
        eps_n: cbar_back_solved_epsilon(n, pair, cb),
        kappa,
        eps2_prime,
        eps2,
        eps3,
        total: kappa.map(|k| k + eps2 + eps3),
    })
}

/// Parse and boundary-state maximizers of one `(y, z)`.
#[derive(Clone, Debug)]
pub struct PairAnalysis {
    pub y_index: usize,
    pub parse: PhraseParse,
    pub t_hat: BoundaryStates,
    /// `ln P(y, z, t_hat)`.
    pub log_pyz_t: f64,
    pub s_tilde: BoundaryStates,
    /// `ln P(y, s_tilde)`.
    pub log_py_s: f64,
}

/// Per-`z` error probabilities needed by the threshold lemma.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalErrors {
    pub ml: f64,
    pub threshold: f64,
}

/// Exhaustive checker for one model and block length.
pub struct Verifier<'a> {
    ctx: ExactContext<'a>,
    pi_min: f64,
    cbar: usize,
    harmonic_bound: f64,
    ladder: EpsilonLadder,
}

fn close_log(a: f64, b: f64) -> bool {
    a == b || fabs(a - b) <= BOUND_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

impl<'a> Verifier<'a> {
    pub fn new(model: &'a SystemModel, n: usize) -> Result<Self> {
        let pi_min = model.check_positivity()?;
        let ctx = ExactContext::new(model, n)?;
        let a = model.alphabet();
        Ok(Self {
            ctx,
            pi_min,
            cbar: cbar(n, a.y_size * a.z_size),
            harmonic_bound: harmonic_bound(model, n)?,
            ladder: epsilon_ladder(model, n)?,
        })
    }

    pub fn context(&self) -> &ExactContext<'a> {
        &self.ctx
    }

    pub fn model(&self) -> &'a SystemModel {
        self.ctx.model()
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn cbar(&self) -> usize {
        self.cbar
    }

    pub fn ladder(&self) -> &EpsilonLadder {
        &self.ladder
    }

    pub fn default_alpha(&self) -> Alpha {
        Alpha::from_phrase_bound(self.model().k(), self.pi_min, self.cbar).unwrap()
    }

    pub fn column(&self, z: &[u8]) -> Result<ZColumn> {
        self.ctx.column(z)
    }

    /// `L_n(z) = sum_y P(y) / P[E_o(y, z)]`.
    pub fn harmonic_sum(&self, column: &ZColumn) -> f64 {
        let eo = self.ctx.set_probs(column, DecoderKind::MaximumLikelihood);
        self.ctx.py().iter().zip(&eo).map(|(p, e)| p / e).sum()
    }

    /// `L_n(z) <= n ln(1 / (pi_min |Theta| |Omega|)) + 1`.
    pub fn check_harmonic_lemma(&self, column: &ZColumn) -> BoundReport {
        BoundReport::at_most("harmonic", self.harmonic_sum(column), self.harmonic_bound).at(
            self.n(),
            None,
            Some(&column.z),
        )
    }

    pub fn conditional_errors(&self, column: &ZColumn, alpha: Alpha, f: &ErrorFunction) -> ConditionalErrors {
        let eo = self.ctx.set_probs(column, DecoderKind::MaximumLikelihood);
        let et = self.ctx.set_probs(column, DecoderKind::Threshold(alpha));
        ConditionalErrors {
            ml: self.ctx.conditional_error(column, &eo, f),
            threshold: self.ctx.conditional_error(column, &et, f),
        }
    }

    /// `Pe_t(z) <= (alpha [n ln(1/(pi_min |Theta||Omega|)) + 1] + 1) Pe_o(z)`.
    pub fn check_threshold_lemma(&self, column: &ZColumn, alpha: Alpha, f: &ErrorFunction) -> BoundReport {
        let e = self.conditional_errors(column, alpha, f);
        let right = ln_lemma_factor(alpha.ln(), self.harmonic_bound) + log(e.ml);
        BoundReport::log_at_most("threshold_lemma", log(e.threshold), right).at(self.n(), None, Some(&column.z))
    }

    /// Number of `y'` in `E_o(y, z)` outside `E_t(y, z)`, for every `y`
    /// (reported as `count <= 0`).
    pub fn check_ml_in_threshold(&self, column: &ZColumn, alpha: Alpha) -> BoundReport {
        let ml = &column.ml;
        let size = ml.len();
        let mut outside = 0usize;
        for i in 0..size {
            for j in 0..size {
                let in_eo = rank_cmp(ml[j], self.ctx.y(j), ml[i], self.ctx.y(i)).is_le();
                if in_eo && !within_threshold(ml[j], ml[i], alpha.ln()) {
                    outside += 1;
                }
            }
        }
        BoundReport::at_most("ml_set_in_threshold_set", outside as f64, 0.0).at(self.n(), None, Some(&column.z))
    }

    /// Parses `(y, z)` and finds `t_hat` and `s_tilde`.
    pub fn analyse(&self, y_index: usize, z: &[u8]) -> Result<PairAnalysis> {
        let model = self.model();
        let y = self.ctx.y(y_index);
        let a = model.alphabet();
        let parse = JointParser::new(a.y_size, a.z_size).parse(y, z);
        let (t_hat, log_pyz_t) = model.t_hat(y, z, parse.boundaries())?;
        let (s_tilde, log_py_s) = model.s_tilde(y, parse.boundaries())?;
        Ok(PairAnalysis {
            y_index,
            parse,
            t_hat,
            log_pyz_t,
            s_tilde,
            log_py_s,
        })
    }

    /// `P(y, z, t_hat) >= K^{-c} P(y, z)` and
    /// `P(y, s_tilde) >= |Theta x Omega|^{-c} P(y)`.
    pub fn check_maximizer_bounds(&self, pair: &PairAnalysis, column: &ZColumn) -> [BoundReport; 2] {
        let model = self.model();
        let c = pair.parse.c_yz() as f64;
        let s = model.states();
        let i = pair.y_index;
        let y = Some(self.ctx.y(i));
        let z = Some(&column.z[..]);
        [
            BoundReport::log_at_most(
                "t_hat_lower",
                column.log_pyz[i] - c * log(model.k() as f64),
                pair.log_pyz_t,
            )
            .at(self.n(), y, z),
            BoundReport::log_at_most(
                "s_tilde_lower",
                self.ctx.log_py()[i] - c * log((s.theta_size * s.omega_size) as f64),
                pair.log_py_s,
            )
            .at(self.n(), y, z),
        ]
    }

    /// `P(y) <= P(y, s) (|Theta x Omega| / pi_min^2)^c`, at `s_tilde`, its
    /// weaker `K` form, and at the minimizing `s`. The last is advisory when
    /// some phrase is shorter than three symbols.
    pub fn check_zm92(&self, pair: &PairAnalysis, z: &[u8]) -> Result<[BoundReport; 3]> {
        let y = self.ctx.y(pair.y_index);
        let mut out = zm92_reports(self.model(), y, pair.parse.boundaries(), self.pi_min, Some(&pair.log_py_s))?;
        for r in out.iter_mut() {
            r.z = Some(z.to_vec());
        }
        Ok(out)
    }

    /// `E_1(y, z)`: all `y'` with `P(y', z, t_hat) = P(y, z, t_hat)` and
    /// `P(y', s_tilde) = P(y, s_tilde)`, as sequence indices.
    pub fn e1_set(&self, pair: &PairAnalysis, z: &[u8]) -> Result<Vec<usize>> {
        let model = self.model();
        let b = pair.parse.boundaries();
        let mut out = Vec::new();
        for j in 0..self.ctx.y_space().size() {
            let y = self.ctx.y(j);
            if !close_log(model.log_prob_y_s(y, b, &pair.s_tilde)?, pair.log_py_s) {
                continue;
            }
            if close_log(model.log_prob_yz_t(y, z, b, &pair.t_hat)?, pair.log_pyz_t) {
                out.push(j);
            }
        }
        Ok(out)
    }

    /// `T(y | z, t_hat, s_tilde)`: sequences obtained from `y` by permuting
    /// y-phrases that share the z-phrase and both start and end boundary
    /// states under `t_hat` and `s_tilde`.
    pub fn t_set(&self, pair: &PairAnalysis) -> Result<Vec<Vec<u8>>> {
        let model = self.model();
        permutation_class(
            self.ctx.y(pair.y_index),
            &pair.parse,
            &pair.t_hat,
            model.joint().hmm().initial(),
            &pair.s_tilde,
            model.induced().hmm().initial(),
        )
    }

    /// Every check on one `(y, z)`. The `E_1` chain uses the prescribed
    /// threshold [`Self::default_alpha`], the only one it is claimed for.
    pub fn check_pair(&self, pair: &PairAnalysis, column: &ZColumn, kraft: &KraftSum) -> Result<Vec<BoundReport>> {
        let alpha = self.default_alpha();
        let n = self.n();
        let i = pair.y_index;
        let y = self.ctx.y(i);
        let z = &column.z[..];
        let at = |r: BoundReport| r.at(n, Some(y), Some(z));
        let mut out = Vec::new();
        out.extend(self.check_maximizer_bounds(pair, column));
        out.extend(self.check_zm92(pair, z)?);

        let c = pair.parse.c_yz();
        out.push(at(BoundReport::at_most("phrase_count", c as f64, self.cbar as f64)));

        let et = self.ctx.set_probs(column, DecoderKind::Threshold(alpha));
        let eu = self.ctx.set_probs(column, DecoderKind::Universal);
        let e1 = self.e1_set(pair, z)?;
        let e1_members: BTreeSet<usize> = e1.iter().copied().collect();

        out.push(at(BoundReport::at_most(
            "y_in_e1",
            !e1_members.contains(&i) as u8 as f64,
            0.0,
        )));
        let outside_et = e1
            .iter()
            .filter(|&&j| !within_threshold(column.ml[j], column.ml[i], alpha.ln()))
            .count();
        out.push(at(BoundReport::at_most("e1_in_threshold_set", outside_et as f64, 0.0)));

        // Lower-bound chain for P[E_t(y, z)].
        let model = self.model();
        let b = pair.parse.boundaries();
        let sum_e1: f64 = e1.iter().map(|&j| self.ctx.py()[j]).sum();
        let mut sum_e1_s = 0.0;
        for &j in &e1 {
            sum_e1_s += exp(model.log_prob_y_s(self.ctx.y(j), b, &pair.s_tilde)?);
        }
        let size_e1 = e1.len() as f64;
        let k = model.k() as f64;
        let py = self.ctx.log_py()[i];
        out.push(at(BoundReport::at_most("et_chain_1", sum_e1, et[i])));
        out.push(at(BoundReport::at_most("et_chain_2", sum_e1_s, sum_e1)));
        out.push(at(BoundReport::equal(
            "et_chain_3",
            log(sum_e1_s),
            log(size_e1) + pair.log_py_s,
            true,
        )));
        out.push(at(BoundReport::log_at_most(
            "et_chain_4",
            log(size_e1) - c as f64 * log(k) + py,
            log(size_e1) + pair.log_py_s,
        )));

        let t = self.t_set(pair)?;
        let space = self.ctx.y_space();
        let outside_e1 = t
            .iter()
            .filter(|w| !e1_members.contains(&space.encode(w)))
            .count();
        out.push(at(BoundReport::at_most("t_in_e1", outside_e1 as f64, 0.0)));
        out.push(at(BoundReport::at_most("t_size", t.len() as f64, size_e1)));
        out.push(at(BoundReport::log_at_most(
            "et_via_t",
            log(t.len() as f64) - self.cbar as f64 * log(k) + py,
            log(et[i]),
        )));
        let v = pair.parse.v();
        out.push(
            at(BoundReport::log_at_most(
                "t_size_lower",
                (v - n as f64 * self.ladder.eps2_prime) * LN_2,
                log(t.len() as f64),
            ))
            .advisory(),
        );

        let u = py / LN_2 + v;
        out.push(at(BoundReport::log_at_most(
            "pet",
            (u - n as f64 * self.ladder.eps2) * LN_2,
            log(et[i]),
        )));
        out.push(at(BoundReport::log_at_most(
            "peu",
            log(eu[i]),
            (n as f64 * kraft.kappa + u) * LN_2,
        )));
        out.push(at(BoundReport::log_at_most(
            "probability_floor",
            n as f64 * log(self.pi_min * (model.states().theta_size * model.states().omega_size) as f64),
            py,
        )));
        Ok(out)
    }

    /// Every per-`z` and per-`(y, z)` check; `alpha` is the threshold of the
    /// per-`z` lemma and set-containment checks.
    pub fn check_z(&self, z: &[u8], alpha: Alpha, f: &ErrorFunction) -> Result<Vec<BoundReport>> {
        let column = self.column(z)?;
        let kraft = kraft_sum(z, self.model().alphabet().y_size)?;
        let mut out = vec![
            self.check_harmonic_lemma(&column),
            self.check_threshold_lemma(&column, alpha, f),
            self.check_ml_in_threshold(&column, alpha),
        ];
        for i in 0..self.ctx.y_space().size() {
            let pair = self.analyse(i, z)?;
            out.extend(self.check_pair(&pair, &column, &kraft)?);
        }
        Ok(out)
    }

    /// [`Self::check_z`] over all of `Z^n`.
    pub fn sweep(&self, alpha: Alpha, f: &ErrorFunction) -> Result<Vec<BoundReport>> {
        let zs = self.ctx.z_space();
        let mut out = Vec::new();
        for j in 0..zs.size() {
            out.extend(self.check_z(&zs.decode(j), alpha, f)?);
        }
        Ok(out)
    }
}

/// The three forms of `P(y) <= P(y, s) (|Theta x Omega| / pi_min^2)^c` for
/// arbitrary phrase boundaries.
pub fn zm92_reports(
    model: &SystemModel,
    y: &[u8],
    boundaries: &[usize],
    pi_min: f64,
    log_py_s_tilde: Option<&f64>,
) -> Result<[BoundReport; 3]> {
    if !(pi_min > 0.0) {
        return Err(Error::PositivityViolation { pi_min });
    }
    let n = y.len();
    let c = (boundaries.len() - 1) as f64;
    let s = model.states();
    let ln_py = model.log_prob_y(y)?;
    let tilde = match log_py_s_tilde {
        Some(&v) => v,
        None => model.s_tilde(y, boundaries)?.1,
    };
    let (_, worst) = model.s_worst(y, boundaries)?;
    let ln_pi2 = 2.0 * log(pi_min);
    let ln_to = log((s.theta_size * s.omega_size) as f64);
    let ln_k = log(model.k() as f64);
    let short = boundaries.windows(2).any(|w| w[1] - w[0] < 3);
    let mut every = BoundReport::log_at_most("zm92_every_s", ln_py, worst + c * (ln_to - ln_pi2)).at(n, Some(y), None);
    if short {
        every.advisory = true;
    }
    Ok([
        BoundReport::log_at_most("zm92", ln_py, tilde + c * (ln_to - ln_pi2)).at(n, Some(y), None),
        BoundReport::log_at_most("zm92_k", ln_py, tilde + c * (ln_k - ln_pi2)).at(n, Some(y), None),
        every,
    ])
}

/// Checks `P(y) <= P(y, s) (|Theta x Omega| / pi_min^2)^c` for the joint
/// parse of `(y, z)`.
pub fn check_zm92(model: &SystemModel, y: &[u8], z: &[u8]) -> Result<[BoundReport; 3]> {
    let pi_min = model.check_positivity()?;
    model.check_pair(y, z)?;
    let parse = crate::lz::joint_parse(y, z)?;
    let mut out = zm92_reports(model, y, parse.boundaries(), pi_min, None)?;
    for r in out.iter_mut() {
        r.z = Some(z.to_vec());
    }
    Ok(out)
}

/// Rearranges `ranks` into the next lexicographic permutation; false after
/// the last one.
fn next_permutation(ranks: &mut [usize]) -> bool {
    let Some(i) = (1..ranks.len()).rev().find(|&i| ranks[i - 1] < ranks[i]) else {
        return false;
    };
    let j = (i..ranks.len()).rev().find(|&j| ranks[j] > ranks[i - 1]).unwrap();
    ranks.swap(i - 1, j);
    ranks[i..].reverse();
    true
}

fn factorial_ratio(counts: &[usize], limit: usize) -> Option<usize> {
    // multinomial(sum; counts), saturating past `limit`.
    let mut acc: usize = 1;
    let mut k = 0;
    for &c in counts {
        for j in 1..=c {
            k += 1;
            acc = acc.checked_mul(k)? / j;
            if acc > limit {
                return None;
            }
        }
    }
    Some(acc)
}

/// The distinct sequences obtained from `y` by permuting phrases within
/// classes of equal z-phrase and equal start/end states under both boundary
/// assignments.
pub fn permutation_class(
    y: &[u8],
    parse: &PhraseParse,
    t: &BoundaryStates,
    t_initial: usize,
    s: &BoundaryStates,
    s_initial: usize,
) -> Result<Vec<Vec<u8>>> {
    let c = parse.c_yz();
    if t.states.len() != c || s.states.len() != c {
        return Err(Error::LengthMismatch {
            left: c,
            right: t.states.len().min(s.states.len()),
        });
    }
    let key = |i: usize| {
        let t0 = if i == 0 { t_initial } else { t.states[i - 1] };
        let s0 = if i == 0 { s_initial } else { s.states[i - 1] };
        (parse.z_phrase_ids()[i], parse.phrase(i).len(), t0, t.states[i], s0, s.states[i])
    };
    let mut groups: Vec<(_, Vec<usize>)> = Vec::new();
    for i in 0..c {
        let k = key(i);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(i),
            None => groups.push((k, vec![i])),
        }
    }
    // Per group: the distinct y-segments as ranks, one per member position.
    let mut group_ranks: Vec<Vec<usize>> = Vec::new();
    let mut total: usize = 1;
    for (_, members) in &groups {
        let mut segs: Vec<&[u8]> = members.iter().map(|&i| &y[parse.phrase(i)]).collect();
        segs.sort();
        segs.dedup();
        let ranks: Vec<usize> = members
            .iter()
            .map(|&i| segs.binary_search(&&y[parse.phrase(i)]).unwrap())
            .collect();
        let mut counts = vec![0usize; segs.len()];
        for &r in &ranks {
            counts[r] += 1;
        }
        let count = factorial_ratio(&counts, PERMUTATION_LIMIT).and_then(|g| total.checked_mul(g));
        total = match count {
            Some(t) if t <= PERMUTATION_LIMIT => t,
            _ => {
                return Err(Error::TooLarge {
                    what: "phrase permutation class",
                    size: f64::INFINITY,
                    limit: PERMUTATION_LIMIT as f64,
                })
            }
        };
        group_ranks.push(ranks);
    }
    // Segment contents per group, indexed by rank.
    let seg_tables: Vec<Vec<Vec<u8>>> = groups
        .iter()
        .map(|(_, members)| {
            let mut segs: Vec<Vec<u8>> = members.iter().map(|&i| y[parse.phrase(i)].to_vec()).collect();
            segs.sort();
            segs.dedup();
            segs
        })
        .collect();
    let per_group: Vec<Vec<Vec<usize>>> = group_ranks
        .iter()
        .map(|ranks| {
            let mut r = ranks.clone();
            r.sort();
            let mut all = vec![r.clone()];
            while next_permutation(&mut r) {
                all.push(r.clone());
            }
            all
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; groups.len()];
    loop {
        let mut w = y.to_vec();
        for (g, (_, members)) in groups.iter().enumerate() {
            let arrangement = &per_group[g][choice[g]];
            for (&pos, &rank) in members.iter().zip(arrangement) {
                w[parse.phrase(pos)].copy_from_slice(&seg_tables[g][rank]);
            }
        }
        out.insert(w);
        let mut g = 0;
        loop {
            if g == groups.len() {
                return Ok(out.into_iter().collect());
            }
            choice[g] += 1;
            if choice[g] < per_group[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AlphabetSpec, StateSpec};

    #[test]
    fn permutations_are_lexicographic_and_distinct() {
        let mut r = [0, 0, 1];
        let mut all = vec![r];
        while next_permutation(&mut r) {
            all.push(r);
        }
        assert_eq!(all, [[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        assert_eq!(factorial_ratio(&[2, 1], 100), Some(3));
        assert_eq!(factorial_ratio(&[1, 1, 1, 1], 100), Some(24));
        assert_eq!(factorial_ratio(&[10], 100), Some(1));
    }

    #[test]
    fn kraft_n1() {
        let k = kraft_sum(&[1], 3).unwrap();
        assert_eq!(k.sum, 3.0);
    }

    #[test]
    fn ladder_memoryless() {
        let model = SystemModel::binary_symmetric(0.1, 0.1).unwrap();
        let l = epsilon_ladder(&model, 4).unwrap();
        assert!((l.eps2_prime - l.cbar as f64 / 4.0 * core::f64::consts::LOG2_E).abs() < 1e-15);
        assert_eq!(l.eps2, l.eps2_prime);
        assert!(l.kappa.is_some());
    }

    #[test]
    fn sweep_small() {
        let model = SystemModel::random(4, AlphabetSpec::binary(), StateSpec::new(2, 2, 2)).unwrap();
        let v = Verifier::new(&model, 3).unwrap();
        let f = ErrorFunction::new(3, 0.3).unwrap();
        let reports = v.sweep(v.default_alpha(), &f).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| r.is_violation()).collect();
        assert!(bad.is_empty(), "{:?}", bad.first());
    }
}
