use core::fmt;

use super::metric::DecoderKind;
use crate::math::sqrt;

/// How an error probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo {
        trials: u64,
        errors: u64,
        /// Wilson 95% interval.
        interval: (f64, f64),
    },
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Average error probability of one decoder at one `(n, R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorProbReport {
    pub decoder: DecoderKind,
    pub value: f64,
    pub method: Method,
    pub n: usize,
    pub rate: f64,
    pub m: u64,
    pub seed: Option<u64>,
}

impl ErrorProbReport {
    /// Binomial standard error of a Monte-Carlo estimate; zero when exact.
    pub fn std_error(&self) -> f64 {
        match self.method {
            Method::Exact => 0.0,
            Method::MonteCarlo { trials, .. } => sqrt(self.value * (1.0 - self.value) / trials as f64),
        }
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        match self.method {
            Method::Exact => None,
            Method::MonteCarlo { interval, .. } => Some(interval),
        }
    }
}

impl fmt::Display for ErrorProbReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} R={} M={} Pe={:.6e} ({})",
            self.decoder,
            self.n,
            self.rate,
            self.m,
            self.value,
            self.method.label()
        )?;
        if let Some((lo, hi)) = self.interval() {
            write!(f, " [{lo:.6e}, {hi:.6e}]")?;
        }
        Ok(())
    }
}

/// Wilson score interval for `errors` successes out of `trials` at normal
/// quantile `z` (1.96 for 95%).
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
