//! Float helpers over `libm` so the crate stays `no_std`.

pub(crate) use libm::{ceil, exp, expm1, fabs, log, log1p, log2, pow, round, sqrt};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[cfg(test)]
/// `ln(e^a + e^b)` without overflow; `-inf` is the additive identity.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + log1p(exp(lo - hi))
}

/// `k * log2(k)` with `0 log 0 = 0`.
pub(crate) fn xlog2x(k: usize) -> f64 {
    if k <= 1 {
        0.0
    } else {
        let k = k as f64;
        k * log2(k)
    }
}

/// `n ln(alphabet) / (cbar ln n)`.
pub(crate) fn ln_ratio_cbar(n: usize, alphabet: usize, cbar: usize) -> f64 {
    (n as f64) * log(alphabet as f64) / ((cbar as f64) * log(n as f64))
}
