//! Universal decoding with a noisy codebook.
//!
//! The decoder sees a codebook of noisy codewords `y_m`, each produced from a
//! clean codeword `x_m` by a finite-state secondary channel, and a received
//! vector `z` produced from the transmitted `x_m` by a finite-state primary
//! channel. This crate provides:
//!
//! * [`model`]: the hidden-Markov source and channels, the induced kernels over
//!   noisy codewords and over (codeword, output) pairs, forward recursions,
//!   phrase-boundary maximizers and samplers.
//! * [`lz`]: joint incremental (LZ78) parsing of `(y, z)` and the conditional
//!   compressibility `v(y, z)`.
//! * [`decoding`]: the ML, universal and threshold decoders, exact average
//!   error probabilities by enumeration and a Monte-Carlo estimator.
//! * [`verification`]: exact checkers for every inequality linking the
//!   universal decoder to the ML decoder.
//! * [`estimation`]: floored Baum-Welch estimation of the induced kernel and the
//!   plug-in universal decoder built on it.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod capacity;
pub mod decoding;
pub mod enumerate;
pub mod estimation;
pub mod lz;
pub mod model;
pub mod rng;
pub mod verification;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
