//! Enumeration of all sequences of a fixed length over a finite alphabet.
//!
//! Sequence indices are base-`alphabet` numerals with the first symbol most
//! significant, so index order coincides with lexicographic order.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Hard cap on the number of sequences (or sequence pairs) any exact
/// evaluation will enumerate.
pub const ENUMERATION_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceSpace {
    alphabet: usize,
    len: usize,
    size: usize,
}

impl SequenceSpace {
    pub fn new(alphabet: usize, len: usize) -> Result<Self> {
        Self::with_limit(alphabet, len, ENUMERATION_LIMIT)
    }

    pub fn with_limit(alphabet: usize, len: usize, limit: usize) -> Result<Self> {
        let size = checked_power(alphabet, len).filter(|&s| s <= limit);
        match size {
            Some(size) => Ok(Self {
                alphabet,
                len,
                size,
            }),
            None => Err(Error::TooLarge {
                what: "sequence space",
                size: crate::math::pow(alphabet as f64, len as f64),
                limit: limit as f64,
            }),
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Number of sequences, `alphabet^len`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [u8]) {
        debug_assert_eq!(out.len(), self.len);
        for slot in out.iter_mut().rev() {
            *slot = (index % self.alphabet) as u8;
            index /= self.alphabet;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<u8> {
        let mut out = vec![0; self.len];
        self.decode_into(index, &mut out);
        out
    }

    pub fn encode(&self, seq: &[u8]) -> usize {
        seq.iter()
            .fold(0usize, |acc, &s| acc * self.alphabet + s as usize)
    }

    /// All sequences, flattened row-major into one buffer of `size * len`.
    pub fn flat(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.size * self.len];
        if self.len > 0 {
            for (i, chunk) in out.chunks_exact_mut(self.len).enumerate() {
                self.decode_into(i, chunk);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        (0..self.size).map(move |i| self.decode(i))
    }
}

pub(crate) fn checked_power(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
