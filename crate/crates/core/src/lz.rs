//! Joint incremental (LZ78) parsing of a pair sequence `(y_i, z_i)`.
//!
//! Each phrase is the shortest string of pairs not yet seen as a phrase. The
//! z-projections of the joint phrases are grouped by content into the distinct
//! z-phrases `z(1), ..., z(c(z))`, and `c_l(y|z)` counts the joint phrases whose
//! z-projection is `z(l)`. A final phrase that repeats an earlier one is kept
//! and counted like the others.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::math::{ln_ratio_cbar, xlog2x};
use crate::{Error, Result};

/// Result of a joint parse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhraseParse {
    boundaries: Vec<usize>,
    z_phrase_ids: Vec<usize>,
    c_ell: Vec<usize>,
    last_complete: bool,
}

impl PhraseParse {
    /// `0 = n_0 < n_1 < ... < n_c = n`; phrase `i` covers `n_{i-1}..n_i`.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// `c(y, z)`, the number of joint phrases.
    pub fn c_yz(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    /// `c(z)`, the number of distinct z-phrases.
    pub fn c_z(&self) -> usize {
        self.c_ell.len()
    }

    /// For each joint phrase, the 0-based index of its z-projection among the
    /// distinct z-phrases (in order of first appearance).
    pub fn z_phrase_ids(&self) -> &[usize] {
        &self.z_phrase_ids
    }

    /// `c_l(y|z)` for `l = 1..c(z)` (stored 0-based).
    pub fn c_ell(&self) -> &[usize] {
        &self.c_ell
    }

    /// False when the final phrase repeats an earlier one (an incomplete phrase).
    pub fn last_complete(&self) -> bool {
        self.last_complete
    }

    pub fn phrase(&self, i: usize) -> Range<usize> {
        self.boundaries[i]..self.boundaries[i + 1]
    }

    pub fn phrases(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.boundaries.windows(2).map(|w| w[0]..w[1])
    }

    /// Shortest phrase length (0 for an empty parse).
    pub fn min_phrase_len(&self) -> usize {
        self.phrases().map(|r| r.len()).min().unwrap_or(0)
    }

    /// `v(y, z) = sum_l c_l log2 c_l`.
    pub fn v(&self) -> f64 {
        v_metric(self)
    }
}

/// Trie over a fixed alphabet with nodes stored densely; node 0 is the root.
#[derive(Clone, Debug)]
pub struct ParseTrie {
    arity: usize,
    children: Vec<u32>,
    nodes: usize,
}

impl ParseTrie {
    pub fn new(arity: usize) -> Self {
        Self {
            arity,
            children: vec![0; arity],
            nodes: 1,
        }
    }

    /// Removes every node but the root, keeping the allocation.
    pub fn clear(&mut self) {
        self.children[..self.nodes * self.arity].fill(0);
        self.nodes = 1;
    }

    /// Node count including the root.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn child(&self, node: u32, symbol: u8) -> Option<u32> {
        match self.children[node as usize * self.arity + symbol as usize] {
            0 => None,
            c => Some(c),
        }
    }

    #[inline]
    pub fn insert(&mut self, node: u32, symbol: u8) -> u32 {
        let id = self.nodes as u32;
        self.nodes += 1;
        if self.children.len() < self.nodes * self.arity {
            let grow = (self.nodes * self.arity).max(2 * self.children.len());
            self.children.resize(grow, 0);
        }
        self.children[node as usize * self.arity + symbol as usize] = id;
        id
    }

    /// Follows `path` from the root, creating missing nodes; returns the end node.
    pub fn walk_or_insert(&mut self, path: impl IntoIterator<Item = u8>) -> u32 {
        let mut node = 0;
        for s in path {
            node = match self.child(node, s) {
                Some(c) => c,
                None => self.insert(node, s),
            };
        }
        node
    }
}

/// Reusable joint parser for fixed alphabet sizes.
#[derive(Clone, Debug)]
pub struct JointParser {
    z_size: usize,
    pairs: ParseTrie,
    z_phrases: ParseTrie,
    /// z-trie node -> 1 + z-phrase id, 0 if the node is not a z-phrase.
    z_label: Vec<u32>,
}

impl JointParser {
    pub fn new(y_size: usize, z_size: usize) -> Self {
        Self {
            z_size,
            pairs: ParseTrie::new(y_size * z_size),
            z_phrases: ParseTrie::new(z_size),
            z_label: Vec::new(),
        }
    }

    /// Parses `(y, z)` into `out`, reusing its buffers. Lengths must match and
    /// symbols must be within the parser's alphabets.
    pub fn parse_into(&mut self, y: &[u8], z: &[u8], out: &mut PhraseParse) {
        debug_assert_eq!(y.len(), z.len());
        let n = y.len();
        self.pairs.clear();
        out.boundaries.clear();
        out.boundaries.push(0);
        let mut node = 0u32;
        for i in 0..n {
            let sym = (y[i] as usize * self.z_size + z[i] as usize) as u8;
            match self.pairs.child(node, sym) {
                Some(c) => node = c,
                None => {
                    self.pairs.insert(node, sym);
                    out.boundaries.push(i + 1);
                    node = 0;
                }
            }
        }
        out.last_complete = node == 0;
        if !out.last_complete {
            out.boundaries.push(n);
        }

        self.z_phrases.clear();
        self.z_label.clear();
        out.z_phrase_ids.clear();
        out.c_ell.clear();
        for w in out.boundaries.windows(2) {
            let end = self.z_phrases.walk_or_insert(z[w[0]..w[1]].iter().copied()) as usize;
            if self.z_label.len() < self.z_phrases.nodes() {
                self.z_label.resize(self.z_phrases.nodes(), 0);
            }
            let id = match self.z_label[end] {
                0 => {
                    out.c_ell.push(0);
                    self.z_label[end] = out.c_ell.len() as u32;
                    out.c_ell.len() - 1
                }
                l => l as usize - 1,
            };
            out.c_ell[id] += 1;
            out.z_phrase_ids.push(id);
        }
    }

    pub fn parse(&mut self, y: &[u8], z: &[u8]) -> PhraseParse {
        let mut out = PhraseParse::default();
        self.parse_into(y, z, &mut out);
        out
    }
}

/// Joint incremental parse of `(y, z)`.
pub fn joint_parse(y: &[u8], z: &[u8]) -> Result<PhraseParse> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: z.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Empty("sequence pair"));
    }
    let y_size = *y.iter().max().unwrap() as usize + 1;
    let z_size = *z.iter().max().unwrap() as usize + 1;
    if y_size * z_size > 256 {
        return Err(Error::SymbolOutOfRange {
            symbol: y_size * z_size,
            size: 256,
        });
    }
    Ok(JointParser::new(y_size, z_size).parse(y, z))
}

/// `v(y, z) = sum_l c_l(y|z) log2 c_l(y|z)`, with `1 log 1 = 0`.
pub fn v_metric(parse: &PhraseParse) -> f64 {
    parse.c_ell.iter().map(|&c| xlog2x(c)).sum()
}

/// The largest phrase count any pair sequence of length `n` over an alphabet
/// of `alphabet` pair symbols can produce: the largest `c` such that the
/// `c - 1` shortest distinct strings plus one more symbol fit in `n`.
pub fn cbar(n: usize, alphabet: usize) -> usize {
    assert!(n >= 1 && alphabet >= 1);
    let budget = n as u128 - 1; // room left after the final phrase's first symbol
    let mut used: u128 = 0;
    let mut count: u128 = 1;
    let mut level_len: u128 = 1;
    let mut level_size: u128 = alphabet as u128;
    loop {
        let room = (budget - used) / level_len;
        if room == 0 {
            break;
        }
        let take = room.min(level_size);
        used += take * level_len;
        count += take;
        if take < level_size {
            break;
        }
        level_len += 1;
        level_size = level_size.saturating_mul(alphabet as u128);
        if alphabet == 1 && level_size == 1 && used >= budget {
            break;
        }
    }
    count as usize
}

/// `n log A / ((1 - eps) log n)` solved for `eps` given an exact phrase bound;
/// `None` for `n < 2`.
pub fn cbar_back_solved_epsilon(n: usize, alphabet: usize, cbar: usize) -> Option<f64> {
    if n < 2 || cbar == 0 {
        return None;
    }
    Some(1.0 - ln_ratio_cbar(n, alphabet, cbar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_the_worked_example() {
        let y = [0u8, 1, 0, 0, 0, 1];
        let z = [0u8, 1, 0, 1, 0, 1];
        let p = joint_parse(&y, &z).unwrap();
        assert_eq!(p.boundaries(), &[0, 1, 2, 4, 6]);
        assert_eq!(p.c_yz(), 4);
        assert_eq!(p.c_z(), 3);
        assert_eq!(p.c_ell(), &[1, 1, 2]);
        assert_eq!(p.z_phrase_ids(), &[0, 1, 2, 2]);
        assert!(p.last_complete());
        assert_eq!(p.v(), 2.0);
    }

    #[test]
    fn single_symbol() {
        let p = joint_parse(&[1], &[0]).unwrap();
        assert_eq!((p.c_yz(), p.c_z(), p.c_ell()), (1, 1, &[1usize][..]));
        assert_eq!(p.v(), 0.0);
    }

    #[test]
    fn incomplete_last_phrase_is_counted() {
        // a | b | a(repeat)
        let p = joint_parse(&[0, 1, 0], &[0, 0, 0]).unwrap();
        assert_eq!(p.boundaries(), &[0, 1, 2, 3]);
        assert!(!p.last_complete());
        assert_eq!(p.c_ell(), &[3]);
        assert_eq!(p.c_ell().iter().sum::<usize>(), p.c_yz());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            joint_parse(&[0, 1], &[0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(joint_parse(&[], &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn constant_z_with_distinct_y_phrases() {
        // y phrases 0 | 1 | 00 | 01 | 10 | 11 against an all-zero z: one
        // z-phrase per length, so c_ell = (2, 4) and v = 2 + 8.
        let y = [0u8, 1, 0, 0, 0, 1, 1, 0, 1, 1];
        let z = [0u8; 10];
        let p = joint_parse(&y, &z).unwrap();
        assert_eq!(p.c_yz(), 6);
        assert_eq!(p.c_ell(), &[2, 4]);
        assert_eq!(p.v(), 2.0 * 1.0 + 4.0 * 2.0);
    }

    #[test]
    fn cbar_small_cases() {
        assert_eq!(cbar(1, 4), 1);
        assert_eq!(cbar(1, 2), 1);
        assert_eq!(cbar(3, 2), 3);
        assert_eq!(cbar(5, 4), 5);
        assert_eq!(cbar(6, 4), 5);
        // unary alphabet: lengths 1, 2, 3, ... plus a repeated final phrase
        assert_eq!(cbar(7, 1), 4);
    }
}
