use alloc::format;
use alloc::vec::Vec;

use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Systematic encoder obtained by Gauss-Jordan elimination of `H` over GF(2).
///
/// Pivot columns carry parity, the remaining `k = n - rank(H)` columns carry
/// information bits. Rows are bit-packed; each parity bit is the parity of
/// its reduced row masked by the information bits.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    pivots: Vec<u32>,
    info: Vec<u32>,
}

impl SystematicEncoder {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let n = h.n();
        let m = h.m();
        let words = n.div_ceil(64);
        let mut rows = alloc::vec![0u64; m * words];
        for (v, c) in h.edges() {
            rows[c as usize * words + v as usize / 64] |= 1u64 << (v % 64);
        }
        let mut pivots = Vec::new();
        let mut info = Vec::new();
        let mut rank = 0usize;
        let mut scratch = alloc::vec![0u64; words];
        for col in 0..n {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(r) = (rank..m).find(|&r| rows[r * words + w] & bit != 0) else {
                info.push(col as u32);
                continue;
            };
            if r != rank {
                for k in 0..words {
                    rows.swap(r * words + k, rank * words + k);
                }
            }
            scratch.copy_from_slice(&rows[rank * words..(rank + 1) * words]);
            eliminate(&mut rows, words, rank, w, bit, &scratch);
            pivots.push(col as u32);
            rank += 1;
            if rank == m {
                info.extend((col as u32 + 1)..n as u32);
                break;
            }
        }
        rows.truncate(rank * words);
        Self {
            n,
            words,
            rows,
            pivots,
            info,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information bits.
    pub fn dimension(&self) -> usize {
        self.info.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Codeword positions that carry the information bits, in order.
    pub fn info_positions(&self) -> &[u32] {
        &self.info
    }

    /// Encode `k` information bits (0/1) into an `n`-bit codeword.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info.len() {
            return Err(Error::DimensionMismatch(format!(
                "encoder expects {} information bits, got {}",
                self.info.len(),
                info.len()
            )));
        }
        let mut packed = alloc::vec![0u64; self.words];
        let mut word = alloc::vec![0u8; self.n];
        for (&pos, &b) in self.info.iter().zip(info) {
            let b = b & 1;
            word[pos as usize] = b;
            packed[pos as usize / 64] |= (b as u64) << (pos % 64);
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            let row = &self.rows[r * self.words..(r + 1) * self.words];
            let parity = row
                .iter()
                .zip(&packed)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            word[p as usize] = parity as u8;
        }
        Ok(word)
    }

    /// Information bits of a codeword.
    pub fn extract(&self, codeword: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&p| codeword[p as usize]).collect()
    }
}

#[cfg(feature = "parallel")]
fn eliminate(rows: &mut [u64], words: usize, pivot: usize, w: usize, bit: u64, src: &[u64]) {
    use rayon::prelude::*;
    rows.par_chunks_mut(words)
        .enumerate()
        .filter(|(i, row)| *i != pivot && row[w] & bit != 0)
        .for_each(|(_, row)| xor_into(row, src));
}

#[cfg(not(feature = "parallel"))]
fn eliminate(rows: &mut [u64], words: usize, pivot: usize, w: usize, bit: u64, src: &[u64]) {
    rows.chunks_mut(words)
        .enumerate()
        .filter(|(i, row)| *i != pivot && row[w] & bit != 0)
        .for_each(|(_, row)| xor_into(row, src));
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}
