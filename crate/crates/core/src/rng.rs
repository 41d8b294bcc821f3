//! Seed-per-substream random number generation.
//!
//! Every stochastic stage derives its generator from the master seed and a
//! structural key (stage, round, chunk index, ...). Work is split into fixed
//! size chunks, so results do not depend on how many workers run them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Samples per independently seeded chunk.
pub const CHUNK: usize = 4096;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a master seed and structural key into a substream seed.
pub fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    let mut h = splitmix(seed);
    for &k in key {
        h = splitmix(h ^ splitmix(k));
    }
    h
}

pub fn substream(seed: u64, key: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, key))
}

/// Run `f(chunk_index, chunk)` over fixed-size chunks of `out`.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    use rayon::prelude::*;
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize, &mut [T]),
{
    out.chunks_mut(CHUNK).enumerate().for_each(|(i, c)| f(i, c));
}

/// Sum `f(chunk_index, range)` over fixed chunks of `0..n`, in chunk order.
#[cfg(feature = "parallel")]
pub(crate) fn sum_chunks<F>(n: usize, f: F) -> f64
where
    F: Fn(usize, core::ops::Range<usize>) -> f64 + Sync + Send,
{
    use alloc::vec::Vec;
    use rayon::prelude::*;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|i| f(i, i * CHUNK..((i + 1) * CHUNK).min(n)))
        .collect();
    parts.iter().sum()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_chunks<F>(n: usize, f: F) -> f64
where
    F: Fn(usize, core::ops::Range<usize>) -> f64,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks).map(|i| f(i, i * CHUNK..((i + 1) * CHUNK).min(n))).sum()
}
