// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded shot sampling.
//!
//! Shots are split into fixed chunks of [`SAMPLING_CHUNK`]; chunk `k` draws
//! from ChaCha8 stream `k` of the seed, so the output depends only on the seed
//! and never on how many worker threads ran.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::DensityMatrix;
use crate::{Error, Result};

pub const SAMPLING_CHUNK: usize = 1 << 16;

/// Independent RNG stream `stream` derived from `seed`.
pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `shots` i.i.d. indices from a probability table.
pub fn sample_indices(probs: &[f64], shots: usize, seed: u64) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if probs.is_empty() {
        return Err(Error::InvalidArgument("empty probability table".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        if !(p >= -1e-12) {
            return Err(Error::InvalidArgument(format!("negative probability {p}")));
        }
        acc += p.max(0.0);
        cdf.push(acc);
    }
    if (acc - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("probabilities sum to {acc}")));
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let n_chunks = shots.div_ceil(SAMPLING_CHUNK);
    let chunks: Vec<Vec<usize>> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let len = SAMPLING_CHUNK.min(shots - k * SAMPLING_CHUNK);
            let mut rng = rng_stream(seed, k as u64);
            (0..len)
                .map(|_| {
                    let u: f64 = rng.random::<f64>() * acc;
                    cdf.partition_point(|&c| c <= u).min(last_nonzero)
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Computational-basis shots from a state, returned as basis indices.
pub fn sample_shots(state: &DensityMatrix, shots: usize, seed: u64) -> Result<Vec<usize>> {
    sample_indices(&state.probabilities(), shots, seed)
}
