// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact small-register state engine.
//!
//! Qubit ordering is fixed for the whole crate: qubit `q` of an `n`-qubit
//! register is bit `n - 1 - q` of a computational-basis index, so the index
//! reads left to right as a bitstring over (q0, q1, ...). For the five-qubit
//! device register the order is (D1, D2, D3, D4, S1), so basis index
//! `0b0110_1` is the bitstring `01101`: D2, D3 and S1 excited.
//!
//! Gate matrices follow the same convention over their own targets: the first
//! target is the most significant bit of the gate's local index.

mod ops;
mod sampling;
mod state;

pub use ops::{gates, KrausChannel, UnitarySpec};
#[cfg(test)]
pub(crate) use ops::deviation_from_identity;
pub(crate) use sampling::rng_stream;
pub use sampling::{sample_indices, sample_shots, SAMPLING_CHUNK};
pub use state::{DensityMatrix, StateVector};

use num_complex::Complex64;

/// Largest register the engine accepts.
pub const MAX_QUBITS: usize = 5;

/// Value (0 or 1) of qubit `q` in basis index `index` of an `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, q: usize, n: usize) -> u8 {
    ((index >> (n - 1 - q)) & 1) as u8
}

/// Basis index for a bitstring given per qubit (q0 first).
pub fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1))
}

/// Bitstring label of a basis index, q0 first (e.g. `"0110"`).
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if bit_of(index, q, n) == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Apply a local operator to one state column in place.
///
/// `column` has length `2^n`; `op` acts on `targets` (first target = local
/// most significant bit). `scratch` must have length `2^k`.
pub(crate) fn apply_local_column(
    column: &mut [Complex64],
    n: usize,
    op: &nalgebra::DMatrix<Complex64>,
    targets: &[usize],
    scratch: &mut [Complex64],
) {
    let k = targets.len();
    let local_dim = 1usize << k;
    let masks: Vec<usize> = targets.iter().map(|&t| 1usize << (n - 1 - t)).collect();
    let target_mask: usize = masks.iter().sum();
    let offsets: Vec<usize> = (0..local_dim)
        .map(|j| {
            (0..k)
                .filter(|&t| (j >> (k - 1 - t)) & 1 == 1)
                .map(|t| masks[t])
                .sum()
        })
        .collect();
    for base in 0..column.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (j, s) in scratch.iter_mut().enumerate() {
            let mut acc = C0;
            for (l, &off) in offsets.iter().enumerate() {
                acc += op[(j, l)] * column[base | off];
            }
            *s = acc;
        }
        for (j, &off) in offsets.iter().enumerate() {
            column[base | off] = scratch[j];
        }
    }
}

pub(crate) fn check_targets(targets: &[usize], n: usize) -> crate::Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(crate::Error::QubitOutOfRange {
                qubit: t,
                num_qubits: n,
            });
        }
        if targets[..i].contains(&t) {
            return Err(crate::Error::DuplicateTarget(t));
        }
    }
    Ok(())
}
