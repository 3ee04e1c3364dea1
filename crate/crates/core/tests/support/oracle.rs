// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Self-contained statevector reference for the ideal preparation circuit
//! with a phase error on S1, plus exhaustive readout-flip enumeration.

#![allow(dead_code)]

use num_complex::Complex64;

/// Qubits D1..D4 = 0..3, S1 = 4; qubit q is bit 4 - q of the index.
const N: usize = 5;

fn mask(q: usize) -> usize {
    1 << (N - 1 - q)
}

fn h(psi: &mut [Complex64], q: usize) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..psi.len() {
        if i & mask(q) == 0 {
            let (a, b) = (psi[i], psi[i | mask(q)]);
            psi[i] = (a + b) * r;
            psi[i | mask(q)] = (a - b) * r;
        }
    }
}

fn x(psi: &mut [Complex64], q: usize) {
    for i in 0..psi.len() {
        if i & mask(q) == 0 {
            psi.swap(i, i | mask(q));
        }
    }
}

fn cnot(psi: &mut [Complex64], c: usize, t: usize) {
    for i in 0..psi.len() {
        if i & mask(c) != 0 && i & mask(t) == 0 {
            psi.swap(i, i | mask(t));
        }
    }
}

fn phase(psi: &mut [Complex64], q: usize, theta: f64) {
    let e = Complex64::from_polar(1.0, theta);
    for (i, a) in psi.iter_mut().enumerate() {
        if i & mask(q) != 0 {
            *a *= e;
        }
    }
}

fn ry(psi: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    for i in 0..psi.len() {
        if i & mask(q) == 0 {
            let (a, b) = (psi[i], psi[i | mask(q)]);
            psi[i] = a * c - b * s;
            psi[i | mask(q)] = a * s + b * c;
        }
    }
}

/// Outcome probabilities of the ideal `|0̄0̄⟩` circuit with `RY(θ)` on the
/// control and on S1 after every CNOT.
pub fn correlated_probabilities(theta: f64) -> Vec<f64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << N];
    psi[0] = Complex64::new(1.0, 0.0);
    x(&mut psi, 4);
    for q in 0..4 {
        h(&mut psi, q);
    }
    for q in 0..4 {
        cnot(&mut psi, q, 4);
        ry(&mut psi, q, theta);
        ry(&mut psi, 4, theta);
    }
    for q in 0..4 {
        h(&mut psi, q);
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Outcome probabilities of the ideal `|0̄0̄⟩` circuit with `Z(θ)` on S1
/// after CNOT `after` (1, 2 or 3; 0 for none).
pub fn ideal_probabilities(after: usize, theta: f64) -> Vec<f64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << N];
    psi[0] = Complex64::new(1.0, 0.0);
    x(&mut psi, 4);
    for q in 0..4 {
        h(&mut psi, q);
    }
    for q in 0..4 {
        cnot(&mut psi, q, 4);
        if q + 1 == after {
            phase(&mut psi, 4, theta);
        }
    }
    for q in 0..4 {
        h(&mut psi, q);
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Accepted-shot statistics from exhaustive flip enumeration.
#[derive(Debug, Clone, Copy)]
pub struct OracleStats {
    pub acceptance: f64,
    pub protected: f64,
    pub gauge: f64,
    pub protected_only: f64,
    pub gauge_only: f64,
    pub both: f64,
}

/// Folds uniform readout flips (`p0 = P(0|1)`, `p1 = P(1|0)`) into a
/// 5-qubit table and post-selects: `c_s = 1`, even data parity; errors are
/// `c1⊕c2` and `c1⊕c3` against `expected`.
pub fn enumerate(probs: &[f64], p0: f64, p1: f64, expected: (u8, u8)) -> OracleStats {
    let (mut ok, mut acc) = (0.0, 0.0);
    let (mut p, mut g, mut po, mut go, mut both) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &w) in probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for flips in 0..1usize << N {
            let mut wt = w;
            for q in 0..N {
                let bit = i & mask(q) != 0;
                let flip = flips & mask(q) != 0;
                let pf = if bit { p0 } else { p1 };
                wt *= if flip { pf } else { 1.0 - pf };
            }
            let r = i ^ flips;
            let b = |q: usize| ((r & mask(q)) != 0) as u8;
            if b(4) != 1 {
                continue;
            }
            ok += wt;
            if b(0) ^ b(1) ^ b(2) ^ b(3) != 0 {
                continue;
            }
            acc += wt;
            let e1 = (b(0) ^ b(1)) != expected.0;
            let e2 = (b(0) ^ b(2)) != expected.1;
            if e1 {
                p += wt;
            }
            if e2 {
                g += wt;
            }
            match (e1, e2) {
                (true, false) => po += wt,
                (false, true) => go += wt,
                (true, true) => both += wt,
                _ => {}
            }
        }
    }
    OracleStats {
        acceptance: acc / ok,
        protected: p / acc,
        gauge: g / acc,
        protected_only: po / acc,
        gauge_only: go / acc,
        both: both / acc,
    }
}

/// Shorthand for the `|0̄0̄⟩` circuit with an error at `site` (1, 2, 3).
pub fn insertion_stats(after: usize, theta: f64, p0: f64, p1: f64) -> OracleStats {
    enumerate(&ideal_probabilities(after, theta), p0, p1, (0, 0))
}
