// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix execution of preparation circuits under a [`NoiseConfig`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::noise::{damping_channel, damping_gamma, NoiseConfig, ReadoutModel, SYNDROME_QUBIT};
use crate::pauli::Pauli;
use crate::prep::{Circuit, Gate, OpKind, Role, NUM_QUBITS};
use crate::simcore::{bit_of, gates, DensityMatrix, KrausChannel, UnitarySpec};
use crate::{Error, Result};

/// Number of recorded outcomes `(c_s, c1, c2, c3, c4)`.
pub const NUM_OUTCOMES: usize = 32;

/// Outcome-table index: `c_s` is the most significant bit, then `c1..c4`.
pub fn outcome_index(cs: u8, c: [u8; 4]) -> usize {
    ((cs as usize) << 4) | ((c[0] as usize) << 3) | ((c[1] as usize) << 2) | ((c[2] as usize) << 1) | c[3] as usize
}

pub fn outcome_bits(index: usize) -> (u8, [u8; 4]) {
    let b = |k: usize| ((index >> k) & 1) as u8;
    (b(4), [b(3), b(2), b(1), b(0)])
}

/// How post-rotation Paulis are realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PostRotationMode {
    /// Applied as gates, subject to gate-time damping.
    #[default]
    Physical,
    /// Tracked classically and XORed into the recorded data bits.
    Frame,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub post_rotation: PostRotationMode,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// `P(c_s, c1..c4)` with the readout channel applied.
    pub outcomes: Vec<f64>,
    /// Same table before readout errors.
    pub outcomes_perfect_readout: Vec<f64>,
    /// Probability that S1 is reported as 1.
    pub syndrome_ok_probability: f64,
    /// Four-qubit data state just before the data readout, conditioned on a
    /// reported `c_s = 1`. `None` when that report never occurs.
    pub syndrome_ok_state: Option<DensityMatrix>,
    /// Five-qubit register in the same branch, S1 left in its measured value.
    pub syndrome_ok_register: Option<DensityMatrix>,
}

fn projector_channel(q: usize) -> Result<KrausChannel> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let p0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let p1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
    KrausChannel::new(vec![p0, p1], vec![q])
}

fn gate_duration_ns(gate: &Gate, noise: &NoiseConfig) -> f64 {
    if gate.arity() == 2 {
        noise.cnot_ns
    } else {
        noise.single_qubit_gate_ns
    }
}

/// Pending classical Pauli frame on the data qubits (x, z bits).
#[derive(Debug, Clone, Copy, Default)]
struct Frame {
    x: [bool; NUM_QUBITS],
    z: [bool; NUM_QUBITS],
}

impl Frame {
    fn touches(&self, q: usize) -> bool {
        self.x[q] || self.z[q]
    }

    fn absorb(&mut self, p: Pauli, q: usize) {
        match p {
            Pauli::I => {}
            Pauli::X => self.x[q] ^= true,
            Pauli::Z => self.z[q] ^= true,
            Pauli::Y => {
                self.x[q] ^= true;
                self.z[q] ^= true;
            }
        }
    }

    fn unitaries(&self) -> Result<Vec<UnitarySpec>> {
        let mut out = Vec::new();
        for q in 0..NUM_QUBITS {
            if self.z[q] {
                out.push(UnitarySpec::single(gates::z(), q)?);
            }
            if self.x[q] {
                out.push(UnitarySpec::single(gates::x(), q)?);
            }
        }
        Ok(out)
    }
}

/// Executes `circuit` from `|00000⟩`.
///
/// Every qubit not yet measured is damped after each layer for the longest
/// gate duration in it when `noise.gate_damping` is set. Measurement
/// dephases the measured qubit and freezes it.
pub fn run(circuit: &Circuit, noise: &NoiseConfig, options: RunOptions) -> Result<RunOutput> {
    noise.validate()?;
    let n = NUM_QUBITS;
    let mut rho = DensityMatrix::zero_state(n)?;
    let mut measured = [false; NUM_QUBITS];
    let mut frame = Frame::default();
    let ops = circuit.ops();
    let end = circuit.data_measurement_index().unwrap_or(ops.len());

    let mut i = 0;
    while i < end {
        let layer = ops[i].layer;
        let mut duration_ns: f64 = 0.0;
        while i < end && ops[i].layer == layer {
            let op = &ops[i];
            i += 1;
            if op.targets.iter().any(|&q| measured[q]) && !matches!(op.kind, OpKind::Site(_) | OpKind::Barrier) {
                return Err(Error::InvalidArgument(format!(
                    "operation on measured qubit in layer {layer}"
                )));
            }
            match &op.kind {
                OpKind::Gate(g) => {
                    let q0 = op.targets[0];
                    if options.post_rotation == PostRotationMode::Frame && op.role == Role::PostRotation {
                        if let Some(p) = g.as_pauli() {
                            frame.absorb(p, q0);
                            continue;
                        }
                    }
                    if op.targets.iter().any(|&q| frame.touches(q)) {
                        if *g == Gate::H && g.arity() == 1 {
                            let (x, z) = (frame.x[q0], frame.z[q0]);
                            frame.x[q0] = z;
                            frame.z[q0] = x;
                        } else {
                            return Err(Error::InvalidArgument(format!(
                                "{} after a frame-tracked post-rotation",
                                g.name()
                            )));
                        }
                    }
                    rho.apply_unitary_mut(&UnitarySpec::new(g.matrix(), op.targets.clone())?)?;
                    if op.role != Role::Inserted {
                        duration_ns = duration_ns.max(gate_duration_ns(g, noise));
                    }
                }
                OpKind::Channel { channel, .. } => {
                    if channel.targets() != op.targets.as_slice() {
                        return Err(Error::InvalidArgument("channel targets disagree with op".into()));
                    }
                    rho.apply_channel_mut(channel)?;
                }
                OpKind::Measure => {
                    let q = op.targets[0];
                    rho.apply_channel_mut(&projector_channel(q)?)?;
                    measured[q] = true;
                }
                OpKind::Site(_) | OpKind::Barrier => {}
            }
        }
        if noise.gate_damping && duration_ns > 0.0 {
            for q in (0..n).filter(|&q| !measured[q]) {
                let g = damping_gamma(duration_ns * 1e-3, noise.t1_us[q]);
                if g > 0.0 {
                    rho.apply_channel_mut(&damping_channel(g)?.retarget(vec![q])?)?;
                }
            }
        }
    }

    // Frame Paulis with Z components leave Z-basis outcomes unchanged.
    let mut flip_mask = 0usize;
    for q in 0..4 {
        if frame.x[q] {
            flip_mask |= 1 << (3 - q);
        }
    }

    let state_probs = rho.probabilities();
    let mut perfect = vec![0.0; NUM_OUTCOMES];
    for (idx, p) in state_probs.iter().enumerate() {
        let cs = bit_of(idx, SYNDROME_QUBIT, n);
        let data = idx >> 1;
        perfect[((cs as usize) << 4) | data] += p;
    }
    let readout = ReadoutModel {
        p0: std::iter::once(noise.p0[SYNDROME_QUBIT]).chain(noise.p0[..4].iter().copied()).collect(),
        p1: std::iter::once(noise.p1[SYNDROME_QUBIT]).chain(noise.p1[..4].iter().copied()).collect(),
    };
    let apply_frame = |table: Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; NUM_OUTCOMES];
        for (k, p) in table.into_iter().enumerate() {
            out[k ^ flip_mask] += p;
        }
        out
    };
    let outcomes = apply_frame(readout.apply_to_distribution(&perfect)?);
    let outcomes_perfect_readout = apply_frame(perfect);

    let w1 = 1.0 - noise.p0[SYNDROME_QUBIT];
    let w0 = noise.p1[SYNDROME_QUBIT];
    let mut branches = Vec::new();
    let mut total = 0.0;
    for (value, w) in [(1u8, w1), (0u8, w0)] {
        let p: f64 = state_probs
            .iter()
            .enumerate()
            .filter(|(idx, _)| bit_of(*idx, SYNDROME_QUBIT, n) == value)
            .map(|(_, p)| p)
            .sum();
        if w * p > 1e-15 {
            let (_, branch) = rho.condition_on_qubit(SYNDROME_QUBIT, value)?;
            branches.push((w * p, (value, branch)));
            total += w * p;
        }
    }
    let (syndrome_ok_state, syndrome_ok_register) = if branches.is_empty() {
        (None, None)
    } else {
        let frame_ops = frame.unitaries()?;
        let weighted: Vec<(f64, DensityMatrix)> = branches.iter().map(|(w, (_, b))| (w / total, b.clone())).collect();
        let mut state = DensityMatrix::mixture(&weighted)?;
        let registers = branches
            .iter()
            .map(|(w, (value, b))| {
                let s1 = DensityMatrix::basis(1, *value as usize)?;
                Ok((w / total, DensityMatrix::from_matrix(n, b.matrix().kronecker(s1.matrix()))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut register = DensityMatrix::mixture(&registers)?;
        for u in &frame_ops {
            state.apply_unitary_mut(u)?;
            register.apply_unitary_mut(u)?;
        }
        (Some(state), Some(register))
    };
    Ok(RunOutput {
        outcomes,
        outcomes_perfect_readout,
        syndrome_ok_probability: total,
        syndrome_ok_state,
        syndrome_ok_register,
    })
}

/// Ideal noise-free run.
pub fn run_ideal(circuit: &Circuit) -> Result<RunOutput> {
    run(circuit, &NoiseConfig::ideal(), RunOptions::default())
}
