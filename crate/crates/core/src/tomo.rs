// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Four-qubit state tomography: simulated Pauli-basis measurements, linear
//! inversion with projection onto density matrices, and logical-frame
//! summaries.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code422::{logical_basis_state, sector_block, to_logical_frame, LogicalKet, LogicalLabel, DATA_QUBITS};
use crate::engine::{run, RunOptions};
use crate::noise::{NoiseConfig, ReadoutModel};
use crate::pauli::{Pauli, PauliString};
use crate::prep::{Basis, Circuit};
use crate::simcore::rng_stream;
use crate::simcore::{gates, sample_indices, DensityMatrix, UnitarySpec};
use crate::{Error, Result};

pub const NUM_SETTINGS: usize = 81;
pub const DEFAULT_SHOTS_PER_SETTING: usize = 10_000;

/// Outcome frequencies of one measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingData {
    /// Measurement basis per qubit, each X, Y or Z.
    pub setting: PauliString,
    /// Indexed by the outcome bitstring `c1 c2 c3 c4` (bit 0 = +1 eigenvalue).
    pub counts: [f64; 16],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomoDataset {
    pub settings: Vec<SettingData>,
    /// `None` for exact-probability datasets, whose counts sum to 1.
    pub shots_per_setting: Option<u64>,
}

/// How outcomes are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TomoMode {
    Exact,
    Sampled { shots_per_setting: usize, seed: u64 },
}

/// The 81 settings in lexicographic X < Y < Z order.
pub fn all_settings() -> Vec<PauliString> {
    let mut out = Vec::with_capacity(NUM_SETTINGS);
    for k in 0..NUM_SETTINGS {
        let mut factors = [Pauli::X; 4];
        let mut r = k;
        for q in (0..4).rev() {
            factors[q] = Pauli::NON_IDENTITY[r % 3];
            r /= 3;
        }
        out.push(PauliString::from_factors(&factors));
    }
    out
}

/// Probabilities of the 16 outcomes when measuring `setting`.
fn setting_probabilities(rho: &DensityMatrix, setting: &PauliString) -> Result<Vec<f64>> {
    let mut r = rho.clone();
    for (q, p) in setting.factors().into_iter().enumerate() {
        match p {
            Pauli::X => r.apply_unitary_mut(&UnitarySpec::single(gates::h(), q)?)?,
            Pauli::Y => {
                r.apply_unitary_mut(&UnitarySpec::single(gates::sdg(), q)?)?;
                r.apply_unitary_mut(&UnitarySpec::single(gates::h(), q)?)?;
            }
            Pauli::Z => {}
            Pauli::I => return Err(Error::InvalidArgument("settings cannot contain identity".into())),
        }
    }
    Ok(r.probabilities())
}

/// Measures a four-qubit state in all 81 settings, with `readout` applied.
pub fn tomography_of_state(rho: &DensityMatrix, readout: &ReadoutModel, mode: TomoMode) -> Result<TomoDataset> {
    if rho.num_qubits() != DATA_QUBITS || readout.num_qubits() != DATA_QUBITS {
        return Err(Error::DimensionMismatch { expected: DATA_QUBITS, found: rho.num_qubits() });
    }
    let settings = all_settings();
    let data = settings
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let probs = readout.apply_to_distribution(&setting_probabilities(rho, s)?)?;
            let mut counts = [0.0; 16];
            match mode {
                TomoMode::Exact => counts.copy_from_slice(&probs),
                TomoMode::Sampled { shots_per_setting, seed } => {
                    let sub = rng_stream(seed, k as u64).next_u64();
                    for i in sample_indices(&probs, shots_per_setting, sub)? {
                        counts[i] += 1.0;
                    }
                }
            }
            Ok(SettingData { setting: *s, counts })
        })
        .collect::<Result<Vec<_>>>()?;
    let shots_per_setting = match mode {
        TomoMode::Exact => None,
        TomoMode::Sampled { shots_per_setting, .. } => Some(shots_per_setting as u64),
    };
    Ok(TomoDataset { settings: data, shots_per_setting })
}

/// Runs the circuit, keeps the reported `c_s = 1` branch and measures the
/// data in all 81 settings.
pub fn simulate_tomography(circuit: &Circuit, noise: &NoiseConfig, mode: TomoMode) -> Result<TomoDataset> {
    let out = run(circuit, noise, RunOptions::default())?;
    let rho = out
        .syndrome_ok_state
        .ok_or_else(|| Error::Undefined("syndrome never reports 1".into()))?;
    let readout = ReadoutModel { p0: noise.p0[..4].to_vec(), p1: noise.p1[..4].to_vec() };
    tomography_of_state(&rho, &readout, mode)
}

/// Linear-inversion estimate `(1/16) Σ_P ⟨P⟩ P`, without projection.
pub fn linear_inversion(data: &TomoDataset) -> Result<DMatrix<Complex64>> {
    let mut seen = std::collections::HashSet::new();
    for s in &data.settings {
        if s.setting.num_qubits() != DATA_QUBITS || s.setting.weight() != 4 {
            return Err(Error::InvalidArgument(format!("invalid setting {}", s.setting)));
        }
        seen.insert(s.setting);
    }
    if seen.len() < NUM_SETTINGS {
        return Err(Error::InvalidArgument(format!(
            "need all {NUM_SETTINGS} settings, got {}",
            seen.len()
        )));
    }
    let freqs: Vec<(PauliString, [f64; 16])> = data
        .settings
        .iter()
        .map(|s| {
            let total: f64 = s.counts.iter().sum();
            if !(total > 0.0) {
                return Err(Error::InvalidArgument(format!("setting {} has no counts", s.setting)));
            }
            let mut f = s.counts;
            f.iter_mut().for_each(|c| *c /= total);
            Ok((s.setting, f))
        })
        .collect::<Result<_>>()?;

    let mut rho = DMatrix::<Complex64>::zeros(16, 16);
    for code in 0..256usize {
        let factors: Vec<Pauli> = (0..4).map(|q| Pauli::ALL[(code >> (2 * (3 - q))) & 3]).collect();
        let pauli = PauliString::from_factors(&factors);
        let support: Vec<usize> = (0..4).filter(|&q| factors[q] != Pauli::I).collect();
        let (mut sum, mut n) = (0.0, 0usize);
        for (setting, f) in &freqs {
            if support.iter().any(|&q| setting.get(q) != factors[q]) {
                continue;
            }
            let mut e = 0.0;
            for (outcome, p) in f.iter().enumerate() {
                let parity = support.iter().filter(|&&q| outcome & (8 >> q) != 0).count() % 2;
                e += if parity == 0 { *p } else { -*p };
            }
            sum += e;
            n += 1;
        }
        let expectation = sum / n as f64;
        rho += pauli.matrix() * Complex64::new(expectation / 16.0, 0.0);
    }
    Ok(rho)
}

/// Euclidean projection of a real vector onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Closest density matrix in Frobenius norm to a Hermitian estimate.
pub fn project_to_density_matrix(estimate: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    let n = estimate.nrows();
    if n != estimate.ncols() || !n.is_power_of_two() {
        return Err(Error::InvalidArgument("estimate must be square with power-of-two size".into()));
    }
    let herm = (estimate + estimate.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let proj = project_to_simplex(&vals);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (k, &w) in proj.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += &v * v.adjoint() * Complex64::new(w, 0.0);
    }
    DensityMatrix::from_matrix(n.trailing_zeros() as usize, (&out + out.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Linear inversion followed by projection onto density matrices.
pub fn reconstruct(data: &TomoDataset) -> Result<DensityMatrix> {
    project_to_density_matrix(&linear_inversion(data)?)
}

/// Entrywise `|U†ρU − U†σU|` in the logical-label basis.
pub fn difference_matrix(rho: &DensityMatrix, ideal: &DensityMatrix) -> Result<DMatrix<f64>> {
    let a = to_logical_frame(rho)?;
    let b = to_logical_frame(ideal)?;
    Ok((a - b).map(|z| z.norm()))
}

/// Difference against the pure logical basis state `target`.
pub fn logical_difference_matrix(rho: &DensityMatrix, target: LogicalLabel) -> Result<DMatrix<f64>> {
    difference_matrix(rho, &DensityMatrix::from_pure(&logical_basis_state(target)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub acceptance: f64,
    /// Codespace populations of `00, 01, 10, 11` (Z frame) or
    /// `++, +-, -+, --` (X frame).
    pub populations: [f64; 4],
}

/// Acceptance and normalized codespace populations in the requested frame.
pub fn table_metrics(rho: &DensityMatrix, basis: Basis) -> Result<TableRow> {
    let block = sector_block(&to_logical_frame(rho)?, 0, 0);
    let acceptance = block.trace().re;
    if acceptance < 1e-12 {
        return Err(Error::Undefined("codespace is empty".into()));
    }
    let mut populations = [0.0; 4];
    for (k, pop) in populations.iter_mut().enumerate() {
        let ket = match basis {
            Basis::Z => LogicalKet::basis((k >> 1) as u8, (k & 1) as u8),
            Basis::X => LogicalKet::x_basis(k >> 1 == 1, k & 1 == 1),
        };
        let v = nalgebra::DVector::from_column_slice(&ket.0);
        *pop = (v.adjoint() * &block * &v)[(0, 0)].re / acceptance;
    }
    Ok(TableRow { acceptance, populations })
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    setting: String,
    outcome: String,
    count: f64,
}

/// Writes `setting,outcome,count` rows (16 per setting).
pub fn write_dataset<W: Write>(writer: W, data: &TomoDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in &data.settings {
        for (k, &count) in s.counts.iter().enumerate() {
            w.serialize(Row { setting: s.setting.to_string(), outcome: format!("{k:04b}"), count })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset written by [`write_dataset`].
pub fn read_dataset<R: Read>(reader: R, source: &str) -> Result<TomoDataset> {
    let mut r = csv::Reader::from_reader(reader);
    let schema = |line: u64, message: String| Error::Schema { path: source.to_string(), line, message };
    let mut order: Vec<PauliString> = Vec::new();
    let mut map: std::collections::HashMap<PauliString, [f64; 16]> = Default::default();
    for (i, rec) in r.deserialize::<Row>().enumerate() {
        let line = i as u64 + 2;
        let row = rec.map_err(|e| schema(line, e.to_string()))?;
        let setting: PauliString = row.setting.parse().map_err(|e: Error| schema(line, e.to_string()))?;
        if setting.num_qubits() != 4 || setting.weight() != 4 {
            return Err(schema(line, format!("bad setting {}", row.setting)));
        }
        if row.outcome.len() != 4 {
            return Err(schema(line, format!("bad outcome {}", row.outcome)));
        }
        let k = usize::from_str_radix(&row.outcome, 2).map_err(|e| schema(line, e.to_string()))?;
        if !(row.count >= 0.0) {
            return Err(schema(line, "negative count".into()));
        }
        let counts = map.entry(setting).or_insert_with(|| {
            order.push(setting);
            [0.0; 16]
        });
        counts[k] += row.count;
    }
    let settings: Vec<SettingData> = order.iter().map(|s| SettingData { setting: *s, counts: map[s] }).collect();
    let totals: Vec<f64> = settings.iter().map(|s| s.counts.iter().sum()).collect();
    let shots_per_setting = match totals.first() {
        Some(&t) if t.fract() == 0.0 && t > 1.5 && totals.iter().all(|&x| x == t) => Some(t as u64),
        _ => None,
    };
    Ok(TomoDataset { settings, shots_per_setting })
}
