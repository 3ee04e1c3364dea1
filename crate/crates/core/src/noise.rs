// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameterized noise: amplitude damping, asymmetric readout flips, static
//! ZZ evolution and idle-time evolution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::simcore::{bit_of, gates, DensityMatrix, KrausChannel, UnitarySpec, MAX_QUBITS};
use crate::{Error, Result};

/// Device qubit names in register order.
pub const QUBIT_NAMES: [&str; 5] = ["D1", "D2", "D3", "D4", "S1"];
pub const SYNDROME_QUBIT: usize = 4;

/// Largest Trotter slice used by [`idle_evolution`] when no count is given.
pub const DEFAULT_MAX_SLICE_US: f64 = 0.05;
pub const MIN_SLICES: usize = 100;

/// Per-qubit noise parameters for the five-qubit register (D1..D4, S1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Relaxation times in µs; `inf` disables damping on that qubit.
    pub t1_us: [f64; 5],
    /// `P(0|1)` per qubit.
    pub p0: [f64; 5],
    /// `P(1|0)` per qubit.
    pub p1: [f64; 5],
    /// Symmetric static ZZ strengths in kHz with zero diagonal.
    pub zz_khz: [[f64; 5]; 5],
    /// Extra `Z(θ)` on the control of every CNOT, radians.
    #[serde(default)]
    pub stark_theta: f64,
    /// Apply T1 damping to every qubit for the duration of each circuit layer.
    #[serde(default)]
    pub gate_damping: bool,
    #[serde(default = "default_single_ns")]
    pub single_qubit_gate_ns: f64,
    #[serde(default = "default_cnot_ns")]
    pub cnot_ns: f64,
}

fn default_single_ns() -> f64 {
    85.0
}

fn default_cnot_ns() -> f64 {
    780.0
}

impl NoiseConfig {
    /// No damping, perfect readout, no coupling.
    pub fn ideal() -> Self {
        Self {
            t1_us: [f64::INFINITY; 5],
            p0: [0.0; 5],
            p1: [0.0; 5],
            zz_khz: [[0.0; 5]; 5],
            stark_theta: 0.0,
            gate_damping: false,
            single_qubit_gate_ns: default_single_ns(),
            cnot_ns: default_cnot_ns(),
        }
    }

    /// Measured device characterization: per-qubit T1 and readout crossover
    /// probabilities, and the static ZZ map symmetrized by averaging the two
    /// measured directions (entries below resolution are zero).
    pub fn device() -> Self {
        let mut zz = [[0.0; 5]; 5];
        let pairs = [
            (0, 1, -49.5),
            (0, 4, -94.5),
            (1, 4, -30.0),
            (2, 3, -77.0),
            (2, 4, -25.0),
            (3, 4, -42.5),
        ];
        for (i, j, v) in pairs {
            zz[i][j] = v;
            zz[j][i] = v;
        }
        Self {
            t1_us: [50.4, 70.3, 77.7, 68.5, 68.0],
            p0: [0.0567, 0.0402, 0.0455, 0.0573, 0.0424],
            p1: [0.0240, 0.0090, 0.0191, 0.0069, 0.0088],
            zz_khz: zz,
            stark_theta: 0.0,
            gate_damping: true,
            single_qubit_gate_ns: default_single_ns(),
            cnot_ns: default_cnot_ns(),
        }
    }

    /// Same readout crossover probabilities on every qubit.
    pub fn with_uniform_readout(mut self, p0: f64, p1: f64) -> Self {
        self.p0 = [p0; 5];
        self.p1 = [p1; 5];
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (q, &t1) in self.t1_us.iter().enumerate() {
            if !(t1 > 0.0) {
                return Err(Error::Config(format!("{}: T1 must be positive", QUBIT_NAMES[q])));
            }
        }
        for q in 0..5 {
            for (name, p) in [("p0", self.p0[q]), ("p1", self.p1[q])] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!("{}: {name} = {p} outside [0, 1]", QUBIT_NAMES[q])));
                }
            }
        }
        check_zz(&self.zz_khz.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.single_qubit_gate_ns >= 0.0 && self.cnot_ns >= 0.0) {
            return Err(Error::Config("gate durations must be non-negative".into()));
        }
        Ok(())
    }

    pub fn readout(&self) -> ReadoutModel {
        ReadoutModel {
            p0: self.p0.to_vec(),
            p1: self.p1.to_vec(),
        }
    }

    /// ZZ sub-matrix for the first `n` register qubits.
    pub fn zz_submatrix(&self, n: usize) -> Vec<Vec<f64>> {
        self.zz_khz[..n].iter().map(|r| r[..n].to_vec()).collect()
    }
}

/// `γ = 1 - e^{-t/T1}`.
pub fn damping_gamma(t_us: f64, t1_us: f64) -> f64 {
    -(-t_us / t1_us).exp_m1()
}

/// Amplitude damping for a duration `t_us` on a qubit with relaxation time `t1_us`.
pub fn amplitude_damping(t_us: f64, t1_us: f64) -> Result<KrausChannel> {
    if !(t_us >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative duration {t_us}")));
    }
    if !(t1_us > 0.0) {
        return Err(Error::InvalidArgument(format!("T1 must be positive, got {t1_us}")));
    }
    damping_channel(damping_gamma(t_us, t1_us))
}

pub(crate) fn damping_channel(gamma: f64) -> Result<KrausChannel> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let a0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
    let a1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    KrausChannel::new(vec![a0, a1], vec![0])
}

/// `ε_r = (P(0|1) + P(1|0)) / 2`.
pub fn assignment_error(p0: f64, p1: f64) -> f64 {
    0.5 * (p0 + p1)
}

/// Report a measured bit through the asymmetric binary channel.
pub fn readout_flip<R: Rng + ?Sized>(bit: u8, p0: f64, p1: f64, rng: &mut R) -> u8 {
    let u: f64 = rng.random();
    match bit {
        1 if u < p0 => 0,
        0 if u < p1 => 1,
        b => b,
    }
}

/// Independent asymmetric readout channel per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

impl ReadoutModel {
    pub fn perfect(n: usize) -> Self {
        Self { p0: vec![0.0; n], p1: vec![0.0; n] }
    }

    pub fn uniform(n: usize, p0: f64, p1: f64) -> Self {
        Self { p0: vec![p0; n], p1: vec![p1; n] }
    }

    pub fn num_qubits(&self) -> usize {
        self.p0.len()
    }

    /// Folds the readout channel into an outcome probability table.
    pub fn apply_to_distribution(&self, probs: &[f64]) -> Result<Vec<f64>> {
        let n = self.num_qubits();
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: probs.len() });
        }
        let mut out = probs.to_vec();
        for q in 0..n {
            let mask = 1usize << (n - 1 - q);
            let (p0, p1) = (self.p0[q], self.p1[q]);
            for i in 0..out.len() {
                if i & mask != 0 {
                    continue;
                }
                let (a, b) = (out[i], out[i | mask]);
                out[i] = a * (1.0 - p1) + b * p0;
                out[i | mask] = a * p1 + b * (1.0 - p0);
            }
        }
        Ok(out)
    }

    /// Applies sampled flips to basis-index shots.
    pub fn apply_to_shots<R: Rng + ?Sized>(&self, shots: &mut [usize], rng: &mut R) {
        let n = self.num_qubits();
        for s in shots.iter_mut() {
            let mut v = *s;
            for q in 0..n {
                let mask = 1usize << (n - 1 - q);
                let bit = bit_of(v, q, n);
                if readout_flip(bit, self.p0[q], self.p1[q], rng) != bit {
                    v ^= mask;
                }
            }
            *s = v;
        }
    }
}

fn check_zz(zz: &[Vec<f64>]) -> Result<()> {
    let n = zz.len();
    for (i, row) in zz.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidArgument("ZZ matrix must be square".into()));
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidArgument("ZZ matrix diagonal must be zero".into()));
        }
        for j in 0..n {
            if (row[j] - zz[j][i]).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("ZZ matrix asymmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Diagonal of `exp(-i H t)` with `H = Σ_{i<j} π η_ij Z_i Z_j`, η in kHz.
fn zz_phases(zz_khz: &[Vec<f64>], n: usize, t_us: f64) -> Vec<Complex64> {
    // kHz · µs = 1e-3
    (0..1usize << n)
        .map(|x| {
            let mut energy_t = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let si = 1.0 - 2.0 * bit_of(x, i, n) as f64;
                    let sj = 1.0 - 2.0 * bit_of(x, j, n) as f64;
                    energy_t += std::f64::consts::PI * zz_khz[i][j] * 1e-3 * t_us * si * sj;
                }
            }
            Complex64::from_polar(1.0, -energy_t)
        })
        .collect()
}

/// Free evolution under static ZZ coupling for `t_us` microseconds.
///
/// A pair with strength η takes `1/(2|η|)` to send `⟨X_i⟩` from +1 to -1.
/// Negative `t_us` runs the evolution backwards.
pub fn zz_evolution(state: &DensityMatrix, zz_khz: &[Vec<f64>], t_us: f64) -> Result<DensityMatrix> {
    let n = state.num_qubits();
    if zz_khz.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: zz_khz.len() });
    }
    check_zz(zz_khz)?;
    let mut out = state.clone();
    out.apply_diagonal_mut(&zz_phases(zz_khz, n, t_us));
    Ok(out)
}

/// Refocusing option for [`idle_evolution`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Echo {
    #[default]
    None,
    /// X on all four data qubits at `t/2`, undone at `t`. Refocuses the
    /// data-syndrome couplings but commutes with data-data ZZ.
    MidpointX,
    /// X on D2, D4 at `t/4` and `3t/4` and on D1, D3 at `t/2`, with D1, D3
    /// undone at `t`. The toggling signs of {S1}, {D1, D3} and {D2, D4} are
    /// mutually orthogonal, so every static ZZ term refocuses.
    Walsh,
}

impl Echo {
    /// `(fraction of t, flipped qubits)`; the last entry restores the frame.
    fn schedule(self) -> &'static [(u32, &'static [usize])] {
        match self {
            Echo::None => &[],
            Echo::MidpointX => &[(2, &[0, 1, 2, 3]), (4, &[0, 1, 2, 3])],
            Echo::Walsh => &[(1, &[1, 3]), (2, &[0, 2]), (3, &[1, 3]), (4, &[0, 2])],
        }
    }
}

impl std::str::FromStr for Echo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Echo::None),
            "midpoint-x" => Ok(Echo::MidpointX),
            "walsh" => Ok(Echo::Walsh),
            other => Err(Error::InvalidArgument(format!("unknown echo {other:?} (none, midpoint-x, walsh)"))),
        }
    }
}

/// Damping plus ZZ for a duration `t_us` on a register whose qubit `q` is
/// device qubit `q`.
///
/// Uses symmetric splitting into `slices` equal steps (default: at least
/// [`MIN_SLICES`] and no longer than [`DEFAULT_MAX_SLICE_US`]).
pub fn idle_evolution(
    state: &DensityMatrix,
    config: &NoiseConfig,
    t_us: f64,
    echo: Echo,
    slices: Option<usize>,
) -> Result<DensityMatrix> {
    if !(t_us >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative duration {t_us}")));
    }
    let n = state.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::InvalidArgument("register too large".into()));
    }
    let mut out = state.clone();
    if t_us == 0.0 {
        return Ok(out);
    }
    let mut slices = slices.unwrap_or_else(|| {
        MIN_SLICES.max((t_us / DEFAULT_MAX_SLICE_US).ceil() as usize)
    });
    if slices == 0 {
        return Err(Error::InvalidArgument("slice count must be positive".into()));
    }
    if echo != Echo::None {
        slices = slices.div_ceil(4) * 4;
    }
    let zz = config.zz_submatrix(n);
    check_zz(&zz)?;
    let dt = t_us / slices as f64;
    let half_phase = zz_phases(&zz, n, dt / 2.0);
    let has_zz = zz.iter().flatten().any(|&v| v != 0.0);
    let damping: Vec<Option<KrausChannel>> = (0..n)
        .map(|q| {
            let g = damping_gamma(dt, config.t1_us[q]);
            (g > 0.0).then(|| damping_channel(g)?.retarget(vec![q])).transpose()
        })
        .collect::<Result<_>>()?;
    let pulses: Vec<(usize, Vec<UnitarySpec>)> = echo
        .schedule()
        .iter()
        .map(|&(quarter, qubits)| {
            let specs = qubits
                .iter()
                .filter(|&&q| q < n)
                .map(|&q| UnitarySpec::single(gates::x(), q))
                .collect::<Result<Vec<_>>>()?;
            Ok((slices * quarter as usize / 4, specs))
        })
        .collect::<Result<_>>()?;
    let pulse_at = |out: &mut DensityMatrix, k: usize| -> Result<()> {
        for (at, specs) in &pulses {
            if *at == k {
                for p in specs {
                    out.apply_unitary_mut(p)?;
                }
            }
        }
        Ok(())
    };

    for k in 0..slices {
        pulse_at(&mut out, k)?;
        if has_zz {
            out.apply_diagonal_mut(&half_phase);
        }
        for ch in damping.iter().flatten() {
            out.apply_channel_mut(ch)?;
        }
        if has_zz {
            out.apply_diagonal_mut(&half_phase);
        }
    }
    pulse_at(&mut out, slices)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code422::{logical_basis_state, LogicalKet, LogicalLabel};
    use crate::pauli::{Pauli, PauliString};
    use crate::simcore::deviation_from_identity;
    use rand::SeedableRng;

    fn completeness(ch: &KrausChannel) -> f64 {
        let dim = ch.operators()[0].nrows();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for a in ch.operators() {
            sum += a.adjoint() * a;
        }
        deviation_from_identity(&sum)
    }

    #[test]
    fn gamma_values() {
        assert_eq!(damping_gamma(0.0, 50.0), 0.0);
        assert!((damping_gamma(50.0 * 2f64.ln(), 50.0) - 0.5).abs() < 1e-15);
        assert!((damping_gamma(1e6, 50.0) - 1.0).abs() < 1e-15);
        assert!(amplitude_damping(-1.0, 50.0).is_err());
        assert!(amplitude_damping(1.0, 0.0).is_err());
        for t in [0.0, 0.3, 7.0, 1e4] {
            assert!(completeness(&amplitude_damping(t, 57.0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn damping_to_ground() {
        let one = DensityMatrix::basis(1, 1).unwrap();
        let out = one.apply_channel(&amplitude_damping(1e5, 50.0).unwrap()).unwrap();
        assert!((out.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assignment_error_examples() {
        assert_eq!(assignment_error(0.0, 0.0), 0.0);
        assert!((assignment_error(0.0567, 0.0240) - 0.04035).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| readout_flip(1, 1.0, 0.0, &mut rng) == 0));
        assert!((0..100).all(|_| readout_flip(0, 1.0, 0.0, &mut rng) == 0));
        assert!((0..100).all(|_| readout_flip(1, 0.0, 0.0, &mut rng) == 1));
    }

    #[test]
    fn readout_flip_statistics() {
        let (p0, p1) = (0.0567, 0.0240);
        let n = 1_000_000;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let ones_lost = (0..n).filter(|_| readout_flip(1, p0, p1, &mut rng) == 0).count() as f64 / n as f64;
        let zeros_flipped = (0..n).filter(|_| readout_flip(0, p0, p1, &mut rng) == 1).count() as f64 / n as f64;
        let sigma = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        assert!((ones_lost - p0).abs() < 4.0 * sigma(p0));
        assert!((zeros_flipped - p1).abs() < 4.0 * sigma(p1));
    }

    #[test]
    fn readout_fold_is_stochastic() {
        let m = ReadoutModel { p0: vec![0.1, 0.3], p1: vec![0.05, 0.2] };
        let out = m.apply_to_distribution(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let expect = [0.1 * 0.3, 0.1 * 0.7, 0.9 * 0.3, 0.9 * 0.7];
        for (a, b) in out.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    fn plus_plus() -> DensityMatrix {
        let h = |q| UnitarySpec::single(gates::h(), q).unwrap();
        DensityMatrix::zero_state(2).unwrap().apply_unitary(&h(0)).unwrap().apply_unitary(&h(1)).unwrap()
    }

    #[test]
    fn zz_half_period() {
        let zz = vec![vec![0.0, -50.0], vec![-50.0, 0.0]];
        let x1 = PauliString::on(2, Pauli::X, &[0]).matrix();
        let rho = plus_plus();
        let at = |t: f64| zz_evolution(&rho, &zz, t).unwrap().expectation(&x1).re;
        assert!((at(10.0) + 1.0).abs() < 1e-12);
        assert!((at(0.0) - 1.0).abs() < 1e-12);
        assert!((at(5.0)).abs() < 1e-12);
    }

    #[test]
    fn zz_identity_and_reversal() {
        let rho = plus_plus();
        let zero = vec![vec![0.0; 2]; 2];
        assert_eq!(zz_evolution(&rho, &zero, 3.0).unwrap(), rho);
        let zz = vec![vec![0.0, 77.0], vec![77.0, 0.0]];
        let fwd = zz_evolution(&rho, &zz, 4.2).unwrap();
        let back = zz_evolution(&fwd, &zz, -4.2).unwrap();
        assert!(back.trace_distance(&rho) < 1e-10);
        let bad = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(zz_evolution(&rho, &bad, 1.0).is_err());
    }

    #[test]
    fn idle_zero_time_is_identity() {
        let rho = DensityMatrix::from_pure(&logical_basis_state(LogicalLabel::codeword(1, 1).unwrap()));
        let out = idle_evolution(&rho, &NoiseConfig::device(), 0.0, Echo::None, None).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn slice_doubling_converged() {
        let cfg = NoiseConfig::device();
        let rho = DensityMatrix::from_pure(&LogicalKet::x_basis(false, false).embed(0, 0));
        for t in [5.0, 20.0] {
            let coarse = idle_evolution(&rho, &cfg, t, Echo::None, None).unwrap();
            let n = MIN_SLICES.max((t / DEFAULT_MAX_SLICE_US).ceil() as usize);
            let fine = idle_evolution(&rho, &cfg, t, Echo::None, Some(2 * n)).unwrap();
            let d = coarse.trace_distance(&fine);
            assert!(d < 1e-6, "t = {t}: {d:e}");
        }
    }

    fn with_syndrome_one(data: &DensityMatrix) -> DensityMatrix {
        let one = DensityMatrix::basis(1, 1).unwrap();
        DensityMatrix::from_matrix(5, data.matrix().kronecker(one.matrix())).unwrap()
    }

    #[test]
    fn walsh_echo_refocuses_all_zz() {
        let mut cfg = NoiseConfig::device();
        cfg.t1_us = [f64::INFINITY; 5];
        let data = DensityMatrix::from_pure(&LogicalKet::x_basis(false, false).embed(0, 0));
        let rho = with_syndrome_one(&data);
        let out = idle_evolution(&rho, &cfg, 13.0, Echo::Walsh, Some(100)).unwrap();
        assert!(out.trace_distance(&rho) < 1e-10);
        for echo in [Echo::None, Echo::MidpointX] {
            let out = idle_evolution(&rho, &cfg, 13.0, echo, Some(100)).unwrap();
            assert!(out.trace_distance(&rho) > 0.1, "{echo:?}");
        }
    }

    #[test]
    fn midpoint_echo_refocuses_syndrome_couplings() {
        let mut cfg = NoiseConfig::ideal();
        for q in 0..4 {
            cfg.zz_khz[q][4] = -40.0 - 10.0 * q as f64;
            cfg.zz_khz[4][q] = cfg.zz_khz[q][4];
        }
        let data = DensityMatrix::from_pure(&LogicalKet::x_basis(false, true).embed(0, 0));
        let rho = with_syndrome_one(&data);
        let out = idle_evolution(&rho, &cfg, 7.0, Echo::MidpointX, Some(101)).unwrap();
        assert!(out.trace_distance(&rho) < 1e-10);
        assert!(idle_evolution(&rho, &cfg, 7.0, Echo::None, None).unwrap().trace_distance(&rho) > 0.1);
    }

    #[test]
    fn echo_parses() {
        assert_eq!("walsh".parse::<Echo>().unwrap(), Echo::Walsh);
        assert!("x".parse::<Echo>().is_err());
    }

}
