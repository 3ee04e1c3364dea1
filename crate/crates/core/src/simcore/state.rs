// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{apply_local_column, bit_of, check_targets, KrausChannel, UnitarySpec, C0, C1, MAX_QUBITS};
use crate::{Error, Result};

const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-9;

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "register size must be 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

/// Pure state on up to five qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![C0; dim];
        amps[index] = C1;
        Ok(Self { num_qubits, amps })
    }

    /// Builds a state from amplitudes, which must have unit norm within 1e-10.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("norm² = {norm}")));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_unitary(&self, u: &UnitarySpec) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_mut(u)?;
        Ok(out)
    }

    pub fn apply_unitary_mut(&mut self, u: &UnitarySpec) -> Result<()> {
        check_targets(u.targets(), self.num_qubits)?;
        let mut scratch = vec![C0; u.matrix().nrows()];
        apply_local_column(&mut self.amps, self.num_qubits, u.matrix(), u.targets(), &mut scratch);
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Density matrix on up to five qubits. This is the canonical state type.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::basis(num_qubits, index)?))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self {
            num_qubits: psi.num_qubits(),
            data: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            data: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    /// Wraps a matrix after checking every state invariant.
    pub fn from_matrix(num_qubits: usize, data: DMatrix<Complex64>) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.nrows().max(data.ncols()),
            });
        }
        let rho = Self { num_qubits, data };
        rho.validate()?;
        Ok(rho)
    }

    /// Convex mixture of states on the same register.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let n = first.1.num_qubits;
        let dim = 1usize << n;
        let mut data = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.num_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rho.num_qubits,
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument("negative mixture weight".into()));
            }
            data += &rho.data * Complex64::new(*w, 0.0);
        }
        Self::from_matrix(n, data)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Checks unit trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        self.validate_cheap()?;
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    fn validate_cheap(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let dim = self.dim();
        for i in 0..dim {
            for j in i..dim {
                if (self.data[(i, j)] - self.data[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidState("not Hermitian".into()));
                }
            }
        }
        Ok(())
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) {
            if let Err(e) = self.validate_cheap() {
                panic!("state invariant violated: {e}");
            }
        }
    }

    pub fn apply_unitary(&self, u: &UnitarySpec) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_mut(u)?;
        Ok(out)
    }

    pub fn apply_unitary_mut(&mut self, u: &UnitarySpec) -> Result<()> {
        check_targets(u.targets(), self.num_qubits)?;
        self.data = self.conjugated(u.matrix(), u.targets());
        self.debug_check();
        Ok(())
    }

    pub fn apply_channel(&self, ch: &KrausChannel) -> Result<Self> {
        let mut out = self.clone();
        out.apply_channel_mut(ch)?;
        Ok(out)
    }

    pub fn apply_channel_mut(&mut self, ch: &KrausChannel) -> Result<()> {
        check_targets(ch.targets(), self.num_qubits)?;
        let dim = self.dim();
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for a in ch.operators() {
            acc += self.conjugated(a, ch.targets());
        }
        self.data = acc;
        self.debug_check();
        Ok(())
    }

    /// `A ρ A†` for a local operator `A`, using `ρ = ρ†`.
    fn conjugated(&self, op: &DMatrix<Complex64>, targets: &[usize]) -> DMatrix<Complex64> {
        let left = left_multiply(&self.data, self.num_qubits, op, targets);
        left_multiply(&left.adjoint(), self.num_qubits, op, targets)
    }

    /// Multiplies by a diagonal unitary `diag(phases)` on both sides.
    pub(crate) fn apply_diagonal_mut(&mut self, phases: &[Complex64]) {
        let dim = self.dim();
        for j in 0..dim {
            for i in 0..dim {
                self.data[(i, j)] *= phases[i] * phases[j].conj();
            }
        }
    }

    /// Computational-basis outcome probabilities, indexed by basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)].re.max(0.0)).collect()
    }

    /// `tr(ρ O)` for a full-register operator.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        (&self.data * op).trace()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> f64 {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        (v.adjoint() * &self.data * &v)[(0, 0)].re
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.data - &other.data;
        0.5 * diff.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
    }

    /// Projects qubit `q` onto `value`, traces it out and renormalizes.
    ///
    /// Returns the branch probability together with the reduced state.
    pub fn condition_on_qubit(&self, q: usize, value: u8) -> Result<(f64, DensityMatrix)> {
        let n = self.num_qubits;
        check_targets(&[q], n)?;
        if n < 2 {
            return Err(Error::InvalidArgument("cannot trace out the only qubit".into()));
        }
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| bit_of(i, q, n) == value).collect();
        let prob: f64 = keep.iter().map(|&i| self.data[(i, i)].re).sum();
        if prob < 1e-15 {
            return Err(Error::Undefined(format!("qubit {q} never reads {value}")));
        }
        let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| {
            self.data[(keep[i], keep[j])] / prob
        });
        Ok((prob, Self { num_qubits: n - 1, data: sub }))
    }
}

fn left_multiply(
    m: &DMatrix<Complex64>,
    n: usize,
    op: &DMatrix<Complex64>,
    targets: &[usize],
) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let mut out = m.clone();
    let mut scratch = vec![C0; op.nrows()];
    for col in out.as_mut_slice().chunks_mut(dim) {
        apply_local_column(col, n, op, targets, &mut scratch);
    }
    out
}
