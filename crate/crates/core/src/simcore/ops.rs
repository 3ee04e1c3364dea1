// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::check_targets;
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;
const COMPLETENESS_TOL: f64 = 1e-12;

/// A one- or two-qubit unitary bound to its target qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitarySpec {
    matrix: DMatrix<Complex64>,
    targets: Vec<usize>,
}

impl UnitarySpec {
    pub fn new(matrix: DMatrix<Complex64>, targets: Vec<usize>) -> Result<Self> {
        let k = targets.len();
        if !(1..=2).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "unitaries act on 1 or 2 qubits, got {k}"
            )));
        }
        let dim = 1usize << k;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        check_targets(&targets, usize::MAX)?;
        let dev = deviation_from_identity(&(matrix.adjoint() * &matrix));
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix, targets })
    }

    pub fn single(matrix: DMatrix<Complex64>, qubit: usize) -> Result<Self> {
        Self::new(matrix, vec![qubit])
    }

    pub fn two(matrix: DMatrix<Complex64>, first: usize, second: usize) -> Result<Self> {
        Self::new(matrix, vec![first, second])
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            targets: self.targets.clone(),
        }
    }
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<DMatrix<Complex64>>,
    targets: Vec<usize>,
}

impl KrausChannel {
    pub fn new(operators: Vec<DMatrix<Complex64>>, targets: Vec<usize>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus operator set".into()));
        }
        if targets.is_empty() {
            return Err(Error::InvalidArgument("channel without targets".into()));
        }
        check_targets(&targets, usize::MAX)?;
        let dim = 1usize << targets.len();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for a in &operators {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.nrows().max(a.ncols()),
                });
            }
            sum += a.adjoint() * a;
        }
        let dev = deviation_from_identity(&sum);
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { operators, targets })
    }

    pub fn operators(&self) -> &[DMatrix<Complex64>] {
        &self.operators
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Same operators acting on different qubits.
    pub fn retarget(&self, targets: Vec<usize>) -> Result<Self> {
        Self::new(self.operators.clone(), targets)
    }
}

pub(crate) fn deviation_from_identity(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((m[(i, j)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    dev
}

/// Standard gate matrices.
pub mod gates {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
    }

    pub fn identity() -> DMatrix<Complex64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<Complex64> {
        m2(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
    }

    pub fn y() -> DMatrix<Complex64> {
        m2(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
    }

    pub fn z() -> DMatrix<Complex64> {
        m2(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
    }

    pub fn h() -> DMatrix<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        m2(c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.))
    }

    pub fn s() -> DMatrix<Complex64> {
        m2(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.))
    }

    pub fn sdg() -> DMatrix<Complex64> {
        m2(c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.))
    }

    /// Phase error `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> DMatrix<Complex64> {
        m2(c(1., 0.), c(0., 0.), c(0., 0.), Complex64::from_polar(1.0, theta))
    }

    /// Rotation `exp(-iθY/2)`.
    pub fn ry(theta: f64) -> DMatrix<Complex64> {
        let (s, co) = (theta / 2.0).sin_cos();
        m2(c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.))
    }

    /// CNOT with the first target as control.
    pub fn cnot() -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(0, 0)] = c(1., 0.);
        m[(1, 1)] = c(1., 0.);
        m[(2, 3)] = c(1., 0.);
        m[(3, 2)] = c(1., 0.);
        m
    }

    pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a.kronecker(b)
    }
}
