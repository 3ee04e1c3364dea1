// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Hermitian Pauli strings in symplectic form.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::simcore::gates;
use crate::{Error, Result};

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn matrix(self) -> DMatrix<Complex64> {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::x(),
            Pauli::Y => gates::y(),
            Pauli::Z => gates::z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of Paulis; bit `q` of each mask refers to qubit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: u32,
    z: u32,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        Self { num_qubits, x: 0, z: 0 }
    }

    pub fn from_factors(factors: &[Pauli]) -> Self {
        let mut p = Self::identity(factors.len());
        for (q, f) in factors.iter().enumerate() {
            p.set(q, *f);
        }
        p
    }

    /// Operator with `pauli` on each listed qubit and identity elsewhere.
    pub fn on(num_qubits: usize, pauli: Pauli, qubits: &[usize]) -> Self {
        let mut p = Self::identity(num_qubits);
        for &q in qubits {
            p.set(q, pauli);
        }
        p
    }

    pub fn set(&mut self, q: usize, pauli: Pauli) {
        let (xb, zb) = pauli.bits();
        let m = 1u32 << q;
        self.x = if xb { self.x | m } else { self.x & !m };
        self.z = if zb { self.z | m } else { self.z & !m };
    }

    pub fn get(&self, q: usize) -> Pauli {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn z_mask(&self) -> u32 {
        self.z
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product up to phase.
    pub fn mul_unsigned(&self, other: &PauliString) -> PauliString {
        PauliString {
            num_qubits: self.num_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.num_qubits).map(|q| self.get(q)).collect()
    }

    /// Full `2^n × 2^n` matrix, qubit 0 as the most significant factor.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::identity(1, 1);
        for q in 0..self.num_qubits {
            m = m.kronecker(&self.get(q).matrix());
        }
        m
    }

    /// Every non-identity Pauli string on `num_qubits` qubits.
    pub fn all_non_identity(num_qubits: usize) -> impl Iterator<Item = PauliString> {
        let total = 1u32 << (2 * num_qubits);
        (1..total).map(move |code| {
            let mut p = PauliString::identity(num_qubits);
            for q in 0..num_qubits {
                p.set(q, Pauli::ALL[((code >> (2 * q)) & 3) as usize]);
            }
            p
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!("bad Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli label".into()));
        }
        Ok(Self::from_factors(&factors))
    }
}
