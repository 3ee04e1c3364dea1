// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! The [[4,2,2]] error-detecting code on data qubits D1..D4.
//!
//! Basis states are labelled `|L1 L2, s_z s_x⟩`. The codespace states
//! (`s_z = s_x = 0`) carry no relative phases; states in other sectors are
//! obtained by applying `Z4^{s_z}` first and then `X4^{s_x}`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{Pauli, PauliString};
use crate::simcore::{index_of, DensityMatrix, StateVector};
use crate::{Error, Result};

pub const DATA_QUBITS: usize = 4;

/// Stabilizers, logical operators and destabilizers of the code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub stabilizer_x: PauliString,
    pub stabilizer_z: PauliString,
    /// `[X̄_L1, X̄_L2]`
    pub logical_x: [PauliString; 2],
    /// `[Z̄_L1, Z̄_L2]`
    pub logical_z: [PauliString; 2],
    /// `Z̃_D`, flips `s_z`.
    pub destabilizer_z: PauliString,
    /// `X̃_D`, flips `s_x`.
    pub destabilizer_x: PauliString,
}

impl Default for CodeSpec {
    fn default() -> Self {
        let on = |p, qs: &[usize]| PauliString::on(DATA_QUBITS, p, qs);
        Self {
            stabilizer_x: on(Pauli::X, &[0, 1, 2, 3]),
            stabilizer_z: on(Pauli::Z, &[0, 1, 2, 3]),
            logical_x: [on(Pauli::X, &[0, 2]), on(Pauli::X, &[0, 1])],
            logical_z: [on(Pauli::Z, &[0, 1]), on(Pauli::Z, &[0, 2])],
            destabilizer_z: on(Pauli::Z, &[3]),
            destabilizer_x: on(Pauli::X, &[3]),
        }
    }
}

impl CodeSpec {
    /// Verifies the commutation relations that define the code.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::InvalidArgument(format!("code relation violated: {what}")));
        let (sx, sz) = (&self.stabilizer_x, &self.stabilizer_z);
        if !sx.commutes_with(sz) {
            return fail("stabilizers commute");
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            if !l.commutes_with(sx) || !l.commutes_with(sz) {
                return fail("logicals commute with stabilizers");
            }
        }
        for r in 0..2 {
            for s in 0..2 {
                let anti = !self.logical_x[r].commutes_with(&self.logical_z[s]);
                if anti != (r == s) {
                    return fail("logical Pauli algebra");
                }
            }
        }
        let logicals: Vec<_> = self.logical_x.iter().chain(&self.logical_z).collect();
        if self.destabilizer_x.commutes_with(sz) || !self.destabilizer_x.commutes_with(sx) {
            return fail("X destabilizer flips S_z only");
        }
        if self.destabilizer_z.commutes_with(sx) || !self.destabilizer_z.commutes_with(sz) {
            return fail("Z destabilizer flips S_x only");
        }
        if logicals
            .iter()
            .any(|l| !l.commutes_with(&self.destabilizer_x) || !l.commutes_with(&self.destabilizer_z))
        {
            return fail("destabilizers commute with logicals");
        }
        Ok(())
    }
}

/// Label `|L1 L2, s_z s_x⟩` of one of the 16 logical basis states.
///
/// `s_z` is the `S_x` syndrome (eigenvalue `(-1)^{s_z}`) and `s_x` the `S_z`
/// syndrome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalLabel {
    pub l1: u8,
    pub l2: u8,
    pub sz: u8,
    pub sx: u8,
}

impl LogicalLabel {
    pub fn new(l1: u8, l2: u8, sz: u8, sx: u8) -> Result<Self> {
        if [l1, l2, sz, sx].iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("label bits must be 0 or 1".into()));
        }
        Ok(Self { l1, l2, sz, sx })
    }

    pub fn codeword(l1: u8, l2: u8) -> Result<Self> {
        Self::new(l1, l2, 0, 0)
    }

    /// Position in the `(L1, L2, s_z, s_x)` most-significant-first ordering.
    pub fn index(&self) -> usize {
        ((self.l1 as usize) << 3) | ((self.l2 as usize) << 2) | ((self.sz as usize) << 1) | self.sx as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        if i >= 16 {
            return Err(Error::InvalidArgument(format!("label index {i} out of range")));
        }
        Ok(Self {
            l1: ((i >> 3) & 1) as u8,
            l2: ((i >> 2) & 1) as u8,
            sz: ((i >> 1) & 1) as u8,
            sx: (i & 1) as u8,
        })
    }

    pub fn all() -> impl Iterator<Item = LogicalLabel> {
        (0..16).map(|i| LogicalLabel::from_index(i).expect("in range"))
    }

    /// Index of the logical pair `(L1, L2)` inside a 4×4 sector block.
    pub fn logical_index(&self) -> usize {
        ((self.l1 as usize) << 1) | self.l2 as usize
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{},{}{}", self.l1, self.l2, self.sz, self.sx)
    }
}

/// The two data bitstrings (as `[c1, c2, c3, c4]`) in the support of a label.
pub fn label_bitstrings(label: LogicalLabel) -> [[u8; 4]; 2] {
    let mut base = [0u8; 4];
    // X̄_L1 = X1X3, X̄_L2 = X1X2 applied to |0000⟩
    if label.l1 == 1 {
        base[0] ^= 1;
        base[2] ^= 1;
    }
    if label.l2 == 1 {
        base[0] ^= 1;
        base[1] ^= 1;
    }
    base[3] ^= label.sx;
    let mut other = base;
    other.iter_mut().for_each(|b| *b ^= 1);
    [base, other]
}

/// Unit-norm physical state of a logical basis label.
pub fn logical_basis_state(label: LogicalLabel) -> StateVector {
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    // Codeword terms |b⟩ + |b̄⟩ with b the string whose D4 bit (before X4) is 0.
    let codeword = LogicalLabel { sz: 0, sx: 0, ..label };
    for bits in label_bitstrings(codeword) {
        let sign = if label.sz == 1 && bits[3] == 1 { -1.0 } else { 1.0 };
        let mut flipped = bits;
        flipped[3] ^= label.sx;
        amps[index_of(&flipped)] += Complex64::new(sign * amp, 0.0);
    }
    StateVector::from_amplitudes(DATA_QUBITS, amps).expect("unit norm by construction")
}

/// 16×16 unitary whose column `label.index()` is `logical_basis_state(label)`.
pub fn logical_change_of_basis() -> &'static DMatrix<Complex64> {
    static U: OnceLock<DMatrix<Complex64>> = OnceLock::new();
    U.get_or_init(|| {
        let mut u = DMatrix::<Complex64>::zeros(16, 16);
        for label in LogicalLabel::all() {
            let psi = logical_basis_state(label);
            for (row, a) in psi.amplitudes().iter().enumerate() {
                u[(row, label.index())] = *a;
            }
        }
        u
    })
}

/// `U† ρ U`: the state expressed in the logical basis.
pub fn to_logical_frame(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    if rho.num_qubits() != DATA_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: DATA_QUBITS,
            found: rho.num_qubits(),
        });
    }
    let u = logical_change_of_basis();
    Ok(u.adjoint() * rho.matrix() * u)
}

/// Diagonal of the logical-frame matrix, renormalized, by [`LogicalLabel::index`].
pub fn label_populations(rho: &DensityMatrix) -> Result<[f64; 16]> {
    let logical = to_logical_frame(rho)?;
    let mut out = [0.0; 16];
    for (i, w) in out.iter_mut().enumerate() {
        *w = logical[(i, i)].re.max(0.0);
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("state has no weight".into()));
    }
    out.iter_mut().for_each(|w| *w /= total);
    Ok(out)
}

/// 4×4 block of the logical-frame matrix for one syndrome sector, unnormalized.
pub fn sector_block(logical: &DMatrix<Complex64>, sz: u8, sx: u8) -> DMatrix<Complex64> {
    let idx = |l: usize| LogicalLabel { l1: (l >> 1) as u8, l2: (l & 1) as u8, sz, sx }.index();
    DMatrix::from_fn(4, 4, |i, j| logical[(idx(i), idx(j))])
}

/// Weight and conditional logical state of one syndrome sector.
#[derive(Debug, Clone)]
pub struct SectorInfo {
    pub sz: u8,
    pub sx: u8,
    pub probability: f64,
    /// Renormalized 4×4 block over `(L1, L2)`; `None` when the sector is empty.
    pub conditional: Option<DMatrix<Complex64>>,
}

/// Sector weights `tr(Π_{s_z s_x} ρ)` in the order (00, 01, 10, 11).
pub fn sector_probabilities(rho: &DensityMatrix) -> Result<Vec<SectorInfo>> {
    let logical = to_logical_frame(rho)?;
    let mut out = Vec::with_capacity(4);
    for sz in 0..2u8 {
        for sx in 0..2u8 {
            let block = sector_block(&logical, sz, sx);
            let probability = block.trace().re;
            let conditional = (probability > 1e-12)
                .then(|| block / Complex64::new(probability, 0.0));
            out.push(SectorInfo { sz, sx, probability, conditional });
        }
    }
    Ok(out)
}

/// Pure two-qubit logical state, amplitudes over `(L1, L2)` = 00, 01, 10, 11.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalKet(pub [Complex64; 4]);

impl LogicalKet {
    pub fn basis(l1: u8, l2: u8) -> Self {
        let mut a = [Complex64::new(0.0, 0.0); 4];
        a[((l1 as usize & 1) << 1) | (l2 as usize & 1)] = Complex64::new(1.0, 0.0);
        Self(a)
    }

    /// Product of X-basis states; `minus1`/`minus2` select `|-̄⟩` on L1/L2.
    pub fn x_basis(minus1: bool, minus2: bool) -> Self {
        let mut a = [Complex64::new(0.5, 0.0); 4];
        for (i, amp) in a.iter_mut().enumerate() {
            let s1 = if minus1 && (i >> 1) & 1 == 1 { -1.0 } else { 1.0 };
            let s2 = if minus2 && i & 1 == 1 { -1.0 } else { 1.0 };
            *amp *= s1 * s2;
        }
        Self(a)
    }

    /// Physical four-qubit state of this logical state in a syndrome sector.
    pub fn embed(&self, sz: u8, sx: u8) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        for (l, c) in self.0.iter().enumerate() {
            let label = LogicalLabel { l1: (l >> 1) as u8, l2: (l & 1) as u8, sz, sx };
            for (row, a) in logical_basis_state(label).amplitudes().iter().enumerate() {
                amps[row] += c * a;
            }
        }
        StateVector::from_amplitudes(DATA_QUBITS, amps).expect("normalized logical ket")
    }
}

impl From<LogicalLabel> for LogicalKet {
    fn from(l: LogicalLabel) -> Self {
        LogicalKet::basis(l.l1, l.l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodespaceMetrics {
    pub acceptance: f64,
    pub fidelity: f64,
}

/// Acceptance `tr ρ_{0̃0̃}` and fidelity of the renormalized codespace block.
pub fn codespace_metrics(rho: &DensityMatrix, target: &LogicalKet) -> Result<CodespaceMetrics> {
    let logical = to_logical_frame(rho)?;
    let block = sector_block(&logical, 0, 0);
    let acceptance = block.trace().re;
    if acceptance < 1e-12 {
        return Err(Error::Undefined("codespace is empty, fidelity undefined".into()));
    }
    let v = nalgebra::DVector::from_column_slice(&target.0);
    let fidelity = (v.adjoint() * &block * &v)[(0, 0)].re / acceptance;
    Ok(CodespaceMetrics { acceptance, fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(bits: &[(usize, f64)]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 16];
        for &(i, a) in bits {
            v[i] = Complex64::new(a, 0.0);
        }
        v
    }

    #[test]
    fn relations_hold() {
        CodeSpec::default().check().unwrap();
    }

    #[test]
    fn codewords_match_definitions() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = logical_basis_state(LogicalLabel::new(0, 0, 0, 0).unwrap());
        assert_eq!(psi.amplitudes(), ket(&[(0b0000, s), (0b1111, s)]).as_slice());
        let psi = logical_basis_state(LogicalLabel::new(1, 1, 0, 0).unwrap());
        assert_eq!(psi.amplitudes(), ket(&[(0b0110, s), (0b1001, s)]).as_slice());
        let psi = logical_basis_state(LogicalLabel::new(0, 0, 0, 1).unwrap());
        assert_eq!(psi.amplitudes(), ket(&[(0b0001, s), (0b1110, s)]).as_slice());
        let psi = logical_basis_state(LogicalLabel::new(0, 1, 0, 0).unwrap());
        assert_eq!(psi.amplitudes(), ket(&[(0b1100, s), (0b0011, s)]).as_slice());
        let psi = logical_basis_state(LogicalLabel::new(1, 0, 0, 0).unwrap());
        assert_eq!(psi.amplitudes(), ket(&[(0b1010, s), (0b0101, s)]).as_slice());
    }

    #[test]
    fn destabilizers_define_other_sectors() {
        let code = CodeSpec::default();
        for label in LogicalLabel::all() {
            let base = logical_basis_state(LogicalLabel { sz: 0, sx: 0, ..label });
            let mut v = nalgebra::DVector::from_column_slice(base.amplitudes());
            if label.sz == 1 {
                v = code.destabilizer_z.matrix() * v;
            }
            if label.sx == 1 {
                v = code.destabilizer_x.matrix() * v;
            }
            let got = logical_basis_state(label);
            for (a, b) in got.amplitudes().iter().zip(v.iter()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn change_of_basis_is_unitary() {
        let u = logical_change_of_basis();
        let g = u.adjoint() * u;
        assert!(crate::simcore::deviation_from_identity(&g) < 1e-12);
    }

    #[test]
    fn z_l1_conjugates_to_first_wire() {
        let u = logical_change_of_basis();
        let zz = PauliString::on(4, Pauli::Z, &[0, 1]).matrix();
        let conj = u.adjoint() * zz * u;
        let expect = PauliString::on(4, Pauli::Z, &[0]).matrix();
        assert!((conj - expect).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sector_weights() {
        let ideal = DensityMatrix::from_pure(&logical_basis_state(LogicalLabel::new(0, 0, 0, 0).unwrap()));
        let s = sector_probabilities(&ideal).unwrap();
        assert!((s[0].probability - 1.0).abs() < 1e-12);
        assert!(s[1].conditional.is_none());

        let zero = DensityMatrix::zero_state(4).unwrap();
        let s = sector_probabilities(&zero).unwrap();
        assert!((s[0].probability - 0.5).abs() < 1e-12);
        assert!((s[2].probability - 0.5).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        for sec in sector_probabilities(&mixed).unwrap() {
            assert!((sec.probability - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn codespace_metric_examples() {
        let t = LogicalLabel::codeword(1, 1).unwrap();
        let ideal = DensityMatrix::from_pure(&logical_basis_state(t));
        let m = codespace_metrics(&ideal, &t.into()).unwrap();
        assert!((m.acceptance - 1.0).abs() < 1e-12 && (m.fidelity - 1.0).abs() < 1e-12);

        let err = DensityMatrix::from_pure(&logical_basis_state(LogicalLabel::new(1, 1, 0, 1).unwrap()));
        let rho = DensityMatrix::mixture(&[(0.8, ideal), (0.2, err.clone())]).unwrap();
        let m = codespace_metrics(&rho, &t.into()).unwrap();
        assert!((m.acceptance - 0.8).abs() < 1e-12 && (m.fidelity - 1.0).abs() < 1e-12);

        assert!(matches!(codespace_metrics(&err, &t.into()), Err(Error::Undefined(_))));
    }

    #[test]
    fn x_basis_ket_is_hadamard_image() {
        // H⊗4 |0̄0̄⟩ = |+̄+̄⟩
        let p = LogicalKet::x_basis(false, false).embed(0, 0);
        let mut expect = vec![Complex64::new(0.0, 0.0); 16];
        for (i, e) in expect.iter_mut().enumerate() {
            if (i as u32).count_ones() % 2 == 0 {
                *e = Complex64::new(1.0 / 8f64.sqrt(), 0.0);
            }
        }
        for (a, b) in p.amplitudes().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
