// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Fault-tolerant preparation circuits for the eight logical basis states,
//! plus error-insertion variants.
//!
//! Register: D1..D4 are qubits 0..3, S1 is qubit 4. The syndrome circuit is
//! CNOT(Dk -> S1) for k = 1..4 between two Hadamard layers on the data, so
//! S1 reads out the `XXXX` parity. Sites A, B and C sit on S1 after CNOT 1, 2
//! and 3.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::code422::LogicalKet;
use crate::noise::SYNDROME_QUBIT;
use crate::pauli::{Pauli, PauliString};
use crate::simcore::{gates, KrausChannel, UnitarySpec};
use crate::{Error, Result};

pub const NUM_QUBITS: usize = 5;
pub const DATA: [usize; 4] = [0, 1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            other => Err(Error::InvalidArgument(format!("unknown basis {other:?}"))),
        }
    }
}

/// One of the eight logical product states.
///
/// In the Z basis `first`/`second` are the logical bits of L1/L2. In the X
/// basis they are the signs (1 = minus) of L1/L2, and L2 becomes the
/// protected qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrepTarget {
    pub basis: Basis,
    pub first: u8,
    pub second: u8,
}

impl PrepTarget {
    pub fn new(basis: Basis, first: u8, second: u8) -> Result<Self> {
        if first > 1 || second > 1 {
            return Err(Error::InvalidArgument("target labels must be bits".into()));
        }
        Ok(Self { basis, first, second })
    }

    pub fn z(first: u8, second: u8) -> Self {
        Self { basis: Basis::Z, first: first & 1, second: second & 1 }
    }

    pub fn x(first: u8, second: u8) -> Self {
        Self { basis: Basis::X, first: first & 1, second: second & 1 }
    }

    pub fn all() -> [PrepTarget; 8] {
        [
            Self::z(0, 0),
            Self::z(0, 1),
            Self::z(1, 0),
            Self::z(1, 1),
            Self::x(0, 0),
            Self::x(0, 1),
            Self::x(1, 0),
            Self::x(1, 1),
        ]
    }

    /// Expected `c1 ⊕ c2` after readout in the target's own basis.
    pub fn protected_parity(&self) -> u8 {
        match self.basis {
            Basis::Z => self.first,
            Basis::X => self.second,
        }
    }

    /// Expected `c1 ⊕ c3` after readout in the target's own basis.
    pub fn gauge_parity(&self) -> u8 {
        match self.basis {
            Basis::Z => self.second,
            Basis::X => self.first,
        }
    }

    pub fn logical_ket(&self) -> LogicalKet {
        match self.basis {
            Basis::Z => LogicalKet::basis(self.first, self.second),
            Basis::X => LogicalKet::x_basis(self.first == 1, self.second == 1),
        }
    }
}

impl fmt::Display for PrepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |b: u8| match (self.basis, b) {
            (Basis::Z, b) => char::from(b'0' + b),
            (Basis::X, 0) => '+',
            (Basis::X, _) => '-',
        };
        write!(f, "{}{}", sym(self.first), sym(self.second))
    }
}

impl FromStr for PrepTarget {
    type Err = Error;

    /// Accepts `00`, `01`, `10`, `11`, `++`, `+-`, `-+`, `--`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('|').trim_end_matches('>');
        let chars: Vec<char> = t.chars().collect();
        let bad = || Error::InvalidArgument(format!("unknown target {s:?}"));
        if chars.len() != 2 {
            return Err(bad());
        }
        let z = |c: char| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        };
        let x = |c: char| match c {
            '+' => Some(0),
            '-' => Some(1),
            _ => None,
        };
        if let (Some(a), Some(b)) = (z(chars[0]), z(chars[1])) {
            return Ok(Self::z(a, b));
        }
        if let (Some(a), Some(b)) = (x(chars[0]), x(chars[1])) {
            return Ok(Self::x(a, b));
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CnotModel {
    #[default]
    Ideal,
    /// Each CNOT leaves an extra `Z(θ)` on its control.
    Stark { theta: f64 },
}

impl FromStr for CnotModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ideal" {
            return Ok(CnotModel::Ideal);
        }
        if let Some(v) = s.strip_prefix("stark:") {
            let theta = v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad stark angle {v:?}")))?;
            return Ok(CnotModel::Stark { theta });
        }
        Err(Error::InvalidArgument(format!("unknown CNOT model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
    C,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::A, Site::B, Site::C];

    /// CNOT (1-based) that the site follows.
    pub fn after_cnot(self) -> usize {
        match self {
            Site::A => 1,
            Site::B => 2,
            Site::C => 3,
        }
    }

    /// Data qubits that receive X when a Z(π) at this site is pushed through.
    pub fn propagated_support(self) -> &'static [usize] {
        match self {
            Site::A => &[1, 2, 3],
            Site::B => &[2, 3],
            Site::C => &[3],
        }
    }
}

impl FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Site::A),
            "B" | "b" => Ok(Site::B),
            "C" | "c" => Ok(Site::C),
            other => Err(Error::InvalidArgument(format!("unknown site {other:?}"))),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    /// `diag(1, e^{iθ})`.
    Phase(f64),
    /// `exp(-iθY/2)`.
    Ry(f64),
    /// First target is the control.
    Cnot,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::Sdg => "SDG",
            Gate::Phase(_) => "P",
            Gate::Ry(_) => "RY",
            Gate::Cnot => "CNOT",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match self {
            Gate::Phase(t) | Gate::Ry(t) => Some(*t),
            _ => None,
        }
    }

    pub fn matrix(&self) -> nalgebra::DMatrix<Complex64> {
        match *self {
            Gate::X => gates::x(),
            Gate::Y => gates::y(),
            Gate::Z => gates::z(),
            Gate::H => gates::h(),
            Gate::S => gates::s(),
            Gate::Sdg => gates::sdg(),
            Gate::Phase(t) => gates::phase(t),
            Gate::Ry(t) => gates::ry(t),
            Gate::Cnot => gates::cnot(),
        }
    }

    pub fn as_pauli(&self) -> Option<Pauli> {
        match self {
            Gate::X => Some(Pauli::X),
            Gate::Y => Some(Pauli::Y),
            Gate::Z => Some(Pauli::Z),
            _ => None,
        }
    }

    fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |p: Option<f64>| p.ok_or_else(|| Error::InvalidArgument(format!("{name} needs an angle")));
        Ok(match name {
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "H" => Gate::H,
            "S" => Gate::S,
            "SDG" => Gate::Sdg,
            "P" => Gate::Phase(need(param)?),
            "RY" => Gate::Ry(need(param)?),
            "CNOT" => Gate::Cnot,
            other => return Err(Error::InvalidArgument(format!("unknown gate {other:?}"))),
        })
    }
}

/// What part of the protocol an operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Prep,
    Syndrome,
    PostRotation,
    ReadoutBasis,
    /// Deliberate error; takes no time.
    Inserted,
}

impl Role {
    fn tag(self) -> &'static str {
        match self {
            Role::Prep => "prep",
            Role::Syndrome => "syn",
            Role::PostRotation => "pr",
            Role::ReadoutBasis => "rb",
            Role::Inserted => "err",
        }
    }

    fn from_tag(s: &str) -> Result<Self> {
        Ok(match s {
            "prep" => Role::Prep,
            "syn" => Role::Syndrome,
            "pr" => Role::PostRotation,
            "rb" => Role::ReadoutBasis,
            "err" => Role::Inserted,
            other => return Err(Error::InvalidArgument(format!("unknown role {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    Gate(Gate),
    Channel { label: String, channel: KrausChannel },
    Measure,
    Site(Site),
    Barrier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub kind: OpKind,
    pub targets: Vec<usize>,
    /// Logical timestamp; operations sharing a layer run in parallel.
    pub layer: usize,
    pub role: Role,
}

impl Op {
    pub fn gate(gate: Gate, targets: Vec<usize>, layer: usize, role: Role) -> Self {
        Self { kind: OpKind::Gate(gate), targets, layer, role }
    }

    pub fn unitary(&self) -> Option<Result<UnitarySpec>> {
        match &self.kind {
            OpKind::Gate(g) => Some(UnitarySpec::new(g.matrix(), self.targets.clone())),
            _ => None,
        }
    }
}

/// Ordered operation list on the five-qubit register. Immutable once built;
/// insertion methods return new circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    ops: Vec<Op>,
    target: Option<PrepTarget>,
}

impl Circuit {
    pub fn from_ops(ops: Vec<Op>) -> Result<Self> {
        let c = Self { ops, target: None };
        c.check()?;
        Ok(c)
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn num_qubits(&self) -> usize {
        NUM_QUBITS
    }

    pub fn target(&self) -> Option<PrepTarget> {
        self.target
    }

    pub fn num_layers(&self) -> usize {
        self.ops.iter().map(|o| o.layer + 1).max().unwrap_or(0)
    }

    fn check(&self) -> Result<()> {
        let mut last_layer = 0;
        for (i, op) in self.ops.iter().enumerate() {
            if op.layer < last_layer {
                return Err(Error::InvalidArgument(format!("op {i} breaks layer order")));
            }
            last_layer = op.layer;
            crate::simcore::check_targets(&op.targets, NUM_QUBITS)?;
            let arity = match &op.kind {
                OpKind::Gate(g) => Some(g.arity()),
                OpKind::Measure => Some(1),
                OpKind::Site(_) => Some(1),
                OpKind::Channel { channel, .. } => Some(channel.targets().len()),
                OpKind::Barrier => None,
            };
            if let Some(a) = arity {
                if op.targets.len() != a {
                    return Err(Error::InvalidArgument(format!("op {i} has {} targets, expected {a}", op.targets.len())));
                }
            }
        }
        Ok(())
    }

    /// Index of the op marking `site`.
    pub fn site_index(&self, site: Site) -> Result<usize> {
        self.ops
            .iter()
            .position(|o| o.kind == OpKind::Site(site))
            .ok_or_else(|| Error::InvalidArgument(format!("circuit has no site {site}")))
    }

    /// Index of the S1 measurement.
    pub fn syndrome_measurement_index(&self) -> Option<usize> {
        self.ops
            .iter()
            .position(|o| o.kind == OpKind::Measure && o.targets == [SYNDROME_QUBIT])
    }

    /// Index of the first data-qubit measurement.
    pub fn data_measurement_index(&self) -> Option<usize> {
        self.ops
            .iter()
            .position(|o| o.kind == OpKind::Measure && o.targets[0] != SYNDROME_QUBIT)
    }

    /// Inserts `new` ops right after position `index`, inheriting its layer.
    pub fn insert_after(&self, index: usize, new: impl IntoIterator<Item = (OpKind, Vec<usize>)>) -> Result<Circuit> {
        if index >= self.ops.len() {
            return Err(Error::InvalidArgument(format!("op index {index} out of range")));
        }
        let layer = self.ops[index].layer;
        let mut ops = self.ops.clone();
        let extra: Vec<Op> = new
            .into_iter()
            .map(|(kind, targets)| Op { kind, targets, layer, role: Role::Inserted })
            .collect();
        ops.splice(index + 1..index + 1, extra);
        let c = Circuit { ops, target: self.target };
        c.check()?;
        Ok(c)
    }

    /// Inserts the Pauli string (one gate per non-identity factor) after `index`.
    pub fn insert_pauli_after(&self, index: usize, fault: &PauliString) -> Result<Circuit> {
        if fault.num_qubits() != NUM_QUBITS {
            return Err(Error::DimensionMismatch { expected: NUM_QUBITS, found: fault.num_qubits() });
        }
        let gates = fault.factors().into_iter().enumerate().filter_map(|(q, p)| {
            let g = match p {
                Pauli::I => return None,
                Pauli::X => Gate::X,
                Pauli::Y => Gate::Y,
                Pauli::Z => Gate::Z,
            };
            Some((OpKind::Gate(g), vec![q]))
        });
        self.insert_after(index, gates)
    }

    /// Switches the data readout to the X basis by adding a Hadamard layer
    /// before the data measurements.
    pub fn with_readout_basis(&self, basis: Basis) -> Result<Circuit> {
        if basis == Basis::Z {
            return Ok(self.clone());
        }
        let at = self
            .data_measurement_index()
            .ok_or_else(|| Error::InvalidArgument("circuit has no data measurement".into()))?;
        let layer = self.ops[at].layer;
        let mut ops: Vec<Op> = self.ops[..at].to_vec();
        ops.extend(DATA.iter().map(|&q| Op::gate(Gate::H, vec![q], layer, Role::ReadoutBasis)));
        ops.extend(self.ops[at..].iter().cloned().map(|mut o| {
            o.layer += 1;
            o
        }));
        Ok(Circuit { ops, target: self.target })
    }

    /// Gate positions eligible for single-fault injection, with the qubits
    /// each one touches.
    pub fn fault_locations(&self) -> Vec<(usize, Vec<usize>)> {
        let end = self.data_measurement_index().unwrap_or(self.ops.len());
        self.ops[..end]
            .iter()
            .enumerate()
            .filter(|(_, o)| matches!(o.kind, OpKind::Gate(_)) && o.role != Role::Inserted)
            .map(|(i, o)| (i, o.targets.clone()))
            .collect()
    }

    /// One operation per line: `layer role NAME targets [param]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for op in &self.ops {
            let targets: Vec<String> = op.targets.iter().map(|t| t.to_string()).collect();
            let (name, param) = match &op.kind {
                OpKind::Gate(g) => (g.name().to_string(), g.param()),
                OpKind::Channel { label, .. } => (format!("CHANNEL:{label}"), None),
                OpKind::Measure => ("MEASURE".to_string(), None),
                OpKind::Site(site) => (format!("SITE:{site}"), None),
                OpKind::Barrier => ("BARRIER".to_string(), None),
            };
            s.push_str(&format!("{} {} {}", op.layer, op.role.tag(), name));
            if !targets.is_empty() {
                s.push(' ');
                s.push_str(&targets.join(" "));
            }
            if let Some(p) = param {
                s.push_str(&format!(" ; {p:?}"));
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`Circuit::to_text`] output. Channels cannot be round-tripped.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut ops = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::InvalidArgument(format!("line {}: {m}", n + 1));
            let (body, param) = match line.split_once(';') {
                Some((b, p)) => (b, Some(p.trim().parse::<f64>().map_err(|_| bad("bad parameter"))?)),
                None => (line, None),
            };
            let mut it = body.split_whitespace();
            let layer = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad("missing layer"))?;
            let role = Role::from_tag(it.next().ok_or_else(|| bad("missing role"))?)?;
            let name = it.next().ok_or_else(|| bad("missing name"))?;
            let targets = it
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad target")))
                .collect::<Result<Vec<_>>>()?;
            let kind = if name == "MEASURE" {
                OpKind::Measure
            } else if name == "BARRIER" {
                OpKind::Barrier
            } else if let Some(site) = name.strip_prefix("SITE:") {
                OpKind::Site(site.parse()?)
            } else if name.starts_with("CHANNEL:") {
                return Err(bad("channels are not serializable"));
            } else {
                OpKind::Gate(Gate::from_name(name, param)?)
            };
            ops.push(Op { kind, targets, layer, role });
        }
        Circuit::from_ops(ops)
    }
}

/// Post-rotation data-qubit support for a target, as (gate, qubits).
fn post_rotation(target: PrepTarget) -> (Gate, Vec<usize>) {
    // Z basis: X̄_L1 = X on D1,D3 and X̄_L2 = X on D1,D2.
    // X basis: Z̄_L1 = Z on D1,D2 and Z̄_L2 = Z on D1,D3.
    let (first_mask, second_mask, gate) = match target.basis {
        Basis::Z => (0b1010u8, 0b1100u8, Gate::X),
        Basis::X => (0b1100u8, 0b1010u8, Gate::Z),
    };
    let mut mask = 0u8;
    if target.first == 1 {
        mask ^= first_mask;
    }
    if target.second == 1 {
        mask ^= second_mask;
    }
    let qubits = (0..4).filter(|q| mask & (0b1000 >> q) != 0).collect();
    (gate, qubits)
}

/// Builds the preparation circuit for `target`.
pub fn build_prep_circuit(target: PrepTarget, cnot_model: CnotModel) -> Result<Circuit> {
    if let CnotModel::Stark { theta } = cnot_model {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument("stark angle must be finite".into()));
        }
    }
    let s1 = SYNDROME_QUBIT;
    let mut ops = Vec::new();
    let mut layer = 0;
    ops.push(Op::gate(Gate::X, vec![s1], layer, Role::Prep));
    for &q in &DATA {
        ops.push(Op::gate(Gate::H, vec![q], layer, Role::Prep));
    }
    for (k, &q) in DATA.iter().enumerate() {
        layer += 1;
        ops.push(Op::gate(Gate::Cnot, vec![q, s1], layer, Role::Syndrome));
        if let CnotModel::Stark { theta } = cnot_model {
            ops.push(Op::gate(Gate::Phase(theta), vec![q], layer, Role::Syndrome));
        }
        if let Some(site) = Site::ALL.get(k) {
            ops.push(Op { kind: OpKind::Site(*site), targets: vec![s1], layer, role: Role::Syndrome });
        }
    }
    layer += 1;
    for &q in &DATA {
        ops.push(Op::gate(Gate::H, vec![q], layer, Role::Prep));
    }
    layer += 1;
    ops.push(Op { kind: OpKind::Measure, targets: vec![s1], layer, role: Role::Syndrome });
    if target.basis == Basis::X {
        layer += 1;
        for &q in &DATA {
            ops.push(Op::gate(Gate::H, vec![q], layer, Role::PostRotation));
        }
    }
    let (gate, qubits) = post_rotation(target);
    if !qubits.is_empty() {
        layer += 1;
        for q in qubits {
            ops.push(Op::gate(gate, vec![q], layer, Role::PostRotation));
        }
    }
    layer += 1;
    for &q in &DATA {
        ops.push(Op { kind: OpKind::Measure, targets: vec![q], layer, role: Role::Prep });
    }
    let mut c = Circuit::from_ops(ops)?;
    c.target = Some(target);
    Ok(c)
}

/// Places `Z(θ) = diag(1, e^{iθ})` on S1 at `site`.
pub fn insert_error(circuit: &Circuit, site: Site, theta: f64) -> Result<Circuit> {
    let at = circuit.site_index(site)?;
    circuit.insert_after(at, [(OpKind::Gate(Gate::Phase(theta)), vec![SYNDROME_QUBIT])])
}

/// After each syndrome CNOT, applies `exp(-iθY/2)` to its control and to S1.
pub fn insert_correlated_error(circuit: &Circuit, theta: f64) -> Result<Circuit> {
    let positions: Vec<usize> = circuit
        .ops
        .iter()
        .enumerate()
        .filter(|(_, o)| o.kind == OpKind::Gate(Gate::Cnot) && o.role == Role::Syndrome)
        .map(|(i, _)| i)
        .collect();
    if positions.is_empty() {
        return Err(Error::InvalidArgument("circuit has no syndrome CNOTs".into()));
    }
    let mut out = circuit.clone();
    for &i in positions.iter().rev() {
        let control = circuit.ops[i].targets[0];
        out = out.insert_after(
            i,
            [
                (OpKind::Gate(Gate::Ry(theta)), vec![control]),
                (OpKind::Gate(Gate::Ry(theta)), vec![SYNDROME_QUBIT]),
            ],
        )?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_parsing_round_trip() {
        for t in PrepTarget::all() {
            assert_eq!(t.to_string().parse::<PrepTarget>().unwrap(), t);
        }
        assert!("0+".parse::<PrepTarget>().is_err());
        assert!("012".parse::<PrepTarget>().is_err());
        assert_eq!("|+->".parse::<PrepTarget>().unwrap(), PrepTarget::x(0, 1));
    }

    #[test]
    fn role_swap_in_x_basis() {
        let t = PrepTarget::x(1, 0);
        assert_eq!((t.protected_parity(), t.gauge_parity()), (0, 1));
        let t = PrepTarget::z(1, 0);
        assert_eq!((t.protected_parity(), t.gauge_parity()), (1, 0));
    }

    #[test]
    fn structure() {
        let c = build_prep_circuit(PrepTarget::z(1, 1), CnotModel::Ideal).unwrap();
        let cnots: Vec<&Op> = c.ops().iter().filter(|o| o.kind == OpKind::Gate(Gate::Cnot)).collect();
        assert_eq!(cnots.len(), 4);
        for (k, op) in cnots.iter().enumerate() {
            assert_eq!(op.targets, vec![k, SYNDROME_QUBIT]);
        }
        for site in Site::ALL {
            let i = c.site_index(site).unwrap();
            let prev_cnots = c.ops()[..i].iter().filter(|o| o.kind == OpKind::Gate(Gate::Cnot)).count();
            assert_eq!(prev_cnots, site.after_cnot());
        }
        assert!(c.syndrome_measurement_index().unwrap() < c.data_measurement_index().unwrap());
        let pr: Vec<_> = c.ops().iter().filter(|o| o.role == Role::PostRotation).map(|o| o.targets[0]).collect();
        assert_eq!(pr, vec![1, 2]);
    }

    #[test]
    fn x_basis_post_rotation() {
        let c = build_prep_circuit(PrepTarget::x(0, 0), CnotModel::Ideal).unwrap();
        let pr: Vec<_> = c.ops().iter().filter(|o| o.role == Role::PostRotation).collect();
        assert_eq!(pr.len(), 4);
        assert!(pr.iter().all(|o| o.kind == OpKind::Gate(Gate::H)));
        let c = build_prep_circuit(PrepTarget::x(1, 0), CnotModel::Ideal).unwrap();
        let z: Vec<_> = c
            .ops()
            .iter()
            .filter(|o| o.kind == OpKind::Gate(Gate::Z))
            .map(|o| o.targets[0])
            .collect();
        assert_eq!(z, vec![0, 1]);
    }

    #[test]
    fn text_round_trip() {
        let c = build_prep_circuit(PrepTarget::z(0, 1), CnotModel::Stark { theta: 0.25 }).unwrap();
        let c = insert_error(&c, Site::B, 1.5).unwrap();
        let c = insert_correlated_error(&c, 0.3).unwrap();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back.ops(), c.ops());
    }

    #[test]
    fn insertion_placement() {
        let c = build_prep_circuit(PrepTarget::z(0, 0), CnotModel::Ideal).unwrap();
        let e = insert_error(&c, Site::C, 0.7).unwrap();
        let i = e.site_index(Site::C).unwrap();
        assert_eq!(e.ops()[i + 1].kind, OpKind::Gate(Gate::Phase(0.7)));
        assert_eq!(e.ops()[i + 1].targets, vec![SYNDROME_QUBIT]);
        let y = insert_correlated_error(&c, 0.2).unwrap();
        assert_eq!(y.ops().len(), c.ops().len() + 8);
        let bad = Circuit::from_ops(vec![]).unwrap();
        assert!(insert_error(&bad, Site::A, 1.0).is_err());
        assert!(insert_correlated_error(&bad, 1.0).is_err());
    }

    #[test]
    fn readout_basis_layer() {
        let c = build_prep_circuit(PrepTarget::x(0, 0), CnotModel::Ideal).unwrap();
        let x = c.with_readout_basis(Basis::X).unwrap();
        assert_eq!(x.ops().len(), c.ops().len() + 4);
        assert_eq!(x.num_layers(), c.num_layers() + 1);
    }

    #[test]
    fn stark_model_parse() {
        assert_eq!("ideal".parse::<CnotModel>().unwrap(), CnotModel::Ideal);
        assert_eq!("stark:0.5".parse::<CnotModel>().unwrap(), CnotModel::Stark { theta: 0.5 });
        assert!("tpcx".parse::<CnotModel>().is_err());
        assert!(build_prep_circuit(PrepTarget::z(0, 0), CnotModel::Stark { theta: f64::NAN }).is_err());
    }
}
