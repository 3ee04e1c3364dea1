// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use ftprep::engine::run_ideal;
use ftprep::pauli::{Pauli, PauliString};
use ftprep::postsel::exact_statistics;
use ftprep::prep::{build_prep_circuit, CnotModel, PrepTarget};

/// Result of injecting every single-location Pauli fault.
#[derive(Debug, Default)]
pub struct FaultScan {
    pub injections: usize,
    pub accepted: usize,
    /// `(target, fault, op index, protected error)` for each violation.
    pub violations: Vec<(String, String, usize, f64)>,
}

/// Injects every non-identity Pauli supported on the qubits of each fault
/// location, for all eight targets, and records accepted protected flips.
pub fn scan_single_faults() -> FaultScan {
    let mut scan = FaultScan::default();
    for target in PrepTarget::all() {
        let base = build_prep_circuit(target, CnotModel::Ideal)
            .unwrap()
            .with_readout_basis(target.basis)
            .unwrap();
        for (index, qubits) in base.fault_locations() {
            for fault in PauliString::all_non_identity(5) {
                if !(0..5).filter(|&q| fault.get(q) != Pauli::I).all(|q| qubits.contains(&q)) {
                    continue;
                }
                scan.injections += 1;
                let c = base.insert_pauli_after(index, &fault).unwrap();
                let table = run_ideal(&c).unwrap().outcomes;
                let Ok(s) = exact_statistics(&table, target) else { continue };
                let Some(p) = s.p_err_protected else { continue };
                scan.accepted += 1;
                if p.value > 1e-12 {
                    scan.violations.push((target.to_string(), fault.to_string(), index, p.value));
                }
            }
        }
    }
    scan
}
