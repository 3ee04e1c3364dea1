// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Syndrome post-selection, software parity check and logical error
//! extraction from shot records or exact outcome tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{outcome_bits, outcome_index, NUM_OUTCOMES};
use crate::prep::{Basis, PrepTarget};
use crate::simcore::sample_indices;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShotRecord {
    pub cs: u8,
    pub c: [u8; 4],
    pub basis: Basis,
}

impl ShotRecord {
    pub fn new(cs: u8, c: [u8; 4], basis: Basis) -> Result<Self> {
        if cs > 1 || c.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("shot bits must be 0 or 1".into()));
        }
        Ok(Self { cs, c, basis })
    }

    pub fn parity_ok(&self) -> bool {
        self.c.iter().fold(0, |a, b| a ^ b) == 0
    }

    /// `c1 ⊕ c2`.
    pub fn protected_parity(&self) -> u8 {
        self.c[0] ^ self.c[1]
    }

    /// `c1 ⊕ c3`.
    pub fn gauge_parity(&self) -> u8 {
        self.c[0] ^ self.c[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    fn binomial(hits: f64, trials: f64, sampled: bool) -> Self {
        let value = hits / trials;
        let stderr = if sampled { (value * (1.0 - value) / trials).sqrt() } else { 0.0 };
        Self { value, stderr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostSelSummary {
    /// Shot counts; absent for exact statistics.
    pub total: Option<u64>,
    pub total_syndrome_ok: Option<u64>,
    pub accepted: Option<u64>,
    /// `P(c_s = 1)`.
    pub syndrome_ok: Estimate,
    /// `P(parity even | c_s = 1)`.
    pub acceptance: Estimate,
    /// Conditional on acceptance; `None` when nothing was accepted.
    pub p_err_protected: Option<Estimate>,
    pub p_err_gauge: Option<Estimate>,
    pub p_err_joint: Option<Estimate>,
}

/// Outcome weights (`w`) aggregated over the 32 possible records.
fn summarize(weights: &[f64; NUM_OUTCOMES], target: PrepTarget, counts: Option<u64>) -> Result<PostSelSummary> {
    let sampled = counts.is_some();
    let total: f64 = weights.iter().sum();
    let (mut ok, mut acc, mut prot, mut gauge, mut joint) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &w) in weights.iter().enumerate() {
        let (cs, c) = outcome_bits(k);
        if cs != 1 {
            continue;
        }
        ok += w;
        let shot = ShotRecord { cs, c, basis: target.basis };
        if !shot.parity_ok() {
            continue;
        }
        acc += w;
        let pe = shot.protected_parity() != target.protected_parity();
        let ge = shot.gauge_parity() != target.gauge_parity();
        if pe {
            prot += w;
        }
        if ge {
            gauge += w;
        }
        if pe && ge {
            joint += w;
        }
    }
    if !(total > 0.0) {
        return Err(Error::Undefined("no shots".into()));
    }
    if !(ok > 0.0) {
        return Err(Error::Undefined("no shot passed the syndrome check".into()));
    }
    let cond = |hits: f64| (acc > 0.0).then(|| Estimate::binomial(hits, acc, sampled));
    let as_count = |v: f64| counts.map(|_| v.round() as u64);
    Ok(PostSelSummary {
        total: counts,
        total_syndrome_ok: as_count(ok),
        accepted: as_count(acc),
        syndrome_ok: Estimate::binomial(ok, total, sampled),
        acceptance: Estimate::binomial(acc, ok, sampled),
        p_err_protected: cond(prot),
        p_err_gauge: cond(gauge),
        p_err_joint: cond(joint),
    })
}

/// Counts shots into the post-selection summary.
///
/// Shots must all be recorded in `target.basis`.
pub fn postprocess(shots: &[ShotRecord], target: PrepTarget) -> Result<PostSelSummary> {
    let mut hist = [0.0; NUM_OUTCOMES];
    for (i, s) in shots.iter().enumerate() {
        if s.basis != target.basis {
            return Err(Error::InvalidArgument(format!(
                "shot {i} recorded in {:?} basis, target is {:?}",
                s.basis, target.basis
            )));
        }
        if s.cs > 1 || s.c.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!("shot {i} has non-binary bits")));
        }
        hist[outcome_index(s.cs, s.c)] += 1.0;
    }
    summarize(&hist, target, Some(shots.len() as u64))
}

/// Same summary computed from a normalized outcome table indexed by
/// [`outcome_index`], readout errors already folded in.
pub fn exact_statistics(table: &[f64], target: PrepTarget) -> Result<PostSelSummary> {
    let weights: [f64; NUM_OUTCOMES] = table
        .try_into()
        .map_err(|_| Error::DimensionMismatch { expected: NUM_OUTCOMES, found: table.len() })?;
    if weights.iter().any(|&p| !(p >= -1e-12)) {
        return Err(Error::InvalidArgument("negative outcome probability".into()));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("outcome table sums to {s}")));
    }
    summarize(&weights, target, None)
}

/// Draws shot records from an outcome table.
pub fn sample_records(table: &[f64], shots: usize, seed: u64, basis: Basis) -> Result<Vec<ShotRecord>> {
    if table.len() != NUM_OUTCOMES {
        return Err(Error::DimensionMismatch { expected: NUM_OUTCOMES, found: table.len() });
    }
    Ok(sample_indices(table, shots, seed)?
        .into_iter()
        .map(|k| {
            let (cs, c) = outcome_bits(k);
            ShotRecord { cs, c, basis }
        })
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    cs: u8,
    c1: u8,
    c2: u8,
    c3: u8,
    c4: u8,
}

/// Writes `cs,c1,c2,c3,c4` rows.
pub fn write_shots<W: Write>(writer: W, shots: &[ShotRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in shots {
        w.serialize(Row { cs: s.cs, c1: s.c[0], c2: s.c[1], c3: s.c[2], c4: s.c[3] })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `cs,c1,c2,c3,c4` rows; `source` names the input in error messages.
pub fn read_shots<R: Read>(reader: R, basis: Basis, source: &str) -> Result<Vec<ShotRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["cs", "c1", "c2", "c3", "c4"] {
        return Err(Error::Schema {
            path: source.to_string(),
            line: 1,
            message: "expected header cs,c1,c2,c3,c4".into(),
        });
    }
    let mut out = Vec::new();
    for rec in r.deserialize::<Row>() {
        let line = out.len() as u64 + 2;
        let row = rec.map_err(|e| Error::Schema { path: source.to_string(), line, message: e.to_string() })?;
        let shot = ShotRecord::new(row.cs, [row.c1, row.c2, row.c3, row.c4], basis)
            .map_err(|e| Error::Schema { path: source.to_string(), line, message: e.to_string() })?;
        out.push(shot);
    }
    Ok(out)
}
