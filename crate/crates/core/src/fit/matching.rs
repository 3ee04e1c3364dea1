// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::analytic::{InsertionCoefficients, LogicalQubit};
use crate::prep::Site;
use crate::Result;

/// Cosine-law coefficients of one site: acceptance `a + b cos`, and the
/// protected / gauge error numerators `c + d cos`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteCoefficients {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub d1: f64,
    pub c2: f64,
    pub d2: f64,
}

impl SiteCoefficients {
    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c1, self.d1, self.c2, self.d2]
    }
}

/// Coefficients fitted to the device's error-insertion sweeps, with the
/// offsets δ per site.
pub const HARDWARE_FIT: [(Site, f64, SiteCoefficients); 3] = [
    (Site::A, -0.1369, SiteCoefficients { a: 0.5044, b: 0.2632, c1: 0.0626, d1: -0.0444, c2: 0.0697, d2: -0.0279 }),
    (Site::B, -0.2291, SiteCoefficients { a: 0.7614, b: 0.0059, c1: 0.0189, d1: -0.0006, c2: 0.3847, d2: -0.3573 }),
    (Site::C, 0.0278, SiteCoefficients { a: 0.4983, b: 0.2708, c1: 0.0646, d1: -0.0466, c2: 0.0795, d2: -0.0395 }),
];

/// Closed-form coefficients with marginal error numerators.
pub fn model_coefficients(site: Site, p0: f64, p1: f64) -> Result<SiteCoefficients> {
    let k = InsertionCoefficients::new(site, p0, p1)?;
    let (c1, d1) = k.marginal(LogicalQubit::Protected);
    let (c2, d2) = k.marginal(LogicalQubit::Gauge);
    Ok(SiteCoefficients { a: k.a, b: k.b, c1, d1, c2, d2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub p0: f64,
    pub p1: f64,
    /// Summed absolute coefficient mismatch at the minimizer.
    pub objective: f64,
    pub on_boundary: bool,
}

fn objective(fitted: &[(Site, SiteCoefficients)], p0: f64, p1: f64) -> f64 {
    fitted
        .iter()
        .map(|(site, k)| {
            let m = model_coefficients(*site, p0, p1).expect("grid stays in [0, 1]");
            m.as_array().iter().zip(k.as_array()).map(|(a, b)| (a - b).abs()).sum::<f64>()
        })
        .sum()
}

/// Readout pair `(p0, p1)` in `[0, 0.5]²` minimizing the summed absolute
/// difference between model and fitted coefficients.
///
/// The model is symmetric under `p0 ↔ p1`; the search keeps `p0 ≥ p1`.
pub fn match_model_params(fitted: &[(Site, SiteCoefficients)]) -> MatchResult {
    const HI: f64 = 0.5;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let n = 200;
    let step = HI / n as f64;
    for i in 0..=n {
        for j in 0..=i {
            let (p0, p1) = (i as f64 * step, j as f64 * step);
            let v = objective(fitted, p0, p1);
            if v < best.0 {
                best = (v, p0, p1);
            }
        }
    }
    let mut h = step;
    for _ in 0..8 {
        let (_, c0, c1) = best;
        let k = 10;
        let fine = 2.0 * h / k as f64;
        for i in 0..=k {
            for j in 0..=k {
                let p0 = (c0 - h + i as f64 * fine).clamp(0.0, HI);
                let p1 = (c1 - h + j as f64 * fine).clamp(0.0, HI);
                if p1 > p0 {
                    continue;
                }
                let v = objective(fitted, p0, p1);
                if v < best.0 {
                    best = (v, p0, p1);
                }
            }
        }
        h = fine;
    }
    let (objective, p0, p1) = best;
    let edge = |p: f64| p < 1e-9 || p > HI - 1e-9;
    MatchResult { p0, p1, objective, on_boundary: edge(p0) || edge(p1) }
}
