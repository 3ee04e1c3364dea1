// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::lm::{least_squares, minimize, FitOptions, FitResult};
use super::CurveData;
use crate::analytic::{decay_model, ideal_decay, DecayModelParams};
use crate::{Error, Result};

/// Accepted decay curves on a shared time grid (µs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub protected: CurveData,
    pub gauge: CurveData,
    pub acceptance: Option<CurveData>,
}

impl DecaySeries {
    fn curves(&self) -> impl Iterator<Item = &CurveData> {
        [&self.protected, &self.gauge].into_iter().chain(self.acceptance.as_ref())
    }

    fn validate(&self) -> Result<()> {
        for c in self.curves() {
            c.validate()?;
            if c.x != self.protected.x {
                return Err(Error::InvalidArgument("decay curves must share one time grid".into()));
            }
        }
        if self.protected.len() < 3 {
            return Err(Error::InvalidArgument("at least three time points are needed".into()));
        }
        if self.protected.x.iter().any(|&t| !(t >= 0.0)) {
            return Err(Error::InvalidArgument("times must be non-negative".into()));
        }
        let weighted = self.curves().filter(|c| c.sigma.is_some()).count();
        if weighted != 0 && weighted != self.curves().count() {
            return Err(Error::InvalidArgument("sigma must be given for all curves or none".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub t1_us: [f64; 4],
    pub p0: f64,
    pub p1: f64,
    pub result: FitResult,
    /// False when some parameter combination is unconstrained by the data.
    pub identifiable: bool,
}

const NAMES: [&str; 6] = ["T1_D1", "T1_D2", "T1_D3", "T1_D4", "p0", "p1"];

const STARTS: [[f64; 4]; 5] = [
    [1.0, 1.0, 1.0, 1.0],
    [0.75, 1.1, 1.1, 1.05],
    [1.05, 1.1, 1.1, 0.75],
    [0.8, 1.25, 0.9, 1.1],
    [1.1, 0.9, 1.25, 0.8],
];

/// Fits per-qubit T1 and a uniform readout pair to decay curves starting
/// from `init_mixture`.
///
/// The observables are invariant under D1↔D4, D2↔D3 for symmetric
/// mixtures; only an asymmetric mixture separates those T1 values.
pub fn fit_decay(series: &DecaySeries, init_mixture: &[f64; 16], options: &FitOptions) -> Result<DecayFit> {
    series.validate()?;
    let flat = series.curves().all(|c| {
        let (lo, hi) = c.y.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
        hi - lo < 1e-12
    });
    if flat {
        return Err(Error::Numerical("decay curves are flat; T1 is not identifiable".into()));
    }
    DecayModelParams { init_mixture: *init_mixture, t1_us: [1.0; 4], p0: 0.0, p1: 0.0 }.validate()?;

    let times = &series.protected.x;
    let weighted = series.protected.sigma.is_some();
    let residuals = |p: &[f64]| -> Result<Vec<f64>> {
        let params = DecayModelParams {
            init_mixture: *init_mixture,
            t1_us: [p[0], p[1], p[2], p[3]],
            p0: p[4],
            p1: p[5],
        };
        let mut r = Vec::with_capacity(3 * times.len());
        for (i, &t) in times.iter().enumerate() {
            let m = decay_model(t, &params)?;
            r.push((m.protected_one - series.protected.y[i]) / series.protected.weight(i));
            r.push((m.gauge_one - series.gauge.y[i]) / series.gauge.weight(i));
            if let Some(acc) = &series.acceptance {
                r.push((m.acceptance - acc.y[i]) / acc.weight(i));
            }
        }
        Ok(r)
    };

    let base = fit_single_t1(&series.protected, &FitOptions::default())
        .ok()
        .map(|f| f.values[0])
        .filter(|t| t.is_finite() && *t > 1.0 && *t < 1e4)
        .unwrap_or(70.0);
    let mut opts = options.clone();
    if opts.bounds.is_none() {
        let mut b = vec![(1.0, 1e4); 4];
        b.extend([(0.0, 0.5), (0.0, 0.5)]);
        opts.bounds = Some(b);
    }
    let mut best: Option<FitResult> = None;
    for scale in STARTS {
        for (q0, q1) in [(0.03, 0.01), (0.08, 0.03)] {
            let init: Vec<f64> = scale.iter().map(|s| s * base).chain([q0, q1]).collect();
            let fit = match minimize(residuals, &NAMES, &init, weighted, &opts) {
                Ok(f) => f,
                Err(Error::Undefined(_)) => continue,
                Err(e) => return Err(e),
            };
            if best.as_ref().is_none_or(|b| fit.rss < b.rss) {
                best = Some(fit);
            }
        }
    }
    let result = best.ok_or_else(|| Error::Numerical("decay fit failed from every start".into()))?;
    let v = &result.values;
    Ok(DecayFit {
        t1_us: [v[0], v[1], v[2], v[3]],
        p0: v[4],
        p1: v[5],
        identifiable: result.stderr.iter().all(Option::is_some),
        result,
    })
}

/// Single-T1 fit of an accepted `P(1̄)` curve to the ideal decay law.
pub fn fit_single_t1(curve: &CurveData, options: &FitOptions) -> Result<FitResult> {
    curve.validate()?;
    let model = |t: f64, p: &[f64]| ideal_decay(t, p[0].max(1e-9)).unwrap_or(f64::NAN);
    let mut best: Option<FitResult> = None;
    for init in [20.0, 70.0, 200.0] {
        let fit = least_squares(model, curve, &["T1"], &[init], options)?;
        if fit.values[0] > 0.0 && best.as_ref().is_none_or(|b| fit.rss < b.rss) {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| Error::Numerical("single-T1 fit found no positive T1".into()))
}
