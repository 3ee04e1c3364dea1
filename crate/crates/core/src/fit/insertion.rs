// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lm::{least_squares, FitOptions, FitResult};
use super::matching::SiteCoefficients;
use super::CurveData;
use crate::prep::Site;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Acceptance,
    Protected,
    Gauge,
}

/// Acceptance and conditional error curves of one site on a shared θ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionCurves {
    pub site: Site,
    pub acceptance: CurveData,
    pub protected: CurveData,
    pub gauge: CurveData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteFit {
    pub site: Site,
    /// Offset in `(-π/2, π/2]`.
    pub delta: f64,
    pub delta_source: CurveKind,
    pub coefficients: SiteCoefficients,
    pub delta_fit: FitResult,
    pub acceptance_fit: FitResult,
    pub protected_fit: FitResult,
    pub gauge_fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionFit {
    pub sites: Vec<SiteFit>,
}

/// Summed absolute second difference along increasing `x`.
pub fn curvature(x: &[f64], y: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    idx.windows(3).map(|w| (y[w[2]] - 2.0 * y[w[1]] + y[w[0]]).abs()).sum()
}

/// Wraps `(amplitude, δ)` so that δ lies in `(-π/2, π/2]`.
fn canonical_phase(amplitude: f64, delta: f64) -> (f64, f64) {
    let mut d = delta.rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    let mut a = amplitude;
    if d > PI / 2.0 {
        d -= PI;
        a = -a;
    } else if d <= -PI / 2.0 {
        d += PI;
        a = -a;
    }
    (a, d)
}

fn check_grid(c: &InsertionCurves) -> Result<()> {
    for d in [&c.acceptance, &c.protected, &c.gauge] {
        d.validate()?;
    }
    if c.acceptance.x != c.protected.x || c.acceptance.x != c.gauge.x {
        return Err(Error::InvalidArgument("insertion curves must share one θ grid".into()));
    }
    if c.acceptance.len() < 4 {
        return Err(Error::InvalidArgument("at least four θ points are needed".into()));
    }
    Ok(())
}

/// Product `y_err · y_acc`, which follows a pure cosine law.
fn numerator(err: &CurveData, acc: &CurveData) -> CurveData {
    let y = err.y.iter().zip(&acc.y).map(|(e, a)| e * a).collect();
    let sigma = match (&err.sigma, &acc.sigma) {
        (Some(se), Some(sa)) => Some(
            (0..err.len())
                .map(|i| ((acc.y[i] * se[i]).powi(2) + (err.y[i] * sa[i]).powi(2)).sqrt().max(1e-15))
                .collect(),
        ),
        _ => None,
    };
    CurveData { x: err.x.clone(), y, sigma }
}

/// Fits `u + v cos(x + δ)` with several starting phases.
fn fit_cosine(data: &CurveData, options: &FitOptions) -> Result<FitResult> {
    let mean = data.y.iter().sum::<f64>() / data.len() as f64;
    let (lo, hi) = data.y.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    let amp = 0.5 * (hi - lo);
    let model = |x: f64, p: &[f64]| p[0] + p[1] * (x + p[2]).cos();
    let mut best: Option<FitResult> = None;
    for k in 0..5 {
        let d0 = -PI + (2 * k + 1) as f64 * PI / 5.0;
        let fit = least_squares(model, data, &["offset", "amplitude", "delta"], &[mean, amp, d0], options)?;
        if best.as_ref().is_none_or(|b| fit.rss < b.rss) {
            best = Some(fit);
        }
    }
    let mut fit = best.expect("five starts");
    let (a, d) = canonical_phase(fit.values[1], fit.values[2]);
    fit.values[1] = a;
    fit.values[2] = d;
    Ok(fit)
}

/// Fits one site. `delta_source` overrides the curvature rule.
pub fn fit_site(curves: &InsertionCurves, delta_source: Option<CurveKind>, options: &FitOptions) -> Result<SiteFit> {
    check_grid(curves)?;
    let x = &curves.acceptance.x;
    let prot_num = numerator(&curves.protected, &curves.acceptance);
    let gauge_num = numerator(&curves.gauge, &curves.acceptance);
    let candidates = [
        (CurveKind::Acceptance, &curves.acceptance),
        (CurveKind::Protected, &prot_num),
        (CurveKind::Gauge, &gauge_num),
    ];
    let source = match delta_source {
        Some(k) => k,
        None => {
            let (kind, k) = candidates
                .iter()
                .map(|(kind, d)| (*kind, curvature(x, &d.y)))
                .fold((CurveKind::Acceptance, f64::MIN), |best, c| if c.1 > best.1 { c } else { best });
            if !(k > 1e-12) {
                return Err(Error::Numerical(format!("site {}: no curve has usable curvature", curves.site)));
            }
            kind
        }
    };
    let designated = candidates.iter().find(|(k, _)| *k == source).expect("present").1;
    let delta_fit = fit_cosine(designated, options)?;
    let delta = delta_fit.values[2];

    let acc_model = |x: f64, p: &[f64]| p[0] + p[1] * (x + delta).cos();
    let mean = curves.acceptance.y.iter().sum::<f64>() / x.len() as f64;
    let acceptance_fit = least_squares(acc_model, &curves.acceptance, &["a", "b"], &[mean, 0.0], options)?;
    let (a, b) = (acceptance_fit.values[0], acceptance_fit.values[1]);

    let err_model = |x: f64, p: &[f64]| {
        let cos = (x + delta).cos();
        (p[0] + p[1] * cos) / (a + b * cos)
    };
    let fit_err = |d: &CurveData, names: [&str; 2]| {
        let mean = d.y.iter().sum::<f64>() / d.len() as f64;
        least_squares(err_model, d, &names, &[mean * a, 0.0], options)
    };
    let protected_fit = fit_err(&curves.protected, ["c1", "d1"])?;
    let gauge_fit = fit_err(&curves.gauge, ["c2", "d2"])?;
    for f in [&delta_fit, &acceptance_fit, &protected_fit, &gauge_fit] {
        if !f.converged {
            return Err(Error::Numerical(format!(
                "site {}: fit of {:?} did not converge (gradient {:.2e})",
                curves.site, f.names, f.gradient_norm
            )));
        }
    }
    let coefficients = SiteCoefficients {
        a,
        b,
        c1: protected_fit.values[0],
        d1: protected_fit.values[1],
        c2: gauge_fit.values[0],
        d2: gauge_fit.values[1],
    };
    Ok(SiteFit {
        site: curves.site,
        delta,
        delta_source: source,
        coefficients,
        delta_fit,
        acceptance_fit,
        protected_fit,
        gauge_fit,
    })
}

/// Fits every site independently with the curvature rule for δ.
pub fn fit_insertion(curves: &[InsertionCurves], options: &FitOptions) -> Result<InsertionFit> {
    use rayon::prelude::*;
    let sites = curves.par_iter().map(|c| fit_site(c, None, options)).collect::<Result<Vec<_>>>()?;
    Ok(InsertionFit { sites })
}
