// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::CurveData;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Bound on the largest cosine between the residual and a Jacobian column.
    pub gtol: f64,
    pub xtol: f64,
    /// Optional box bounds per parameter.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 1000, gtol: 1e-8, xtol: 1e-15, bounds: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// `None` marks a parameter the data cannot determine.
    pub stderr: Vec<Option<f64>>,
    /// Weighted residual sum of squares.
    pub rss: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn stderr_of(&self, name: &str) -> Option<Option<f64>> {
        self.names.iter().position(|n| n == name).map(|i| self.stderr[i])
    }
}

fn clamp(p: &mut [f64], bounds: &Option<Vec<(f64, f64)>>) {
    if let Some(b) = bounds {
        for (v, &(lo, hi)) in p.iter_mut().zip(b) {
            *v = v.clamp(lo, hi);
        }
    }
}

fn jacobian<F>(f: &F, p: &[f64], r0: &[f64], bounds: &Option<Vec<(f64, f64)>>) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let m = r0.len();
    let n = p.len();
    let mut j = DMatrix::zeros(m, n);
    let step = f64::EPSILON.cbrt();
    for k in 0..n {
        let h = step * p[k].abs().max(1e-3);
        let (lo, hi) = bounds.as_ref().map_or((f64::NEG_INFINITY, f64::INFINITY), |b| b[k]);
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        let (up, down) = (p[k] + h <= hi, p[k] - h >= lo);
        let col: Vec<f64> = if up && down {
            plus[k] += h;
            minus[k] -= h;
            let (a, b) = (f(&plus)?, f(&minus)?);
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        } else if up {
            plus[k] += h;
            f(&plus)?.iter().zip(r0).map(|(x, y)| (x - y) / h).collect()
        } else {
            minus[k] -= h;
            r0.iter().zip(&f(&minus)?).map(|(x, y)| (x - y) / h).collect()
        };
        for (i, v) in col.into_iter().enumerate() {
            j[(i, k)] = v;
        }
    }
    Ok(j)
}

fn gradient_measure(j: &DMatrix<f64>, r: &[f64]) -> f64 {
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rn == 0.0 {
        return 0.0;
    }
    let rv = DVector::from_column_slice(r);
    (0..j.ncols())
        .map(|k| {
            let col = j.column(k);
            let cn = col.norm();
            if cn == 0.0 {
                0.0
            } else {
                (col.dot(&rv) / (cn * rn)).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Minimizes `½‖r(p)‖²` for a residual function `r`.
///
/// Standard errors come from `s² (JᵀJ)⁻¹` with `s² = 1` when `absolute_sigma`
/// and `rss / (m - n)` otherwise.
pub fn minimize<F>(
    residuals: F,
    names: &[&str],
    init: &[f64],
    absolute_sigma: bool,
    options: &FitOptions,
) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = init.len();
    if names.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: names.len() });
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial parameters must be finite".into()));
    }
    if let Some(b) = &options.bounds {
        if b.len() != n || b.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidArgument("bounds must be one ordered pair per parameter".into()));
        }
    }
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut p = init.to_vec();
    clamp(&mut p, &options.bounds);
    let mut r = residuals(&p)?;
    let m = r.len();
    if m < n {
        return Err(Error::InvalidArgument(format!("{m} residuals cannot determine {n} parameters")));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("residuals not finite at the initial point".into()));
    }
    let mut c = cost(&r);
    let c0 = c;
    let exact = |c: f64| c < 1e-30 || c <= 1e-26 * c0;
    let mut lambda = -1.0;
    let mut nu = 2.0;
    let mut iterations = 0;
    let mut x_converged = false;
    let mut j = jacobian(&residuals, &p, &r, &options.bounds)?;

    while iterations < options.max_iterations {
        if exact(c) || gradient_measure(&j, &r) <= options.gtol {
            break;
        }
        iterations += 1;
        let a = j.transpose() * &j;
        let g = j.transpose() * DVector::from_column_slice(&r);
        let max_diag = (0..n).map(|k| a[(k, k)]).fold(0.0, f64::max).max(1e-300);
        if lambda < 0.0 {
            lambda = 1e-3 * max_diag;
        }
        let mut accepted = false;
        let mut stalled = false;
        for _ in 0..60 {
            let mut damped = a.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * a[(k, k)].max(1e-12 * max_diag);
            }
            let Some(step) = damped.clone().cholesky().map(|ch| ch.solve(&(-&g))) else {
                lambda *= nu;
                nu *= 2.0;
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            clamp(&mut trial, &options.bounds);
            let moved: f64 = trial.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if moved <= options.xtol * (scale + options.xtol) {
                stalled = true;
                break;
            }
            let rt = match residuals(&trial) {
                Ok(rt) if rt.iter().all(|v| v.is_finite()) => rt,
                _ => {
                    lambda *= nu;
                    nu *= 2.0;
                    continue;
                }
            };
            let ct = cost(&rt);
            let predicted = -(step.dot(&g) * 2.0 + (&j * &step).norm_squared());
            if ct < c {
                let rho = if predicted > 0.0 { (c - ct) / predicted } else { 1.0 };
                lambda *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
                nu = 2.0;
                p = trial;
                r = rt;
                c = ct;
                accepted = true;
                break;
            }
            lambda *= nu;
            nu *= 2.0;
        }
        if stalled {
            x_converged = true;
            break;
        }
        if !accepted {
            break;
        }
        j = jacobian(&residuals, &p, &r, &options.bounds)?;
    }
    let gradient_norm = gradient_measure(&j, &r);
    let converged = exact(c) || x_converged || gradient_norm <= options.gtol;

    let svd = j.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let s2 = if absolute_sigma || m == n { 1.0 } else { c / (m - n) as f64 };
    let mut stderr = vec![Some(0.0); n];
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        let singular = !(sv > 1e-10 * smax) || smax == 0.0;
        for (q, se) in stderr.iter_mut().enumerate() {
            let comp = v_t[(k, q)];
            if singular {
                if comp.abs() > 1e-6 {
                    *se = None;
                }
            } else if let Some(v) = se {
                *v += comp * comp / (sv * sv);
            }
        }
    }
    let stderr = stderr.into_iter().map(|v| v.map(|x| (x * s2).sqrt())).collect();
    Ok(FitResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        values: p,
        stderr,
        rss: c,
        gradient_norm,
        iterations,
        converged,
    })
}

/// Fits `model(x, p)` to `data`, weighted by `1/σ` when sigma is present.
pub fn least_squares<M>(model: M, data: &CurveData, names: &[&str], init: &[f64], options: &FitOptions) -> Result<FitResult>
where
    M: Fn(f64, &[f64]) -> f64,
{
    data.validate()?;
    let residuals = |p: &[f64]| -> Result<Vec<f64>> {
        Ok((0..data.len()).map(|i| (data.y[i] - model(data.x[i], p)) * data.weight(i)).collect())
    };
    minimize(residuals, names, init, data.sigma.is_some(), options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 * std::f64::consts::PI / (n - 1) as f64).collect()
    }

    fn cosine(x: f64, p: &[f64]) -> f64 {
        p[0] + p[1] * x.cos()
    }

    #[test]
    fn exact_cosine() {
        let x = grid(13);
        let y = x.iter().map(|&v| 0.5 + 0.3 * v.cos()).collect();
        let d = CurveData::unweighted(x, y).unwrap();
        let f = least_squares(cosine, &d, &["a", "b"], &[0.0, 0.0], &FitOptions::default()).unwrap();
        assert!(f.converged);
        assert!((f.values[0] - 0.5).abs() < 1e-8 && (f.values[1] - 0.3).abs() < 1e-8);
        assert!(f.rss < 1e-10);
    }

    #[test]
    fn noise_scaling() {
        let x = grid(25);
        let sigma = 0.01;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut errs = Vec::new();
        for _ in 0..100 {
            let y = x
                .iter()
                .map(|&v| {
                    let g: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
                    0.5 + 0.3 * v.cos() + sigma * g
                })
                .collect();
            let d = CurveData::new(x.clone(), y, Some(vec![sigma; x.len()])).unwrap();
            let f = least_squares(cosine, &d, &["a", "b"], &[0.4, 0.2], &FitOptions::default()).unwrap();
            errs.push(f.values[0] - 0.5);
        }
        let rms = (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt();
        let expect = sigma / (x.len() as f64).sqrt();
        assert!(rms > 0.5 * expect && rms < 2.0 * expect, "{rms} vs {expect}");
    }

    #[test]
    fn constant_data_flags_phase() {
        let x = grid(13);
        let d = CurveData::unweighted(x.clone(), vec![0.7; x.len()]).unwrap();
        let f = least_squares(
            |x, p| p[0] + p[1] * (x + p[2]).cos(),
            &d,
            &["a", "b", "delta"],
            &[0.5, 0.1, 0.3],
            &FitOptions::default(),
        )
        .unwrap();
        assert!(f.values[1].abs() < 1e-6);
        assert!(f.stderr[2].is_none_or(|s| s > 1e3));
    }

    #[test]
    fn bounds_respected() {
        let x = grid(9);
        let y = x.iter().map(|&v| 0.5 + 0.3 * v.cos()).collect();
        let d = CurveData::unweighted(x, y).unwrap();
        let opts = FitOptions { bounds: Some(vec![(0.0, 1.0), (0.0, 0.1)]), ..Default::default() };
        let f = least_squares(cosine, &d, &["a", "b"], &[0.2, 0.05], &opts).unwrap();
        assert!(f.values[1] <= 0.1 + 1e-15);
    }

    #[test]
    fn stderr_grows_with_noise() {
        let x = grid(21);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let base: Vec<f64> = x.iter().map(|_| rng.random::<f64>() - 0.5).collect();
        let mut last = 0.0;
        for level in [0.001, 0.01, 0.1] {
            let y = x.iter().zip(&base).map(|(&v, e)| 0.5 + 0.3 * v.cos() + level * e).collect();
            let d = CurveData::new(x.clone(), y, Some(vec![level; x.len()])).unwrap();
            let f = least_squares(cosine, &d, &["a", "b"], &[0.5, 0.3], &FitOptions::default()).unwrap();
            let se = f.stderr[0].unwrap();
            assert!(se >= last);
            last = se;
        }
    }

    #[test]
    fn order_invariance() {
        let x = grid(11);
        let y: Vec<f64> = x.iter().map(|&v| 0.2 + 0.6 * (v + 0.1).cos() + 0.01 * (7.0 * v).sin()).collect();
        let model = |x: f64, p: &[f64]| p[0] + p[1] * (x + p[2]).cos();
        let a = least_squares(model, &CurveData::unweighted(x.clone(), y.clone()).unwrap(), &["a", "b", "d"], &[0.1, 0.5, 0.0], &FitOptions::default()).unwrap();
        let (xr, yr): (Vec<f64>, Vec<f64>) = x.iter().rev().zip(y.iter().rev()).map(|(a, b)| (*a, *b)).unzip();
        let b = least_squares(model, &CurveData::unweighted(xr, yr).unwrap(), &["a", "b", "d"], &[0.1, 0.5, 0.0], &FitOptions::default()).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let d = CurveData::unweighted(vec![0.0], vec![1.0]).unwrap();
        assert!(least_squares(cosine, &d, &["a", "b"], &[0.0, 0.0], &FitOptions::default()).is_err());
        assert!(least_squares(cosine, &d, &["a"], &[f64::NAN], &FitOptions::default()).is_err());
    }
}
