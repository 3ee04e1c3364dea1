// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Curve fitting: a Levenberg-Marquardt core plus the insertion, decay and
//! readout-matching fits built on it.

mod decay;
mod insertion;
mod lm;
mod matching;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use decay::{fit_decay, fit_single_t1, DecayFit, DecaySeries};
pub use insertion::{curvature, fit_insertion, fit_site, CurveKind, InsertionCurves, InsertionFit, SiteFit};
pub use lm::{least_squares, minimize, FitOptions, FitResult};
pub use matching::{match_model_params, model_coefficients, MatchResult, SiteCoefficients, HARDWARE_FIT};

/// Measured curve `y(x)` with optional per-point standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `None` for an unweighted fit.
    pub sigma: Option<Vec<f64>>,
}

impl CurveData {
    pub fn new(x: Vec<f64>, y: Vec<f64>, sigma: Option<Vec<f64>>) -> Result<Self> {
        let c = Self { x, y, sigma };
        c.validate()?;
        Ok(c)
    }

    pub fn unweighted(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y, None)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.x.len(), found: self.y.len() });
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() {
                return Err(Error::DimensionMismatch { expected: self.x.len(), found: s.len() });
            }
            if s.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::InvalidArgument("sigma values must be positive".into()));
            }
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("curve contains non-finite values".into()));
        }
        Ok(())
    }

    pub(crate) fn weight(&self, i: usize) -> f64 {
        self.sigma.as_ref().map_or(1.0, |s| 1.0 / s[i])
    }

    /// Reads `x,y,sigma` rows. An empty sigma column means unweighted.
    pub fn read_csv<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let schema = |line: u64, message: String| Error::Schema { path: source.to_string(), line, message };
        let headers: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let has_sigma = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["x", "y"] => false,
            ["x", "y", "sigma"] => true,
            _ => return Err(schema(1, "expected header x,y[,sigma]".into())),
        };
        let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
        let mut any_sigma = false;
        for (i, rec) in r.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| schema(line, e.to_string()))?;
            let num = |k: usize| -> Result<Option<f64>> {
                match rec.get(k).map(str::trim) {
                    None | Some("") => Ok(None),
                    Some(v) => v.parse().map(Some).map_err(|_| schema(line, format!("bad number {v:?}"))),
                }
            };
            x.push(num(0)?.ok_or_else(|| schema(line, "missing x".into()))?);
            y.push(num(1)?.ok_or_else(|| schema(line, "missing y".into()))?);
            let sv = if has_sigma { num(2)? } else { None };
            any_sigma |= sv.is_some();
            s.push(sv);
        }
        let sigma = if any_sigma {
            Some(
                s.into_iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| schema(i as u64 + 2, "missing sigma".into())))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Self::new(x, y, sigma).map_err(|e| schema(1, e.to_string()))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y", "sigma"])?;
        for i in 0..self.len() {
            let s = self.sigma.as_ref().map(|s| s[i].to_string()).unwrap_or_default();
            w.write_record([self.x[i].to_string(), self.y[i].to_string(), s])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let c = CurveData::new(vec![0.0, 0.5], vec![1.0, 0.25], Some(vec![0.1, 0.2])).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(CurveData::read_csv(buf.as_slice(), "mem").unwrap(), c);
        let u = CurveData::read_csv("x,y\n1,2\n3,4\n".as_bytes(), "mem").unwrap();
        assert!(u.sigma.is_none());
    }

    #[test]
    fn schema_errors_carry_line() {
        match CurveData::read_csv("x,y,sigma\n1,2,0.1\n1,oops,0.1\n".as_bytes(), "f.csv") {
            Err(Error::Schema { line, path, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(path, "f.csv");
            }
            other => panic!("{other:?}"),
        }
        assert!(CurveData::read_csv("a,b\n".as_bytes(), "f").is_err());
        assert!(CurveData::new(vec![1.0], vec![1.0], Some(vec![0.0])).is_err());
        assert!(CurveData::new(vec![1.0], vec![], None).is_err());
    }
}
