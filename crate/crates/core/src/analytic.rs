// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form insertion-curve and logical-decay models.
//!
//! The insertion model assumes an ideal circuit, a `Z(θ)` error on S1 at one
//! site and the same readout crossover probabilities on every qubit. Error
//! probabilities are referred to the data frame of `|0̄0̄⟩`; other targets
//! differ only by a classical relabeling when post-rotations are tracked in
//! software.

use serde::{Deserialize, Serialize};

use crate::code422::{label_bitstrings, LogicalLabel};
use crate::noise::damping_gamma;
use crate::prep::Site;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalQubit {
    Protected,
    Gauge,
}

/// Accepted-shot error classes, mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorClass {
    /// `X̄_L1` only.
    ProtectedOnly,
    /// `X̄_L2` only.
    GaugeOnly,
    /// `X̄_L1 X̄_L2`.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionModelParams {
    pub site: Site,
    pub p0: f64,
    pub p1: f64,
    pub theta: f64,
    #[serde(default)]
    pub delta: f64,
}

impl InsertionModelParams {
    pub fn validate(&self) -> Result<()> {
        check_probs(self.p0, self.p1)?;
        if !self.theta.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(())
    }
}

fn check_probs(p0: f64, p1: f64) -> Result<()> {
    for p in [p0, p1] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("readout probability {p} outside [0, 1]")));
        }
    }
    Ok(())
}

/// Cosine-law coefficients of one site: acceptance `a + b cos θ` and
/// per-class accepted-error weights `c + d cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionCoefficients {
    pub a: f64,
    pub b: f64,
    /// `X̄_L1`-only class.
    pub c1: f64,
    pub d1: f64,
    /// `X̄_L2`-only class.
    pub c2: f64,
    pub d2: f64,
    /// `X̄_L1 X̄_L2` class.
    pub c12: f64,
    pub d12: f64,
}

impl InsertionCoefficients {
    pub fn new(site: Site, p0: f64, p1: f64) -> Result<Self> {
        check_probs(p0, p1)?;
        Ok(match site {
            Site::A | Site::C => coefficients_a(p0, p1),
            Site::B => coefficients_b(p0, p1),
        })
    }

    pub fn class(&self, class: ErrorClass) -> (f64, f64) {
        match class {
            ErrorClass::ProtectedOnly => (self.c1, self.d1),
            ErrorClass::GaugeOnly => (self.c2, self.d2),
            ErrorClass::Both => (self.c12, self.d12),
        }
    }

    /// Weights for a flipped logical regardless of the other one.
    pub fn marginal(&self, qubit: LogicalQubit) -> (f64, f64) {
        match qubit {
            LogicalQubit::Protected => (self.c1 + self.c12, self.d1 + self.d12),
            LogicalQubit::Gauge => (self.c2 + self.c12, self.d2 + self.d12),
        }
    }
}

fn coefficients_a(p0: f64, p1: f64) -> InsertionCoefficients {
    let s = p0 + p1 - 1.0;
    let dp = p0 - p1;
    let a = 0.5 * (1.0 + dp * dp * (3.0 + 4.0 * p0 * p0 - 6.0 * p1 + 4.0 * p1 * p1 + p0 * (4.0 * p1 - 6.0)));
    let b = 0.5 * s * s * (1.0 + 4.0 * p0 * p0 - 2.0 * p1 + 4.0 * p1 * p1 - 2.0 * p0 * (2.0 * p1 + 1.0));
    let c = 0.25
        * (2.0 * p0.powi(4) + p1 + 3.0 * p0 * p0 * p1 + p1.powi(3) * (2.0 * p1 - 3.0)
            - p0.powi(3) * (2.0 * p1 + 3.0)
            + p0 * (1.0 + p1 * (-2.0 + (3.0 - 2.0 * p1) * p1)));
    let d = 0.25 * s * s * (2.0 * p0 * p0 + p1 * (2.0 * p1 - 1.0) - p0 * (2.0 * p1 + 1.0));
    InsertionCoefficients { a, b, c1: c, d1: d, c2: c, d2: d, c12: c, d12: d }
}

fn coefficients_b(p0: f64, p1: f64) -> InsertionCoefficients {
    let s = p0 + p1 - 1.0;
    let dp = p0 - p1;
    let q = p0 * (p0 - 1.0) + p1 * (p1 - 1.0);
    let a = 1.0 + 2.0 * q * (1.0 + q);
    let b = 2.0 * dp * dp * s * s;
    let c1 = 0.5 * q * q;
    let d1 = 0.5 * dp * dp * s * s;
    let c2 = 0.5 * (p0 * p0 + (p1 - 1.0).powi(2)) * ((p0 - 1.0).powi(2) + p1 * p1);
    let d2 = 0.5 * (dp * dp - 1.0) * s * s;
    InsertionCoefficients { a, b, c1, d1, c2, d2, c12: c1, d12: d1 }
}

/// `P(parity even | c_s = 1)` at angle `θ + δ`.
pub fn acceptance_model(params: &InsertionModelParams) -> Result<f64> {
    params.validate()?;
    let k = InsertionCoefficients::new(params.site, params.p0, params.p1)?;
    Ok(k.a + k.b * (params.theta + params.delta).cos())
}

fn conditional(params: &InsertionModelParams, (c, d): (f64, f64), k: &InsertionCoefficients) -> Result<f64> {
    let cos = (params.theta + params.delta).cos();
    let acc = k.a + k.b * cos;
    if acc < 1e-12 {
        return Err(Error::Undefined(format!("acceptance {acc:e} vanishes")));
    }
    Ok((c + d * cos) / acc)
}

/// Probability that the accepted output has `qubit` flipped.
pub fn logical_error_model(params: &InsertionModelParams, qubit: LogicalQubit) -> Result<f64> {
    params.validate()?;
    let k = InsertionCoefficients::new(params.site, params.p0, params.p1)?;
    conditional(params, k.marginal(qubit), &k)
}

/// Probability that the accepted output lies in one exclusive error class.
pub fn error_class_model(params: &InsertionModelParams, class: ErrorClass) -> Result<f64> {
    params.validate()?;
    let k = InsertionCoefficients::new(params.site, params.p0, params.p1)?;
    conditional(params, k.class(class), &k)
}

/// Accepted `P(1̄)` for a `|1̄⟩` logical decaying through two data qubits
/// with a common relaxation time. Defined for negative `t_us` by continuation.
pub fn ideal_decay(t_us: f64, t1_us: f64) -> Result<f64> {
    if !(t1_us > 0.0) {
        return Err(Error::InvalidArgument(format!("T1 must be positive, got {t1_us}")));
    }
    if !t_us.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t_us}")));
    }
    let u = (-t_us / t1_us).exp();
    Ok(u * u / (2.0 * u * u - 2.0 * u + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayModelParams {
    /// Weights of the 16 joint eigenstates, indexed by [`LogicalLabel::index`].
    pub init_mixture: [f64; 16],
    pub t1_us: [f64; 4],
    pub p0: f64,
    pub p1: f64,
}

impl DecayModelParams {
    /// Pure initial label with perfect readout.
    pub fn pure(label: LogicalLabel, t1_us: [f64; 4]) -> Self {
        let mut init_mixture = [0.0; 16];
        init_mixture[label.index()] = 1.0;
        Self { init_mixture, t1_us, p0: 0.0, p1: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_probs(self.p0, self.p1)?;
        if self.init_mixture.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument("mixture weights must be non-negative".into()));
        }
        let s: f64 = self.init_mixture.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("mixture sums to {s}")));
        }
        if self.t1_us.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidArgument("T1 values must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPrediction {
    pub acceptance: f64,
    /// `P(c1 ⊕ c2 = 1 | accept)`.
    pub protected_one: f64,
    /// `P(c1 ⊕ c3 = 1 | accept)`.
    pub gauge_one: f64,
}

/// Data-bit distribution after independent `1 → 0` decay and readout.
pub fn decay_distribution(t_us: f64, params: &DecayModelParams) -> Result<[f64; 16]> {
    params.validate()?;
    if !(t_us >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative time {t_us}")));
    }
    let gamma: Vec<f64> = params.t1_us.iter().map(|&t1| damping_gamma(t_us, t1)).collect();
    let mut populations = [0.0; 16];
    for label in LogicalLabel::all() {
        let w = params.init_mixture[label.index()];
        if w == 0.0 {
            continue;
        }
        for bits in label_bitstrings(label) {
            populations[index4(bits)] += 0.5 * w;
        }
    }
    let mut after = [0.0; 16];
    for (src, &w) in populations.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        // Each excited bit survives with 1 - γ_q.
        let excited: Vec<usize> = (0..4).filter(|q| src & (8 >> q) != 0).collect();
        for m in 0..1usize << excited.len() {
            let mut dst = src;
            let mut p = w;
            for (k, &q) in excited.iter().enumerate() {
                if m & (1 << k) != 0 {
                    dst &= !(8 >> q);
                    p *= gamma[q];
                } else {
                    p *= 1.0 - gamma[q];
                }
            }
            after[dst] += p;
        }
    }
    let mut read = [0.0; 16];
    for (src, &w) in after.iter().enumerate() {
        for dst in 0..16 {
            let mut p = w;
            for q in 0..4 {
                let mask = 8 >> q;
                let (b, r) = (src & mask != 0, dst & mask != 0);
                p *= match (b, r) {
                    (true, false) => params.p0,
                    (true, true) => 1.0 - params.p0,
                    (false, true) => params.p1,
                    (false, false) => 1.0 - params.p1,
                };
            }
            read[dst] += p;
        }
    }
    Ok(read)
}

fn index4(bits: [u8; 4]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Accepted logical populations after waiting `t_us`.
pub fn decay_model(t_us: f64, params: &DecayModelParams) -> Result<DecayPrediction> {
    let dist = decay_distribution(t_us, params)?;
    let (mut acc, mut prot, mut gauge) = (0.0, 0.0, 0.0);
    for (k, &p) in dist.iter().enumerate() {
        let c = [(k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1];
        if (c[0] ^ c[1] ^ c[2] ^ c[3]) != 0 {
            continue;
        }
        acc += p;
        if c[0] ^ c[1] == 1 {
            prot += p;
        }
        if c[0] ^ c[2] == 1 {
            gauge += p;
        }
    }
    if acc < 1e-300 {
        return Err(Error::Undefined("no accepted outcomes".into()));
    }
    Ok(DecayPrediction { acceptance: acc, protected_one: prot / acc, gauge_one: gauge / acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(site: Site, theta: f64, p0: f64, p1: f64) -> InsertionModelParams {
        InsertionModelParams { site, p0, p1, theta, delta: 0.0 }
    }

    #[test]
    fn site_b_ideal_readout() {
        for k in 0..=6 {
            let th = k as f64 * PI / 6.0;
            let p = params(Site::B, th, 0.0, 0.0);
            assert!((acceptance_model(&p).unwrap() - 1.0).abs() < 1e-15);
            let g = logical_error_model(&p, LogicalQubit::Gauge).unwrap();
            assert!((g - (th / 2.0).sin().powi(2)).abs() < 1e-15);
            assert!(logical_error_model(&p, LogicalQubit::Protected).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn site_a_pi_rejects_everything() {
        let p = params(Site::A, PI, 0.0, 0.0);
        assert!(acceptance_model(&p).unwrap().abs() < 1e-15);
        assert!(matches!(logical_error_model(&p, LogicalQubit::Gauge), Err(Error::Undefined(_))));
    }

    #[test]
    fn bad_probabilities_rejected() {
        assert!(acceptance_model(&params(Site::A, 0.0, 1.2, 0.0)).is_err());
        assert!(ideal_decay(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_readout_flattens_b(p in 0.0f64..0.5, th in 0.0f64..6.3) {
            let k = InsertionCoefficients::new(Site::B, p, p).unwrap();
            prop_assert!(k.b.abs() < 1e-15);
            let a = acceptance_model(&params(Site::B, th, p, p)).unwrap();
            prop_assert!((a - k.a).abs() < 1e-15);
        }

        #[test]
        fn a_and_c_identical(p0 in 0.0f64..0.5, p1 in 0.0f64..0.5, th in 0.0f64..6.3) {
            for q in [LogicalQubit::Protected, LogicalQubit::Gauge] {
                let a = logical_error_model(&params(Site::A, th, p0, p1), q);
                let c = logical_error_model(&params(Site::C, th, p0, p1), q);
                match (a, c) {
                    (Ok(a), Ok(c)) => prop_assert_eq!(a, c),
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false),
                }
            }
        }

        #[test]
        fn probabilities_in_range(site in 0usize..3, p0 in 0.0f64..0.5, p1 in 0.0f64..0.5, th in 0.0f64..6.3) {
            let p = params(Site::ALL[site], th, p0, p1);
            let acc = acceptance_model(&p).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&acc));
            if acc > 1e-6 {
                for q in [LogicalQubit::Protected, LogicalQubit::Gauge] {
                    let e = logical_error_model(&p, q).unwrap();
                    prop_assert!((-1e-9..=1.0 + 1e-9).contains(&e));
                }
            }
        }

        #[test]
        fn ideal_decay_decreasing(t in 0.0f64..300.0, dt in 1e-3f64..10.0, t1 in 10.0f64..100.0) {
            prop_assert!(ideal_decay(t + dt, t1).unwrap() < ideal_decay(t, t1).unwrap());
        }
    }

    #[test]
    fn ideal_decay_points() {
        let t1 = 57.0;
        assert_eq!(ideal_decay(0.0, t1).unwrap(), 1.0);
        let tc = t1 * 2f64.ln();
        assert!((ideal_decay(tc, t1).unwrap() - 0.5).abs() < 1e-12);
        assert!(ideal_decay(1e5, t1).unwrap() < 1e-300);
        let h = 1e-6 * t1;
        let slope = (ideal_decay(h, t1).unwrap() - ideal_decay(-h, t1).unwrap()) / (2.0 * h);
        assert!(slope.abs() < 1e-8);
    }

    #[test]
    fn decay_model_limits() {
        let one_one = LogicalLabel::codeword(1, 1).unwrap();
        let p = DecayModelParams::pure(one_one, [57.0, 84.0, 85.0, 81.0]);
        let d = decay_model(0.0, &p).unwrap();
        assert!((d.acceptance - 1.0).abs() < 1e-15);
        assert!((d.protected_one - 1.0).abs() < 1e-15 && (d.gauge_one - 1.0).abs() < 1e-15);
        let d = decay_model(1e5, &p).unwrap();
        assert!((d.acceptance - 1.0).abs() < 1e-12);
        assert!(d.protected_one < 1e-12 && d.gauge_one < 1e-12);
    }

    #[test]
    fn decay_model_matches_ideal_with_equal_t1() {
        let t1 = 70.0;
        let p = DecayModelParams::pure(LogicalLabel::codeword(1, 1).unwrap(), [t1; 4]);
        for k in 0..=60 {
            let t = 3.0 * t1 * k as f64 / 60.0;
            let d = decay_model(t, &p).unwrap();
            let want = ideal_decay(t, t1).unwrap();
            assert!((d.protected_one - want).abs() < 1e-12);
            assert!((d.gauge_one - want).abs() < 1e-12);
        }
    }
}
