// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration (TOML).

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use crate::engine::PostRotationMode;
use crate::noise::{Echo, NoiseConfig};
use crate::prep::{CnotModel, PrepTarget};
use crate::{Error, Result};

/// The committed reference configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

/// Grid given either as an explicit list or as `count` evenly spaced points
/// from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theta: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub t_us: Grid,
    #[serde(default)]
    pub echo: Echo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoConfig {
    pub shots_per_setting: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

fn parse_str<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub shots: usize,
    #[serde(deserialize_with = "parse_str")]
    pub target: PrepTarget,
    #[serde(default, deserialize_with = "parse_str")]
    pub cnot: CnotModel,
    #[serde(default)]
    pub post_rotation: PostRotationMode,
    /// `[p0, p1]` applied to every qubit, replacing the per-qubit values.
    #[serde(default)]
    pub uniform_readout: Option<[f64; 2]>,
    pub noise: NoiseConfig,
    pub sweep: SweepConfig,
    pub decay: DecayConfig,
    pub tomo: TomoConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some([p0, p1]) = cfg.uniform_readout {
            cfg.noise = cfg.noise.with_uniform_readout(p0, p1);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn reference() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("committed default parses")
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.tomo.shots_per_setting == 0 {
            return Err(Error::Config("tomo.shots_per_setting must be at least 1".into()));
        }
        self.noise.validate()?;
        let theta = self.sweep.theta.points();
        if theta.is_empty() || theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep.theta must be a non-empty finite grid".into()));
        }
        let t = self.decay.t_us.points();
        if t.is_empty() || t.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("decay.t_us must be a non-empty grid of non-negative times".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_matches_device() {
        let cfg = ExperimentConfig::reference();
        assert_eq!(cfg.noise, NoiseConfig::device());
        assert_eq!(cfg.sweep.theta.points().len(), 13);
        assert!((cfg.sweep.theta.points()[12] - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(cfg.target, PrepTarget::z(1, 1));
    }

    #[test]
    fn uniform_readout_override() {
        let text = format!("uniform_readout = [0.1, 0.04]\n{DEFAULT_CONFIG}");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(cfg.noise.p0, [0.1; 5]);
        assert_eq!(cfg.noise.p1, [0.04; 5]);
    }

    #[test]
    fn rejects_bad_values() {
        for (from, to) in [
            ("shots = 100000", "shots = 0"),
            ("count = 13", "count = 0"),
            ("target = \"11\"", "target = \"12\""),
            ("cnot_ns = 780.0", "cnot_ns = 780.0\nbogus = 1"),
        ] {
            let text = DEFAULT_CONFIG.replacen(from, to, 1);
            assert!(matches!(ExperimentConfig::parse(&text), Err(Error::Config(_))), "{to}");
        }
    }
}
