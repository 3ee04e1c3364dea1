// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis toolkit for fault-tolerant logical state
//! preparation in the [[4,2,2]] code with a single flag/syndrome qubit.

pub mod analytic;
pub mod cli;
pub mod code422;
pub mod config;
pub mod engine;
pub mod fit;
mod error;
pub mod noise;
pub mod pauli;
pub mod postsel;
pub mod prep;
pub mod simcore;
pub mod tomo;

pub use error::{Error, Result};
