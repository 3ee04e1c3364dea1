// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the ftprep core.
//!
//! Every fallible function returns an [`FtpStatus`] and writes results
//! through out-pointers. On failure the message is kept per thread and can
//! be read with [`ftp_last_error_message`]. Handles are opaque and must be
//! released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ftprep::analytic::{
    acceptance_model, ideal_decay, logical_error_model, InsertionModelParams, LogicalQubit,
};
use ftprep::engine::{run, PostRotationMode, RunOptions, NUM_OUTCOMES};
use ftprep::noise::NoiseConfig;
use ftprep::postsel::{exact_statistics, postprocess, Estimate, PostSelSummary, ShotRecord};
use ftprep::prep::{build_prep_circuit, insert_correlated_error, insert_error, Basis, Circuit, CnotModel, PrepTarget, Site};
use ftprep::Error;

/// Outcome table length: `P(c_s, c1..c4)`, index `c_s<<4 | c1<<3 | c2<<2 | c3<<1 | c4`.
pub const FTP_NUM_OUTCOMES: usize = 32;

const _: () = assert!(FTP_NUM_OUTCOMES == NUM_OUTCOMES);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Quantity is undefined, e.g. nothing was accepted.
    Undefined = 3,
    Numerical = 4,
    Io = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpBasis {
    Z = 0,
    X = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpSite {
    A = 0,
    B = 1,
    C = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpLogical {
    Protected = 0,
    Gauge = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpPostRotation {
    Physical = 0,
    Frame = 1,
}

/// A logical product state. Bits are 0 or 1; in the X basis 1 means minus.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtpTarget {
    pub basis: FtpBasis,
    pub first: u8,
    pub second: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FtpEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Post-selection summary. Conditional errors are valid only when
/// `has_errors` is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FtpSummary {
    pub syndrome_ok: FtpEstimate,
    pub acceptance: FtpEstimate,
    pub has_errors: u8,
    pub p_err_protected: FtpEstimate,
    pub p_err_gauge: FtpEstimate,
    pub p_err_joint: FtpEstimate,
}

/// Opaque preparation circuit.
pub struct FtpCircuit {
    circuit: Circuit,
    target: PrepTarget,
}

/// Opaque noise configuration.
pub struct FtpNoise {
    config: NoiseConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FtpStatus {
    match e {
        Error::Undefined(_) => FtpStatus::Undefined,
        Error::Numerical(_) | Error::NotUnitary(_) | Error::NotTracePreserving(_) => FtpStatus::Numerical,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Schema { .. } => FtpStatus::Io,
        _ => FtpStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and panics as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), FtpStatusError>) -> FtpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtpStatus::Ok,
        Ok(Err(FtpStatusError(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            FtpStatus::Internal
        }
    }
}

struct FtpStatusError(FtpStatus, String);

impl From<Error> for FtpStatusError {
    fn from(e: Error) -> Self {
        FtpStatusError(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> FtpStatusError {
    FtpStatusError(FtpStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, FtpStatusError> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, FtpStatusError> {
    p.as_ref().ok_or_else(|| null(name))
}

fn target_of(t: &FtpTarget) -> Result<PrepTarget, FtpStatusError> {
    let basis = match t.basis {
        FtpBasis::Z => Basis::Z,
        FtpBasis::X => Basis::X,
    };
    Ok(PrepTarget::new(basis, t.first, t.second)?)
}

fn site_of(s: FtpSite) -> Site {
    match s {
        FtpSite::A => Site::A,
        FtpSite::B => Site::B,
        FtpSite::C => Site::C,
    }
}

fn estimate(e: Estimate) -> FtpEstimate {
    FtpEstimate { value: e.value, std_error: e.stderr }
}

fn summary(s: &PostSelSummary) -> FtpSummary {
    let mut out = FtpSummary {
        syndrome_ok: estimate(s.syndrome_ok),
        acceptance: estimate(s.acceptance),
        ..Default::default()
    };
    if let (Some(p), Some(g), Some(j)) = (s.p_err_protected, s.p_err_gauge, s.p_err_joint) {
        out.has_errors = 1;
        out.p_err_protected = estimate(p);
        out.p_err_gauge = estimate(g);
        out.p_err_joint = estimate(j);
    }
    out
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ftp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Noise-free configuration.
#[no_mangle]
pub extern "C" fn ftp_noise_ideal() -> *mut FtpNoise {
    Box::into_raw(Box::new(FtpNoise { config: NoiseConfig::ideal() }))
}

/// Reference device configuration.
#[no_mangle]
pub extern "C" fn ftp_noise_device() -> *mut FtpNoise {
    Box::into_raw(Box::new(FtpNoise { config: NoiseConfig::device() }))
}

/// Sets the same `P(0|1) = p0`, `P(1|0) = p1` on every qubit.
#[no_mangle]
pub unsafe extern "C" fn ftp_noise_set_uniform_readout(noise: *mut FtpNoise, p0: f64, p1: f64) -> FtpStatus {
    guard(|| {
        let n = out(noise, "noise")?;
        let updated = n.config.clone().with_uniform_readout(p0, p1);
        updated.validate()?;
        n.config = updated;
        Ok(())
    })
}

/// Sets the relaxation time of `qubit` (0..4 = D1..D4, S1) in µs.
#[no_mangle]
pub unsafe extern "C" fn ftp_noise_set_t1(noise: *mut FtpNoise, qubit: usize, t1_us: f64) -> FtpStatus {
    guard(|| {
        let n = out(noise, "noise")?;
        if qubit >= 5 {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: 5 }.into());
        }
        let mut updated = n.config.clone();
        updated.t1_us[qubit] = t1_us;
        updated.validate()?;
        n.config = updated;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftp_noise_free(noise: *mut FtpNoise) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

/// Builds the preparation circuit for `target` with ideal CNOTs. The data
/// are read out in the target's basis.
#[no_mangle]
pub unsafe extern "C" fn ftp_circuit_prep(target: FtpTarget, circuit: *mut *mut FtpCircuit) -> FtpStatus {
    guard(|| {
        let slot = out(circuit, "circuit")?;
        let t = target_of(&target)?;
        let c = build_prep_circuit(t, CnotModel::Ideal)?;
        *slot = Box::into_raw(Box::new(FtpCircuit { circuit: c, target: t }));
        Ok(())
    })
}

/// New circuit with `Z(θ)` inserted at `site`.
#[no_mangle]
pub unsafe extern "C" fn ftp_circuit_insert_error(
    base: *const FtpCircuit,
    site: FtpSite,
    theta: f64,
    circuit: *mut *mut FtpCircuit,
) -> FtpStatus {
    guard(|| {
        let b = get(base, "base")?;
        let slot = out(circuit, "circuit")?;
        let c = insert_error(&b.circuit, site_of(site), theta)?;
        *slot = Box::into_raw(Box::new(FtpCircuit { circuit: c, target: b.target }));
        Ok(())
    })
}

/// New circuit with the correlated `Y(θ)⊗Y(θ)` error inserted.
#[no_mangle]
pub unsafe extern "C" fn ftp_circuit_insert_correlated_error(
    base: *const FtpCircuit,
    theta: f64,
    circuit: *mut *mut FtpCircuit,
) -> FtpStatus {
    guard(|| {
        let b = get(base, "base")?;
        let slot = out(circuit, "circuit")?;
        let c = insert_correlated_error(&b.circuit, theta)?;
        *slot = Box::into_raw(Box::new(FtpCircuit { circuit: c, target: b.target }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftp_circuit_free(circuit: *mut FtpCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Fills `probs[0..FTP_NUM_OUTCOMES]` with the outcome distribution,
/// readout errors included.
#[no_mangle]
pub unsafe extern "C" fn ftp_outcome_probabilities(
    circuit: *const FtpCircuit,
    noise: *const FtpNoise,
    post_rotation: FtpPostRotation,
    probs: *mut f64,
    len: usize,
) -> FtpStatus {
    guard(|| {
        let c = get(circuit, "circuit")?;
        let n = get(noise, "noise")?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        if len < FTP_NUM_OUTCOMES {
            return Err(Error::DimensionMismatch { expected: FTP_NUM_OUTCOMES, found: len }.into());
        }
        let post_rotation = match post_rotation {
            FtpPostRotation::Physical => PostRotationMode::Physical,
            FtpPostRotation::Frame => PostRotationMode::Frame,
        };
        let readout = c.circuit.with_readout_basis(c.target.basis)?;
        let table = run(&readout, &n.config, RunOptions { post_rotation })?.outcomes;
        std::slice::from_raw_parts_mut(probs, NUM_OUTCOMES).copy_from_slice(&table);
        Ok(())
    })
}

/// Exact post-selection statistics of an outcome table.
#[no_mangle]
pub unsafe extern "C" fn ftp_exact_statistics(
    probs: *const f64,
    len: usize,
    target: FtpTarget,
    result: *mut FtpSummary,
) -> FtpStatus {
    guard(|| {
        let slot = out(result, "result")?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        let table = std::slice::from_raw_parts(probs, len);
        *slot = summary(&exact_statistics(table, target_of(&target)?)?);
        Ok(())
    })
}

/// Post-processes `num_shots` records. `syndrome[k]` is `c_s` and
/// `data[4k..4k+4]` are `c1..c4` of shot `k`.
#[no_mangle]
pub unsafe extern "C" fn ftp_postprocess(
    syndrome: *const u8,
    data: *const u8,
    num_shots: usize,
    target: FtpTarget,
    result: *mut FtpSummary,
) -> FtpStatus {
    guard(|| {
        let slot = out(result, "result")?;
        if syndrome.is_null() || data.is_null() {
            return Err(null("shot buffer"));
        }
        let t = target_of(&target)?;
        let cs = std::slice::from_raw_parts(syndrome, num_shots);
        let c = std::slice::from_raw_parts(data, 4 * num_shots);
        let shots = cs
            .iter()
            .zip(c.chunks_exact(4))
            .map(|(&s, d)| ShotRecord::new(s, [d[0], d[1], d[2], d[3]], t.basis))
            .collect::<ftprep::Result<Vec<_>>>()?;
        *slot = summary(&postprocess(&shots, t)?);
        Ok(())
    })
}

/// Closed-form acceptance `P(parity even | c_s = 1)` at `θ + δ`.
#[no_mangle]
pub unsafe extern "C" fn ftp_acceptance_model(
    site: FtpSite,
    p0: f64,
    p1: f64,
    theta: f64,
    delta: f64,
    result: *mut f64,
) -> FtpStatus {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = acceptance_model(&InsertionModelParams { site: site_of(site), p0, p1, theta, delta })?;
        Ok(())
    })
}

/// Closed-form accepted flip probability of one logical qubit.
#[no_mangle]
pub unsafe extern "C" fn ftp_logical_error_model(
    site: FtpSite,
    qubit: FtpLogical,
    p0: f64,
    p1: f64,
    theta: f64,
    delta: f64,
    result: *mut f64,
) -> FtpStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let q = match qubit {
            FtpLogical::Protected => LogicalQubit::Protected,
            FtpLogical::Gauge => LogicalQubit::Gauge,
        };
        *slot = logical_error_model(&InsertionModelParams { site: site_of(site), p0, p1, theta, delta }, q)?;
        Ok(())
    })
}

/// Accepted `P(1̄)` of a decaying `|1̄⟩` logical with common T1.
#[no_mangle]
pub unsafe extern "C" fn ftp_ideal_decay(t_us: f64, t1_us: f64, result: *mut f64) -> FtpStatus {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = ideal_decay(t_us, t1_us)?;
        Ok(())
    })
}
