// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: runs experiments from a configuration file and
//! writes CSV / JSON data files.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::RngCore;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analytic::{decay_model, DecayModelParams};
use crate::code422::{codespace_metrics, label_populations, CodespaceMetrics};
use crate::config::ExperimentConfig;
use crate::engine::{outcome_index, run, RunOptions};
use crate::fit::{
    fit_decay, fit_insertion, match_model_params, CurveData, DecaySeries, FitOptions, InsertionCurves,
    InsertionFit, SiteCoefficients, HARDWARE_FIT,
};
use crate::noise::{idle_evolution, Echo, ReadoutModel};
use crate::postsel::{exact_statistics, postprocess, sample_records, write_shots, PostSelSummary};
use crate::prep::{build_prep_circuit, insert_correlated_error, insert_error, Basis, Circuit, PrepTarget, Site};
use crate::simcore::{gates, rng_stream, DensityMatrix, UnitarySpec};
use crate::tomo::{
    logical_difference_matrix, reconstruct, simulate_tomography, table_metrics, write_dataset, TomoMode,
};
use crate::code422::LogicalLabel;
use crate::{Error, Result};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ftprep", version, about = "Fault-tolerant [[4,2,2]] state-preparation experiments")]
pub struct Cli {
    /// Experiment configuration (TOML); the built-in reference when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Shots per run (per setting for tomo).
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<usize>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Use exact outcome statistics instead of sampling.
    #[arg(long, global = true)]
    pub exact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prepare the configured target and post-select.
    Prep,
    /// Sweep an inserted error over the θ grid.
    Sweep {
        #[arg(value_enum, ignore_case = true)]
        site: SweepSite,
    },
    /// Idle the prepared state over the time grid.
    Decay {
        #[arg(value_enum)]
        state: DecayState,
        /// Echo sequence during the idle; `--echo` alone selects walsh.
        #[arg(long, value_name = "KIND", num_args = 0..=1, default_missing_value = "walsh")]
        echo: Option<Echo>,
    },
    /// Full 81-setting tomography of the post-selected data state.
    Tomo,
    /// Fit sweep or decay data.
    Fit {
        #[command(subcommand)]
        kind: FitCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepSite {
    A,
    B,
    C,
    /// Correlated RY(θ) on control and syndrome after every CNOT.
    Yy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecayState {
    #[value(name = "11")]
    OneOne,
    #[value(name = "pp")]
    PlusPlus,
}

#[derive(Debug, Subcommand)]
pub enum FitCommand {
    /// Cosine-law fit of sweep CSVs given as SITE=PATH.
    Insertion {
        #[arg(required = true, value_name = "SITE=PATH")]
        inputs: Vec<String>,
    },
    /// Per-qubit T1 and readout fit of a `decay 11` CSV.
    Decay {
        input: PathBuf,
        /// JSON array of 16 initial label weights; simulated prep when omitted.
        #[arg(long, value_name = "PATH")]
        mixture: Option<PathBuf>,
    },
    /// Readout pair matching fitted insertion coefficients.
    Match {
        /// `fit insertion` JSON; the hardware coefficients when omitted.
        input: Option<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("ftprep: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Schema { .. }
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::InvalidArgument(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

struct Context {
    cfg: ExperimentConfig,
    exact: bool,
    out: PathBuf,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn options(&self) -> RunOptions {
        RunOptions { post_rotation: self.cfg.post_rotation }
    }
}

/// Runs one parsed command; returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::reference(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.shots {
        cfg.shots = n;
        cfg.tomo.shots_per_setting = n;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output.dir)
        .map_err(|e| Error::Config(format!("{}: {e}", cfg.output.dir.display())))?;
    let ctx = Context { out: cfg.output.dir.clone(), exact: cli.exact, cfg };
    match &cli.command {
        Command::Prep => cmd_prep(&ctx),
        Command::Sweep { site } => cmd_sweep(&ctx, *site),
        Command::Decay { state, echo } => cmd_decay(&ctx, *state, echo.unwrap_or(ctx.cfg.decay.echo)),
        Command::Tomo => cmd_tomo(&ctx),
        Command::Fit { kind } => cmd_fit(&ctx, kind),
    }
}

fn tag(target: PrepTarget) -> String {
    target.to_string().replace('+', "p").replace('-', "m")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let source = path.display().to_string();
    let mut r = csv::Reader::from_reader(File::open(path).map_err(|e| Error::Config(format!("{source}: {e}")))?);
    r.deserialize()
        .enumerate()
        .map(|(i, rec)| {
            rec.map_err(|e| Error::Schema {
                path: source.clone(),
                line: e.position().map_or(i as u64 + 2, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Sub-seed for grid point `k`.
fn point_seed(seed: u64, k: usize) -> u64 {
    rng_stream(seed, k as u64).next_u64()
}

fn summarize(ctx: &Context, table: &[f64], target: PrepTarget, seed: u64) -> Result<(PostSelSummary, PostSelSummary)> {
    let exact = exact_statistics(table, target)?;
    let sampled = if ctx.exact {
        exact.clone()
    } else {
        postprocess(&sample_records(table, ctx.cfg.shots, seed, target.basis)?, target)?
    };
    Ok((sampled, exact))
}

fn readout_circuit(circuit: &Circuit, target: PrepTarget) -> Result<Circuit> {
    circuit.with_readout_basis(target.basis)
}

#[derive(Debug, Serialize)]
struct PrepReport {
    target: String,
    seed: u64,
    shots: Option<usize>,
    summary: PostSelSummary,
    exact: PostSelSummary,
    codespace: CodespaceMetrics,
}

fn cmd_prep(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let target = cfg.target;
    let base = build_prep_circuit(target, cfg.cnot)?;
    let out = run(&readout_circuit(&base, target)?, &cfg.noise, ctx.options())?;
    let exact = exact_statistics(&out.outcomes, target)?;
    let mut written = Vec::new();
    let summary = if ctx.exact {
        exact.clone()
    } else {
        let shots = sample_records(&out.outcomes, cfg.shots, cfg.seed, target.basis)?;
        let path = ctx.path(&format!("prep_{}_shots.csv", tag(target)));
        write_shots(create(&path)?, &shots)?;
        written.push(path);
        postprocess(&shots, target)?
    };
    let state = run(&base, &cfg.noise, ctx.options())?
        .syndrome_ok_state
        .ok_or_else(|| Error::Undefined("syndrome never reports 1".into()))?;
    let codespace = codespace_metrics(&state, &target.logical_ket())?;
    let report = PrepReport {
        target: target.to_string(),
        seed: cfg.seed,
        shots: (!ctx.exact).then_some(cfg.shots),
        summary,
        exact,
        codespace,
    };
    let path = ctx.path(&format!("prep_{}_metrics.json", tag(target)));
    write_json(&path, &report)?;
    written.push(path);
    Ok(written)
}

/// One row of a sweep CSV. Empty cells are undefined (nothing accepted).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub accept: f64,
    pub err_protected: Option<f64>,
    pub err_gauge: Option<f64>,
    pub err_joint: Option<f64>,
    pub accept_stderr: f64,
    pub err_protected_stderr: Option<f64>,
    pub err_gauge_stderr: Option<f64>,
    pub err_joint_stderr: Option<f64>,
    pub exact_accept: f64,
    pub exact_err_protected: Option<f64>,
    pub exact_err_gauge: Option<f64>,
    pub exact_err_joint: Option<f64>,
}

fn cmd_sweep(ctx: &Context, site: SweepSite) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let target = cfg.target;
    let base = build_prep_circuit(target, cfg.cnot)?;
    let grid = cfg.sweep.theta.points();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(k, &theta)| {
            let c = match site {
                SweepSite::A => insert_error(&base, Site::A, theta)?,
                SweepSite::B => insert_error(&base, Site::B, theta)?,
                SweepSite::C => insert_error(&base, Site::C, theta)?,
                SweepSite::Yy => insert_correlated_error(&base, theta)?,
            };
            let out = run(&readout_circuit(&c, target)?, &cfg.noise, ctx.options())?;
            let (s, e) = summarize(ctx, &out.outcomes, target, point_seed(cfg.seed, k))?;
            Ok(SweepRow {
                theta,
                accept: s.acceptance.value,
                err_protected: s.p_err_protected.map(|v| v.value),
                err_gauge: s.p_err_gauge.map(|v| v.value),
                err_joint: s.p_err_joint.map(|v| v.value),
                accept_stderr: s.acceptance.stderr,
                err_protected_stderr: s.p_err_protected.map(|v| v.stderr),
                err_gauge_stderr: s.p_err_gauge.map(|v| v.stderr),
                err_joint_stderr: s.p_err_joint.map(|v| v.stderr),
                exact_accept: e.acceptance.value,
                exact_err_protected: e.p_err_protected.map(|v| v.value),
                exact_err_gauge: e.p_err_gauge.map(|v| v.value),
                exact_err_joint: e.p_err_joint.map(|v| v.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let name = match site {
        SweepSite::A => "a",
        SweepSite::B => "b",
        SweepSite::C => "c",
        SweepSite::Yy => "yy",
    };
    let path = ctx.path(&format!("sweep_{name}.csv"));
    write_rows(&path, &rows)?;
    Ok(vec![path])
}

/// `decay 11` row; `model_*` columns come from the closed-form decay model
/// with the readout averaged over the data qubits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayRow {
    pub t_us: f64,
    pub accept: f64,
    pub p1_protected: Option<f64>,
    pub p1_gauge: Option<f64>,
    pub accept_stderr: f64,
    pub p1_protected_stderr: Option<f64>,
    pub p1_gauge_stderr: Option<f64>,
    #[serde(default)]
    pub model_accept: Option<f64>,
    #[serde(default)]
    pub model_p1_protected: Option<f64>,
    #[serde(default)]
    pub model_p1_gauge: Option<f64>,
}

/// `decay pp` row with accepted logical X expectations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub t_us: f64,
    pub accept: f64,
    pub x_protected: Option<f64>,
    pub x_gauge: Option<f64>,
    pub accept_stderr: f64,
    pub x_protected_stderr: Option<f64>,
    pub x_gauge_stderr: Option<f64>,
}

/// Post-selected data state and full register of a physically rotated
/// preparation.
fn prepared_state(cfg: &ExperimentConfig, target: PrepTarget) -> Result<(DensityMatrix, DensityMatrix)> {
    let circuit = build_prep_circuit(target, cfg.cnot)?;
    let out = run(&circuit, &cfg.noise, RunOptions::default())?;
    match (out.syndrome_ok_state, out.syndrome_ok_register) {
        (Some(d), Some(r)) => Ok((d, r)),
        _ => Err(Error::Undefined("syndrome never reports 1".into())),
    }
}

fn data_readout(cfg: &ExperimentConfig) -> ReadoutModel {
    ReadoutModel { p0: cfg.noise.p0[..4].to_vec(), p1: cfg.noise.p1[..4].to_vec() }
}

/// Outcome table of the register's data qubits read out in `basis`, with
/// `c_s = 1`.
fn data_table(register: &DensityMatrix, basis: Basis, readout: &ReadoutModel) -> Result<Vec<f64>> {
    let mut rho = register.clone();
    if basis == Basis::X {
        for q in 0..4 {
            rho.apply_unitary_mut(&UnitarySpec::single(gates::h(), q)?)?;
        }
    }
    let mut data = vec![0.0; 16];
    for (i, p) in rho.probabilities().iter().enumerate() {
        data[i >> (rho.num_qubits() - 4)] += p;
    }
    let probs = readout.apply_to_distribution(&data)?;
    let mut table = vec![0.0; 32];
    for (i, p) in probs.iter().enumerate() {
        let c = [(i >> 3) as u8 & 1, (i >> 2) as u8 & 1, (i >> 1) as u8 & 1, i as u8 & 1];
        table[outcome_index(1, c)] = *p;
    }
    Ok(table)
}

fn cmd_decay(ctx: &Context, state: DecayState, echo: Echo) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let target = match state {
        DecayState::OneOne => PrepTarget::z(1, 1),
        DecayState::PlusPlus => PrepTarget::x(0, 0),
    };
    let (rho0, register) = prepared_state(cfg, target)?;
    let readout = data_readout(cfg);
    let grid = cfg.decay.t_us.points();
    let stats = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let rho = idle_evolution(&register, &cfg.noise, t, echo, None)?;
            let table = data_table(&rho, target.basis, &readout)?;
            summarize(ctx, &table, target, point_seed(cfg.seed, k)).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;
    let suffix = match echo {
        Echo::None => "",
        Echo::MidpointX => "_echo_midpoint",
        Echo::Walsh => "_echo",
    };
    let path = match state {
        DecayState::OneOne => {
            let mean = |v: &[f64]| v[..4].iter().sum::<f64>() / 4.0;
            let params = DecayModelParams {
                init_mixture: label_populations(&rho0)?,
                t1_us: [cfg.noise.t1_us[0], cfg.noise.t1_us[1], cfg.noise.t1_us[2], cfg.noise.t1_us[3]],
                p0: mean(&cfg.noise.p0),
                p1: mean(&cfg.noise.p1),
            };
            let rows = grid
                .iter()
                .zip(&stats)
                .map(|(&t, s)| {
                    let m = decay_model(t, &params).ok();
                    DecayRow {
                        t_us: t,
                        accept: s.acceptance.value,
                        p1_protected: s.p_err_protected.map(|e| 1.0 - e.value),
                        p1_gauge: s.p_err_gauge.map(|e| 1.0 - e.value),
                        accept_stderr: s.acceptance.stderr,
                        p1_protected_stderr: s.p_err_protected.map(|e| e.stderr),
                        p1_gauge_stderr: s.p_err_gauge.map(|e| e.stderr),
                        model_accept: m.map(|m| m.acceptance),
                        model_p1_protected: m.map(|m| m.protected_one),
                        model_p1_gauge: m.map(|m| m.gauge_one),
                    }
                })
                .collect::<Vec<_>>();
            let path = ctx.path(&format!("decay_11{suffix}.csv"));
            write_rows(&path, &rows)?;
            path
        }
        DecayState::PlusPlus => {
            let rows = grid
                .iter()
                .zip(&stats)
                .map(|(&t, s)| CoherenceRow {
                    t_us: t,
                    accept: s.acceptance.value,
                    x_protected: s.p_err_protected.map(|e| 1.0 - 2.0 * e.value),
                    x_gauge: s.p_err_gauge.map(|e| 1.0 - 2.0 * e.value),
                    accept_stderr: s.acceptance.stderr,
                    x_protected_stderr: s.p_err_protected.map(|e| 2.0 * e.stderr),
                    x_gauge_stderr: s.p_err_gauge.map(|e| 2.0 * e.stderr),
                })
                .collect::<Vec<_>>();
            let path = ctx.path(&format!("decay_pp{suffix}.csv"));
            write_rows(&path, &rows)?;
            path
        }
    };
    Ok(vec![path])
}

fn cmd_tomo(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let target = cfg.target;
    let circuit = build_prep_circuit(target, cfg.cnot)?;
    let mode = if ctx.exact {
        TomoMode::Exact
    } else {
        TomoMode::Sampled { shots_per_setting: cfg.tomo.shots_per_setting, seed: cfg.seed }
    };
    let data = simulate_tomography(&circuit, &cfg.noise, mode)?;
    let rho = reconstruct(&data)?;
    let t = tag(target);
    let counts_path = ctx.path(&format!("tomo_{t}_counts.csv"));
    write_dataset(create(&counts_path)?, &data)?;

    let rho_path = ctx.path(&format!("tomo_{t}_rho.txt"));
    let mut w = create(&rho_path)?;
    let m = rho.matrix();
    for i in 0..m.nrows() {
        let line: Vec<String> = (0..m.ncols()).map(|j| format!("{:.12e} {:.12e}", m[(i, j)].re, m[(i, j)].im)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;

    let diff_path = ctx.path(&format!("tomo_{t}_difference.csv"));
    let ideal = match target.basis {
        Basis::Z => Some(LogicalLabel::codeword(target.first, target.second)?),
        Basis::X => None,
    };
    let diff = match ideal {
        Some(label) => logical_difference_matrix(&rho, label)?,
        None => crate::tomo::difference_matrix(
            &rho,
            &DensityMatrix::from_pure(&target.logical_ket().embed(0, 0)),
        )?,
    };
    let mut w = csv::Writer::from_writer(create(&diff_path)?);
    w.write_record(["row", "col", "value"])?;
    for i in 0..diff.nrows() {
        for j in 0..diff.ncols() {
            w.write_record([i.to_string(), j.to_string(), format!("{:.12e}", diff[(i, j)])])?;
        }
    }
    w.flush()?;

    let table_path = ctx.path(&format!("tomo_{t}_table.json"));
    let row = table_metrics(&rho, target.basis)?;
    let fidelity = rho.fidelity_with_pure(&target.logical_ket().embed(0, 0));
    write_json(
        &table_path,
        &serde_json::json!({
            "target": target.to_string(),
            "shots_per_setting": data.shots_per_setting,
            "acceptance": row.acceptance,
            "populations": row.populations,
            "state_fidelity": fidelity,
        }),
    )?;
    Ok(vec![counts_path, rho_path, diff_path, table_path])
}

fn cmd_fit(ctx: &Context, kind: &FitCommand) -> Result<Vec<PathBuf>> {
    let options = FitOptions::default();
    match kind {
        FitCommand::Insertion { inputs } => {
            let curves = inputs
                .iter()
                .map(|spec| {
                    let (site, path) = spec
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("expected SITE=PATH, got {spec:?}")))?;
                    let site: Site = site.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                    sweep_curves(site, Path::new(path), ctx.exact)
                })
                .collect::<Result<Vec<_>>>()?;
            let fit = fit_insertion(&curves, &options)?;
            let path = ctx.path("fit_insertion.json");
            write_json(&path, &fit)?;
            Ok(vec![path])
        }
        FitCommand::Decay { input, mixture } => {
            let rows: Vec<DecayRow> = read_rows(input)?;
            let series = decay_series(&rows, input)?;
            let mix: [f64; 16] = match mixture {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
                }
                None => label_populations(&prepared_state(&ctx.cfg, PrepTarget::z(1, 1))?.0)?,
            };
            let fit = fit_decay(&series, &mix, &options)?;
            let path = ctx.path("fit_decay.json");
            write_json(&path, &fit)?;
            Ok(vec![path])
        }
        FitCommand::Match { input } => {
            let fitted: Vec<(Site, SiteCoefficients)> = match input {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    let fit: InsertionFit =
                        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    fit.sites.iter().map(|s| (s.site, s.coefficients)).collect()
                }
                None => HARDWARE_FIT.iter().map(|(s, _, k)| (*s, *k)).collect(),
            };
            let m = match_model_params(&fitted);
            let path = ctx.path("fit_match.json");
            write_json(&path, &m)?;
            Ok(vec![path])
        }
    }
}

/// Curves from a sweep CSV; rows with undefined errors are dropped.
fn sweep_curves(site: Site, path: &Path, exact: bool) -> Result<InsertionCurves> {
    let rows: Vec<SweepRow> = read_rows(path)?;
    let mut x = Vec::new();
    let mut cols: [Vec<f64>; 3] = Default::default();
    let mut sig: [Vec<f64>; 3] = Default::default();
    for r in &rows {
        let picked = if exact {
            [Some(r.exact_accept), r.exact_err_protected, r.exact_err_gauge]
        } else {
            [Some(r.accept), r.err_protected, r.err_gauge]
        };
        let sigmas = [Some(r.accept_stderr), r.err_protected_stderr, r.err_gauge_stderr];
        let (Some(a), Some(p), Some(g)) = (picked[0], picked[1], picked[2]) else { continue };
        x.push(r.theta);
        for (k, v) in [a, p, g].into_iter().enumerate() {
            cols[k].push(v);
            sig[k].push(sigmas[k].unwrap_or(0.0));
        }
    }
    let curve = |k: usize| {
        let weighted = !exact && sig[k].iter().all(|&s| s > 0.0);
        CurveData::new(x.clone(), cols[k].clone(), weighted.then(|| sig[k].clone()))
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    };
    Ok(InsertionCurves { site, acceptance: curve(0)?, protected: curve(1)?, gauge: curve(2)? })
}

fn decay_series(rows: &[DecayRow], path: &Path) -> Result<DecaySeries> {
    let bad = |m: &str| Error::Config(format!("{}: {m}", path.display()));
    let mut t = Vec::new();
    let (mut a, mut p, mut g) = (Vec::new(), Vec::new(), Vec::new());
    let (mut sa, mut sp, mut sg) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        let (Some(pv), Some(gv)) = (r.p1_protected, r.p1_gauge) else { continue };
        t.push(r.t_us);
        a.push(r.accept);
        p.push(pv);
        g.push(gv);
        sa.push(r.accept_stderr);
        sp.push(r.p1_protected_stderr.unwrap_or(0.0));
        sg.push(r.p1_gauge_stderr.unwrap_or(0.0));
    }
    let weighted = [&sa, &sp, &sg].iter().all(|s| s.iter().all(|&v| v > 0.0));
    let mk = |y: Vec<f64>, s: Vec<f64>| {
        CurveData::new(t.clone(), y, weighted.then_some(s)).map_err(|e| bad(&e.to_string()))
    };
    Ok(DecaySeries { protected: mk(p, sp)?, gauge: mk(g, sg)?, acceptance: Some(mk(a, sa)?) })
}
