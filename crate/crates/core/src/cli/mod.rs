//! The `bbm-lab` command line: one subcommand per experiment, each driven by a
//! TOML config file (see [`config`]).
//!
//! Outputs go to `--out-dir`, else `$BBM_LAB_OUT_DIR`, else `run.out_dir`, else
//! `bbm-lab-out/<command>`. Each run writes `manifest.toml` beside its CSVs.
//! Exit status is 0 on success, 2 for configuration and input errors and 1
//! for failures during the computation.

pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::estimates::{estimate_constant, radial_orbit_period, write_report_csv, BilinearForm, Exponents, SamplerSpec};
use crate::flow::{galerkin_defect, integrate, invariants_of, write_trace_csv};
use crate::spectral::{fmt_f64, write_state_csv, TrigState};
use crate::squeeze::{ball_image_scan, maximize_image_radius, write_squeeze_csv};
use config::*;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "BBM_LAB_OUT_DIR";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Parser)]
#[command(name = "bbm-lab", version, about = "Spectral experiments for the periodic BBM equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory (overrides $BBM_LAB_OUT_DIR and run.out_dir).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate initial data and record conserved quantities.
    Simulate { config: PathBuf },
    /// Empirical constants of the bilinear estimates.
    Estimates { config: PathBuf },
    /// Non-squeezing witness search.
    Squeeze { config: PathBuf },
    /// Galerkin truncation defect sweep.
    Galerkin { config: PathBuf },
    /// Periods of radial Hamiltonian orbits.
    Orbit { config: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Estimates { .. } => "estimates",
            Command::Squeeze { .. } => "squeeze",
            Command::Galerkin { .. } => "galerkin",
            Command::Orbit { .. } => "orbit",
        }
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &LabError) -> i32 {
    match err {
        LabError::Parse(_)
        | LabError::InvalidConfig(_)
        | LabError::Inadmissible(_)
        | LabError::NonZeroMean { .. }
        | LabError::TruncationMismatch { .. }
        | LabError::ModeOutOfRange { .. }
        | LabError::ZeroInput(_)
        | LabError::Resolution { .. } => 2,
        _ => 1,
    }
}

/// Run one command, writing the human-readable summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let dir_override = cli.out_dir.clone().or(env_dir);
    match &cli.command {
        Command::Simulate { config } => simulate(config, dir_override, out),
        Command::Estimates { config } => estimates(config, dir_override, out),
        Command::Squeeze { config } => squeeze(config, dir_override, out),
        Command::Galerkin { config } => galerkin(config, dir_override, out),
        Command::Orbit { config } => orbit(config, dir_override, out),
    }
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolve and create the output directory, recording it in `run`.
fn prepare_out_dir(run: &mut RunSection, over: Option<PathBuf>, command: &str) -> Result<PathBuf> {
    let dir = over
        .or_else(|| run.out_dir.clone())
        .unwrap_or_else(|| Path::new("bbm-lab-out").join(command));
    std::fs::create_dir_all(&dir)?;
    run.out_dir = Some(dir.clone());
    Ok(dir)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::InvalidConfig(format!("run.threads: {e}")))
}

fn create(dir: &Path, name: &str, outputs: &mut Vec<String>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    outputs.push(path.display().to_string());
    Ok(BufWriter::new(File::create(path)?))
}

fn header(command: &str, seed: u64, outputs: Vec<String>) -> ManifestHeader {
    ManifestHeader {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        outputs,
    }
}

fn write_manifest<C: Serialize>(dir: &Path, cfg: &C) -> Result<()> {
    let text = toml::to_string(cfg).map_err(|e| LabError::InvalidConfig(format!("manifest: {e}")))?;
    std::fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

fn relative_drift(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (b - a).abs()
    } else {
        ((b - a) / a).abs()
    }
}

fn simulate(path: &Path, over: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let mut cfg: SimulateConfig = load(path)?;
    cfg.flow.validate()?;
    cfg.initial.anchor(&config_dir(path));
    if cfg.flow.trace_every == 0 {
        cfg.flow.trace_every = 1;
    }
    let horizon = cfg.simulate.horizon;
    if !horizon.is_finite() {
        return Err(LabError::InvalidConfig("simulate.T must be finite".into()));
    }
    let u0 = cfg.initial.load(0)?;
    if u0.n() > cfg.flow.n_modes {
        return Err(LabError::TruncationMismatch {
            state: u0.n(),
            allowed: cfg.flow.n_modes,
        });
    }
    let dir = prepare_out_dir(&mut cfg.run, over, "simulate")?;
    let clock = Instant::now();
    let result = pool(cfg.run.threads)?.install(|| integrate(&u0, horizon, &cfg.flow))?;
    let elapsed = clock.elapsed();

    let mut outputs = Vec::new();
    let trace = result.trace.as_deref().unwrap_or(&[]);
    let mut w = create(&dir, "trace.csv", &mut outputs)?;
    write_trace_csv(trace, &mut w)?;
    w.flush()?;
    let mut w = create(&dir, "final_state.csv", &mut outputs)?;
    write_state_csv(&result.final_state, &mut w)?;
    w.flush()?;
    cfg.manifest = Some(header("simulate", cfg.run.seed, outputs));
    write_manifest(&dir, &cfg)?;

    let (start, end) = (invariants_of(&u0), invariants_of(&result.final_state));
    writeln!(
        out,
        "simulate: N={} integrator={} T={} steps={} ({:.2?})",
        cfg.flow.n_modes, cfg.flow.integrator, horizon, result.steps, elapsed
    )?;
    writeln!(out, "  I1 drift (absolute): {:.3e}", (end.i1 - start.i1).abs())?;
    writeln!(out, "  I2 drift (relative): {:.3e}", relative_drift(start.i2, end.i2))?;
    writeln!(out, "  H  drift (relative): {:.3e}", relative_drift(start.h, end.h))?;
    writeln!(out, "  outputs in {}", dir.display())?;
    Ok(())
}

fn estimates(path: &Path, over: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let mut cfg: EstimatesConfig = load(path)?;
    let sec = &cfg.estimates;
    let sampler = SamplerSpec {
        kind: sec.sampler,
        delta: sec.delta,
    };
    let mut cases = Vec::with_capacity(sec.case.len());
    for (i, c) in sec.case.iter().enumerate() {
        let exps = match c.form {
            BilinearForm::Product => {
                let rprime = c.rprime.ok_or_else(|| {
                    LabError::InvalidConfig(format!("estimates.case[{i}]: `rprime` is required for form = \"product\""))
                })?;
                Exponents::new(c.s, c.r, rprime)
            }
            BilinearForm::Multiplier => Exponents::multiplier(c.s, c.r),
        };
        // reject inadmissible triples before any sampling starts
        exps.check(c.form)?;
        cases.push((exps, c.form));
    }
    if cases.is_empty() {
        return Err(LabError::InvalidConfig("estimates: at least one [[estimates.case]] is required".into()));
    }
    let dir = prepare_out_dir(&mut cfg.run, over, "estimates")?;
    let seed = cfg.run.seed;
    let (n_samples, n_list) = (cfg.estimates.n_samples, cfg.estimates.n_list.clone());
    let clock = Instant::now();
    let reports = pool(cfg.run.threads)?.install(|| {
        cases
            .iter()
            .map(|&(exps, form)| estimate_constant(exps, form, n_samples, &n_list, sampler, seed))
            .collect::<Result<Vec<_>>>()
    })?;
    let elapsed = clock.elapsed();

    let mut outputs = Vec::new();
    let mut w = create(&dir, "estimates.csv", &mut outputs)?;
    write_report_csv(&reports, &mut w)?;
    w.flush()?;
    cfg.manifest = Some(header("estimates", seed, outputs));
    write_manifest(&dir, &cfg)?;

    writeln!(out, "estimates: {} samples per truncation ({:.2?})", n_samples, elapsed)?;
    for rep in &reports {
        let e = rep.exponents;
        writeln!(
            out,
            "  {:?} s={} r={} r'={}: max ratio {:.6} growth {:+.2}% {}",
            rep.form,
            e.s,
            e.r,
            e.rprime,
            rep.max_ratio(),
            100.0 * rep.growth,
            if rep.bounded { "bounded" } else { "GROWING" }
        )?;
    }
    writeln!(out, "  outputs in {}", dir.display())?;
    Ok(())
}

fn squeeze(path: &Path, over: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let mut cfg: SqueezeFileConfig = load(path)?;
    cfg.flow.validate()?;
    if let Some(c) = cfg.center.as_mut() {
        c.anchor(&config_dir(path));
    }
    let cells = cfg.cells()?;
    let sec = &cfg.squeeze;
    let dir = prepare_out_dir(&mut cfg.run, over, "squeeze")?;
    let (scan_samples, scan_bins) = (sec.scan_samples, sec.scan_bins);
    let workers = pool(cfg.run.threads)?;
    let mut outputs = Vec::new();
    let mut summary = Vec::new();
    writeln!(out, "squeeze: {} cells, N={}, {} starts", cells.len(), cfg.flow.n_modes, cfg.squeeze.n_starts)?;
    for c in &cells {
        let tag = format!("r{}_n{}", c.r, c.n0);
        let rep = workers.install(|| maximize_image_radius(c))?;
        let mut w = create(&dir, &format!("squeeze_{tag}.csv"), &mut outputs)?;
        write_squeeze_csv(&rep, &mut w)?;
        w.flush()?;
        let mut w = create(&dir, &format!("witness_{tag}.csv"), &mut outputs)?;
        write_state_csv(&rep.best_witness, &mut w)?;
        w.flush()?;
        let mut line = format!(
            "  r={} n0={} T={}: achieved radius {:.9} ratio {:.6} (best start {}, {:.2?})",
            c.r,
            c.n0,
            c.horizon,
            rep.achieved_radius,
            rep.ratio(),
            rep.best_start,
            rep.wall_time
        );
        if scan_samples > 0 {
            let scan = workers.install(|| ball_image_scan(c, scan_samples, scan_bins))?;
            let mut w = create(&dir, &format!("scan_{tag}.csv"), &mut outputs)?;
            writeln!(w, "bin_lo,bin_hi,count")?;
            for (i, n) in scan.counts.iter().enumerate() {
                writeln!(w, "{},{},{}", fmt_f64(scan.edges[i]), fmt_f64(scan.edges[i + 1]), n)?;
            }
            w.flush()?;
            line.push_str(&format!(", scan max {:.9}", scan.max()));
        }
        writeln!(out, "{line}")?;
        summary.push((c.r, c.n0, c.horizon, rep.best_start, rep.achieved_radius, rep.ratio()));
    }
    let mut w = create(&dir, "squeeze_summary.csv", &mut outputs)?;
    writeln!(w, "r,n0,T,best_start,achieved_radius,ratio")?;
    for (r, n0, t, best, rad, ratio) in summary {
        writeln!(w, "{},{},{},{},{},{}", fmt_f64(r), n0, fmt_f64(t), best, fmt_f64(rad), fmt_f64(ratio))?;
    }
    w.flush()?;
    cfg.manifest = Some(header("squeeze", cfg.run.seed, outputs));
    write_manifest(&dir, &cfg)?;
    writeln!(out, "  outputs in {}", dir.display())?;
    Ok(())
}

fn galerkin(path: &Path, over: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let mut cfg: GalerkinConfig = load(path)?;
    cfg.flow.validate()?;
    cfg.initial.anchor(&config_dir(path));
    let u0: TrigState = cfg.initial.load(0)?;
    let n_ref = cfg.flow.n_modes;
    for &n in &cfg.galerkin.n_small {
        if n == 0 || n > n_ref {
            return Err(LabError::InvalidConfig(format!(
                "galerkin.n_small entries must lie in 1..={n_ref}, got {n}"
            )));
        }
    }
    let dir = prepare_out_dir(&mut cfg.run, over, "galerkin")?;
    let horizon = cfg.galerkin.horizon;
    let defects = pool(cfg.run.threads)?.install(|| {
        cfg.galerkin
            .n_small
            .iter()
            .map(|&n| galerkin_defect(&u0, horizon, n, &cfg.flow).map(|d| (n, d)))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut outputs = Vec::new();
    let mut w = create(&dir, "galerkin.csv", &mut outputs)?;
    writeln!(w, "N_small,defect")?;
    for &(n, d) in &defects {
        writeln!(w, "{n},{}", fmt_f64(d))?;
    }
    w.flush()?;
    cfg.manifest = Some(header("galerkin", cfg.run.seed, outputs));
    write_manifest(&dir, &cfg)?;
    writeln!(out, "galerkin: reference N={n_ref}, T={horizon}")?;
    for (n, d) in defects {
        writeln!(out, "  N_small={n:>4}: Z-norm defect {d:.6e}")?;
    }
    writeln!(out, "  outputs in {}", dir.display())?;
    Ok(())
}

fn orbit(path: &Path, over: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let mut cfg: OrbitConfig = load(path)?;
    let sec = cfg.orbit.clone();
    let rows = sec
        .fprime
        .to_vec()
        .into_iter()
        .map(|fp| radial_orbit_period(fp, sec.n, sec.radius2).map(|rep| (fp, rep)))
        .collect::<Result<Vec<_>>>()?;
    let dir = prepare_out_dir(&mut cfg.run, over, "orbit")?;
    let mut outputs = Vec::new();
    let mut w = create(&dir, "orbit.csv", &mut outputs)?;
    writeln!(w, "fprime,period,period_times_fprime,shell_drift,steps")?;
    for (fp, rep) in &rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(*fp),
            fmt_f64(rep.period),
            fmt_f64(rep.period * fp),
            fmt_f64(rep.shell_drift),
            rep.steps
        )?;
    }
    w.flush()?;
    cfg.manifest = Some(header("orbit", cfg.run.seed, outputs));
    write_manifest(&dir, &cfg)?;
    writeln!(out, "orbit: n={} radius2={}", sec.n, sec.radius2)?;
    for (fp, rep) in rows {
        writeln!(out, "  f'={fp}: period {:.9} (period * f' = {:.9})", rep.period, rep.period * fp)?;
    }
    writeln!(out, "  outputs in {}", dir.display())?;
    Ok(())
}
