//! Witness search for the non-squeezing property of the BBM flow.
//!
//! Over initial data on the sphere `|u0 - center|_Z = r` we maximize the
//! distance of the time-`T` image's mode-`n0` canonical pair from the cylinder
//! axis. If the flow could squeeze the ball into a cylinder of radius `R < r`
//! this maximum would stay below `R`.

mod scan;

pub use scan::{ball_image_scan, ks_distance, ScanReport};

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::flow::{integrate, FlowConfig};
use crate::rng::{derive_seed, stream_rng};
use crate::spectral::{fmt_f64, from_symplectic, sobolev_norm, to_symplectic, z_norm, SymplecticCoords, TrigState};

/// Labels separating the random streams of the experiment families.
pub(crate) const STARTS_LABEL: u64 = 1;
pub(crate) const SCAN_LABEL: u64 = 2;

/// Largest number of optimized mode pairs.
pub const MAX_ACTIVE: usize = 16;

#[derive(Debug, Clone)]
pub struct SqueezeConfig {
    /// Ball radius in Z-norm units.
    pub r: f64,
    /// Cylinder mode.
    pub n0: usize,
    pub horizon: f64,
    /// Ball center; zero when absent.
    pub center: Option<TrigState>,
    /// Cylinder axis `(p_bar, q_bar)` in the mode-`n0` plane.
    pub cyl_center: [f64; 2],
    pub n_starts: usize,
    /// Optimized mode pairs; defaults to `min(2 n0, 16)`.
    pub n_active: Option<usize>,
    pub fd_step: f64,
    /// Initial ascent step; defaults to `0.05 r`.
    pub ascent_step: Option<f64>,
    pub max_ascent_iters: usize,
    pub stall_tol: f64,
    pub seed: u64,
    /// Flow settings; `flow.n_modes` is the truncation `N`.
    pub flow: FlowConfig,
}

impl SqueezeConfig {
    pub fn new(r: f64, n0: usize, horizon: f64, flow: FlowConfig) -> Self {
        Self {
            r,
            n0,
            horizon,
            center: None,
            cyl_center: [0.0, 0.0],
            n_starts: 16,
            n_active: None,
            fd_step: 1e-5,
            ascent_step: None,
            max_ascent_iters: 40,
            stall_tol: 1e-7,
            seed: 0,
            flow,
        }
    }

    pub fn active_modes(&self) -> usize {
        self.n_active
            .unwrap_or_else(|| (2 * self.n0).min(MAX_ACTIVE))
            .min(self.flow.n_modes)
    }

    pub fn initial_step(&self) -> f64 {
        self.ascent_step.unwrap_or(0.05 * self.r)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidConfig(m));
        self.flow.validate()?;
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad(format!("r must be positive, got {}", self.r));
        }
        if self.n0 < 1 || self.n0 > self.flow.n_modes {
            return Err(LabError::ModeOutOfRange {
                mode: self.n0,
                truncation: self.flow.n_modes,
            });
        }
        if self.n_starts < 1 {
            return bad("n_starts must be at least 1".into());
        }
        if !self.horizon.is_finite() {
            return bad("T must be finite".into());
        }
        let act = self.active_modes();
        if act < self.n0 || act == 0 {
            return bad(format!(
                "n_active = {act} must cover the cylinder mode n0 = {}",
                self.n0
            ));
        }
        if !(self.fd_step > 0.0) || !(self.initial_step() > 0.0) || !(self.stall_tol >= 0.0) {
            return bad("fd_step, ascent_step must be positive and stall_tol non-negative".into());
        }
        if let Some(c) = &self.center {
            c.require_mean_zero()?;
            if c.n() > self.flow.n_modes {
                return Err(LabError::TruncationMismatch {
                    state: c.n(),
                    allowed: self.flow.n_modes,
                });
            }
        }
        Ok(())
    }
}

/// Gaussian direction in the first `n_active` canonical pairs, scaled to Z-norm `r`.
pub fn sample_sphere_with<R: Rng + ?Sized>(rng: &mut R, r: f64, n: usize, n_active: usize) -> Result<TrigState> {
    if n_active == 0 || n_active > n {
        return Err(LabError::InvalidConfig(format!(
            "n_active = {n_active} must lie in 1..={n}"
        )));
    }
    let v = sphere_vector(rng, r, n_active);
    embed(&v, n)
}

/// [`sample_sphere_with`] on stream 0 of `seed`.
pub fn sample_sphere(r: f64, n: usize, n_active: usize, seed: u64) -> Result<TrigState> {
    sample_sphere_with(&mut stream_rng(seed, 0), r, n, n_active)
}

fn sphere_vector<R: Rng + ?Sized>(rng: &mut R, r: f64, n_active: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..2 * n_active).map(|_| rng.sample(StandardNormal)).collect();
        let norm = euclid(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| r * x / norm).collect();
        }
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// State of truncation `n` whose first canonical pairs are the block vector `v`.
fn embed(v: &[f64], n: usize) -> Result<TrigState> {
    let mut coords = SymplecticCoords {
        pairs: vec![[0.0; 2]; n],
    };
    coords.set_block_vector(v);
    from_symplectic(&coords)
}

/// Distance of the mode-`n0` canonical pair from the cylinder axis.
pub fn cylinder_radius(u: &TrigState, n0: usize, cyl_center: [f64; 2]) -> Result<f64> {
    u.require_mean_zero()?;
    if n0 == 0 || n0 > u.n() {
        return Err(LabError::ModeOutOfRange {
            mode: n0,
            truncation: u.n(),
        });
    }
    let [p, q] = to_symplectic(u)?.pairs[n0 - 1];
    Ok(((p - cyl_center[0]).powi(2) + (q - cyl_center[1]).powi(2)).sqrt())
}

/// One optimizer run.
#[derive(Debug, Clone)]
pub struct StartTrace {
    pub start_id: usize,
    /// `(iteration, objective)`; iteration 0 is the start point.
    pub trajectory: Vec<(usize, f64)>,
    pub final_radius: f64,
    pub witness: TrigState,
    /// Set when the start was dropped because the objective became non-finite.
    pub abandoned: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SqueezeReport {
    pub config: SqueezeConfig,
    pub best_witness: TrigState,
    pub best_start: usize,
    pub achieved_radius: f64,
    pub starts: Vec<StartTrace>,
    pub wall_time: Duration,
}

impl SqueezeReport {
    /// `achieved_radius / r`; values above one are legitimate.
    pub fn ratio(&self) -> f64 {
        self.achieved_radius / self.config.r
    }
}

struct Objective<'a> {
    cfg: &'a SqueezeConfig,
    center: TrigState,
}

impl Objective<'_> {
    fn initial(&self, xi: &[f64]) -> Result<TrigState> {
        Ok(self.center.add(&embed(xi, self.cfg.flow.n_modes)?))
    }

    fn eval(&self, xi: &[f64]) -> Result<f64> {
        let u0 = self.initial(xi)?;
        let end = integrate(&u0, self.cfg.horizon, &self.cfg.flow)?.final_state;
        cylinder_radius(&end, self.cfg.n0, self.cfg.cyl_center)
    }

    fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let h = self.cfg.fd_step;
        (0..xi.len())
            .into_par_iter()
            .map(|j| {
                let mut plus = xi.to_vec();
                let mut minus = xi.to_vec();
                plus[j] += h;
                minus[j] -= h;
                Ok((self.eval(&plus)? - self.eval(&minus)?) / (2.0 * h))
            })
            .collect()
    }
}

fn project_to_sphere(v: &[f64], r: f64) -> Vec<f64> {
    let n = euclid(v);
    v.iter().map(|x| r * x / n).collect()
}

const MAX_HALVINGS: usize = 20;
const STALL_WINDOW: usize = 5;

fn ascend(obj: &Objective<'_>, start_id: usize, start: Vec<f64>) -> Result<StartTrace> {
    let cfg = obj.cfg;
    let abandon = |trajectory: Vec<(usize, f64)>, xi: &[f64], why: String| -> Result<StartTrace> {
        Ok(StartTrace {
            start_id,
            trajectory,
            final_radius: f64::NEG_INFINITY,
            witness: obj.initial(xi)?,
            abandoned: Some(why),
        })
    };
    let mut xi = project_to_sphere(&start, cfg.r);
    let mut value = obj.eval(&xi)?;
    if !value.is_finite() {
        return abandon(vec![], &xi, "non-finite objective at start".into());
    }
    let mut trajectory = vec![(0, value)];
    let mut step = cfg.initial_step();
    let max_step = cfg.initial_step();
    for iter in 1..=cfg.max_ascent_iters {
        let grad = obj.gradient(&xi)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return abandon(trajectory, &xi, format!("non-finite gradient at iteration {iter}"));
        }
        // tangential component on the sphere
        let radial: f64 = grad.iter().zip(&xi).map(|(g, x)| g * x).sum::<f64>() / (cfg.r * cfg.r);
        let tangent: Vec<f64> = grad.iter().zip(&xi).map(|(g, x)| g - radial * x).collect();
        let tnorm = euclid(&tangent);
        if tnorm < 1e-14 {
            break;
        }
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = xi
                .iter()
                .zip(&tangent)
                .map(|(x, t)| x + step * t / tnorm)
                .collect();
            let trial = project_to_sphere(&trial, cfg.r);
            let v = obj.eval(&trial)?;
            if v.is_finite() && v > value {
                accepted = Some((trial, v));
                break;
            }
            step *= 0.5;
        }
        let Some((next, v)) = accepted else { break };
        xi = next;
        value = v;
        trajectory.push((iter, value));
        step = (step * 1.5).min(max_step);
        if trajectory.len() > STALL_WINDOW {
            let past = trajectory[trajectory.len() - 1 - STALL_WINDOW].1;
            if value - past < cfg.stall_tol {
                break;
            }
        }
    }
    Ok(StartTrace {
        start_id,
        trajectory,
        final_radius: value,
        witness: obj.initial(&xi)?,
        abandoned: None,
    })
}

/// Multistart projected gradient ascent of the image cylinder radius over the sphere of radius `r`.
///
/// Start 0 is always the pure mode-`n0` datum `r phi_{n0}^+`, so the result
/// never falls below the value of the rigid rotation of that datum.
pub fn maximize_image_radius(cfg: &SqueezeConfig) -> Result<SqueezeReport> {
    cfg.validate()?;
    let clock = Instant::now();
    let n = cfg.flow.n_modes;
    let n_active = cfg.active_modes();
    let center = cfg
        .center
        .as_ref()
        .map(|c| c.resized(n))
        .unwrap_or_else(|| TrigState::zero(n));
    let obj = Objective { cfg, center };
    let starts_seed = derive_seed(cfg.seed, STARTS_LABEL);
    let starts: Vec<StartTrace> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|id| {
            let xi0 = if id == 0 {
                let mut v = vec![0.0; 2 * n_active];
                v[cfg.n0 - 1] = cfg.r;
                v
            } else {
                sphere_vector(&mut stream_rng(starts_seed, id as u64), cfg.r, n_active)
            };
            ascend(&obj, id, xi0)
        })
        .collect::<Result<_>>()?;

    let tie = 1e-12 * cfg.r;
    let mut best: Option<(usize, f64, f64)> = None;
    for s in starts.iter().filter(|s| s.abandoned.is_none()) {
        let smooth = sobolev_norm(&s.witness, 1.0);
        best = match best {
            None => Some((s.start_id, s.final_radius, smooth)),
            Some((id, v, h1)) => {
                if s.final_radius > v + tie || ((s.final_radius - v).abs() <= tie && smooth < h1) {
                    Some((s.start_id, s.final_radius, smooth))
                } else {
                    Some((id, v, h1))
                }
            }
        };
    }
    let (best_start, achieved_radius, _) = best.ok_or_else(|| {
        LabError::InvalidConfig("every start was abandoned (non-finite objective)".into())
    })?;
    let best_witness = starts[best_start].witness.clone();
    // final feasibility: the witness lies on the sphere
    let dist = z_norm(&best_witness.sub(&obj.center))?;
    debug_assert!((dist - cfg.r).abs() <= 1e-9 * cfg.r);
    Ok(SqueezeReport {
        config: cfg.clone(),
        best_witness,
        best_start,
        achieved_radius,
        starts,
        wall_time: clock.elapsed(),
    })
}

/// CSV `start_id,iter,radius` followed by a `#` summary line.
pub fn write_squeeze_csv<W: Write>(report: &SqueezeReport, mut writer: W) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut writer);
        w.write_record(["start_id", "iter", "radius"])?;
        for s in &report.starts {
            for &(it, v) in &s.trajectory {
                w.write_record([s.start_id.to_string(), it.to_string(), fmt_f64(v)])?;
            }
        }
        w.flush()?;
    }
    let c = &report.config;
    writeln!(
        writer,
        "# r={},n0={},T={},N={},n_starts={},best_start={},achieved_radius={},ratio={}",
        fmt_f64(c.r),
        c.n0,
        fmt_f64(c.horizon),
        c.flow.n_modes,
        c.n_starts,
        report.best_start,
        fmt_f64(report.achieved_radius),
        fmt_f64(report.ratio())
    )?;
    Ok(())
}
