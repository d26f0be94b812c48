use super::config::{FlowConfig, Integrator};
use super::picard::{picard_subinterval, GaussRule, PicardStats};
use super::rhs::{invariants_of, prepare, rhs_raw, Invariants};
use crate::error::{LabError, Result};
use crate::spectral::{basis_scale, sobolev_norm, TrigState};

/// One row of the conserved-quantity trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub invariants: Invariants,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub final_state: TrigState,
    /// Present when `trace_every > 0`; includes `t = 0` and the final time.
    pub trace: Option<Vec<TracePoint>>,
    /// Time steps (or Picard subintervals) taken.
    pub steps: usize,
    pub picard: Option<PicardStats>,
}

fn rk4_step(u: &TrigState, h: f64, cfg: &FlowConfig) -> TrigState {
    let f = |x: &TrigState| rhs_raw(x, cfg.dealias_factor, cfg.linear_only);
    let k1 = f(u);
    let k2 = f(&u.add_scaled(0.5 * h, &k1));
    let k3 = f(&u.add_scaled(0.5 * h, &k2));
    let k4 = f(&u.add_scaled(h, &k3));
    u.add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4)
}

/// Change between Fourier pairs and canonical pairs, mode by mode.
fn rescale(u: &TrigState, to_canonical: bool) -> TrigState {
    let modes = u
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let c = basis_scale(i + 1);
            let f = if to_canonical { 1.0 / c } else { c };
            [a * f, b * f]
        })
        .collect();
    TrigState::from_parts(0.0, modes)
}

/// Implicit midpoint rule `z1 = z0 + h F((z0 + z1) / 2)` solved by fixed-point
/// iteration in canonical `(p, q)` coordinates.
fn midpoint_step(u: &TrigState, h: f64, cfg: &FlowConfig, step: usize, t: f64) -> Result<TrigState> {
    // canonical vector field F(z) = C^{-1} rhs(C z)
    let field = |z: &TrigState| {
        rescale(
            &rhs_raw(&rescale(z, false), cfg.dealias_factor, cfg.linear_only),
            true,
        )
    };
    let z0 = rescale(u, true);
    let mut z1 = z0.add_scaled(h, &field(&z0));
    let mut last = f64::INFINITY;
    for _ in 0..cfg.midpoint_max_iter {
        let mid = z0.add(&z1).scaled(0.5);
        let next = z0.add_scaled(h, &field(&mid));
        let diff = next.max_abs_diff(&z1);
        z1 = next;
        if diff <= cfg.midpoint_tol {
            return Ok(rescale(&z1, false));
        }
        let scale = z1
            .modes()
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        // stagnation at the roundoff floor counts as converged
        if diff >= last && diff <= 64.0 * f64::EPSILON * scale.max(1.0) {
            return Ok(rescale(&z1, false));
        }
        if !diff.is_finite() {
            break;
        }
        last = diff;
    }
    Err(LabError::MidpointStall {
        step,
        t,
        residual: last,
    })
}

fn step_count(span: f64, dt: f64) -> usize {
    let ratio = span.abs() / dt;
    // absorb representation error so that T = n * dt takes exactly n steps
    ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1)
}

/// Advance the truncated flow by one fixed step `h` (negative `h` runs backward).
/// Picard configurations take a single collocation subinterval of length `h`.
pub fn step(state: &TrigState, h: f64, cfg: &FlowConfig) -> Result<TrigState> {
    cfg.validate()?;
    let u = prepare(state, cfg)?;
    if h == 0.0 {
        return Ok(u);
    }
    match cfg.integrator {
        Integrator::Rk4 => Ok(rk4_step(&u, h, cfg)),
        Integrator::ImplicitMidpoint => midpoint_step(&u, h, cfg, 0, 0.0),
        Integrator::Picard => {
            let rule = GaussRule::new(cfg.picard_order);
            picard_subinterval(&u, h, 0.0, &rule, cfg)
                .map(|r| r.0)
        }
    }
}

/// Evolve `state` to time `horizon` under the Galerkin flow `Phi^N`.
pub fn integrate(state: &TrigState, horizon: f64, cfg: &FlowConfig) -> Result<FlowResult> {
    cfg.validate()?;
    if !horizon.is_finite() {
        return Err(LabError::InvalidConfig(format!("horizon must be finite, got {horizon}")));
    }
    let u0 = prepare(state, cfg)?;
    let mut trace = (cfg.trace_every > 0).then(|| {
        vec![TracePoint {
            t: 0.0,
            invariants: invariants_of(&u0),
        }]
    });
    if horizon == 0.0 {
        return Ok(FlowResult {
            final_state: u0,
            trace,
            steps: 0,
            picard: (cfg.integrator == Integrator::Picard).then(PicardStats::default),
        });
    }

    let mut u = u0;
    let mut picard = None;
    let steps;
    match cfg.integrator {
        Integrator::Rk4 | Integrator::ImplicitMidpoint => {
            let n = step_count(horizon, cfg.dt);
            let h = horizon / n as f64;
            for i in 0..n {
                let t = i as f64 * h;
                u = match cfg.integrator {
                    Integrator::Rk4 => rk4_step(&u, h, cfg),
                    _ => midpoint_step(&u, h, cfg, i, t)?,
                };
                if !u.is_finite() {
                    return Err(LabError::BlowUp {
                        step: i + 1,
                        t: (i + 1) as f64 * h,
                    });
                }
                if let Some(tr) = trace.as_mut() {
                    if (i + 1) % cfg.trace_every == 0 || i + 1 == n {
                        tr.push(TracePoint {
                            t: (i + 1) as f64 * h,
                            invariants: invariants_of(&u),
                        });
                    }
                }
            }
            steps = n;
        }
        Integrator::Picard => {
            let rule = GaussRule::new(cfg.picard_order);
            let mut stats = PicardStats::default();
            let dir = horizon.signum();
            let mut t = 0.0;
            let mut count = 0;
            while (horizon - t).abs() > 1e-14 * horizon.abs() {
                let norm = sobolev_norm(&u, 0.5);
                let contraction = if norm > 0.0 {
                    1.0 / (4.0 * cfg.picard_constant * norm)
                } else {
                    f64::INFINITY
                };
                let len = cfg.dt.min(contraction).min((horizon - t).abs());
                let h = dir * len;
                let (next, iters, ratio) = picard_subinterval(&u, h, t, &rule, cfg)?;
                stats.absorb(h, iters, ratio);
                u = next;
                t += h;
                count += 1;
                if let Some(tr) = trace.as_mut() {
                    let done = (horizon - t).abs() <= 1e-14 * horizon.abs();
                    if count % cfg.trace_every == 0 || done {
                        tr.push(TracePoint {
                            t,
                            invariants: invariants_of(&u),
                        });
                    }
                }
            }
            steps = count;
            picard = Some(stats);
        }
    }
    Ok(FlowResult {
        final_state: u,
        trace,
        steps,
        picard,
    })
}

/// States at each of the increasing times `times` (all `>= 0`), integrating
/// segment by segment from `state` at `t = 0`.
pub fn integrate_sampled(state: &TrigState, times: &[f64], cfg: &FlowConfig) -> Result<Vec<TrigState>> {
    let mut cfg = cfg.clone();
    cfg.trace_every = 0;
    let mut u = prepare(state, &cfg)?;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &ti in times {
        if ti < t {
            return Err(LabError::InvalidConfig("sample times must be non-decreasing".into()));
        }
        if ti > t {
            u = integrate(&u, ti - t, &cfg)?.final_state;
            t = ti;
        }
        out.push(u.clone());
    }
    Ok(out)
}
