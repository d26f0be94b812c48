//! Lipschitz ratio of the nonlinear part of the flow from `H^{1/2-eps}` into
//! `X_T^{1/2+eps}`, with the time supremum sampled on a uniform grid.

use crate::error::{LabError, Result};
use crate::flow::{free_evolution, integrate_sampled, FlowConfig};
use crate::spectral::{sobolev_norm, TrigState};

/// Minimum number of time samples for the `X_T` supremum.
pub const MIN_TIME_SAMPLES: usize = 32;

/// `sup_t ||Phi~_t(u0) - Phi~_t(v0)||_{H^{1/2+eps}} / ||u0 - v0||_{H^{1/2-eps}}`
/// over `n_times` uniform times in `(0, T]`. Under-estimates the true supremum.
pub fn smoothing_ratio_sampled(
    u0: &TrigState,
    v0: &TrigState,
    horizon: f64,
    eps: f64,
    cfg: &FlowConfig,
    n_times: usize,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0 / 12.0) {
        return Err(LabError::InvalidConfig(format!(
            "eps must satisfy 0 < eps < 1/12, got {eps}"
        )));
    }
    if n_times < MIN_TIME_SAMPLES {
        return Err(LabError::InvalidConfig(format!(
            "at least {MIN_TIME_SAMPLES} time samples required"
        )));
    }
    if !(horizon >= 0.0) {
        return Err(LabError::InvalidConfig("horizon must be non-negative".into()));
    }
    u0.require_mean_zero()?;
    v0.require_mean_zero()?;
    let n = cfg.n_modes;
    let (u0, v0) = (u0.resized(n), v0.resized(n));
    let denom = sobolev_norm(&u0.sub(&v0), 0.5 - eps);
    if denom == 0.0 {
        return Err(LabError::ZeroInput("smoothing ratio needs u0 != v0"));
    }
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let times: Vec<f64> = (1..=n_times)
        .map(|j| horizon * j as f64 / n_times as f64)
        .collect();
    let us = integrate_sampled(&u0, &times, cfg)?;
    let vs = integrate_sampled(&v0, &times, cfg)?;
    let base = u0.sub(&v0);
    let mut sup: f64 = 0.0;
    for (&t, (u, v)) in times.iter().zip(us.iter().zip(&vs)) {
        // Phi~_t(u0) - Phi~_t(v0) = e^{it phi(D)}(u(t) - v(t)) - (u0 - v0)
        let diff = free_evolution(&u.sub(v), -t)?.sub(&base);
        sup = sup.max(sobolev_norm(&diff, 0.5 + eps));
    }
    Ok(sup / denom)
}

/// [`smoothing_ratio_sampled`] on the default 32-point time grid.
pub fn smoothing_ratio(
    u0: &TrigState,
    v0: &TrigState,
    horizon: f64,
    eps: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    smoothing_ratio_sampled(u0, v0, horizon, eps, cfg, MIN_TIME_SAMPLES)
}
