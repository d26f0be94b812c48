//! The nonlinear part of the flow, `Phi_T = e^{-iT phi(D)} (I + Phi~_T)`, and the
//! Galerkin approximation defect built from it.

use super::config::FlowConfig;
use super::integrate::integrate;
use super::rhs::{prepare, rotate};
use crate::error::{LabError, Result};
use crate::spectral::{project, z_norm, TrigState};

/// `Phi~_T(u0) = e^{iT phi(D)} Phi_T(u0) - u0`.
pub fn nonlinear_part(u0: &TrigState, horizon: f64, cfg: &FlowConfig) -> Result<TrigState> {
    let start = prepare(u0, cfg)?;
    if horizon == 0.0 {
        return Ok(TrigState::zero(cfg.n_modes));
    }
    let end = integrate(&start, horizon, cfg)?.final_state;
    Ok(rotate(&end, -horizon).sub(&start))
}

/// `|| Phi~^{ref}_T(u0) - Phi~^{n_small}_T(Pi^{n_small} u0) ||_Z`, where the
/// reference truncation `cfg_ref.n_modes` stands in for the full flow.
pub fn galerkin_defect(
    u0: &TrigState,
    horizon: f64,
    n_small: usize,
    cfg_ref: &FlowConfig,
) -> Result<f64> {
    if n_small == 0 || n_small > cfg_ref.n_modes {
        return Err(LabError::InvalidConfig(format!(
            "N_small = {n_small} must lie in 1..={}",
            cfg_ref.n_modes
        )));
    }
    let reference = nonlinear_part(u0, horizon, cfg_ref)?;
    let cfg_small = cfg_ref.clone().with_modes(n_small);
    let low = project(&u0.resized(cfg_ref.n_modes), n_small).resized(n_small);
    let small = nonlinear_part(&low, horizon, &cfg_small)?;
    z_norm(&reference.sub(&small.resized(cfg_ref.n_modes)))
}
