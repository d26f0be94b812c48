//! Finite-difference Jacobian of the flow in canonical coordinates and its
//! symplectic defect.
//!
//! Vectors are laid out as `(p_1, .., p_n, q_1, .., q_n)`. In this layout `J`
//! is `[[0, I], [-I, 0]]` and the form `omega(xi, eta) = <J xi, eta>` has matrix
//! `Omega = J^T = [[0, -I], [I, 0]]`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::flow::{integrate, FlowConfig};
use crate::spectral::{from_symplectic, to_symplectic, TrigState};

/// Relative disagreement between the `h` and `h/2` estimates above which a warning is attached.
pub const RICHARDSON_WARN: f64 = 0.10;

#[derive(Debug, Clone)]
pub struct JacobianReport {
    /// Central-difference Jacobian at step `h`.
    pub matrix: DMatrix<f64>,
    /// `max |M_h - M_{h/2}| / max |M_{h/2}|`.
    pub richardson_gap: f64,
    pub warning: Option<String>,
}

/// Matrix of the symplectic form for `n` mode pairs.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = -1.0;
        m[(n + i, i)] = 1.0;
    }
    m
}

/// `|| M^T Omega M - Omega ||_inf` (maximum absolute row sum).
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let om = omega(n);
    let d = m.transpose() * &om * m - om;
    d.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Flow map of `T` restricted to the first `n` canonical pairs of `base`.
fn restricted_flow(
    base: &TrigState,
    z: &[f64],
    horizon: f64,
    cfg: &FlowConfig,
) -> Result<Vec<f64>> {
    let n = z.len() / 2;
    let mut coords = to_symplectic(base)?;
    coords.set_block_vector(z);
    let u0 = from_symplectic(&coords)?;
    let end = integrate(&u0, horizon, cfg)?.final_state;
    Ok(to_symplectic(&end)?.to_block_vector(n))
}

fn central_difference(
    base: &TrigState,
    z0: &[f64],
    horizon: f64,
    h: f64,
    cfg: &FlowConfig,
) -> Result<DMatrix<f64>> {
    let dim = z0.len();
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut plus = z0.to_vec();
            let mut minus = z0.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let fp = restricted_flow(base, &plus, horizon, cfg)?;
            let fm = restricted_flow(base, &minus, horizon, cfg)?;
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| columns[j][i]))
}

/// Central-difference Jacobian of `u0 -> Phi^N_T(u0)` with respect to the first
/// `active_modes` canonical pairs, remaining modes of `u0` held fixed.
pub fn flow_jacobian(
    u0: &TrigState,
    horizon: f64,
    active_modes: usize,
    h: f64,
    cfg: &FlowConfig,
) -> Result<JacobianReport> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(LabError::InvalidConfig(format!(
            "finite-difference step must lie in [1e-6, 1e-3], got {h}"
        )));
    }
    if active_modes == 0 || active_modes > 8 || active_modes > cfg.n_modes {
        return Err(LabError::InvalidConfig(format!(
            "active_modes must lie in 1..=min(8, N), got {active_modes}"
        )));
    }
    u0.require_mean_zero()?;
    let base = u0.resized(cfg.n_modes.max(u0.n()));
    let z0 = to_symplectic(&base)?.to_block_vector(active_modes);
    let coarse = central_difference(&base, &z0, horizon, h, cfg)?;
    let fine = central_difference(&base, &z0, horizon, 0.5 * h, cfg)?;
    let scale = fine.amax().max(f64::MIN_POSITIVE);
    let richardson_gap = (&coarse - &fine).amax() / scale;
    let warning = (richardson_gap > RICHARDSON_WARN).then(|| {
        format!(
            "step h = {h:e} and h/2 disagree by {:.1}%; difference may be below the noise floor",
            100.0 * richardson_gap
        )
    });
    Ok(JacobianReport {
        matrix: coarse,
        richardson_gap,
        warning,
    })
}
