//! Right-hand side `u_t = -d_x (1 - d_x^2)^{-1} (u + u^2 / 2)` and the free evolution.
//!
//! Mode by mode `-d_x (1 - d_x^2)^{-1}` maps `(alpha_k, beta_k)` to
//! `(-phi(k) beta_k, phi(k) alpha_k)`, so `cos x` is sent to `sin x / 2`.
//! The free evolution `e^{-it phi(D)}` is the matching rotation of each pair.

use std::f64::consts::PI;

use super::config::FlowConfig;
use crate::error::{LabError, Result};
use crate::spectral::{cubic_integral, dealiased_square, phi, TrigState};

/// `-d_x (1 - d_x^2)^{-1}` on a mean-free coefficient list.
fn rotate_by_phi(v: &[[f64; 2]]) -> Vec<[f64; 2]> {
    v.iter()
        .enumerate()
        .map(|(i, &[alpha, beta])| {
            let f = phi((i + 1) as f64);
            [-f * beta, f * alpha]
        })
        .collect()
}

/// Full right-hand side without input checks. `u` must already carry the
/// working truncation.
pub(crate) fn rhs_raw(u: &TrigState, dealias: f64, linear_only: bool) -> TrigState {
    if linear_only {
        return TrigState::from_parts(0.0, rotate_by_phi(u.modes()));
    }
    let sq = dealiased_square(u, dealias);
    let v: Vec<[f64; 2]> = u
        .modes()
        .iter()
        .zip(sq.modes())
        .map(|(m, s)| [m[0] + 0.5 * s[0], m[1] + 0.5 * s[1]])
        .collect();
    TrigState::from_parts(0.0, rotate_by_phi(&v))
}

/// Quadratic part of the right-hand side, `-d_x (1 - d_x^2)^{-1} Pi^N (u^2 / 2)`.
pub(crate) fn nonlinear_term(u: &TrigState, dealias: f64) -> TrigState {
    let sq = dealiased_square(u, dealias);
    let half: Vec<[f64; 2]> = sq.modes().iter().map(|s| [0.5 * s[0], 0.5 * s[1]]).collect();
    TrigState::from_parts(0.0, rotate_by_phi(&half))
}

/// Pad `state` to the configured truncation after checking the phase-space preconditions.
pub(crate) fn prepare(state: &TrigState, cfg: &FlowConfig) -> Result<TrigState> {
    state.require_mean_zero()?;
    if state.n() > cfg.n_modes {
        return Err(LabError::TruncationMismatch {
            state: state.n(),
            allowed: cfg.n_modes,
        });
    }
    let mut u = state.resized(cfg.n_modes);
    // The guard tolerates roundoff-level means; the dynamics never see them.
    if u.mean() != 0.0 {
        u = TrigState::from_parts(0.0, u.into_modes());
    }
    Ok(u)
}

/// Time derivative of the Galerkin-truncated BBM flow at `state`.
pub fn rhs(state: &TrigState, cfg: &FlowConfig) -> Result<TrigState> {
    cfg.validate()?;
    let u = prepare(state, cfg)?;
    Ok(rhs_raw(&u, cfg.dealias_factor, cfg.linear_only))
}

/// Rotate every mode by angle `t phi(k)`, no checks.
pub(crate) fn rotate(state: &TrigState, t: f64) -> TrigState {
    let modes = state
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let (s, c) = (t * phi((i + 1) as f64)).sin_cos();
            [a * c - b * s, a * s + b * c]
        })
        .collect();
    TrigState::from_parts(state.mean(), modes)
}

/// The linear group `e^{-it phi(D)}`; an isometry of every `H^s`.
pub fn free_evolution(state: &TrigState, t: f64) -> Result<TrigState> {
    state.require_mean_zero()?;
    Ok(rotate(state, t))
}

/// Conserved quantities `(I1, I2, H)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    /// `int u dx`
    pub i1: f64,
    /// `int (u^2 + u_x^2) dx`
    pub i2: f64,
    /// `int (u^2 / 2 + u^3 / 6) dx`
    pub h: f64,
}

pub fn invariants_of(state: &TrigState) -> Invariants {
    let mean = state.mean();
    let (mut l2, mut h1) = (0.0, 0.0);
    for (i, &[a, b]) in state.modes().iter().enumerate() {
        let k = (i + 1) as f64;
        let e = a * a + b * b;
        l2 += e;
        h1 += (1.0 + k * k) * e;
    }
    let zero = 2.0 * PI * mean * mean;
    let int_u2 = PI * l2 + zero;
    Invariants {
        i1: 2.0 * PI * mean,
        i2: PI * h1 + zero,
        h: 0.5 * int_u2 + cubic_integral(state) / 6.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize) -> FlowConfig {
        FlowConfig::rk4(n, 1e-3)
    }

    #[test]
    fn rhs_of_cos() {
        let u = TrigState::from_sparse(4, &[(1, 1.0, 0.0)]).unwrap();
        let r = rhs(&u, &cfg(4)).unwrap();
        assert_abs_diff_eq!(r.mode(1)[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.mode(2)[1], 0.1, epsilon = 1e-15);
        for k in 1..=4 {
            if k != 1 {
                assert!(r.mode(k)[0].abs() < 1e-15);
            }
            if k > 2 {
                assert!(r.mode(k)[1].abs() < 1e-15);
            }
        }
        assert_abs_diff_eq!(r.mode(1)[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rhs_zero_and_errors() {
        let z = rhs(&TrigState::zero(3), &cfg(3)).unwrap();
        assert_eq!(z, TrigState::zero(3));
        let m = TrigState::new(1.0, vec![[0.0; 2]]).unwrap();
        assert!(matches!(rhs(&m, &cfg(3)), Err(LabError::NonZeroMean { .. })));
        let big = TrigState::zero(5);
        assert!(matches!(
            rhs(&big, &cfg(3)),
            Err(LabError::TruncationMismatch { state: 5, allowed: 3 })
        ));
        // smaller truncation is padded
        assert_eq!(rhs(&TrigState::zero(2), &cfg(3)).unwrap().n(), 3);
    }

    #[test]
    fn free_evolution_quarter_turn() {
        let u = TrigState::from_sparse(2, &[(1, 1.0, 0.0)]).unwrap();
        let v = free_evolution(&u, PI).unwrap();
        assert_abs_diff_eq!(v.mode(1)[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.mode(1)[1], 1.0, epsilon = 1e-15);
        assert_eq!(free_evolution(&u, 0.0).unwrap(), u);
    }

    #[test]
    fn free_evolution_derivative_matches_linear_rhs() {
        let u = TrigState::from_sparse(3, &[(1, 0.3, -0.2), (3, 0.1, 0.4)]).unwrap();
        let h = 1e-6;
        let fd = free_evolution(&u, h)
            .unwrap()
            .sub(&free_evolution(&u, -h).unwrap())
            .scaled(0.5 / h);
        let lin = rhs(&u, &cfg(3).linear()).unwrap();
        assert!(fd.max_abs_diff(&lin) < 1e-9);
    }

    #[test]
    fn invariants_of_cos() {
        let u = TrigState::from_sparse(3, &[(1, 1.0, 0.0)]).unwrap();
        let inv = invariants_of(&u);
        assert_eq!(inv.i1, 0.0);
        assert_abs_diff_eq!(inv.i2, 2.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(inv.h, PI / 2.0, epsilon = 1e-14);
        let z = invariants_of(&TrigState::zero(4));
        assert_eq!((z.i1, z.i2, z.h), (0.0, 0.0, 0.0));
    }
}
