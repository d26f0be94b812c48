//! Norms, Fourier multipliers and the symplectic structure of the phase space
//! `Z = H^{1/2}_0`.
//!
//! The L2 pairing is `int_0^{2 pi} f g dx` (no `1/2 pi`), so `||cos kx||^2 = pi`.
//! The basis `phi_n^+ = c_n cos(nx)`, `phi_n^- = c_n sin(nx)` with
//! `c_n = sqrt(n / (pi (n^2 + 1)))` is orthonormal for the Z inner product
//! `<u, v>_Z = pi sum_k ((1 + k^2) / k) (a_k a'_k + b_k b'_k)`.

use std::f64::consts::PI;

use super::state::{SymplecticCoords, TrigState};
use crate::error::{LabError, Result};

/// Symbol of the dispersion multiplier, `k / (1 + k^2)`.
#[inline]
pub fn phi(k: f64) -> f64 {
    k / (1.0 + k * k)
}

/// `<k> = sqrt(1 + k^2)`.
#[inline]
pub fn japanese(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// Scale factor `c_n` mapping a symplectic coordinate to a Fourier coefficient.
#[inline]
pub fn basis_scale(n: usize) -> f64 {
    let n = n as f64;
    (n / (PI * (n * n + 1.0))).sqrt()
}

/// H^s norm under the `int_T` pairing; the mean contributes `2 pi mean^2`.
pub fn sobolev_norm(state: &TrigState, s: f64) -> f64 {
    let modes: f64 = state
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let k = (i + 1) as f64;
            (1.0 + k * k).powf(s) * (a * a + b * b)
        })
        .sum();
    (PI * modes + 2.0 * PI * state.mean() * state.mean()).sqrt()
}

/// L2 norm, `sobolev_norm(state, 0)` without the `powf`.
pub fn l2_norm(state: &TrigState) -> f64 {
    let modes: f64 = state.modes().iter().map(|&[a, b]| a * a + b * b).sum();
    (PI * modes + 2.0 * PI * state.mean() * state.mean()).sqrt()
}

/// Z inner product. Both states must be mean-zero.
pub fn z_inner(u: &TrigState, v: &TrigState) -> Result<f64> {
    u.require_mean_zero()?;
    v.require_mean_zero()?;
    let s: f64 = u
        .modes()
        .iter()
        .zip(v.modes())
        .enumerate()
        .map(|(i, (x, y))| {
            let k = (i + 1) as f64;
            (1.0 + k * k) / k * (x[0] * y[0] + x[1] * y[1])
        })
        .sum();
    Ok(PI * s)
}

/// `||u||_Z`, normalized so that every `phi_n^+-` has norm one.
pub fn z_norm(state: &TrigState) -> Result<f64> {
    state.require_mean_zero()?;
    let s: f64 = state
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let k = (i + 1) as f64;
            (1.0 + k * k) / k * (a * a + b * b)
        })
        .sum();
    Ok((PI * s).sqrt())
}

/// Apply `phi(D)`; the mean is annihilated since `phi(0) = 0`.
pub fn phi_multiplier(state: &TrigState) -> TrigState {
    let modes = state
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let f = phi((i + 1) as f64);
            [f * a, f * b]
        })
        .collect();
    TrigState::from_parts(0.0, modes)
}

/// `Pi^n`: zero every mode above `n`. The truncation of the state is kept.
pub fn project(state: &TrigState, n: usize) -> TrigState {
    assert!(n >= 1, "projector index must be at least 1");
    let mut out = state.clone();
    for m in out.modes_mut().iter_mut().skip(n) {
        *m = [0.0; 2];
    }
    out
}

/// The complex structure `J phi^+ = -phi^-`, `J phi^- = phi^+`, i.e.
/// `(p_n, q_n) -> (q_n, -p_n)`. Since the basis scale is shared by both
/// members of a pair the same map acts on `(a_n, b_n)`.
pub fn apply_j(state: &TrigState) -> Result<TrigState> {
    state.require_mean_zero()?;
    let modes = state.modes().iter().map(|&[a, b]| [b, -a]).collect();
    Ok(TrigState::from_parts(0.0, modes))
}

pub fn to_symplectic(state: &TrigState) -> Result<SymplecticCoords> {
    state.require_mean_zero()?;
    let pairs = state
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| {
            let c = basis_scale(i + 1);
            [a / c, b / c]
        })
        .collect();
    Ok(SymplecticCoords { pairs })
}

pub fn from_symplectic(coords: &SymplecticCoords) -> Result<TrigState> {
    let modes = coords
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &[p, q])| {
            let c = basis_scale(i + 1);
            [p * c, q * c]
        })
        .collect();
    TrigState::mean_zero(modes)
}

/// Sign of a basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `phi_n^+`, the cosine member.
    Plus,
    /// `phi_n^-`, the sine member.
    Minus,
}

/// Basis vector `phi_n^+-` in a state of truncation `truncation`.
pub fn basis_vector(n: usize, parity: Parity, truncation: usize) -> Result<TrigState> {
    if n == 0 || n > truncation {
        return Err(LabError::ModeOutOfRange {
            mode: n,
            truncation,
        });
    }
    let c = basis_scale(n);
    let entry = match parity {
        Parity::Plus => (n, c, 0.0),
        Parity::Minus => (n, 0.0, c),
    };
    TrigState::from_sparse(truncation, &[entry])
}
