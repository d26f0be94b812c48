//! Brute-force oracles shared by the integration tests. They work on complex
//! Fourier coefficients `c_k = (a_k - i b_k)/2`, independently of the FFT paths.

#![allow(dead_code)]

use std::f64::consts::PI;

use bbm_core::TrigState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64 as C;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean-zero state with Gaussian coefficients decaying like `k^-decay`.
pub fn random_state(rng: &mut impl Rng, n: usize, decay: f64) -> TrigState {
    let modes = (1..=n)
        .map(|k| {
            let w = (k as f64).powf(-decay);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            [w * a, w * b]
        })
        .collect();
    TrigState::mean_zero(modes).unwrap()
}

/// `c_{-N..=N}` stored at index `k + N`.
pub fn complex_coeffs(u: &TrigState) -> Vec<C> {
    let n = u.n() as i64;
    (-n..=n)
        .map(|k| match k {
            0 => C::new(u.mean(), 0.0),
            _ => {
                let [a, b] = u.mode(k.unsigned_abs() as usize);
                let c = C::new(a / 2.0, -b / 2.0);
                if k > 0 {
                    c
                } else {
                    c.conj()
                }
            }
        })
        .collect()
}

/// Value of the trigonometric polynomial at `x` by direct summation.
pub fn eval(u: &TrigState, x: f64) -> f64 {
    let mut v = u.mean();
    for k in 1..=u.n() {
        let [a, b] = u.mode(k);
        v += a * (k as f64 * x).cos() + b * (k as f64 * x).sin();
    }
    v
}

/// Full (untruncated) convolution `c * d`, index `m + (N_c + N_d)`.
pub fn convolve(c: &[C], d: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); c.len() + d.len() - 1];
    for (i, x) in c.iter().enumerate() {
        for (j, y) in d.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `-d/dx (1 - d^2/dx^2)^{-1} (u + u^2/2)`, Galerkin-truncated to the modes of `u`.
pub fn rhs_oracle(u: &TrigState) -> TrigState {
    let n = u.n();
    let c = complex_coeffs(u);
    let sq = convolve(&c, &c);
    let modes = (1..=n)
        .map(|m| {
            let w = c[n + m] + sq[2 * n + m] * 0.5;
            let mf = m as f64;
            let g = C::new(0.0, -mf / (1.0 + mf * mf)) * w;
            [2.0 * g.re, -2.0 * g.im]
        })
        .collect();
    TrigState::mean_zero(modes).unwrap()
}

/// `int_0^{2 pi} u^3` as the triple sum over `j + k + l = 0`.
pub fn cubic_oracle(u: &TrigState) -> f64 {
    let n = u.n() as i64;
    let c = complex_coeffs(u);
    let at = |k: i64| c[(k + n) as usize];
    let mut s = C::new(0.0, 0.0);
    for j in -n..=n {
        for k in -n..=n {
            let l = -j - k;
            if l.abs() <= n {
                s += at(j) * at(k) * at(l);
            }
        }
    }
    2.0 * PI * s.re
}

/// `H = 1/2 int u^2 + 1/6 int u^3` from the coefficient sums.
pub fn hamiltonian_oracle(u: &TrigState) -> f64 {
    let quad: f64 = complex_coeffs(u).iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * PI;
    0.5 * quad + cubic_oracle(u) / 6.0
}
