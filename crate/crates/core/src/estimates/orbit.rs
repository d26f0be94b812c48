//! Periods of orbits of radial Hamiltonians `H(x) = f(|x|^2)` on `R^{2n}`.
//!
//! With `J(p, q) = (q, -p)` the equations are `x' = 2 f'(|x|^2) J x`: every
//! orbit stays on its sphere and turns at angular speed `2 f'`, so when
//! `0 < f' < pi` on the shell the period `pi / f'` exceeds one. The period here
//! is measured by integrating the ODE and timing the first return through a
//! transversal section, not read off from that formula.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitReport {
    pub period: f64,
    /// `max_t | |x(t)|^2 - radius2 |` over the measured period.
    pub shell_drift: f64,
    pub steps: usize,
}

type Field<'a> = dyn Fn(f64) -> f64 + 'a;

fn field(fprime: &Field<'_>, x: &[f64], out: &mut [f64]) {
    let n = x.len() / 2;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let w = 2.0 * fprime(r2);
    for i in 0..n {
        out[i] = w * x[n + i];
        out[n + i] = -w * x[i];
    }
}

fn rk4(fprime: &Field<'_>, x: &[f64], h: f64) -> Vec<f64> {
    let d = x.len();
    let mut k1 = vec![0.0; d];
    let mut k2 = vec![0.0; d];
    let mut k3 = vec![0.0; d];
    let mut k4 = vec![0.0; d];
    let mut tmp = vec![0.0; d];
    field(fprime, x, &mut k1);
    for i in 0..d {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    field(fprime, &tmp, &mut k2);
    for i in 0..d {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    field(fprime, &tmp, &mut k3);
    for i in 0..d {
        tmp[i] = x[i] + h * k3[i];
    }
    field(fprime, &tmp, &mut k4);
    (0..d)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Measure the first-return period of the orbit of `H = f(|x|^2)` in `R^{2n}`
/// through the point of the sphere `|x|^2 = radius2` with equal weight in every
/// coordinate.
pub fn radial_orbit_period_with(fprime: &Field<'_>, n: usize, radius2: f64) -> Result<OrbitReport> {
    if n == 0 {
        return Err(LabError::InvalidConfig("dimension n must be at least 1".into()));
    }
    if !(radius2 > 0.0) {
        return Err(LabError::InvalidConfig("radius2 must be positive".into()));
    }
    let d = 2 * n;
    let x0: Vec<f64> = vec![(radius2 / d as f64).sqrt(); d];
    let mut v0 = vec![0.0; d];
    field(fprime, &x0, &mut v0);
    let speed = dot(&v0, &v0).sqrt() / radius2.sqrt();
    if !(speed > 0.0) {
        return Err(LabError::InvalidConfig("stationary point: f' vanishes on the shell".into()));
    }
    let h = 1e-3 * (1.0f64).min(1.0 / speed);
    let section = |x: &[f64]| -> f64 {
        x.iter().zip(&x0).zip(&v0).map(|((a, b), v)| (a - b) * v).sum()
    };
    let t_max = 1e4 / speed.max(1e-3);
    let mut x = x0.clone();
    let mut t = 0.0;
    let mut steps = 0;
    let mut drift: f64 = 0.0;
    let mut left = false;
    let mut g_prev = 0.0;
    while t < t_max {
        let next = rk4(fprime, &x, h);
        steps += 1;
        drift = drift.max((dot(&next, &next) - radius2).abs());
        let dist2: f64 = next.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum();
        if dist2 > 0.25 * radius2 {
            left = true;
        }
        let g = section(&next);
        if left && g_prev <= 0.0 && g > 0.0 && dist2 < 0.25 * radius2 {
            // bracket [0, h] from x: refine the crossing time by bisection on a fresh RK4 step
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if section(&rk4(fprime, &x, mid)) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(OrbitReport {
                period: t + 0.5 * (lo + hi),
                shell_drift: drift,
                steps,
            });
        }
        g_prev = g;
        x = next;
        t += h;
    }
    Err(LabError::InvalidConfig(format!(
        "no return to the starting section before t = {t_max:e}"
    )))
}

/// Period of a non-constant orbit of `H = f(|x|^2)` with `f' = fprime_max` on the shell.
pub fn radial_orbit_period(fprime_max: f64, n: usize, radius2: f64) -> Result<OrbitReport> {
    if !(fprime_max > 0.0 && fprime_max < std::f64::consts::PI) {
        return Err(LabError::InvalidConfig(format!(
            "fprime_max must lie in (0, pi), got {fprime_max}"
        )));
    }
    if !(radius2 > 0.0 && radius2 < 1.0) {
        return Err(LabError::InvalidConfig(format!(
            "radius2 must lie in (0, 1), got {radius2}"
        )));
    }
    radial_orbit_period_with(&|_| fprime_max, n, radius2)
}
