//! Grid synthesis/analysis and dealiased pointwise products.
//!
//! Internally a state is held as the complex spectrum
//! `u(x) = sum_k c_k e^{ikx}` with `c_0 = mean`, `c_k = (a_k - i b_k) / 2`
//! and `c_{-k} = conj(c_k)`. None of this leaks into the public contracts,
//! which speak only in real `(a_k, b_k)` pairs.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::state::{GridSamples, TrigState};
use crate::error::{LabError, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

fn check_resolution(m: usize, n: usize) -> Result<()> {
    let needed = 2 * n + 1;
    if m < needed {
        return Err(LabError::Resolution {
            samples: m,
            modes: n,
            needed,
        });
    }
    Ok(())
}

/// Smallest 5-smooth integer `>= min` (fast FFT sizes).
pub fn smooth_size(min: usize) -> usize {
    let mut m = min.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Grid on which products of two truncation-`n` states are alias-free in modes `<= n`.
///
/// Honours `factor * 2n` points but never fewer than `3n + 1`; a grid of exactly
/// `3n` points folds frequency `2n` onto mode `-n`.
pub fn product_grid(n: usize, factor: f64) -> usize {
    let requested = (factor * 2.0 * n as f64).ceil() as usize;
    smooth_size(requested.max(3 * n + 1))
}

/// Grid on which the cubic integrand of a truncation-`n` state integrates exactly.
pub fn cubic_grid(n: usize) -> usize {
    smooth_size((4 * n).max(3 * n + 1))
}

fn spectrum(state: &TrigState, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[0] = Complex64::new(state.mean(), 0.0);
    for (i, &[a, b]) in state.modes().iter().enumerate() {
        let k = i + 1;
        let c = Complex64::new(0.5 * a, -0.5 * b);
        buf[k] = c;
        buf[m - k] = c.conj();
    }
    buf
}

fn values_from_spectrum(mut buf: Vec<Complex64>) -> Vec<f64> {
    fft_in_place(&mut buf, true);
    buf.into_iter().map(|z| z.re).collect()
}

fn analyze_values(values: &[f64], n: usize) -> TrigState {
    let m = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / m as f64;
    let modes = (1..=n)
        .map(|k| {
            let c = buf[k] * scale;
            [2.0 * c.re, -2.0 * c.im]
        })
        .collect();
    TrigState::from_parts(buf[0].re * scale, modes)
}

/// Evaluate `state` on `m` equispaced points by inverse FFT.
pub fn synthesize(state: &TrigState, m: usize) -> Result<GridSamples> {
    check_resolution(m, state.n())?;
    Ok(GridSamples {
        values: values_from_spectrum(spectrum(state, m)),
    })
}

/// Evaluate `state` on `m` equispaced points by direct summation, `O(mN)`.
pub fn synthesize_direct(state: &TrigState, m: usize) -> Result<GridSamples> {
    check_resolution(m, state.n())?;
    let values = (0..m)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / m as f64;
            state
                .modes()
                .iter()
                .enumerate()
                .fold(state.mean(), |acc, (i, &[a, b])| {
                    let kx = (i + 1) as f64 * x;
                    acc + a * kx.cos() + b * kx.sin()
                })
        })
        .collect();
    Ok(GridSamples { values })
}

/// Trigonometric interpolation coefficients for frequencies `<= n`.
pub fn analyze(samples: &GridSamples, n: usize) -> Result<TrigState> {
    if n == 0 {
        return Err(LabError::InvalidConfig("truncation N must be at least 1".into()));
    }
    check_resolution(samples.m(), n)?;
    let state = analyze_values(&samples.values, n);
    if !state.is_finite() {
        return Err(LabError::NonFinite { mode: 0 });
    }
    Ok(state)
}

/// `Pi^n (u * v)` computed on an alias-free grid. Both factors are padded to
/// the common truncation `n = max(N_u, N_v)`.
pub fn dealiased_product(u: &TrigState, v: &TrigState, factor: f64) -> TrigState {
    let n = u.n().max(v.n());
    let m = product_grid(n, factor);
    let uu = values_from_spectrum(spectrum(u, m));
    let prod: Vec<f64> = if std::ptr::eq(u, v) {
        uu.iter().map(|x| x * x).collect()
    } else {
        let vv = values_from_spectrum(spectrum(v, m));
        uu.iter().zip(&vv).map(|(x, y)| x * y).collect()
    };
    analyze_values(&prod, n)
}

/// `Pi^n (u^2)` on an alias-free grid.
pub fn dealiased_square(u: &TrigState, factor: f64) -> TrigState {
    dealiased_product(u, u, factor)
}

/// `int_0^{2 pi} u^3 dx`, exact for trigonometric polynomials.
pub fn cubic_integral(u: &TrigState) -> f64 {
    let m = cubic_grid(u.n());
    let vals = values_from_spectrum(spectrum(u, m));
    let sum: f64 = vals.iter().map(|x| x * x * x).sum();
    2.0 * PI * sum / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(97), 100);
        assert_eq!(smooth_size(193), 200);
        assert_eq!(smooth_size(1), 1);
    }

    #[test]
    fn product_grid_is_alias_free() {
        for n in 1..200 {
            assert!(product_grid(n, 1.5) >= 3 * n + 1);
            assert!(cubic_grid(n) >= 4 * n);
        }
    }

    #[test]
    fn cos_on_eight_points() {
        let u = TrigState::from_sparse(1, &[(1, 1.0, 0.0)]).unwrap();
        let g = synthesize(&u, 8).unwrap();
        for (j, v) in g.values.iter().enumerate() {
            assert_abs_diff_eq!(*v, (2.0 * PI * j as f64 / 8.0).cos(), epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_state_synthesizes_to_zero() {
        let g = synthesize(&TrigState::zero(5), 16).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn resolution_errors() {
        let u = TrigState::zero(4);
        assert!(matches!(
            synthesize(&u, 8),
            Err(LabError::Resolution { needed: 9, .. })
        ));
        let g = GridSamples {
            values: vec![0.0; 8],
        };
        assert!(analyze(&g, 4).is_err());
        assert!(analyze(&g, 3).is_ok());
    }

    #[test]
    fn analyze_cos3() {
        let g = GridSamples {
            values: (0..16)
                .map(|j| (3.0 * 2.0 * PI * j as f64 / 16.0).cos())
                .collect(),
        };
        let u = analyze(&g, 4).unwrap();
        for k in 1..=4 {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(u.mode(k)[0], expect, epsilon = 1e-12);
            assert_abs_diff_eq!(u.mode(k)[1], 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(u.mean(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn analyze_constant() {
        let g = GridSamples {
            values: vec![2.5; 11],
        };
        let u = analyze(&g, 5).unwrap();
        assert_abs_diff_eq!(u.mean(), 2.5, epsilon = 1e-15);
        assert!(u.modes().iter().all(|m| m[0].abs() < 1e-15 && m[1].abs() < 1e-15));
    }

    #[test]
    fn analyze_matches_quadrature_oracle() {
        // b_k = (2/M) sum_j u_j sin(k x_j), a_k = (2/M) sum_j u_j cos(k x_j)
        let m = 8;
        let xs: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|x| x.sin() + 0.5 * (2.0 * x).sin()).collect();
        let quad = |k: f64, f: fn(f64) -> f64| {
            2.0 / m as f64 * vals.iter().zip(&xs).map(|(v, x)| v * f(k * x)).sum::<f64>()
        };
        let u = analyze(&GridSamples { values: vals.clone() }, 2).unwrap();
        assert_abs_diff_eq!(u.mode(1)[1], quad(1.0, f64::sin), epsilon = 1e-14);
        assert_abs_diff_eq!(u.mode(2)[1], quad(2.0, f64::sin), epsilon = 1e-14);
        assert_abs_diff_eq!(u.mode(1)[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.mode(2)[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(u.mode(1)[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cubic_integral_of_cos_cubed_is_zero_and_cos_squared_sin() {
        let u = TrigState::from_sparse(2, &[(1, 1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(cubic_integral(&u), 0.0, epsilon = 1e-14);
        // (cos x + cos 2x)^3 integrates to 2 pi * 3/4
        let v = TrigState::from_sparse(2, &[(1, 1.0, 0.0), (2, 1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(cubic_integral(&v), 1.5 * PI, epsilon = 1e-13);
    }
}
