//! Fixed-point iteration of the Duhamel map
//! `u(t) = E(t) u0 + int_0^t E(t - tau) N(u(tau)) dtau`, `E(t) = e^{-it phi(D)}`,
//! with the time integral discretized by Gauss-Legendre collocation on each subinterval.
//!
//! In the interaction picture `g(tau) = E(-tau) N(u(tau))` the iterate at node
//! `c_i` is `E(c_i h) [u_start + h sum_j S_ij g_j]` where `S_ij = int_0^{c_i} l_j`.

use super::config::FlowConfig;
use super::rhs::{nonlinear_term, rotate};
use crate::error::{LabError, Result};
use crate::spectral::{l2_norm, TrigState};

/// Gauss-Legendre collocation rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `integration[i][j] = int_0^{nodes[i]} l_j(s) ds`
    pub integration: Vec<Vec<f64>>,
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and P_{n-1}
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // ascending order
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn lagrange(nodes: &[f64], j: usize, s: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != j)
        .fold(1.0, |acc, (_, &xm)| acc * (s - xm) / (nodes[j] - xm))
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let nodes: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let weights: Vec<f64> = w.iter().map(|t| 0.5 * t).collect();
        // l_j has degree order-1; the same rule mapped onto [0, c_i] integrates it exactly.
        let integration = nodes
            .iter()
            .map(|&ci| {
                (0..order)
                    .map(|j| {
                        nodes
                            .iter()
                            .zip(&weights)
                            .map(|(&s, &w)| ci * w * lagrange(&nodes, j, ci * s))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            integration,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Convergence record of a Picard run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PicardStats {
    pub subintervals: usize,
    pub iterations: usize,
    /// Largest successive-difference ratio `d_{m+1} / d_m` observed while `d_m >= tol`.
    pub max_ratio: f64,
    /// Shortest and longest subinterval lengths used.
    pub min_step: f64,
    pub max_step: f64,
}

impl PicardStats {
    pub(crate) fn absorb(&mut self, step: f64, iterations: usize, max_ratio: f64) {
        if self.subintervals == 0 {
            self.min_step = step.abs();
            self.max_step = step.abs();
        } else {
            self.min_step = self.min_step.min(step.abs());
            self.max_step = self.max_step.max(step.abs());
        }
        self.subintervals += 1;
        self.iterations += iterations;
        self.max_ratio = self.max_ratio.max(max_ratio);
    }
}

fn combine(base: &TrigState, h: f64, coeffs: &[f64], g: &[TrigState]) -> TrigState {
    g.iter()
        .zip(coeffs)
        .fold(base.clone(), |acc, (gj, &c)| acc.add_scaled(h * c, gj))
}

/// One subinterval `[t_start, t_start + h]` (h may be negative).
/// Returns the end state, iteration count and the largest contraction ratio.
pub(crate) fn picard_subinterval(
    u_start: &TrigState,
    h: f64,
    t_start: f64,
    rule: &GaussRule,
    cfg: &FlowConfig,
) -> Result<(TrigState, usize, f64)> {
    if cfg.linear_only {
        return Ok((rotate(u_start, h), 0, 0.0));
    }
    let (dealias, tol, max_iter) = (cfg.dealias_factor, cfg.picard_tol, cfg.picard_max_iter);
    let fail = |reason: String| LabError::PicardDivergence {
        t_start,
        t_end: t_start + h,
        reason,
    };
    let q = rule.order();
    let mut nodes: Vec<TrigState> = rule.nodes.iter().map(|&c| rotate(u_start, c * h)).collect();
    let mut end = rotate(u_start, h);
    let mut prev_diff: Option<f64> = None;
    let mut first_diff = None;
    let mut max_ratio: f64 = 0.0;

    for iter in 1..=max_iter {
        let g: Vec<TrigState> = (0..q)
            .map(|j| rotate(&nonlinear_term(&nodes[j], dealias), -rule.nodes[j] * h))
            .collect();
        let new_nodes: Vec<TrigState> = (0..q)
            .map(|i| {
                let inner = combine(u_start, h, &rule.integration[i], &g);
                rotate(&inner, rule.nodes[i] * h)
            })
            .collect();
        let new_end = rotate(&combine(u_start, h, &rule.weights, &g), h);

        let diff = new_nodes
            .iter()
            .zip(&nodes)
            .map(|(a, b)| l2_norm(&a.sub(b)))
            .fold(l2_norm(&new_end.sub(&end)), f64::max);
        if !diff.is_finite() {
            return Err(fail(format!("non-finite iterate at iteration {iter}")));
        }
        let first = *first_diff.get_or_insert(diff);
        if diff > 1e6 * first.max(tol) {
            return Err(fail(format!(
                "successive differences grew from {first:e} to {diff:e}"
            )));
        }
        if let Some(p) = prev_diff {
            if p >= tol && p > 0.0 {
                max_ratio = max_ratio.max(diff / p);
            }
        }
        nodes = new_nodes;
        end = new_end;
        if diff < tol {
            return Ok((end, iter, max_ratio));
        }
        prev_diff = Some(diff);
    }
    Err(fail(format!(
        "no convergence to {tol:e} within {max_iter} iterations (last ratio {max_ratio:.3})"
    )))
}
