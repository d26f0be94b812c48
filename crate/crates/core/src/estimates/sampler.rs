use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::spectral::{japanese, sobolev_norm, TrigState};

/// Extra decay beyond the critical rate `<k>^{-(r + 1/2)}`.
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Gaussian coefficients with near-critical decay.
    Random,
    /// Two-mode pairs `cos(Kx)`, `cos((K +- 1)x)` swept over `K`.
    Adversarial,
    /// Both of the above.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            kind: SamplerKind::Mixed,
            delta: DEFAULT_DELTA,
        }
    }
}

/// Random mean-zero state with `a_k, b_k ~ N(0, 1) <k>^{-(r + 1/2 + delta)}`,
/// normalized to unit `H^r` norm.
///
/// Coefficients are drawn in increasing `k`, so for a fixed generator state a
/// draw at truncation `2N` extends the draw at truncation `N`.
pub fn sample_state<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64, delta: f64) -> TrigState {
    let modes: Vec<[f64; 2]> = (1..=n)
        .map(|k| {
            let w = japanese(k as f64).powf(-(r + 0.5 + delta));
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            [w * a, w * b]
        })
        .collect();
    let u = TrigState::from_parts(0.0, modes);
    let norm = sobolev_norm(&u, r);
    if norm > 0.0 {
        u.scaled(1.0 / norm)
    } else {
        u
    }
}

/// Near-resonant pairs `(cos Kx, cos((K + 1)x))` and `(cos Kx, cos((K - 1)x))`
/// for every admissible `K <= n`.
pub fn adversarial_pairs(n: usize) -> Vec<(usize, TrigState, TrigState)> {
    let mut out = Vec::new();
    let mut id = 0;
    for k in 1..=n {
        for other in [k + 1, k.wrapping_sub(1)] {
            if other == 0 || other > n {
                continue;
            }
            let u = TrigState::from_sparse(n, &[(k, 1.0, 0.0)]).expect("k <= n");
            let v = TrigState::from_sparse(n, &[(other, 1.0, 0.0)]).expect("other <= n");
            out.push((id, u, v));
            id += 1;
        }
    }
    out
}
