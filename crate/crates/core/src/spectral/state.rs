use crate::error::{LabError, Result};

/// Mean values below this are treated as zero by the phase-space guards.
pub const MEAN_ZERO_TOL: f64 = 1e-14;

/// Real trigonometric polynomial on the circle,
/// `u(x) = mean + sum_k a_k cos(kx) + b_k sin(kx)` for `k = 1..=N`.
///
/// `modes[k - 1] = [a_k, b_k]`. The length of `modes` is the truncation `N`
/// and is never changed implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigState {
    mean: f64,
    modes: Vec<[f64; 2]>,
}

impl TrigState {
    pub fn new(mean: f64, modes: Vec<[f64; 2]>) -> Result<Self> {
        if modes.is_empty() {
            return Err(LabError::InvalidConfig("truncation N must be at least 1".into()));
        }
        if !mean.is_finite() {
            return Err(LabError::NonFinite { mode: 0 });
        }
        if let Some(k) = modes
            .iter()
            .position(|m| !(m[0].is_finite() && m[1].is_finite()))
        {
            return Err(LabError::NonFinite { mode: k + 1 });
        }
        Ok(Self { mean, modes })
    }

    /// Mean-zero constructor for phase-space states.
    pub fn mean_zero(modes: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(0.0, modes)
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "truncation must be at least 1");
        Self {
            mean: 0.0,
            modes: vec![[0.0; 2]; n],
        }
    }

    /// Build from sparse `(k, a_k, b_k)` triples; `k = 0` sets the mean.
    pub fn from_sparse(n: usize, entries: &[(usize, f64, f64)]) -> Result<Self> {
        let mut state = Self::zero(n.max(1));
        for &(k, a, b) in entries {
            if k == 0 {
                state.mean = a;
            } else if k > n {
                return Err(LabError::ModeOutOfRange {
                    mode: k,
                    truncation: n,
                });
            } else {
                state.modes[k - 1] = [a, b];
            }
        }
        Self::new(state.mean, state.modes)
    }

    /// Unchecked construction for internal hot paths where finiteness is
    /// already guaranteed by the caller.
    pub(crate) fn from_parts(mean: f64, modes: Vec<[f64; 2]>) -> Self {
        debug_assert!(!modes.is_empty());
        Self { mean, modes }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.modes.len()
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.mean
    }

    #[inline]
    pub fn modes(&self) -> &[[f64; 2]] {
        &self.modes
    }

    pub(crate) fn modes_mut(&mut self) -> &mut [[f64; 2]] {
        &mut self.modes
    }

    pub fn into_modes(self) -> Vec<[f64; 2]> {
        self.modes
    }

    /// `(a_k, b_k)` for `k >= 1`; zero beyond the truncation.
    pub fn mode(&self, k: usize) -> [f64; 2] {
        assert!(k >= 1, "mode index starts at 1");
        self.modes.get(k - 1).copied().unwrap_or([0.0; 2])
    }

    pub fn set_mode(&mut self, k: usize, a: f64, b: f64) -> Result<()> {
        if k == 0 || k > self.n() {
            return Err(LabError::ModeOutOfRange {
                mode: k,
                truncation: self.n(),
            });
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(LabError::NonFinite { mode: k });
        }
        self.modes[k - 1] = [a, b];
        Ok(())
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean.abs() <= MEAN_ZERO_TOL
    }

    pub fn require_mean_zero(&self) -> Result<()> {
        if self.is_mean_zero() {
            Ok(())
        } else {
            Err(LabError::NonZeroMean { mean: self.mean })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.modes.iter().all(|m| m[0].is_finite() && m[1].is_finite())
    }

    /// Copy with truncation `n`: pads with zeros or drops modes above `n`.
    pub fn resized(&self, n: usize) -> Self {
        assert!(n >= 1, "truncation must be at least 1");
        let mut modes = self.modes.clone();
        modes.resize(n, [0.0; 2]);
        Self {
            mean: self.mean,
            modes,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            modes: self
                .modes
                .iter()
                .map(|m| [m[0] * factor, m[1] * factor])
                .collect(),
        }
    }

    /// `self + factor * other`; the result has the larger of the two truncations.
    pub fn add_scaled(&self, factor: f64, other: &TrigState) -> Self {
        let n = self.n().max(other.n());
        let mut out = self.resized(n);
        out.mean += factor * other.mean;
        for (o, m) in out.modes.iter_mut().zip(&other.modes) {
            o[0] += factor * m[0];
            o[1] += factor * m[1];
        }
        out
    }

    pub fn add(&self, other: &TrigState) -> Self {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &TrigState) -> Self {
        self.add_scaled(-1.0, other)
    }

    /// Largest absolute coefficient difference, mean included.
    pub fn max_abs_diff(&self, other: &TrigState) -> f64 {
        let d = self.sub(other);
        d.modes
            .iter()
            .flat_map(|m| m.iter())
            .fold(d.mean.abs(), |acc, x| acc.max(x.abs()))
    }
}

/// Coordinates `(p_n, q_n)` in the basis `phi_n^+`, `phi_n^-` of the phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticCoords {
    pub pairs: Vec<[f64; 2]>,
}

impl SymplecticCoords {
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Euclidean norm of the full `(p, q)` vector.
    pub fn norm(&self) -> f64 {
        self.pairs
            .iter()
            .map(|pq| pq[0] * pq[0] + pq[1] * pq[1])
            .sum::<f64>()
            .sqrt()
    }

    /// Flatten the first `n` pairs into `(p_1..p_n, q_1..q_n)`.
    pub fn to_block_vector(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n];
        for (i, pq) in self.pairs.iter().take(n).enumerate() {
            v[i] = pq[0];
            v[n + i] = pq[1];
        }
        v
    }

    /// Overwrite the first `n` pairs from a `(p_1..p_n, q_1..q_n)` vector.
    pub fn set_block_vector(&mut self, v: &[f64]) {
        let n = v.len() / 2;
        assert!(n <= self.pairs.len(), "block vector longer than truncation");
        for i in 0..n {
            self.pairs[i] = [v[i], v[n + i]];
        }
    }
}

/// Samples of a function at `x_j = 2 pi j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub values: Vec<f64>,
}

impl GridSamples {
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.m() as f64;
        (0..self.m()).map(move |j| 2.0 * std::f64::consts::PI * j as f64 / m)
    }
}
