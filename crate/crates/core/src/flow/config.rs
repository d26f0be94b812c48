use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    ImplicitMidpoint,
    Picard,
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Integrator::Rk4 => "rk4",
            Integrator::ImplicitMidpoint => "implicit_midpoint",
            Integrator::Picard => "picard",
        })
    }
}

/// Settings for one evaluation of the truncated flow map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Galerkin truncation: modes `1..=N` are evolved.
    #[serde(rename = "N")]
    pub n_modes: usize,
    pub dt: f64,
    #[serde(default = "defaults::integrator")]
    pub integrator: Integrator,
    #[serde(default = "defaults::dealias_factor")]
    pub dealias_factor: f64,
    #[serde(default = "defaults::picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "defaults::picard_max_iter")]
    pub picard_max_iter: usize,
    /// Bilinear constant used to size Picard subintervals as `1 / (4 C ||u||_{H^1/2})`.
    #[serde(default = "defaults::picard_constant")]
    pub picard_constant: f64,
    /// Gauss-Legendre order of the Duhamel quadrature.
    #[serde(default = "defaults::picard_order")]
    pub picard_order: usize,
    #[serde(default = "defaults::midpoint_tol")]
    pub midpoint_tol: f64,
    #[serde(default = "defaults::midpoint_max_iter")]
    pub midpoint_max_iter: usize,
    /// Diagnostic switch: drop the quadratic term and evolve the linear flow only.
    #[serde(default)]
    pub linear_only: bool,
    /// Record `(t, I1, I2, H)` every this many steps; 0 disables the trace.
    #[serde(default)]
    pub trace_every: usize,
}

pub(crate) mod defaults {
    use super::Integrator;

    pub fn integrator() -> Integrator {
        Integrator::Rk4
    }
    pub fn dealias_factor() -> f64 {
        1.5
    }
    pub fn picard_tol() -> f64 {
        1e-12
    }
    pub fn picard_max_iter() -> usize {
        200
    }
    pub fn picard_constant() -> f64 {
        0.25
    }
    pub fn picard_order() -> usize {
        8
    }
    pub fn midpoint_tol() -> f64 {
        1e-13
    }
    pub fn midpoint_max_iter() -> usize {
        200
    }
}

impl FlowConfig {
    pub fn new(n_modes: usize, dt: f64, integrator: Integrator) -> Self {
        Self {
            n_modes,
            dt,
            integrator,
            dealias_factor: defaults::dealias_factor(),
            picard_tol: defaults::picard_tol(),
            picard_max_iter: defaults::picard_max_iter(),
            picard_constant: defaults::picard_constant(),
            picard_order: defaults::picard_order(),
            midpoint_tol: defaults::midpoint_tol(),
            midpoint_max_iter: defaults::midpoint_max_iter(),
            linear_only: false,
            trace_every: 0,
        }
    }

    pub fn rk4(n_modes: usize, dt: f64) -> Self {
        Self::new(n_modes, dt, Integrator::Rk4)
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_modes(mut self, n_modes: usize) -> Self {
        self.n_modes = n_modes;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn linear(mut self) -> Self {
        self.linear_only = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidConfig(msg));
        if self.n_modes < 1 {
            return bad("N must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.dealias_factor >= 1.5) {
            return bad(format!(
                "dealias_factor must be at least 1.5, got {}",
                self.dealias_factor
            ));
        }
        for (name, tol) in [("picard_tol", self.picard_tol), ("midpoint_tol", self.midpoint_tol)] {
            if !(tol > 0.0 && tol <= 1e-6) {
                return bad(format!("{name} must lie in (0, 1e-6], got {tol}"));
            }
        }
        if self.picard_max_iter == 0 || self.midpoint_max_iter == 0 {
            return bad("iteration limits must be positive".into());
        }
        if !(self.picard_constant > 0.0 && self.picard_constant.is_finite()) {
            return bad("picard_constant must be positive".into());
        }
        if self.picard_order < 2 {
            return bad("picard_order must be at least 2".into());
        }
        Ok(())
    }
}
