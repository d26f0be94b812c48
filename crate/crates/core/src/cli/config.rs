//! Configuration files.
//!
//! Every command reads one TOML file made of sections. `[run]` is shared:
//!
//! ```toml
//! [run]
//! seed = 42        # master seed, default 0
//! threads = 0      # worker threads, 0 = one per core
//! out_dir = "out"  # default bbm-lab-out/<command>
//! ```
//!
//! `[flow]` holds a [`FlowConfig`] (`N` and `dt` required), `[initial]` an
//! [`InitialSpec`], and each command has its own section described on its
//! config type. Unknown keys are rejected. The manifest written beside the
//! outputs is itself a valid config for the same command.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::estimates::{BilinearForm, SamplerKind, DEFAULT_DELTA};
use crate::flow::FlowConfig;
use crate::spectral::{read_state_csv, z_norm, TrigState};
use crate::squeeze::SqueezeConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

/// Header added to a config when it is echoed as a run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestHeader {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub outputs: Vec<String>,
}

/// Initial data: a state CSV (`k,a_k,b_k`) or inline `[k, a_k, b_k]` triples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Path to a state CSV, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<(usize, f64, f64)>>,
    /// Rescale to this Z norm after loading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_norm: Option<f64>,
}

impl InitialSpec {
    /// Make a relative `file` absolute against `base` so the spec can be echoed
    /// into a manifest living elsewhere.
    pub fn anchor(&mut self, base: &Path) {
        if let Some(f) = self.file.as_mut() {
            if f.is_relative() {
                let joined = base.join(&*f);
                *f = std::fs::canonicalize(&joined).unwrap_or(joined);
            }
        }
    }

    /// Build the state, padded to at least `n` modes.
    pub fn load(&self, n: usize) -> Result<TrigState> {
        let state = match (&self.file, &self.modes) {
            (Some(path), None) => {
                let f = std::fs::File::open(path).map_err(|e| {
                    LabError::InvalidConfig(format!("initial.file {}: {e}", path.display()))
                })?;
                read_state_csv(f)?
            }
            (None, Some(modes)) => {
                let top = modes.iter().map(|m| m.0).max().unwrap_or(0).max(n);
                TrigState::from_sparse(top, modes)?
            }
            _ => {
                return Err(LabError::InvalidConfig(
                    "[initial] needs exactly one of `file` or `modes`".into(),
                ))
            }
        };
        let state = state.resized(state.n().max(n));
        match self.z_norm {
            None => Ok(state),
            Some(target) => {
                state.require_mean_zero()?;
                let z = z_norm(&state)?;
                if z == 0.0 {
                    return Err(LabError::ZeroInput("cannot normalize the zero state"));
                }
                Ok(state.scaled(target / z))
            }
        }
    }
}

/// `bbm-lab simulate`: evolve `[initial]` to time `T`.
///
/// ```toml
/// [simulate]
/// T = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestHeader>,
    #[serde(default)]
    pub run: RunSection,
    pub flow: FlowConfig,
    pub initial: InitialSpec,
    pub simulate: SimulateSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(rename = "T")]
    pub horizon: f64,
}

/// `bbm-lab estimates`: empirical bilinear constants.
///
/// ```toml
/// [estimates]
/// n_samples = 10000
/// n_list = [16, 32, 64, 128]
///
/// [[estimates.case]]
/// s = 0.5
/// r = 0.5
/// rprime = 0.5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestHeader>,
    #[serde(default)]
    pub run: RunSection,
    pub estimates: EstimatesSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesSection {
    pub n_samples: usize,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerKind,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub case: Vec<EstimateCase>,
}

/// One exponent triple. For `form = "multiplier"` the `rprime` key is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateCase {
    #[serde(default = "default_form")]
    pub form: BilinearForm,
    pub s: f64,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rprime: Option<f64>,
}

fn default_n_list() -> Vec<usize> {
    vec![16, 32, 64, 128]
}
fn default_sampler() -> SamplerKind {
    SamplerKind::Mixed
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_form() -> BilinearForm {
    BilinearForm::Product
}

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// `bbm-lab squeeze`: witness search over the grid `r x n0`.
///
/// ```toml
/// [squeeze]
/// r = [0.5, 1.0]
/// n0 = [1, 2, 3]
/// T = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeFileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestHeader>,
    #[serde(default)]
    pub run: RunSection,
    pub flow: FlowConfig,
    pub squeeze: SqueezeSection,
    /// Optional ball center; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<InitialSpec>,
}

impl SqueezeFileConfig {
    /// One validated optimizer configuration per `(r, n0)` pair, `r` outermost.
    /// A relative `center.file` must already be anchored.
    pub fn cells(&self) -> Result<Vec<SqueezeConfig>> {
        let center = self.center.as_ref().map(|c| c.load(0)).transpose()?;
        let sec = &self.squeeze;
        let mut cells = Vec::new();
        for r in sec.r.to_vec() {
            for n0 in sec.n0.to_vec() {
                let mut c = SqueezeConfig::new(r, n0, sec.horizon, self.flow.clone());
                c.center = center.clone();
                c.cyl_center = sec.cyl_center;
                c.n_starts = sec.n_starts;
                c.n_active = sec.n_active;
                c.fd_step = sec.fd_step;
                c.ascent_step = sec.ascent_step;
                c.max_ascent_iters = sec.max_ascent_iters;
                c.stall_tol = sec.stall_tol;
                c.seed = self.run.seed;
                c.validate()?;
                cells.push(c);
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeSection {
    pub r: OneOrMany<f64>,
    pub n0: OneOrMany<usize>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default = "default_starts")]
    pub n_starts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_active: Option<usize>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ascent_step: Option<f64>,
    #[serde(default = "default_ascent_iters")]
    pub max_ascent_iters: usize,
    #[serde(default = "default_stall_tol")]
    pub stall_tol: f64,
    #[serde(default)]
    pub cyl_center: [f64; 2],
    /// Random sphere points pushed through the flow for a histogram; 0 skips the scan.
    #[serde(default)]
    pub scan_samples: usize,
    #[serde(default = "default_bins")]
    pub scan_bins: usize,
}

fn default_starts() -> usize {
    16
}
fn default_fd_step() -> f64 {
    1e-5
}
fn default_ascent_iters() -> usize {
    40
}
fn default_stall_tol() -> f64 {
    1e-7
}
fn default_bins() -> usize {
    20
}

/// `bbm-lab galerkin`: defect of small truncations against the `[flow]` reference.
///
/// ```toml
/// [galerkin]
/// T = 1.0
/// n_small = [8, 16, 32]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestHeader>,
    #[serde(default)]
    pub run: RunSection,
    pub flow: FlowConfig,
    pub initial: InitialSpec,
    pub galerkin: GalerkinSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n_small: Vec<usize>,
}

/// `bbm-lab orbit`: measured periods of radial Hamiltonians `f(|x|^2)`.
///
/// ```toml
/// [orbit]
/// fprime = [0.1, 0.5, 1.0, 2.0, 3.0]
/// n = 2
/// radius2 = 0.5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestHeader>,
    #[serde(default)]
    pub run: RunSection,
    pub orbit: OrbitSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub fprime: OneOrMany<f64>,
    #[serde(default = "default_orbit_dim")]
    pub n: usize,
    #[serde(default = "default_radius2")]
    pub radius2: f64,
}

fn default_orbit_dim() -> usize {
    2
}
fn default_radius2() -> f64 {
    0.5
}

/// Parse a config file, reporting TOML syntax and schema errors with their location.
pub fn load<C: DeserializeOwned>(path: &Path) -> Result<C> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse<C: DeserializeOwned>(text: &str) -> Result<C> {
    toml::from_str(text).map_err(|e| LabError::Parse(e.to_string().trim_end().to_string()))
}
