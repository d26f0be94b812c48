//! Spectral laboratory for the Benjamin-Bona-Mahony equation
//! `u_t + u_x + u u_x - u_txx = 0` on the circle.
//!
//! * [`spectral`]: states, Sobolev and phase-space norms, `phi(D)`, `J`.
//! * [`flow`]: Galerkin-truncated flow map, three integrators, conserved quantities.
//! * [`estimates`]: empirical bilinear constants, smoothing, flow Jacobians, radial orbits.
//! * [`squeeze`]: non-squeezing witness search.
//! * [`cli`]: configuration files, seeding and CSV output for the `bbm-lab` binary.

pub mod cli;
pub mod error;
pub mod estimates;
pub mod flow;
pub mod rng;
pub mod spectral;
pub mod squeeze;

pub use error::{LabError, Result};
pub use spectral::TrigState;
