//! Empirical checks of the analytic estimates behind well-posedness and
//! non-squeezing: bilinear constants, smoothing of the nonlinear part, flow
//! Jacobians and radial orbit periods.

mod bilinear;
mod jacobian;
mod orbit;
mod sampler;
mod smoothing;

pub use bilinear::{
    bilinear_ratio, bilinear_ratio_target, draw_samples, estimate_constant, running_max,
    write_report_csv, BilinearForm, EstimateReport, EstimateSample, Exponents, SweepRow,
};
pub use jacobian::{flow_jacobian, omega, symplectic_defect, JacobianReport, RICHARDSON_WARN};
pub use orbit::{radial_orbit_period, radial_orbit_period_with, OrbitReport};
pub use sampler::{adversarial_pairs, sample_state, SamplerKind, SamplerSpec, DEFAULT_DELTA};
pub use smoothing::{smoothing_ratio, smoothing_ratio_sampled, MIN_TIME_SAMPLES};
