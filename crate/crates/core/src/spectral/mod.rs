//! Fourier representation of states on the circle and the phase-space geometry.

mod io;
mod ops;
mod state;
mod transform;

pub use io::{fmt_f64, read_state_csv, state_to_csv_string, write_state_csv};
pub use ops::{
    apply_j, basis_scale, basis_vector, from_symplectic, japanese, l2_norm, phi, phi_multiplier,
    project, sobolev_norm, to_symplectic, z_inner, z_norm, Parity,
};
pub use state::{GridSamples, SymplecticCoords, TrigState, MEAN_ZERO_TOL};
pub use transform::{
    analyze, cubic_grid, cubic_integral, dealiased_product, dealiased_square, product_grid,
    smooth_size, synthesize, synthesize_direct,
};
