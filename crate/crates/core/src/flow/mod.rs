//! The Galerkin-truncated BBM flow map and its conserved quantities.

mod config;
mod integrate;
mod nonlinear;
mod picard;
mod rhs;

pub use config::{FlowConfig, Integrator};
pub use integrate::{integrate, integrate_sampled, step, FlowResult, TracePoint};
pub use nonlinear::{galerkin_defect, nonlinear_part};
pub use picard::{gauss_legendre, GaussRule, PicardStats};
pub use rhs::{free_evolution, invariants_of, rhs, Invariants};

use std::io::Write;

use crate::error::Result;
use crate::spectral::fmt_f64;

/// Write a trace as CSV `t,I1,I2,H`.
pub fn write_trace_csv<W: Write>(trace: &[TracePoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "I1", "I2", "H"])?;
    for p in trace {
        w.write_record([
            fmt_f64(p.t),
            fmt_f64(p.invariants.i1),
            fmt_f64(p.invariants.i2),
            fmt_f64(p.invariants.h),
        ])?;
    }
    w.flush()?;
    Ok(())
}
