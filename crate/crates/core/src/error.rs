use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// Grid too coarse to represent the requested truncation without aliasing.
    #[error("resolution: {samples} grid points cannot resolve {modes} modes (need at least {needed})")]
    Resolution {
        samples: usize,
        modes: usize,
        needed: usize,
    },

    #[error("state has nonzero mean {mean:e}; phase-space operations require mean zero")]
    NonZeroMean { mean: f64 },

    #[error("truncation mismatch: state has {state} modes, configuration allows {allowed}")]
    TruncationMismatch { state: usize, allowed: usize },

    #[error("mode {mode} outside truncation 1..={truncation}")]
    ModeOutOfRange { mode: usize, truncation: usize },

    #[error("non-finite coefficient at mode {mode}")]
    NonFinite { mode: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Picard iteration failed to contract on subinterval [{t_start}, {t_end}]: {reason}")]
    PicardDivergence {
        t_start: f64,
        t_end: f64,
        reason: String,
    },

    #[error("integration blew up at step {step} (t = {t}): state is no longer finite")]
    BlowUp { step: usize, t: f64 },

    #[error("implicit midpoint solver stalled at step {step} (t = {t}): residual {residual:e}")]
    MidpointStall { step: usize, t: f64, residual: f64 },

    #[error("inadmissible exponents: violates {0}")]
    Inadmissible(String),

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
