//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building geometry, synthesizing
/// measurements, or running the tracker.
#[derive(Debug, Error)]
pub enum Error {
    /// An angle of arrival outside the physical range `[0, pi]` radians.
    #[error("angle {0} rad is outside the physical range [0, pi]")]
    AngleOutOfRange(f64),

    /// An antenna count of zero where at least one element is required.
    #[error("antenna count must be at least 1")]
    ZeroAntennas,

    /// Two containers that must agree in length do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A noise power that must be strictly positive is zero or negative.
    #[error("noise power must be positive, got {0}")]
    NonPositiveNoisePower(f64),

    /// A negative noise power where zero is still meaningful.
    #[error("noise power must be nonnegative, got {0}")]
    NegativeNoisePower(f64),

    /// A pilot sequence with no samples.
    #[error("pilot length must be at least 1")]
    EmptyPilot,

    /// A particle population of size zero.
    #[error("particle count must be at least 1")]
    NoParticles,

    /// A negative standard deviation.
    #[error("standard deviation must be nonnegative, got {0}")]
    NegativeStdDev(f64),

    /// A negative posterior error proxy.
    #[error("aoa error proxy must be nonnegative, got {0}")]
    NegativeErrorProxy(f64),

    /// The estimated and candidate beams point (numerically) the same way,
    /// so the ideal element count diverges.
    #[error("cosine gap {0:e} is too small for a finite beamwidth target")]
    DegenerateGeometry(f64),

    /// Newton iteration left its bracket or failed to settle.
    #[error("root search failed: {0}")]
    RootSearchFailed(String),

    /// A statistic that needs variance or data was asked of a degenerate set.
    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(&'static str),

    /// A simulation configuration that fails validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
