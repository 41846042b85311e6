use thiserror::Error;

/// Errors produced by state construction, measurement algebra and the
/// correlation measures.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M'| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("not a density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error(
        "unphysical Bell-diagonal parameters ({c1}, {c2}, {c3}): \
         eigenvalue lambda{index} = {value:.6} is negative"
    )]
    UnphysicalBellDiagonal {
        c1: f64,
        c2: f64,
        c3: f64,
        /// Eigenvalue label in 5..=8, matching the usual lambda5..lambda8 ordering.
        index: usize,
        value: f64,
    },

    #[error("Werner parameter z = {z} outside [-1/3, 1]")]
    WernerOutOfRange { z: f64 },

    #[error("measurement axis must be a unit vector: |n| = {norm}")]
    NonUnitBasis { norm: f64 },

    #[error("measurement strength must be a positive finite number, got {x}")]
    InvalidStrength { x: f64 },

    #[error("flip probability p = {p} outside [0, 1]")]
    FlipProbabilityOutOfRange { p: f64 },

    #[error("invalid damping parameters: gamma = {gamma}, t = {t} must be finite and >= 0")]
    InvalidDampingParameters { gamma: f64, t: f64 },

    #[error("Kraus operators do not satisfy completeness: max |sum K'K - I| = {deviation:.3e}")]
    IncompleteKrausSet { deviation: f64 },

    #[error(
        "phase-flip closed form requires |c1| < |c2| < |c3| (got {c1}, {c2}, {c3}); \
         use the numeric minimizer on the evolved state instead"
    )]
    ChannelOrderingViolated { c1: f64, c2: f64, c3: f64 },

    #[error(
        "phase-flip closed form for Bell-diagonal states covers discord and \
         super-discord only; use the numeric minimizer on the evolved state for {kind}"
    )]
    ChannelKindUnsupported { kind: String },

    #[error("computed measure {value:.3e} is below -1e-9; entropy or optimizer failure")]
    NegativeMeasure { value: f64 },

    #[error("invalid optimizer options: {reason}")]
    InvalidOptimizerOptions { reason: String },

    #[error("invalid surface request: {reason}")]
    InvalidSurfaceRequest { reason: String },

    #[error("invalid sweep specification: {reason}")]
    InvalidSweepSpec { reason: String },

    #[error("invalid state descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
