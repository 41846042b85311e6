//! Quantum and super-quantum correlation measures for two-qubit states.
//!
//! The library computes quantum discord, super-quantum discord, the one-way
//! deficit and the weak one-way deficit, each along two independent routes:
//! closed forms on the Werner and Bell-diagonal families, and a numeric
//! minimization over measurement bases that works on any two-qubit density
//! matrix and doubles as a verification oracle for the closed forms. On top
//! of that sit the two-sided phase-flip channel with its closed-form
//! decoherence dynamics, constant-measure level surfaces over the
//! Bell-diagonal tetrahedron, and parameter sweep tables.
//!
//! All entropies are base-2 (bits).

pub mod channels;
pub mod correlations;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measurements;
pub mod states;

pub use channels::{
    apply_channel, channel_measure_bell, channel_measure_werner, evolve_bell_params,
    phase_flip_channel, KrausChannel, PhaseFlipParams,
};
pub use correlations::{
    bell_measure, binary_entropy, conditional_entropy_weak, measure_numeric, werner_measure,
    MeasureKind, MeasureResult, Method, OptimizerOptions, OptimizerTrace,
};
pub use error::{Error, Result};
pub use geometry::{
    level_crossing_radius, level_surface, sweep, GridAxis, ProbabilityAxis, StrengthAxis,
    SurfacePointCloud, SurfaceRequest, SweepFamily, SweepSpec, SweepTable,
};
pub use linalg::{
    hermitian_eigenvalues, partial_trace_a, partial_trace_b, tensor, von_neumann_entropy, CMat2,
    CMat4, Spectrum, C64,
};
pub use measurements::{
    post_measurement_ensemble, projectors, weak_dephase, weak_pair, EnsembleBranch,
    MeasurementBasis, WeakPair, WeakStrength,
};
pub use states::{
    bell_diagonal, sample_bell_diagonal, validate, werner, BellDiagonalParams, StateDescriptor,
    StateDiagnostics, TwoQubitState, WernerParams,
};
