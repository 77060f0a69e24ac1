//! Exact dephasing dynamics of a two-level system driven by nonstationary,
//! non-Markovian random telegraph noise, and the geometry of the resulting
//! evolution.
//!
//! The pipeline is:
//!
//! 1. [`model`] validates the noise environment ([`NoiseParams`]) and the
//!    system setup ([`SystemConfig`]) and builds a [`TimeGrid`].
//! 2. [`decoherence`] turns the noise parameters into a three-mode
//!    exponential expansion of the decoherence factor `F(t)` and derives the
//!    frequency shift `s(t)`, the decoherence rate `γ(t)` and the unwrapped
//!    phase `φ(t)`.
//! 3. [`dynamics`] evolves the Bloch vector, diagonalises `ρ(t)` and measures
//!    the length of the Bloch trajectory.
//! 4. [`geometry`] computes Pancharatnam, effective and total geometric
//!    phases, for pure and mixed initial states.
//! 5. [`nonmarkov`] computes trace distances and the time-resolved
//!    non-Markovianity of the dephasing map.
//! 6. [`oracles`] holds independent references: a third-order ODE for `F`,
//!    a Monte Carlo telegraph-trajectory average and the memoryless closed
//!    form.

pub mod decoherence;
pub mod dynamics;
mod error;
pub mod geometry;
pub mod model;
pub mod nonmarkov;
pub mod ode;
pub mod oracles;
pub mod quad;

pub use decoherence::{
    CoherenceModel, CoherenceSample, CoherenceSource, ModeDecomposition,
};
pub use dynamics::{BlochState, SpectralState, Trajectory};
pub use error::{Error, Result};
pub use geometry::{MixedPhaseTerms, PhaseBreakdown};
pub use model::{NoiseParams, SystemConfig, TimeGrid};
pub use nonmarkov::NonMarkovReport;

pub use num_complex::Complex64 as C64;
