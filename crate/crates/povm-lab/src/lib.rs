//! Numerical laboratory for N-level coherent-state POVMs.
//!
//! The library connects three views of the same physical process and
//! cross-checks them against each other:
//!
//! - **Measurement view**: repeated rounds of the coherent-state POVM
//!   `E(Ω) = N|Ω⟩⟨Ω|`, applied analytically, by Monte Carlo averaging, or as
//!   sampled single-outcome trajectories ([`channels`]).
//! - **Decoherence view**: the isotropic depolarizing semigroup generated by a
//!   uniform-rate Lindblad sum over all su(N) generators, solved in closed
//!   form and by Runge-Kutta integration ([`channels`], [`sun_algebra`]).
//! - **Phase-space view**: s-parameterized quasi-probability functions built
//!   from the Stratonovich-Weyl kernel, their contraction under measurement
//!   rounds, and the critical round count at which negativity disappears
//!   ([`phase_space`]).
//!
//! [`circuits`] simulates the measurement protocols (inverse-unitary
//! post-selection, ancilla controlled-SWAP, and LCU kernel estimation) at the
//! density-matrix level, and [`cli`] exposes reproducible seeded runs with
//! CSV/JSON export. Start from the `examples/` directory for runnable tours
//! of each capability.

pub mod channels;
pub mod circuits;
pub mod cli;
pub mod coherent;
pub mod linalg;
pub mod montecarlo;
pub mod phase_space;
pub mod sun_algebra;
pub mod tol;

pub use channels::{ChannelSpec, DensityMatrix};
pub use coherent::{CoherentState, OmegaAngles};
pub use linalg::CMat;
pub use sun_algebra::{BlochVector, GeneratorBasis};

use thiserror::Error;

/// Error type shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need N >= 2")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid angles: {0}")]
    InvalidAngles(String),
    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("too few steps: {got} < {min}")]
    TooFewSteps { got: usize, min: usize },
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
    #[error("numerical guard violated: {0}")]
    NumericalGuard(String),
    #[error("memory guard: dimension {0} exceeds limit {1}")]
    MemoryGuard(usize, usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
