//! Construction and analysis of quantum channels induced by a joint
//! system–reservoir evolution, with numerical verification that
//! invariance of the system's diagonal density-matrix elements implies a
//! unital channel (the quantum H-theorem criterion).
//!
//! Conventions used everywhere:
//! - ħ = 1 and k_B = 1; entropies are in nats.
//! - Composite spaces are system ⊗ reservoir with system-major, row-major
//!   flattening: composite index `i_sys * d_res + i_res`.
//! - Matrix functions are evaluated through the Hermitian
//!   eigendecomposition, never by series expansion.
//!
//! All values are immutable after construction; every function is a pure
//! map of its inputs and safe to call from concurrent workers.

// index loops double as composite-offset arithmetic throughout
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod ensemble;
pub mod error;
pub mod htheorem;
pub mod matrix;
pub mod spectral;
pub mod state;
pub mod system;
pub mod tol;

pub use channel::{
    entropy_gain, unitality, unitality_with_blocks, ChannelKraus, ChoiMatrix, EntropyGain,
    UnitalityCertificate,
};
pub use ensemble::{demon_instance, SeededGenerator};
pub use error::{Error, Result};
pub use htheorem::{
    diagonal_invariance, factorization_check, gram_and_reconstruct, h_matrices, verify_theorem,
    verify_theorem_full, FactorizationWitness, GramSet, HMatrixSet, TheoremReport,
    TheoremVerification,
};
pub use matrix::{ComplexMatrix, Subsystem};
pub use spectral::{eig_hermitian, unitary_exp, HermitianSpectrum};
pub use state::DensityMatrix;
pub use system::{
    extract_blocks, Evolution, GrandSystem, InteractionBlocks, ReservoirState,
};
