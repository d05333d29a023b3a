//! Pinned numerical tolerances used across the crate.
//!
//! One place for every threshold so tests and the CLI agree on what
//! "valid" means. Relative tolerances are applied as `tol * (1 + scale)`
//! with the Frobenius norm of the operand as scale.

/// Hermiticity precondition for eigendecompositions (relative).
pub const HERMITICITY_REL: f64 = 1e-9;

/// Required eigendecomposition quality: ‖M − QΛQ†‖_F ≤ this · (1 + ‖M‖_F).
pub const EIG_RECONSTRUCTION_REL: f64 = 1e-10;

/// Required eigenvector orthonormality: ‖Q†Q − 1‖_F ≤ this.
pub const EIG_ORTHONORMALITY: f64 = 1e-10;

/// Unitarity gate for evolution operators supplied to channel construction.
pub const UNITARY_DEFECT: f64 = 1e-9;

/// Unitarity gate for basis matrices.
pub const BASIS_UNITARY_DEFECT: f64 = 1e-10;

/// Kraus completeness ‖ΣK†K − 1‖_F allowed on any constructed channel.
pub const KRAUS_COMPLETENESS: f64 = 1e-9;

/// Kraus operators below this Frobenius weight are dropped.
pub const KRAUS_DROP: f64 = 1e-12;

/// Density-matrix trace deviation allowed at construction.
pub const DENSITY_TRACE: f64 = 1e-9;

/// Most negative density-matrix eigenvalue allowed at construction.
pub const DENSITY_EIG_FLOOR: f64 = -1e-9;

/// Entropy clamp window: eigenvalues in [−this, 0) count as exactly 0.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// Reservoir eigenvalues at or below this are treated as unpopulated.
pub const RESERVOIR_RETAIN: f64 = 1e-12;

/// Reservoir trace deviation allowed.
pub const RESERVOIR_TRACE: f64 = 1e-10;

/// Most negative reservoir eigenvalue allowed.
pub const RESERVOIR_EIG_FLOOR: f64 = -1e-12;

/// Φ(ρ) mass allowed outside the support of Φ(1) in the entropy-gain bound.
pub const SUPPORT_LEAK: f64 = 1e-9;

/// Interaction-block completeness residual that triggers a hard error.
pub const BLOCK_COMPLETENESS_ERROR: f64 = 1e-6;

/// Agreement residual between the two unitality routes that triggers a
/// hard error (blocks do not belong to the channel's evolution).
pub const UNITALITY_AGREEMENT_ERROR: f64 = 1e-6;

/// Factorization-witness bound: off-block norms and normalization defects.
pub const WITNESS_BOUND: f64 = 1e-8;

/// Default diagonal-invariance tolerance.
pub const DEFAULT_TOL_DIAG: f64 = 1e-9;

/// Default unitality-defect tolerance.
pub const DEFAULT_TOL_UNITAL: f64 = 1e-8;
