//! Centralized numeric tolerances.
//!
//! Every threshold used for validation or comparison lives here so tests and
//! production code agree on the same constants.

/// Orthonormality of computed unitary/Stiefel factors: `‖Q†Q − 1‖_max`.
pub const ORTHONORMALITY: f64 = 1e-10;

/// Cross-checks between independent algebraic routes (SVD vs eigensolver,
/// canonical-form round trips, invariance sweeps).
pub const CROSS_CHECK: f64 = 1e-9;

/// Frobenius-relative SVD reconstruction error `‖m − UΣV†‖ / ‖m‖`.
pub const SVD_RECONSTRUCTION: f64 = 1e-10;

/// Principal angles below this are treated as zero when comparing subspaces.
pub const SUBSPACE_EQUALITY: f64 = 1e-8;

/// Orthonormality defect accepted for externally supplied frames.
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// Minimum pairwise distance (space's own metric) separating code symbols.
pub const DUPLICATE_SYMBOL: f64 = 1e-8;

/// Squared singular values at or below this count as zero in the PEP
/// product (the residue formulas exclude them).
pub const PEP_ACTIVE: f64 = 1e-14;

/// Poles closer than this are merged into one higher-order pole.
pub const POLE_MERGE: f64 = 1e-9;

/// Poles closer than this (but not merged) are integrated on one contour.
pub const POLE_CLUSTER: f64 = 2.5e-3;

/// Minimum contour radius for numerical residue extraction.
pub const CONTOUR_RADIUS_MIN: f64 = 1e-3;

/// Trapezoid points per residue contour.
pub const CONTOUR_POINTS: usize = 256;

/// Jacobi sweep convergence (relative off-diagonal mass).
pub const JACOBI_EPS: f64 = 1e-14;

/// Maximum Jacobi sweeps before declaring non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Exhaustive pairwise statistics are refused above this codebook size.
pub const CODEBOOK_PAIRWISE_CAP: usize = 4096;

/// Packing search stops once the step size falls below this.
pub const PACK_STEP_MIN: f64 = 1e-7;

/// Iterations without improvement before the packing step is halved.
pub const PACK_STAGNATION: usize = 50;
