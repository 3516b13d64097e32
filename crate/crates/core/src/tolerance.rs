//! Numerical thresholds shared across the crate.
//!
//! Algebraic identities (Hermiticity, traces, matrix identities) are held to
//! a tighter budget than spectral quantities, whose eigenvalue routines add
//! their own rounding.

/// Hermiticity and trace checks on density matrices.
pub const ALGEBRAIC: f64 = 1e-10;

/// Smallest eigenvalue accepted as non-negative.
pub const SPECTRAL: f64 = 1e-9;

/// How far `Tr E(rho)` (or the top eigenvalue of `sum A^dag A`) may exceed 1.
pub const WEIGHT: f64 = 1e-9;

/// Imaginary residue allowed when a transfer matrix is assembled from complex traces.
pub const IMAGINARY: f64 = 1e-10;

/// Idempotence, Hermiticity and orthogonality of user-supplied projectors.
pub const PROJECTOR: f64 = 1e-10;

/// A branch whose weight is at or below this value never occurs.
pub const ZERO_BRANCH: f64 = 1e-12;

/// Relative residual above which a commutator is a new direction of the algebra.
pub const CLOSURE_RANK: f64 = 1e-8;
