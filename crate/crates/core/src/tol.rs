//! Numerical tolerances shared across the crate.

/// Norm, trace, Hermiticity and isometry checks on constructed objects.
pub const NORM: f64 = 1e-10;

/// Branches (and measurement outcomes) lighter than this are dropped.
pub const PRUNE: f64 = 1e-12;

/// Eigenvalues below this are treated as exactly zero in entropies.
pub const EIGEN_ZERO: f64 = 1e-12;

/// Slack allowed when checking theorem-backed inequalities.
pub const INEQUALITY: f64 = 1e-8;

/// Total-weight tolerance for classical-quantum ensembles.
pub const CQ_WEIGHT: f64 = 1e-9;
