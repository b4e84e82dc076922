//! Numerical tolerances shared across modules.

/// Relative slack for the triangle inequality, scaled by the largest entry.
pub const TRIANGLE_REL: f64 = 1e-9;

/// Pivot tolerance of the dense simplex.
pub const PIVOT: f64 = 1e-9;

/// Primal feasibility / optimality slack for LP comparisons.
pub const LP: f64 = 1e-7;

/// Absolute slack for dual feasibility and LMP certificates.
pub const CERT: f64 = 1e-9;

/// Relative floor below which a dual contribution `beta` counts as zero.
pub const BETA_REL: f64 = 1e-12;

/// Relative slack used when comparing costs that should satisfy an
/// inequality exactly in real arithmetic.
pub const EXACT_REL: f64 = 1e-9;

/// `lhs <= rhs` up to `rel * (1 + |rhs|)`.
#[inline]
pub fn le_rel(lhs: f64, rhs: f64, rel: f64) -> bool {
    lhs <= rhs + rel * (1.0 + libm::fabs(rhs))
}
