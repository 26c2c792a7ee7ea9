//! Central numerical tolerances.
//!
//! Every threshold used by the library is named here so that the
//! verification logic, the constructions, and the tests agree on one set
//! of constants.

/// Relative rank / LU pivot scale. Effective threshold is
/// `RANK_REL * max(rows, cols) * max_abs_entry`.
pub const RANK_REL: f64 = 1e-10;

/// Maximum deviation of a column norm from 1 before a set is rejected
/// as non-unit.
pub const UNIT_NORM: f64 = 1e-9;

/// Feasibility residual accepted by the phase-1 simplex.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// Simplex pivot threshold.
pub const LP_PIVOT: f64 = 1e-10;

/// Absolute tie tolerance on the per-basis max dot products when
/// collecting the argmin set of the cosine-measure enumeration.
/// Optimal bases tie massively; roundoff must not split them.
pub const CM_TIE: f64 = 1e-8;

/// Active-set membership: `|d^T u - cm| <= CM_ACTIVE`.
pub const CM_ACTIVE: f64 = 1e-8;

/// Max-norm distance under which two cosine vectors are considered
/// duplicates.
pub const COSINE_VECTOR_DEDUP: f64 = 1e-6;

/// Dot products larger than this (in absolute value) connect two columns
/// when detecting orthogonal partitions.
pub const BLOCK_ORTHOGONALITY: f64 = 1e-9;

/// Vectors with norm at or below this are treated as exactly zero
/// (critical vectors, shifts).
pub const ZERO_VECTOR: f64 = 1e-12;

/// Scale factor applied to `max_abs_entry` when ranking / pivoting an
/// `r x c` matrix.
pub fn rank_tol(rows: usize, cols: usize) -> f64 {
    RANK_REL * rows.max(cols) as f64
}
