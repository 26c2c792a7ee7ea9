//! Positive-spanning, positive-independence, and positive-basis tests,
//! each backed by an LP feasibility certificate, plus the critical-vector
//! membership test for minimal positive bases.
//!
//! A set positively spans when some strictly positive combination of its
//! columns vanishes; strict positivity is encoded as `alpha >= 1`, which
//! is equivalent by homogeneity and keeps the feasible region closed.

use crate::linalg::{self, Mat, VecN};
use crate::lp::{lp_nonneg_feasible, LpError, LpOutcome};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum SpanError {
    /// A column is not unit norm. Callers must normalize explicitly.
    NotUnit { col: usize },
    /// The set handed to the criticality test is not a minimal positive
    /// basis of its span.
    NotMinimalPositiveBasis,
    /// Vector dimensions do not match the set.
    Dimension(&'static str),
    /// A verified positive basis fell outside `n+1 <= s <= 2n`, which is
    /// impossible; reported instead of silently accepted.
    SizeInconsistency { n: usize, s: usize },
    Lp(LpError),
}

impl std::fmt::Display for SpanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpanError::NotUnit { col } => write!(f, "column {col} is not unit norm"),
            SpanError::NotMinimalPositiveBasis => {
                write!(f, "set is not a minimal positive basis of its span")
            }
            SpanError::Dimension(what) => write!(f, "dimension mismatch: {what}"),
            SpanError::SizeInconsistency { n, s } => write!(
                f,
                "internal inconsistency: verified positive basis of size {s} in dimension {n}"
            ),
            SpanError::Lp(e) => write!(f, "lp failure: {e}"),
        }
    }
}

impl std::error::Error for SpanError {}

impl From<LpError> for SpanError {
    fn from(e: LpError) -> Self {
        SpanError::Lp(e)
    }
}

/// Proof object attached to a spanning decision.
#[derive(Debug, Clone, PartialEq)]
pub enum SpanCertificate {
    /// Coefficients `alpha >= 1` with `S alpha = 0`.
    PositiveCoefficients { alpha: VecN },
    /// A unit vector with nonnegative dot product against every column,
    /// witnessing that the set cannot positively span.
    SeparatingVector { witness: VecN },
}

/// Decision of a positive-spanning test together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum SpanningCheck {
    Yes(SpanCertificate),
    No(SpanCertificate),
}

impl SpanningCheck {
    pub fn is_yes(&self) -> bool {
        matches!(self, SpanningCheck::Yes(_))
    }

    pub fn certificate(&self) -> &SpanCertificate {
        match self {
            SpanningCheck::Yes(c) | SpanningCheck::No(c) => c,
        }
    }
}

pub(crate) fn check_unit_columns(s: &Mat) -> Result<(), SpanError> {
    for j in 0..s.cols() {
        if !s.col(j).is_unit(tol::UNIT_NORM) {
            return Err(SpanError::NotUnit { col: j });
        }
    }
    Ok(())
}

/// Whether the unit columns of `s` positively span the full space.
///
/// Yes carries coefficients `alpha >= 1` with `S alpha = 0`; No carries a
/// separating vector whose dot with every column is nonnegative, obtained
/// from the LP dual or, on rank-deficient sets, from the orthogonal
/// complement of the column span.
pub fn is_positive_spanning(s: &Mat) -> Result<SpanningCheck, SpanError> {
    check_unit_columns(s)?;
    let n = s.rows();
    if linalg::rank(s, tol::rank_tol(n, s.cols())) < n {
        let witness = linalg::orthogonal_complement_vector(s)
            .expect("rank-deficient set has a complement vector");
        return Ok(SpanningCheck::No(SpanCertificate::SeparatingVector {
            witness,
        }));
    }
    match lp_nonneg_feasible(s, &VecN::zeros(n), 1.0)? {
        LpOutcome::Feasible(alpha) => Ok(SpanningCheck::Yes(
            SpanCertificate::PositiveCoefficients { alpha },
        )),
        LpOutcome::Infeasible(dual) => {
            // dual satisfies y^T d_i <= 0; flip and normalize
            let witness = dual
                .scaled(-1.0)
                .normalized()
                .map_err(|_| SpanError::Lp(LpError::NumericalFailure))?;
            Ok(SpanningCheck::No(SpanCertificate::SeparatingVector {
                witness,
            }))
        }
    }
}

/// Whether no column lies in the positive span of the others.
pub fn is_positively_independent(s: &Mat) -> Result<bool, SpanError> {
    check_unit_columns(s)?;
    if s.cols() == 1 {
        return Ok(true);
    }
    for i in 0..s.cols() {
        let others: Vec<usize> = (0..s.cols()).filter(|&j| j != i).collect();
        let rest = s.select_cols(&others);
        match lp_nonneg_feasible(&rest, &s.col(i), 0.0)? {
            LpOutcome::Feasible(_) => return Ok(false),
            LpOutcome::Infeasible(_) => {}
        }
    }
    Ok(true)
}

/// Whether the unit columns form a positive basis: positively spanning
/// and positively independent.
pub fn is_positive_basis(s: &Mat) -> Result<bool, SpanError> {
    let spanning = is_positive_spanning(s)?.is_yes();
    if !spanning {
        return Ok(false);
    }
    if !is_positively_independent(s)? {
        return Ok(false);
    }
    let (n, cols) = (s.rows(), s.cols());
    if cols < n + 1 || cols > 2 * n {
        return Err(SpanError::SizeInconsistency { n, s: cols });
    }
    Ok(true)
}

/// Validates that `d` is a minimal positive basis of its own span and
/// returns the span coordinates (an orthonormal projection of the
/// columns) on success.
pub(crate) fn validate_minimal_of_span(d: &Mat) -> Result<Mat, SpanError> {
    check_unit_columns(d)?;
    let cols = d.cols();
    if cols < 2 {
        return Err(SpanError::NotMinimalPositiveBasis);
    }
    let (basis, r) = linalg::span_basis(d);
    if r + 1 != cols {
        return Err(SpanError::NotMinimalPositiveBasis);
    }
    let coords = basis.transpose().matmul(d);
    match is_positive_basis(&coords) {
        Ok(true) => Ok(coords),
        _ => Err(SpanError::NotMinimalPositiveBasis),
    }
}

/// Whether `c` is a critical vector of the minimal positive basis `d`
/// (minimal for its span): `-c` must lie in the positive span of the set
/// with some pair of columns removed. The zero vector is critical for
/// every positive basis.
pub fn is_critical_vector_minimal(d: &Mat, c: &VecN) -> Result<bool, SpanError> {
    if c.dim() != d.rows() {
        return Err(SpanError::Dimension(
            "critical vector dimension must match the set",
        ));
    }
    validate_minimal_of_span(d)?;
    if c.norm() <= tol::ZERO_VECTOR {
        return Ok(true);
    }
    let cols = d.cols();
    if cols == 2 {
        // removing any pair leaves the empty set, whose positive span is {0}
        return Ok(false);
    }
    let minus_c = c.scaled(-1.0);
    for i in 0..cols {
        for j in i + 1..cols {
            let keep: Vec<usize> = (0..cols).filter(|&k| k != i && k != j).collect();
            let subset = d.select_cols(&keep);
            if let LpOutcome::Feasible(_) = lp_nonneg_feasible(&subset, &minus_c, 0.0)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Re-checks a certificate against the set it was issued for.
pub fn certificate_holds(s: &Mat, certificate: &SpanCertificate) -> bool {
    match certificate {
        SpanCertificate::PositiveCoefficients { alpha } => {
            if alpha.dim() != s.cols() {
                return false;
            }
            let min_ok = (0..alpha.dim()).all(|j| alpha[j] >= 1.0 - 1e-9);
            let residual = s.matvec(alpha).norm();
            min_ok && residual <= tol::LP_FEASIBILITY * alpha.norm()
        }
        SpanCertificate::SeparatingVector { witness } => {
            if witness.dim() != s.rows() || !witness.is_unit(1e-6) {
                return false;
            }
            (0..s.cols()).all(|j| witness.dot(&s.col(j)) >= -tol::UNIT_NORM)
        }
    }
}
