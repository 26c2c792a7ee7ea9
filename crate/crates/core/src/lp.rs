//! Phase-1 simplex for the equality-constrained feasibility problems that
//! back the positive-spanning and positive-independence tests.
//!
//! The problems are tiny (a handful of rows, at most a few dozen columns)
//! and well scaled, so a dense tableau with Bland's rule is both simple
//! and robust.

use crate::linalg::{Mat, VecN};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    /// The iteration cap was hit or the tableau degenerated.
    NumericalFailure,
    Dimension(&'static str),
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::NumericalFailure => write!(f, "simplex did not converge"),
            LpError::Dimension(what) => write!(f, "dimension mismatch: {what}"),
        }
    }
}

impl std::error::Error for LpError {}

/// Outcome of a feasibility solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// A point `x` with `A x = b` and `x >= lower` componentwise.
    Feasible(VecN),
    /// A Farkas dual `y` with `y^T A <= 0` and `y^T (b - lower * A 1) > 0`,
    /// which certifies that no feasible point exists. For `lower = 0` this
    /// is the classic `y^T A <= 0`, `y^T b > 0` certificate.
    Infeasible(VecN),
}

/// Decides whether `A x = b`, `x >= lower` (same bound on every
/// component) admits a solution.
///
/// Internally shifts to `y = x - lower * 1 >= 0` and runs a phase-1
/// simplex with one artificial variable per row.
pub fn lp_nonneg_feasible(a: &Mat, b: &VecN, lower: f64) -> Result<LpOutcome, LpError> {
    let m = a.rows();
    let n = a.cols();
    if b.dim() != m {
        return Err(LpError::Dimension("rhs length must equal row count"));
    }

    // shifted rhs: b' = b - lower * (A 1)
    let row_sums = a.matvec(&VecN::ones(n));
    let mut shifted = VecN::zeros(m);
    for i in 0..m {
        shifted[i] = b[i] - lower * row_sums[i];
    }

    // flip rows so the rhs is nonnegative
    let signs: Vec<f64> = (0..m)
        .map(|i| if shifted[i] >= 0.0 { 1.0 } else { -1.0 })
        .collect();

    // tableau: [A' | I | rhs], artificial basis, phase-1 objective 1^T z
    let width = n + m + 1;
    let rhs_col = n + m;
    let mut tab = vec![vec![0.0; width]; m];
    for (i, row) in tab.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate().take(n) {
            *cell = signs[i] * a.get(i, j);
        }
        row[n + i] = 1.0;
        row[rhs_col] = signs[i] * shifted[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs r_j = c_j - sum_i c_B[i] tab[i][j]; all basis costs are 1
    let mut reduced = vec![0.0; width];
    for (j, cost) in reduced.iter_mut().enumerate().take(n) {
        *cost = -tab.iter().map(|row| row[j]).sum::<f64>();
    }
    let max_iters = 50 * (m + n);
    let mut iters = 0;
    loop {
        // Bland: smallest index with a negative reduced cost
        let entering = (0..n + m).find(|&j| reduced[j] < -tol::LP_PIVOT);
        let Some(entering) = entering else { break };

        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in tab.iter().enumerate() {
            let coeff = row[entering];
            if coeff > tol::LP_PIVOT {
                let ratio = row[rhs_col] / coeff;
                let better = ratio < best_ratio - tol::LP_PIVOT
                    || (ratio < best_ratio + tol::LP_PIVOT
                        && leaving.is_some_and(|l| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leaving = Some(i);
                }
            }
        }
        // phase-1 objective is bounded below by zero, so some row must admit
        // the pivot; anything else is a numerical breakdown
        let Some(pivot_row) = leaving else {
            return Err(LpError::NumericalFailure);
        };

        let pivot = tab[pivot_row][entering];
        for v in tab[pivot_row].iter_mut() {
            *v /= pivot;
        }
        let pivot_values = tab[pivot_row].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == pivot_row {
                continue;
            }
            let factor = row[entering];
            if factor == 0.0 {
                continue;
            }
            for (cell, &p) in row.iter_mut().zip(&pivot_values) {
                *cell -= factor * p;
            }
        }
        let factor = reduced[entering];
        for (cost, &p) in reduced.iter_mut().zip(&pivot_values).take(n + m) {
            *cost -= factor * p;
        }
        basis[pivot_row] = entering;

        iters += 1;
        if iters > max_iters {
            return Err(LpError::NumericalFailure);
        }
    }

    // phase-1 objective: whatever mass is left on artificial variables
    let objective: f64 = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| tab[i][rhs_col])
        .sum();

    if objective.abs() <= tol::LP_FEASIBILITY {
        let mut x = VecN::zeros(n);
        for i in 0..m {
            if basis[i] < n {
                x[basis[i]] = tab[i][rhs_col].max(0.0) + lower;
            }
        }
        for j in 0..n {
            if (0..m).all(|i| basis[i] != j) {
                x[j] = lower;
            }
        }
        Ok(LpOutcome::Feasible(x))
    } else {
        // simplex multipliers from the artificial reduced costs:
        // pi_i = 1 - r_{n+i}; undo the row sign flips
        let mut dual = VecN::zeros(m);
        for i in 0..m {
            dual[i] = signs[i] * (1.0 - reduced[n + i]);
        }
        Ok(LpOutcome::Infeasible(dual))
    }
}
