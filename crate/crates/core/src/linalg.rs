//! Dense linear-algebra kernel: Gram matrices, LU inversion, rank via
//! column-pivoted QR, block inversion through the Schur complement, and
//! Householder alignment transforms.
//!
//! Everything here works on small dense matrices (direction sets live in
//! dimensions up to a few dozen), so the implementations favour clarity
//! and exactness over asymptotics.

use crate::tol;

/// Error type for kernel operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// A pivot fell below the rank tolerance while factoring.
    Singular,
    /// An input vector that must be unit norm is not.
    NotUnit,
    /// Shapes do not match the operation.
    Dimension(&'static str),
    /// Entries must be finite.
    NonFinite,
}

impl std::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinalgError::Singular => write!(f, "matrix is singular at the working tolerance"),
            LinalgError::NotUnit => write!(f, "vector is not unit norm"),
            LinalgError::Dimension(what) => write!(f, "dimension mismatch: {what}"),
            LinalgError::NonFinite => write!(f, "entries must be finite"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// A real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VecN {
    data: Vec<f64>,
}

impl VecN {
    pub fn new(data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![0.0; dim],
        }
    }

    pub fn ones(dim: usize) -> Self {
        Self {
            data: vec![1.0; dim],
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = 1.0;
        v
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self { data: s.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> VecN {
        VecN {
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &VecN) -> VecN {
        assert_eq!(self.dim(), other.dim(), "add of mismatched dims");
        VecN {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &VecN) -> VecN {
        assert_eq!(self.dim(), other.dim(), "sub of mismatched dims");
        VecN {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `|‖v‖ - 1| <= tol`
    pub fn is_unit(&self, tolerance: f64) -> bool {
        (self.norm() - 1.0).abs() <= tolerance
    }

    pub fn normalized(&self) -> Result<VecN, LinalgError> {
        let n = self.norm();
        if n <= tol::ZERO_VECTOR {
            return Err(LinalgError::Singular);
        }
        Ok(self.scaled(1.0 / n))
    }
}

impl std::ops::Index<usize> for VecN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for VecN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// A dense real matrix, row-major. Columns are the direction vectors of
/// the sets handled throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension("entry count != rows*cols"));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[VecN]) -> Self {
        assert!(!cols.is_empty(), "need at least one column");
        let rows = cols[0].dim();
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), rows, "column dims differ");
            for i in 0..rows {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "need at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row lengths differ");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> VecN {
        let mut v = VecN::zeros(self.rows);
        for i in 0..self.rows {
            v[i] = self.get(i, j);
        }
        v
    }

    /// New matrix from a subset of columns, in the order given.
    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &VecN) -> VecN {
        assert_eq!(self.cols, v.dim(), "matvec shape mismatch");
        let mut out = VecN::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }
}

/// Gram matrix `S^T S`, symmetrized to kill roundoff asymmetry before any
/// downstream positive-definiteness logic.
pub fn gram(s: &Mat) -> Mat {
    let mut g = Mat::zeros(s.cols(), s.cols());
    for i in 0..s.cols() {
        for j in i..s.cols() {
            let mut acc = 0.0;
            for k in 0..s.rows() {
                acc += s.get(k, i) * s.get(k, j);
            }
            g.set(i, j, acc);
            g.set(j, i, acc);
        }
    }
    g
}

/// Sum of all entries, `1^T A 1`.
pub fn grand_sum(a: &Mat) -> f64 {
    a.data().iter().sum()
}

pub(crate) struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn solve(&self, b: &VecN) -> VecN {
        let n = self.lu.rows();
        assert_eq!(b.dim(), n, "rhs length mismatch");
        let mut x = VecN::zeros(n);
        // forward substitution on the permuted rhs (L has unit diagonal)
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc / self.lu.get(i, i);
        }
        x
    }
}

/// Partially pivoted LU. Declares failure when a pivot falls at or below
/// `RANK_REL * max(rows, cols) * max_abs_entry`.
pub(crate) fn lu_decompose(a: &Mat) -> Result<Lu, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension("LU needs a square matrix"));
    }
    let n = a.rows();
    let pivot_floor = tol::rank_tol(n, n) * a.max_abs();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pivot_row, mut pivot_val) = (k, lu.get(k, k).abs());
        for i in k + 1..n {
            let v = lu.get(i, k).abs();
            if v > pivot_val {
                pivot_row = i;
                pivot_val = v;
            }
        }
        if pivot_val <= pivot_floor {
            return Err(LinalgError::Singular);
        }
        if pivot_row != k {
            for j in 0..n {
                let a = lu.get(k, j);
                let b = lu.get(pivot_row, j);
                lu.set(k, j, b);
                lu.set(pivot_row, j, a);
            }
            perm.swap(k, pivot_row);
        }
        let pk = lu.get(k, k);
        for i in k + 1..n {
            let factor = lu.get(i, k) / pk;
            lu.set(i, k, factor);
            for j in k + 1..n {
                let v = lu.get(i, j) - factor * lu.get(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Ok(Lu { lu, perm })
}

/// Solves `A x = b` through pivoted LU.
pub fn solve(a: &Mat, b: &VecN) -> Result<VecN, LinalgError> {
    Ok(lu_decompose(a)?.solve(b))
}

/// Matrix inverse through pivoted LU.
pub fn invert(a: &Mat) -> Result<Mat, LinalgError> {
    let n = a.rows();
    let lu = lu_decompose(a)?;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        let x = lu.solve(&VecN::basis(n, j));
        for i in 0..n {
            if !x[i].is_finite() {
                return Err(LinalgError::Singular);
            }
            inv.set(i, j, x[i]);
        }
    }
    Ok(inv)
}

/// Column-pivoted Householder QR with an explicitly accumulated `Q`.
///
/// Returns `(q, r_diag)` where `q` is `rows x rows` orthonormal and
/// `r_diag` holds the magnitudes of the successive pivots. Columns
/// `0..rank` of `q` span the column space; the remaining columns span its
/// orthogonal complement.
pub(crate) fn qr_full(a: &Mat) -> (Mat, Vec<f64>) {
    let (m, n) = (a.rows(), a.cols());
    let steps = m.min(n);
    let mut r = a.clone();
    let mut q = Mat::identity(m);
    let mut rdiag = Vec::with_capacity(steps);
    for k in 0..steps {
        // pivot: remaining column with the largest residual norm
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..n {
            let mut s = 0.0;
            for i in k..m {
                s += r.get(i, j) * r.get(i, j);
            }
            if s > best_norm {
                best_norm = s;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let a = r.get(i, k);
                let b = r.get(i, best);
                r.set(i, k, b);
                r.set(i, best, a);
            }
        }
        // Householder vector for column k below the diagonal
        let mut alpha = 0.0;
        for i in k..m {
            alpha += r.get(i, k) * r.get(i, k);
        }
        let alpha = alpha.sqrt();
        if alpha == 0.0 {
            rdiag.push(0.0);
            continue;
        }
        let sign = if r.get(k, k) >= 0.0 { 1.0 } else { -1.0 };
        let mut v = vec![0.0; m - k];
        v[0] = r.get(k, k) + sign * alpha;
        for i in k + 1..m {
            v[i - k] = r.get(i, k);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            rdiag.push(alpha);
            continue;
        }
        let beta = 2.0 / vtv;
        // apply H = I - beta v v^T to the trailing block of R
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r.get(i, j);
            }
            let dot = beta * dot;
            for i in k..m {
                let val = r.get(i, j) - dot * v[i - k];
                r.set(i, j, val);
            }
        }
        // accumulate Q <- Q H (apply H from the right)
        for row in 0..m {
            let mut dot = 0.0;
            for i in k..m {
                dot += q.get(row, i) * v[i - k];
            }
            let dot = beta * dot;
            for i in k..m {
                let val = q.get(row, i) - dot * v[i - k];
                q.set(row, i, val);
            }
        }
        rdiag.push(r.get(k, k).abs());
    }
    (q, rdiag)
}

/// Numerical rank: diagonal pivots of the column-pivoted QR larger than
/// `tol * max_abs_entry`.
pub fn rank(s: &Mat, tolerance: f64) -> usize {
    let threshold = tolerance * s.max_abs();
    let (_, rdiag) = qr_full(s);
    rdiag.iter().filter(|&&d| d > threshold).count()
}

/// An orthonormal basis of the column space of `s` (as `rank` columns)
/// together with the rank, at the default tolerance.
pub(crate) fn span_basis(s: &Mat) -> (Mat, usize) {
    let r = rank(s, tol::rank_tol(s.rows(), s.cols()));
    let (q, _) = qr_full(s);
    let idx: Vec<usize> = (0..r).collect();
    (q.select_cols(&idx), r)
}

/// A unit vector orthogonal to every column of `s`, or `None` when the
/// columns span the full space.
pub(crate) fn orthogonal_complement_vector(s: &Mat) -> Option<VecN> {
    let r = rank(s, tol::rank_tol(s.rows(), s.cols()));
    if r >= s.rows() {
        return None;
    }
    let (q, _) = qr_full(s);
    Some(q.col(r))
}

/// Inverse of the positive definite block matrix
/// `G = [[A, B^T], [B, D]]` assembled from the Schur complement
/// `D - B A^{-1} B^T`. `A` and `D` must be symmetric, `A` invertible.
pub fn block_inverse(a: &Mat, b: &Mat, d: &Mat) -> Result<Mat, LinalgError> {
    if !a.is_square() || !d.is_square() {
        return Err(LinalgError::Dimension("A and D must be square"));
    }
    if b.cols() != a.rows() || b.rows() != d.rows() {
        return Err(LinalgError::Dimension("B must be q x p for A p x p, D q x q"));
    }
    let p = a.rows();
    let q = d.rows();
    let a_inv = invert(a)?;
    let bt = b.transpose();
    // Schur complement of A in G
    let schur = {
        let mut s = d.clone();
        let ba_inv = b.matmul(&a_inv);
        let correction = ba_inv.matmul(&bt);
        for i in 0..q {
            for j in 0..q {
                s.set(i, j, s.get(i, j) - correction.get(i, j));
            }
        }
        s
    };
    let schur_inv = invert(&schur)?;
    let a_inv_bt = a_inv.matmul(&bt);
    let tl_corr = a_inv_bt.matmul(&schur_inv).matmul(&b.matmul(&a_inv));
    let tr = a_inv_bt.matmul(&schur_inv);
    let bl = schur_inv.matmul(&b.matmul(&a_inv));

    let mut g_inv = Mat::zeros(p + q, p + q);
    for i in 0..p {
        for j in 0..p {
            g_inv.set(i, j, a_inv.get(i, j) + tl_corr.get(i, j));
        }
        for j in 0..q {
            g_inv.set(i, p + j, -tr.get(i, j));
        }
    }
    for i in 0..q {
        for j in 0..p {
            g_inv.set(p + i, j, -bl.get(i, j));
        }
        for j in 0..q {
            g_inv.set(p + i, p + j, schur_inv.get(i, j));
        }
    }
    Ok(g_inv)
}

/// An orthonormal matrix `T` with `T e_1 = w`. Rejects `w` whose norm
/// deviates from 1 by more than the unit tolerance.
///
/// The reflector is built against `sign(w_1) e_1`, which avoids
/// cancellation for every direction of `w`; a sign flip then puts `w`
/// in the first column.
pub fn householder_align(w: &VecN) -> Result<Mat, LinalgError> {
    if !w.is_unit(tol::UNIT_NORM) {
        return Err(LinalgError::NotUnit);
    }
    let n = w.dim();
    let w = w.scaled(1.0 / w.norm());
    if w[0] == 1.0 && (1..n).all(|i| w[i] == 0.0) {
        return Ok(Mat::identity(n));
    }
    let sigma = if w[0] >= 0.0 { -1.0 } else { 1.0 };
    let mut v = w.clone();
    v[0] -= sigma;
    let beta = 2.0 / v.dot(&v);
    let mut t = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let h = (if i == j { 1.0 } else { 0.0 }) - beta * v[i] * v[j];
            t.set(i, j, sigma * h);
        }
    }
    Ok(t)
}
