//! Cosine measure of positive spanning sets.
//!
//! The deterministic route enumerates every full-rank column subset of
//! size `n`, computes for each the equal-angle value `gamma` and its unit
//! vector, and minimizes the per-subset maximum dot product. For sets
//! that split into minimal blocks with zero shifts, only one column per
//! block needs to be dropped and the dot-product scan can be skipped
//! entirely. A seeded sphere-sampling oracle upper-bounds the measure for
//! cross-checking.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::construct::Partition;
use crate::linalg::{self, grand_sum, gram, invert, Mat, VecN};
use crate::spanning::{self, SpanError};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum CosineError {
    /// A selected column subset is rank-deficient.
    Singular,
    /// The input failed positive-spanning validation.
    NotPositiveBasis,
    /// The supplied partition does not describe the set as unshifted
    /// minimal blocks.
    InvalidPartition(&'static str),
    /// A probe vector is not unit norm.
    NotUnit,
}

impl std::fmt::Display for CosineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CosineError::Singular => write!(f, "column subset is singular"),
            CosineError::NotPositiveBasis => {
                write!(f, "input is not a positive spanning set of unit vectors")
            }
            CosineError::InvalidPartition(what) => write!(f, "invalid partition: {what}"),
            CosineError::NotUnit => write!(f, "vector is not unit norm"),
        }
    }
}

impl std::error::Error for CosineError {}

impl From<SpanError> for CosineError {
    fn from(_: SpanError) -> Self {
        CosineError::NotPositiveBasis
    }
}

/// Per-subset record of the enumeration: the equal dot-product value, its
/// unit vector, and the dot products against the whole set.
#[derive(Debug, Clone)]
pub struct BasisEvaluation {
    pub column_indices: Vec<usize>,
    pub gamma: f64,
    pub u: VecN,
    pub p: VecN,
    pub p_max: f64,
}

/// Result of a cosine-measure computation.
#[derive(Debug, Clone)]
pub struct CmResult {
    pub value: f64,
    /// Unit vectors attaining the minimum, deduplicated.
    pub cosine_vectors: Vec<VecN>,
    /// For each cosine vector, the columns whose dot equals the value.
    pub active_sets: Vec<Vec<usize>>,
    /// Column subsets attaining the minimum.
    pub argmin_bases: Vec<Vec<usize>>,
}

/// Every size-`n` column subset of rank `n`, in lexicographic order.
pub fn enumerate_bases(d: &Mat) -> Vec<Vec<usize>> {
    let (n, s) = (d.rows(), d.cols());
    let mut out = Vec::new();
    if n > s {
        return out;
    }
    let mut current: Vec<usize> = (0..n).collect();
    let tolerance = tol::rank_tol(n, n);
    'enumerate: loop {
        let subset = d.select_cols(&current);
        if linalg::rank(&subset, tolerance) == n {
            out.push(current.clone());
        }
        // advance to the next combination in lexicographic order
        for i in (0..n).rev() {
            if current[i] != i + s - n {
                current[i] += 1;
                for j in i + 1..n {
                    current[j] = current[j - 1] + 1;
                }
                continue 'enumerate;
            }
        }
        return out;
    }
}

/// Evaluates one column subset: `gamma = 1/sqrt(1^T G(B)^{-1} 1)`,
/// `u = gamma * B^{-T} 1`, and the dot products of `u` against every
/// column of the set.
pub fn evaluate_basis(d: &Mat, idx: &[usize]) -> Result<BasisEvaluation, CosineError> {
    let b = d.select_cols(idx);
    let g = gram(&b);
    let g_inv = invert(&g).map_err(|_| CosineError::Singular)?;
    let gs = grand_sum(&g_inv);
    if gs <= 0.0 {
        return Err(CosineError::Singular);
    }
    let gamma = 1.0 / gs.sqrt();
    let bt = b.transpose();
    let u_raw = linalg::solve(&bt, &VecN::ones(idx.len())).map_err(|_| CosineError::Singular)?;
    let mut u = u_raw.scaled(gamma);
    // u is unit in exact arithmetic; rescale away the roundoff drift
    let norm = u.norm();
    if norm > 0.0 {
        u = u.scaled(1.0 / norm);
    }
    let mut p = VecN::zeros(d.cols());
    let mut p_max = f64::NEG_INFINITY;
    for j in 0..d.cols() {
        let dot = u.dot(&d.col(j));
        p[j] = dot;
        p_max = p_max.max(dot);
    }
    Ok(BasisEvaluation {
        column_indices: idx.to_vec(),
        gamma,
        u,
        p,
        p_max,
    })
}

fn collect_result(d: &Mat, evaluations: Vec<(Vec<usize>, f64, VecN)>) -> CmResult {
    let value = evaluations
        .iter()
        .map(|(_, v, _)| *v)
        .fold(f64::INFINITY, f64::min);
    let mut argmin_bases = Vec::new();
    let mut cosine_vectors: Vec<VecN> = Vec::new();
    for (idx, v, u) in &evaluations {
        if *v <= value + tol::CM_TIE {
            argmin_bases.push(idx.clone());
            let duplicate = cosine_vectors.iter().any(|known| {
                known
                    .as_slice()
                    .iter()
                    .zip(u.as_slice())
                    .all(|(a, b)| (a - b).abs() <= tol::COSINE_VECTOR_DEDUP)
            });
            if !duplicate {
                cosine_vectors.push(u.clone());
            }
        }
    }
    let active_sets = cosine_vectors
        .iter()
        .map(|u| active_indices(d, u, value))
        .collect();
    CmResult {
        value,
        cosine_vectors,
        active_sets,
        argmin_bases,
    }
}

/// Cosine measure by full enumeration.
///
/// The input must be a positive spanning set of unit vectors; anything
/// else is rejected. The value is the minimum over all full-rank subsets
/// of the per-subset maximum dot product.
pub fn cosine_measure_full(d: &Mat) -> Result<CmResult, CosineError> {
    if !spanning::is_positive_spanning(d)?.is_yes() {
        return Err(CosineError::NotPositiveBasis);
    }
    let bases = enumerate_bases(d);
    // subsets at the margin of the rank filter can still fail the Gram
    // inversion (its conditioning is the square of the subset's); they are
    // skipped like any other rank-deficient subset
    let evaluations: Vec<_> = bases
        .par_iter()
        .filter_map(|idx| {
            evaluate_basis(d, idx)
                .ok()
                .map(|e| (idx.clone(), e.p_max, e.u))
        })
        .collect();
    if evaluations.is_empty() {
        return Err(CosineError::NotPositiveBasis);
    }
    Ok(collect_result(d, evaluations))
}

fn validate_partition(d: &Mat, part: &Partition) -> Result<(), CosineError> {
    if part.n != d.rows() || part.s != d.cols() {
        return Err(CosineError::InvalidPartition("shape mismatch with the set"));
    }
    part.validate_shape()
        .map_err(|_| CosineError::InvalidPartition("malformed block structure"))?;
    if !part.is_unshifted() {
        return Err(CosineError::InvalidPartition(
            "shift vectors must all be zero",
        ));
    }
    for block in &part.blocks {
        let sub = d.select_cols(&block.column_indices);
        let coords = spanning::validate_minimal_of_span(&sub)
            .map_err(|_| CosineError::InvalidPartition("block is not a minimal positive basis"))?;
        if coords.rows() != block.m {
            return Err(CosineError::InvalidPartition(
                "block span dimension disagrees with metadata",
            ));
        }
    }
    Ok(())
}

/// The structured enumeration: one column dropped from every block, all
/// combinations, in lexicographic drop order.
pub fn structured_bases(part: &Partition) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(part.blocks.iter().map(|b| b.m + 1).product());
    let mut drops = vec![0usize; part.blocks.len()];
    'enumerate: loop {
        let mut idx = Vec::with_capacity(part.n);
        for (block, &drop) in part.blocks.iter().zip(&drops) {
            for (k, &col) in block.column_indices.iter().enumerate() {
                if k != drop {
                    idx.push(col);
                }
            }
        }
        idx.sort_unstable();
        out.push(idx);
        // advance the mixed-radix drop counter
        for pos in (0..part.blocks.len()).rev() {
            if drops[pos] < part.blocks[pos].m {
                drops[pos] += 1;
                for d in drops.iter_mut().skip(pos + 1) {
                    *d = 0;
                }
                continue 'enumerate;
            }
        }
        return out;
    }
}

/// Cosine measure through the block structure: for unshifted partitions
/// every contained basis keeps all but one column of each block, and its
/// `gamma` already equals its maximum dot product, so the dot-product
/// scan is skipped and the value is the minimum `gamma`.
pub fn cosine_measure_structured(d: &Mat, part: &Partition) -> Result<CmResult, CosineError> {
    validate_partition(d, part)?;
    let bases = structured_bases(part);
    let evaluations: Vec<_> = bases
        .par_iter()
        .filter_map(|idx| {
            let b = d.select_cols(idx);
            let g_inv = invert(&gram(&b)).ok()?;
            let gs = grand_sum(&g_inv);
            if gs <= 0.0 {
                return None;
            }
            let gamma = 1.0 / gs.sqrt();
            let u_raw = linalg::solve(&b.transpose(), &VecN::ones(idx.len())).ok()?;
            let mut u = u_raw.scaled(gamma);
            let norm = u.norm();
            if norm > 0.0 {
                u = u.scaled(1.0 / norm);
            }
            Some((idx.clone(), gamma, u))
        })
        .collect();
    if evaluations.is_empty() {
        return Err(CosineError::Singular);
    }
    Ok(collect_result(d, evaluations))
}

fn active_indices(d: &Mat, u: &VecN, cm_value: f64) -> Vec<usize> {
    (0..d.cols())
        .filter(|&j| (u.dot(&d.col(j)) - cm_value).abs() <= tol::CM_ACTIVE)
        .collect()
}

/// Columns whose dot product with `u` equals `cm_value` within the
/// active-set tolerance.
pub fn active_set(d: &Mat, u: &VecN, cm_value: f64) -> Result<Vec<usize>, CosineError> {
    if !u.is_unit(tol::UNIT_NORM) {
        return Err(CosineError::NotUnit);
    }
    Ok(active_indices(d, u, cm_value))
}

const SAMPLE_CHUNK: u64 = 1 << 16;

/// Monte Carlo upper bound on the cosine measure: the minimum over
/// sampled unit vectors of the maximum dot product against the columns.
///
/// Sampling is chunked with one RNG stream per chunk, so the result for a
/// given seed and sample count does not depend on the number of worker
/// threads, and extending the sample count only refines the minimum.
pub fn cosine_measure_sampled(d: &Mat, samples: u64, seed: u64) -> f64 {
    assert!(samples >= 1, "need at least one sample");
    let n = d.rows();
    let cols: Vec<VecN> = (0..d.cols()).map(|j| d.col(j)).collect();
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let in_chunk = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
            let mut best = f64::INFINITY;
            let mut u = VecN::zeros(n);
            for _ in 0..in_chunk {
                loop {
                    let mut norm_sq = 0.0;
                    for i in 0..n {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        u[i] = g;
                        norm_sq += g * g;
                    }
                    if norm_sq > 1e-24 {
                        let inv = norm_sq.sqrt().recip();
                        for i in 0..n {
                            u[i] *= inv;
                        }
                        break;
                    }
                }
                let mut max_dot = f64::NEG_INFINITY;
                for col in &cols {
                    max_dot = max_dot.max(u.dot(col));
                }
                best = best.min(max_dot);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Both sides of the grand-sum split of a 3-dimensional Gram inverse:
/// the left side inverts the full Gram matrix of `[b2 | b1]`; the right
/// side uses only the 2-column Gram inverse, the coupling `v = b2^T b1`,
/// and the Schur scalar `c = (1 - v^T G2^{-1} v)^{-1}`.
pub fn grand_sum_decomposition_check(b2: &Mat, b1: &VecN) -> Result<(f64, f64), CosineError> {
    assert_eq!(b2.rows(), 3, "the decomposition is for sets in R^3");
    assert_eq!(b2.cols(), 2, "b2 must hold two columns");
    assert_eq!(b1.dim(), 3, "b1 must live in R^3");
    let combined = b2.hcat(&Mat::from_cols(std::slice::from_ref(b1)));
    let g3_inv = invert(&gram(&combined)).map_err(|_| CosineError::Singular)?;
    let lhs = grand_sum(&g3_inv);

    let g2_inv = invert(&gram(b2)).map_err(|_| CosineError::Singular)?;
    let v = b2.transpose().matvec(b1);
    let g2_inv_v = g2_inv.matvec(&v);
    let schur = 1.0 - v.dot(&g2_inv_v);
    if schur.abs() <= tol::ZERO_VECTOR {
        return Err(CosineError::Singular);
    }
    let c = 1.0 / schur;
    let bracket_sum = 1.0 - (g2_inv_v[0] + g2_inv_v[1]);
    let rhs = grand_sum(&g2_inv) + c * bracket_sum * bracket_sum;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{maximal, optimal_intermediate, optimal_minimal};

    fn equilateral2() -> Mat {
        let h = 3.0_f64.sqrt() / 2.0;
        Mat::from_rows(&[&[1.0, -0.5, -0.5], &[0.0, h, -h]])
    }

    fn block_diag_3_5() -> Mat {
        let h = 3.0_f64.sqrt() / 2.0;
        Mat::from_rows(&[
            &[1.0, -0.5, -0.5, 0.0, 0.0],
            &[0.0, h, -h, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0, -1.0],
        ])
    }

    #[test]
    fn enumeration_counts() {
        let (maximal2, _) = maximal(2);
        assert_eq!(enumerate_bases(&maximal2).len(), 4);
        assert_eq!(enumerate_bases(&equilateral2()).len(), 3);
        assert_eq!(enumerate_bases(&block_diag_3_5()).len(), 6);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let bases = enumerate_bases(&equilateral2());
        assert_eq!(bases, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn evaluate_orthonormal_pair() {
        let (d, _) = maximal(2);
        let eval = evaluate_basis(&d, &[0, 1]).unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert!((eval.gamma - inv_sqrt2).abs() <= 1e-14);
        assert!((eval.u[0] - inv_sqrt2).abs() <= 1e-14);
        assert!((eval.u[1] - inv_sqrt2).abs() <= 1e-14);
        assert!((eval.p_max - inv_sqrt2).abs() <= 1e-14);
    }

    #[test]
    fn evaluate_equilateral_pair() {
        let eval = evaluate_basis(&equilateral2(), &[0, 1]).unwrap();
        // grand sum of the inverse gram is 4
        assert!((eval.gamma - 0.5).abs() <= 1e-13);
        for &j in &[0usize, 1] {
            assert!((eval.p[j] - eval.gamma).abs() <= 1e-9);
        }
        assert!(eval.p_max >= eval.gamma - 1e-12);
    }

    #[test]
    fn evaluate_block_diagonal_subset() {
        // two columns of the planar triangle and one axis column:
        // grand sum splits as 4 + 1
        let eval = evaluate_basis(&block_diag_3_5(), &[0, 1, 3]).unwrap();
        assert!((eval.gamma - 1.0 / 5.0_f64.sqrt()).abs() <= 1e-13);
    }

    #[test]
    fn one_dimensional_measure_is_one() {
        let d = Mat::from_rows(&[&[1.0, -1.0]]);
        let result = cosine_measure_full(&d).unwrap();
        assert!((result.value - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn minimal_r3_measure_is_one_third() {
        let d = optimal_minimal(3, 3, 0).unwrap();
        let result = cosine_measure_full(&d).unwrap();
        assert!((result.value - 1.0 / 3.0).abs() <= 1e-12);
        // all four subsets tie and each active set holds a full-rank triple
        assert_eq!(result.argmin_bases.len(), 4);
        for active in &result.active_sets {
            assert!(active.len() >= 3);
            let sub = d.select_cols(active);
            assert_eq!(linalg::rank(&sub, tol::rank_tol(3, active.len())), 3);
        }
    }

    #[test]
    fn rejects_non_spanning_input() {
        let truncated = equilateral2().select_cols(&[0, 1]);
        assert_eq!(
            cosine_measure_full(&truncated).unwrap_err(),
            CosineError::NotPositiveBasis
        );
    }

    #[test]
    fn structured_matches_full_on_block_diagonal() {
        let (d, part) = optimal_intermediate(3, 5).unwrap();
        let full = cosine_measure_full(&d).unwrap();
        let structured = cosine_measure_structured(&d, &part).unwrap();
        assert!((full.value - structured.value).abs() <= 1e-12);
        assert!((structured.value - 1.0 / 5.0_f64.sqrt()).abs() <= 1e-12);
        assert_eq!(structured_bases(&part).len(), 6);
    }

    #[test]
    fn structured_on_maximal_and_minimal() {
        let (d, part) = maximal(2);
        let structured = cosine_measure_structured(&d, &part).unwrap();
        assert!((structured.value - 1.0 / 2.0_f64.sqrt()).abs() <= 1e-12);

        let (d, part) = optimal_intermediate(4, 5).unwrap();
        let structured = cosine_measure_structured(&d, &part).unwrap();
        assert!((structured.value - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn structured_rejects_shifted_partitions() {
        let h = 3.0_f64.sqrt() / 2.0;
        let upper = Mat::from_rows(&[
            &[1.0, -0.5, -0.5],
            &[0.0, h, -h],
            &[0.0, 0.0, 0.0],
        ]);
        let lower = optimal_minimal(1, 3, 2).unwrap();
        let shift = VecN::from_slice(&[-1.0, 0.0, 0.0]);
        let (d, part) =
            crate::construct::compose_partition(&[(upper, VecN::zeros(3)), (lower, shift)])
                .unwrap();
        assert!(matches!(
            cosine_measure_structured(&d, &part),
            Err(CosineError::InvalidPartition(_))
        ));
    }

    #[test]
    fn sampled_measure_in_one_dimension() {
        let d = Mat::from_rows(&[&[1.0, -1.0]]);
        assert!((cosine_measure_sampled(&d, 10, 3) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn sampled_upper_bounds_equilateral_triangle() {
        let d = equilateral2();
        let sampled = cosine_measure_sampled(&d, 1_000_000, 42);
        assert!(sampled >= 0.5 - 1e-12);
        assert!(sampled <= 0.5 + 1e-3);
    }

    #[test]
    fn sampled_near_block_diagonal_value() {
        let (d, _) = optimal_intermediate(3, 5).unwrap();
        let expect = 1.0 / 5.0_f64.sqrt();
        let sampled = cosine_measure_sampled(&d, 1_000_000, 42);
        assert!(sampled >= expect - 1e-12);
        assert!(sampled - expect <= 1e-3);
    }

    #[test]
    fn accepts_positive_spanning_sets_that_are_not_bases() {
        // signed coordinate set plus an interior direction: spans
        // positively but is not positively independent
        let s = 1.0 / 3.0_f64.sqrt();
        let mut over = Mat::zeros(3, 7);
        for i in 0..3 {
            over.set(i, i, 1.0);
            over.set(i, 3 + i, -1.0);
            over.set(i, 6, s);
        }
        assert!(!crate::spanning::is_positive_basis(&over).unwrap());
        // the extra direction does not move the minimizer
        let value = cosine_measure_full(&over).unwrap().value;
        assert!((value - s).abs() <= 1e-10);
    }

    #[test]
    fn minimal_planar_active_sets_are_the_tied_pairs() {
        let result = cosine_measure_full(&equilateral2()).unwrap();
        assert!((result.value - 0.5).abs() <= 1e-12);
        assert_eq!(result.cosine_vectors.len(), 3);
        for active in &result.active_sets {
            assert_eq!(active.len(), 2);
            let sub = equilateral2().select_cols(active);
            assert_eq!(linalg::rank(&sub, tol::rank_tol(2, 2)), 2);
        }
    }

    #[test]
    fn sampled_is_reproducible_and_monotone() {
        let (d, _) = optimal_intermediate(3, 5).unwrap();
        let a = cosine_measure_sampled(&d, 200_000, 7);
        let b = cosine_measure_sampled(&d, 200_000, 7);
        assert_eq!(a, b);
        let more = cosine_measure_sampled(&d, 400_000, 7);
        assert!(more <= a);
    }

    #[test]
    fn active_set_of_maximal_basis() {
        let (d, _) = maximal(2);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let u = VecN::from_slice(&[inv_sqrt2, inv_sqrt2]);
        let active = active_set(&d, &u, inv_sqrt2).unwrap();
        assert_eq!(active, vec![0, 1]);
        let not_unit = VecN::from_slice(&[1.0, 1.0]);
        assert_eq!(
            active_set(&d, &not_unit, inv_sqrt2).unwrap_err(),
            CosineError::NotUnit
        );
    }

    #[test]
    fn every_cosine_vector_touches_value_on_active_columns() {
        let (d, _) = optimal_intermediate(4, 6).unwrap();
        let result = cosine_measure_full(&d).unwrap();
        for (u, active) in result.cosine_vectors.iter().zip(&result.active_sets) {
            assert!(active.len() >= 4);
            for &j in active {
                assert!((u.dot(&d.col(j)) - result.value).abs() <= 1e-8);
            }
            for j in 0..d.cols() {
                assert!(u.dot(&d.col(j)) <= result.value + 1e-8);
            }
        }
    }

    #[test]
    fn grand_sum_split_orthogonal_case() {
        let d = block_diag_3_5();
        let b2 = d.select_cols(&[0, 1]);
        let b1 = d.col(3);
        let (lhs, rhs) = grand_sum_decomposition_check(&b2, &b1).unwrap();
        assert!((lhs - 5.0).abs() <= 1e-12);
        assert!((rhs - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn grand_sum_split_tilted_case() {
        let b2 = block_diag_3_5().select_cols(&[0, 1]);
        let raw = VecN::from_slice(&[0.3, -0.2, 0.9]);
        let b1 = raw.scaled(1.0 / raw.norm());
        let (lhs, rhs) = grand_sum_decomposition_check(&b2, &b1).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12);
        // direct 3x3 inversion oracle
        let combined = b2.hcat(&Mat::from_cols(&[b1]));
        let direct = grand_sum(&invert(&gram(&combined)).unwrap());
        assert!((lhs - direct).abs() <= 1e-13);
    }
}
