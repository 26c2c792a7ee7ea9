//! Positive bases of `R^n`: construction, verification, and the cosine
//! measure.
//!
//! A positive basis is a positively independent set of unit vectors whose
//! nonnegative combinations fill the whole space; its size lies between
//! `n+1` and `2n`. The cosine measure `min_u max_d u^T d` over unit `u`
//! quantifies how uniformly the set covers all directions, which is what
//! makes these sets useful as poll directions in derivative-free
//! optimization.
//!
//! The crate provides:
//!
//! - [`linalg`]: a self-contained dense kernel (Gram matrices, LU
//!   inversion, rank by column-pivoted QR, block inversion, Householder
//!   alignment);
//! - [`lp`]: a phase-1 simplex returning feasibility certificates;
//! - [`spanning`]: positive-spanning / positive-independence /
//!   positive-basis tests with self-verifying certificates, and the
//!   critical-vector test for minimal bases;
//! - [`construct`]: regular-simplex minimal bases, the maximal signed
//!   coordinate basis, optimal block-diagonal intermediate bases, and
//!   partition composition and detection;
//! - [`cosine`]: the deterministic cosine-measure enumeration, the
//!   simplified structured route, and a seeded sphere-sampling oracle;
//! - [`basisfile`]: JSON/CSV serialization with partition metadata.

pub mod basisfile;
pub mod construct;
pub mod cosine;
pub mod linalg;
pub mod lp;
pub mod random;
pub mod spanning;
pub mod tol;

pub use basisfile::{BasisFile, BlockMeta, FileError, PartitionMeta};
pub use construct::{
    cm_formula, compose_partition, compose_partition_unnormalized, count_bases,
    detect_partition_orthogonal, dims_for, maximal, optimal_intermediate, optimal_minimal,
    realign, validate_omega_plus, ConstructError, Partition, PartitionBlock,
};
pub use cosine::{
    active_set, cosine_measure_full, cosine_measure_sampled, cosine_measure_structured,
    enumerate_bases, evaluate_basis, grand_sum_decomposition_check, structured_bases,
    BasisEvaluation, CmResult, CosineError,
};
pub use linalg::{
    block_inverse, gram, grand_sum, householder_align, invert, rank, solve, LinalgError, Mat,
    VecN,
};
pub use lp::{lp_nonneg_feasible, LpError, LpOutcome};
pub use spanning::{
    certificate_holds, is_critical_vector_minimal, is_positive_basis,
    is_positively_independent, is_positive_spanning, SpanCertificate, SpanError, SpanningCheck,
};
