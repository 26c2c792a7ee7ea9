//! Seeded random rotations and directions, used for realignment sweeps
//! and for the Monte Carlo cross-checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{qr_full, Mat, VecN};

/// A Haar-distributed orthonormal matrix: QR of a Gaussian matrix with
/// the sign convention fixed by the pivots.
pub fn random_orthonormal(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, StandardNormal.sample(&mut rng));
        }
    }
    let (q, _) = qr_full(&g);
    q
}

/// A uniformly random unit vector.
pub fn random_unit_vector(n: usize, seed: u64) -> VecN {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut v = VecN::zeros(n);
        for i in 0..n {
            v[i] = StandardNormal.sample(&mut rng);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            return v.scaled(1.0 / norm);
        }
    }
}
