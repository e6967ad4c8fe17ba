//! Seeded similarity transforms and the synthetic matrix generator.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

pub const DEFAULT_GENERATION_ATTEMPTS: usize = 10_000;

/// Derives an independent RNG for `stream` from a global seed, so results do
/// not depend on the order in which streams are consumed.
pub fn stream_rng(seed: u64, stream: &str) -> ChaCha8Rng {
    // FNV-1a, then a splitmix64 finalizer to mix in the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h.rotate_left(17);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    None,
    Permute,
    Orthogonal,
}

impl Transform {
    pub fn as_str(self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::Permute => "permute",
            Transform::Orthogonal => "orthogonal",
        }
    }

    pub fn apply(self, a: &SymMatrix, seed: u64) -> Result<SymMatrix> {
        match self {
            Transform::None => Ok(a.clone()),
            Transform::Permute => Ok(random_permutation_transform(a, seed)),
            Transform::Orthogonal => random_orthogonal_transform(a, seed),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Transform::None),
            "permute" => Ok(Transform::Permute),
            "orthogonal" => Ok(Transform::Orthogonal),
            _ => Err(Error::invalid(format!("unknown transform {s:?}"))),
        }
    }
}

/// `PᵀAP` for the permutation matrix whose k-th column is `e_{perm[k]}`,
/// i.e. `B(a, b) = A(perm[a], perm[b])`.
pub fn permute(a: &SymMatrix, perm: &[usize]) -> Result<SymMatrix> {
    if perm.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: perm.len(),
        });
    }
    SymMatrix::from_lower_fn(a.dim(), |i, j| a.get(perm[i], perm[j]))
}

pub fn random_permutation_transform(a: &SymMatrix, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..a.dim()).collect();
    perm.shuffle(&mut rng);
    permute(a, &perm).expect("permutation has matching length")
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of Q rescaled so that R has a positive diagonal.
pub fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

pub fn random_orthogonal_transform(a: &SymMatrix, seed: u64) -> Result<SymMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = haar_orthogonal(a.dim(), &mut rng);
    a.congruence(&q)
}

/// `Qᵀ diag(λ) Q` with `neg` eigenvalues drawn from [-1, -0.1] and the rest
/// from [0.5, 3]. Spectrum and `Q` are redrawn until every diagonal entry is
/// strictly positive, up to `max_attempts` times.
pub fn generate_synthetic(
    n: usize,
    neg: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if neg > n {
        return Err(Error::invalid(format!(
            "cannot have {neg} negative eigenvalues in dimension {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let spectrum: Vec<f64> = (0..n)
            .map(|k| {
                if k < neg {
                    rng.random_range(-1.0..-0.1)
                } else {
                    rng.random_range(0.5..3.0)
                }
            })
            .collect();
        // the diagonal sums to the trace, so a nonpositive trace can never pass
        if spectrum.iter().sum::<f64>() <= 0.0 {
            continue;
        }
        let q = haar_orthogonal(n, &mut rng);
        let m = SymMatrix::from_diagonal(&spectrum)?.congruence(&q)?;
        if m.diagonal().iter().all(|&d| d > 0.0) {
            return Ok(m);
        }
    }
    Err(Error::GenerationFailed {
        n,
        neg,
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DEFAULT_EIG_TOL;

    fn sorted_eigs(a: &SymMatrix) -> Vec<f64> {
        a.eigenvalues(DEFAULT_EIG_TOL).unwrap()
    }

    fn sample() -> SymMatrix {
        SymMatrix::from_rows(&[
            [2.0, -1.0, 0.3, 0.0],
            [-1.0, 1.0, 0.5, 0.2],
            [0.3, 0.5, 0.7, -2.0],
            [0.0, 0.2, -2.0, 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn permutation_preserves_spectrum_and_is_deterministic() {
        let a = sample();
        let b = random_permutation_transform(&a, 7);
        for (x, y) in sorted_eigs(&a).iter().zip(sorted_eigs(&b)) {
            assert!((x - y).abs() < 1e-10);
        }
        assert_eq!(b, random_permutation_transform(&a, 7));
        let one = SymMatrix::from_diagonal(&[4.0]).unwrap();
        assert_eq!(random_permutation_transform(&one, 3), one);
    }

    #[test]
    fn orthogonal_is_orthogonal_and_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 9] {
            let q = haar_orthogonal(n, &mut rng);
            let err = (q.transpose() * &q - DMatrix::identity(n, n)).abs().max();
            assert!(err <= 1e-10, "n={n}: {err}");
        }
        let a = sample();
        let b = random_orthogonal_transform(&a, 5).unwrap();
        for (x, y) in sorted_eigs(&a).iter().zip(sorted_eigs(&b)) {
            assert!((x - y).abs() < 1e-9);
        }
        assert_eq!(b, random_orthogonal_transform(&a, 5).unwrap());
    }

    #[test]
    fn orthogonal_keeps_scaled_identity() {
        let a = SymMatrix::from_diagonal(&[2.5; 6]).unwrap();
        let b = random_orthogonal_transform(&a, 9).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 2.5 } else { 0.0 };
                assert!((b.get(i, j) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn orthogonal_can_flip_diagonal_signs() {
        // indefinite with positive diagonal; some seed must produce a negative diagonal
        let a = SymMatrix::from_rows(&[[1.0, 3.0], [3.0, 1.0]]).unwrap();
        let flipped = (0..50u64).any(|s| {
            random_orthogonal_transform(&a, s)
                .unwrap()
                .diagonal()
                .iter()
                .any(|&d| d < 0.0)
        });
        assert!(flipped);
    }

    #[test]
    fn synthetic_has_requested_inertia() {
        for (n, neg) in [(4, 1), (6, 2), (3, 0), (8, 3)] {
            let m = generate_synthetic(n, neg, 42, DEFAULT_GENERATION_ATTEMPTS).unwrap();
            let eigs = sorted_eigs(&m);
            assert_eq!(eigs.iter().filter(|&&e| e < 0.0).count(), neg);
            assert!(m.diagonal().iter().all(|&d| d > 0.0));
            assert_eq!(
                m,
                generate_synthetic(n, neg, 42, DEFAULT_GENERATION_ATTEMPTS).unwrap()
            );
        }
    }

    #[test]
    fn synthetic_reports_exhausted_budget() {
        assert!(matches!(
            generate_synthetic(3, 3, 1, 50),
            Err(Error::GenerationFailed { attempts: 50, .. })
        ));
        assert!(generate_synthetic(3, 4, 1, 50).is_err());
    }

    #[test]
    fn stream_rngs_differ() {
        use rand::Rng;
        let a = stream_rng(1, "case-a").next_u64();
        let b = stream_rng(1, "case-b").next_u64();
        let c = stream_rng(2, "case-a").next_u64();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, stream_rng(1, "case-a").next_u64());
    }
}
