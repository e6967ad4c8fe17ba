//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the library's eigensolver, clique finder or
//! order builders.

#![allow(dead_code, clippy::needless_range_loop)]

use negcurv::SymMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with entries uniform in [-1, 1].
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Rows {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn to_sym(a: &Rows) -> SymMatrix {
    SymMatrix::from_rows(a).expect("symmetric rows")
}

pub fn principal(a: &Rows, idx: &[usize]) -> Rows {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| a[i][j]).collect())
        .collect()
}

pub fn spectral_norm(a: &Rows) -> f64 {
    jacobi_eigenvalues(a)
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// Cyclic Jacobi rotations; eigenvalues in ascending order.
pub fn jacobi_eigenvalues(a: &Rows) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    let scale: f64 = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn min_eig(a: &Rows) -> f64 {
    jacobi_eigenvalues(a)[0]
}

/// Smallest eigenvalue over every principal submatrix that contains `i`
/// and `j` and whose entries are all revealed.
pub fn brute_force_clique_min(a: &Rows, revealed: &[Vec<bool>], i: usize, j: usize) -> f64 {
    let n = a.len();
    let others: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << others.len()) {
        let mut idx = vec![i, j];
        idx.extend(
            others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &v)| v),
        );
        let complete = idx
            .iter()
            .all(|&u| idx.iter().all(|&v| u == v || revealed[u][v]));
        if complete {
            idx.sort_unstable();
            best = best.min(min_eig(&principal(a, &idx)));
        }
    }
    best
}

/// Reference detector: (iterations, lambda, exhausted).
pub fn brute_force_seek(a: &Rows, order: &[(usize, usize)], epsilon: f64) -> (usize, f64, bool) {
    let n = a.len();
    let dmin = (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min);
    if dmin < -epsilon {
        return (0, dmin, order.is_empty());
    }
    let mut revealed = vec![vec![false; n]; n];
    let mut lambda = dmin;
    for (t, &(i, j)) in order.iter().enumerate() {
        revealed[i][j] = true;
        revealed[j][i] = true;
        lambda = brute_force_clique_min(a, &revealed, i, j);
        if lambda < -epsilon {
            return (t + 1, lambda, t + 1 == order.len());
        }
    }
    (order.len(), lambda, true)
}

/// Row by row: (p1,p2), (p1,p3), ..., (p2,p3), ...
pub fn reference_build1(p: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..p.len() {
        for l in k + 1..p.len() {
            out.push((p[k], p[l]));
        }
    }
    out
}

/// Outward from the diagonal: (p2,p1), (p3,p2), (p3,p1), (p4,p3), ...
pub fn reference_build2(p: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 1..p.len() {
        for l in (0..k).rev() {
            out.push((p[k], p[l]));
        }
    }
    out
}

pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// ½ xᵀAx.
pub fn quadratic(a: &Rows, x: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[i][j] * x[i] * x[j];
        }
    }
    0.5 * s
}
