//! Dense symmetric matrices, principal submatrices and small dense eigensolves.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default eigensolver tolerance, relative to the spectral norm.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Slack used by [`SymMatrix::interlacing_holds`].
pub const INTERLACING_SLACK: f64 = 1e-8;

const MAX_EIG_SWEEPS: usize = 10_000;

/// Real symmetric matrix holding one value per unordered index pair.
///
/// Entries live in a packed lower triangle, so `get(i, j) == get(j, i)` holds
/// by construction and no mutation can break symmetry.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseRows", into = "DenseRows")]
pub struct SymMatrix {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        Ok(SymMatrix {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.packed[packed_index(i, i)] = 1.0;
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d)?;
        }
        Ok(m)
    }

    /// Builds a matrix from `f(i, j)` evaluated on the lower triangle (`i >= j`).
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, f(i, j))?;
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows that must be exactly symmetric.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows_with_tol(rows, 0.0)
    }

    /// Builds a matrix from square rows, accepting `|a_ij - a_ji| <= rel_tol * max|a|`
    /// and storing the symmetrized value `(a_ij + a_ji) / 2`.
    pub fn from_rows_with_tol<R: AsRef<[f64]>>(rows: &[R], rel_tol: f64) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.as_ref().len() != n {
                return Err(Error::invalid(format!(
                    "matrix is not square: {n} rows but a row has {} entries",
                    row.as_ref().len()
                )));
            }
        }
        let dense = |i: usize, j: usize| rows[i].as_ref()[j];
        Self::from_dense_fn(n, dense, rel_tol)
    }

    pub(crate) fn from_dense_fn(
        n: usize,
        dense: impl Fn(usize, usize) -> f64,
        rel_tol: f64,
    ) -> Result<Self> {
        let mut max_abs = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = dense(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                max_abs = max_abs.max(v.abs());
            }
        }
        let tol = rel_tol * max_abs;
        Self::from_lower_fn(n, |i, j| {
            let (a, b) = (dense(i, j), dense(j, i));
            0.5 * (a + b)
        })
        .and_then(|m| {
            for i in 0..n {
                for j in 0..i {
                    let diff = (dense(i, j) - dense(j, i)).abs();
                    if diff > tol {
                        return Err(Error::Asymmetric {
                            row: i,
                            col: j,
                            diff,
                            tol,
                        });
                    }
                }
            }
            Ok(m)
        })
    }

    pub fn from_dmatrix(m: &DMatrix<f64>, rel_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid(format!(
                "matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Self::from_dense_fn(m.nrows(), |i, j| m[(i, j)], rel_tol)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`; panics when out of range.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        self.packed[packed_index(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if !value.is_finite() {
            return Err(Error::NonFinite {
                row: i,
                col: j,
                value,
            });
        }
        self.packed[packed_index(i, j)] = value;
        Ok(())
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::IndexOutOfRange {
                index: i,
                dim: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Matrix with entries `(a, b) = self(S[a], S[b])`.
    pub fn principal_submatrix(&self, indices: &IndexSet) -> Result<SymMatrix> {
        if let Some(&last) = indices.as_slice().last() {
            self.check_index(last)?;
        }
        if indices.len() == self.n {
            return Ok(self.clone());
        }
        let idx = indices.as_slice();
        Self::from_lower_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    fn eigen(&self, tol: f64, vectors: bool) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::invalid(format!(
                "eigensolver tolerance must be positive, got {tol}"
            )));
        }
        if self.n == 1 {
            let v = self.packed[0];
            return Ok((vec![v], vectors.then(|| DMatrix::from_element(1, 1, 1.0))));
        }
        let eig = SymmetricEigen::try_new(self.to_dmatrix(), tol, MAX_EIG_SWEEPS)
            .ok_or(Error::NoConvergence(self.n))?;
        Ok((
            eig.eigenvalues.iter().copied().collect(),
            vectors.then_some(eig.eigenvectors),
        ))
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        let (mut vals, _) = self.eigen(tol, false)?;
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64> {
        let (vals, _) = self.eigen(tol, false)?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Smallest eigenvalue and a unit eigenvector for it.
    ///
    /// The vector's first non-negligible component is made positive so the
    /// output is reproducible.
    pub fn min_eigenpair(&self, tol: f64) -> Result<(f64, Vec<f64>)> {
        let (vals, vecs) = self.eigen(tol, true)?;
        let vecs = vecs.expect("eigenvectors requested");
        let k = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("nonempty spectrum");
        let mut v: Vec<f64> = vecs.column(k).iter().copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-12 * scale)
            .map_or(1.0, |x| x.signum());
        for x in &mut v {
            *x *= sign / norm;
        }
        Ok((vals[k], v))
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let vals = self.eigenvalues(DEFAULT_EIG_TOL)?;
        Ok(vals.iter().fold(0.0, |acc, v| acc.max(v.abs())))
    }

    /// Checks every Cauchy interlacing inequality
    /// `λ_k ≤ β_k ≤ λ_{k+n-m}` between this matrix and its principal
    /// submatrix on `indices`, up to [`INTERLACING_SLACK`].
    pub fn interlacing_holds(&self, indices: &IndexSet) -> Result<bool> {
        let sub = self.principal_submatrix(indices)?;
        let outer = self.eigenvalues(DEFAULT_EIG_TOL)?;
        let inner = sub.eigenvalues(DEFAULT_EIG_TOL)?;
        let (n, m) = (outer.len(), inner.len());
        Ok(inner.iter().enumerate().all(|(k, &beta)| {
            outer[k] <= beta + INTERLACING_SLACK && beta <= outer[k + n - m] + INTERLACING_SLACK
        }))
    }

    /// `scale * self + shift * I`.
    pub fn scaled_shifted(&self, scale: f64, shift: f64) -> Result<SymMatrix> {
        Self::from_lower_fn(self.n, |i, j| {
            let v = scale * self.get(i, j);
            if i == j {
                v + shift
            } else {
                v
            }
        })
    }

    /// `Qᵀ A Q` for a square `q` of matching dimension, symmetrized.
    pub fn congruence(&self, q: &DMatrix<f64>) -> Result<SymMatrix> {
        if q.nrows() != self.n || q.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: q.nrows(),
            });
        }
        let t = q.transpose() * self.to_dmatrix() * q;
        Self::from_lower_fn(self.n, |i, j| 0.5 * (t[(i, j)] + t[(j, i)]))
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymMatrix")
            .field("n", &self.n)
            .field("rows", &self.to_rows())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct DenseRows(Vec<Vec<f64>>);

impl TryFrom<DenseRows> for SymMatrix {
    type Error = Error;

    fn try_from(rows: DenseRows) -> Result<Self> {
        SymMatrix::from_rows(&rows.0)
    }
}

impl From<SymMatrix> for DenseRows {
    fn from(m: SymMatrix) -> Self {
        DenseRows(m.to_rows())
    }
}

/// Strictly increasing, nonempty list of matrix indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("index set must be nonempty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "index set must be strictly increasing: {indices:?}"
            )));
        }
        Ok(IndexSet(indices))
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(vec![i])
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}
