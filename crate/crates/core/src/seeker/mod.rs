//! The detection loop: reveal pairs in order, evaluate the fully known
//! principal submatrices that contain the new pair, stop on negative curvature.

mod clique;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use clique::{maximal_cliques_with_edge, FillGraph};

use crate::error::Error;
use crate::matrix::{IndexSet, SymMatrix, DEFAULT_EIG_TOL};
use crate::oracle::{error_bound, HessianOracle, OracleError};
use crate::order::{Pair, SelectionOrder, VariantSpec};

/// Partially revealed symmetric matrix. Unrevealed off-diagonal entries read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialHessian {
    diag: Vec<f64>,
    offdiag: BTreeMap<Pair, f64>,
    graph: FillGraph,
}

impl PartialHessian {
    pub fn from_diagonal(diag: Vec<f64>) -> Self {
        let n = diag.len();
        PartialHessian {
            diag,
            offdiag: BTreeMap::new(),
            graph: FillGraph::new(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn graph(&self) -> &FillGraph {
        &self.graph
    }

    /// Records the value of a pair. Revealing a pair again overwrites nothing.
    pub fn reveal(&mut self, pair: Pair, value: f64) -> Result<(), Error> {
        if pair.hi() >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: pair.hi(),
                dim: self.dim(),
            });
        }
        self.offdiag.entry(pair).or_insert(value);
        self.graph.add_edge(pair.hi(), pair.lo())
    }

    pub fn is_revealed(&self, pair: Pair) -> bool {
        self.offdiag.contains_key(&pair)
    }

    pub fn revealed_pairs(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        self.offdiag.iter().map(|(&p, &v)| (p, v))
    }

    pub fn revealed_count(&self) -> usize {
        self.offdiag.len()
    }

    pub fn is_fully_revealed(&self) -> bool {
        let n = self.dim();
        self.offdiag.len() == n * n.saturating_sub(1) / 2
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            self.offdiag.get(&Pair::new(i, j)).copied().unwrap_or(0.0)
        }
    }

    /// The matrix with unrevealed entries set to zero.
    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_lower_fn(self.dim(), |i, j| self.get(i, j))
            .expect("revealed values are finite")
    }

    pub fn submatrix(&self, indices: &IndexSet) -> Result<SymMatrix, Error> {
        let idx = indices.as_slice();
        if let Some(&last) = idx.last() {
            if last >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    dim: self.dim(),
                });
            }
        }
        SymMatrix::from_lower_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeekerConfig {
    /// Stop once the estimate drops below `-epsilon`.
    pub epsilon: f64,
    pub eig_tol: f64,
    /// Also report the smallest estimate seen over all iterations.
    pub track_global_min: bool,
}

impl Default for SeekerConfig {
    fn default() -> Self {
        SeekerConfig {
            epsilon: 0.0,
            eig_tol: DEFAULT_EIG_TOL,
            track_global_min: false,
        }
    }
}

impl SeekerConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SeekerConfig {
            epsilon,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be a finite nonnegative number, got {}",
                self.epsilon
            )));
        }
        if !(self.eig_tol > 0.0 && self.eig_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "eigensolver tolerance must be positive, got {}",
                self.eig_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeekStatus {
    /// A revealed submatrix with an off-diagonal entry certified negative curvature.
    NegativeFound,
    /// A diagonal entry was already below `-epsilon`.
    DiagonalNegative,
    /// Every pair of the order was revealed.
    Exhausted,
}

impl SeekStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SeekStatus::NegativeFound => "negative_found",
            SeekStatus::DiagonalNegative => "diagonal_negative",
            SeekStatus::Exhausted => "exhausted",
        }
    }
}

impl fmt::Display for SeekStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fully revealed principal submatrix and a unit eigenvector for its
/// smallest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub indices: IndexSet,
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeekerResult {
    pub lambda: f64,
    pub partial: PartialHessian,
    pub iterations: usize,
    pub status: SeekStatus,
    /// Present whenever `lambda < -epsilon`.
    pub certificate: Option<Certificate>,
    pub oracle_cost: usize,
    pub global_min: Option<f64>,
    pub variant: Option<VariantSpec>,
}

impl SeekerResult {
    pub fn found_negative(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn record(&self) -> SeekerRecord {
        SeekerRecord {
            variant: self.variant.map(|v| v.to_string()),
            n: self.partial.dim(),
            status: self.status,
            lambda: self.lambda,
            iterations: self.iterations,
            oracle_cost: self.oracle_cost,
            certificate: self
                .certificate
                .as_ref()
                .map(|c| c.indices.as_slice().to_vec()),
            eigenvector: self.certificate.as_ref().map(|c| c.vector.clone()),
            global_min: self.global_min,
        }
    }
}

/// Serialized form of a [`SeekerResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeekerRecord {
    pub variant: Option<String>,
    pub n: usize,
    pub status: SeekStatus,
    pub lambda: f64,
    pub iterations: usize,
    pub oracle_cost: usize,
    pub certificate: Option<Vec<usize>>,
    pub eigenvector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_min: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum SeekError {
    #[error(transparent)]
    Input(#[from] Error),

    /// The oracle failed. `partial` is `None` when the failure happened while
    /// reading the diagonal, whose revealed prefix is in `diagonal`.
    #[error("oracle failed after {iterations} off-diagonal reveals: {source}")]
    Oracle {
        #[source]
        source: OracleError,
        diagonal: Vec<f64>,
        partial: Option<Box<PartialHessian>>,
        iterations: usize,
        oracle_cost: usize,
    },
}

fn read_diagonal<O: HessianOracle>(oracle: &mut O) -> Result<Vec<f64>, SeekError> {
    let n = oracle.dim();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        match oracle.diagonal(i) {
            Ok(v) => diag.push(v),
            Err(source) => {
                return Err(SeekError::Oracle {
                    source,
                    diagonal: diag,
                    partial: None,
                    iterations: 0,
                    oracle_cost: oracle.cost(),
                })
            }
        }
    }
    Ok(diag)
}

/// Runs the detector with the order produced by `variant` from the oracle's diagonal.
///
/// The diagonal is read once; the seek itself hits the oracle's cache for it.
pub fn seek_variant<O: HessianOracle>(
    oracle: &mut O,
    variant: VariantSpec,
    config: &SeekerConfig,
) -> Result<SeekerResult, SeekError> {
    if oracle.dim() == 0 {
        return Err(Error::invalid("oracle dimension must be at least 1").into());
    }
    let diag = read_diagonal(oracle)?;
    let order = variant.order(&diag);
    let mut result = seek(oracle, &order, config)?;
    result.variant = Some(variant);
    Ok(result)
}

/// Reveals the pairs of `order` until a fully known principal submatrix
/// containing the latest pair has smallest eigenvalue below `-epsilon`, or
/// the order runs out.
///
/// The estimate at each step is the minimum over the maximal cliques of the
/// fill graph through the new pair; it is not a running minimum over steps.
/// At any exit it is an upper bound on the smallest eigenvalue of the
/// oracle's matrix, and equals it when the order is exhausted.
pub fn seek<O: HessianOracle>(
    oracle: &mut O,
    order: &SelectionOrder,
    config: &SeekerConfig,
) -> Result<SeekerResult, SeekError> {
    config.validate()?;
    let n = oracle.dim();
    if n == 0 {
        return Err(Error::invalid("oracle dimension must be at least 1").into());
    }
    if order.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: order.dim(),
        }
        .into());
    }
    let threshold = -config.epsilon;

    let diag = read_diagonal(oracle)?;
    let (argmin, &lambda0) = diag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 1");
    let mut partial = PartialHessian::from_diagonal(diag);
    let mut lambda = lambda0;
    let mut best = Certificate {
        indices: IndexSet::singleton(argmin),
        vector: vec![1.0],
        eigenvalue: lambda0,
    };
    let mut global_min = lambda0;

    if lambda < threshold {
        return Ok(SeekerResult {
            lambda,
            partial,
            iterations: 0,
            status: SeekStatus::DiagonalNegative,
            certificate: Some(best),
            oracle_cost: oracle.cost(),
            global_min: config.track_global_min.then_some(global_min),
            variant: None,
        });
    }

    let mut iterations = 0;
    for pair in order.iter() {
        if lambda < threshold {
            break;
        }
        let value = match oracle.offdiagonal(pair.hi(), pair.lo()) {
            Ok(v) => v,
            Err(source) => {
                return Err(SeekError::Oracle {
                    source,
                    diagonal: partial.diagonal().to_vec(),
                    iterations,
                    oracle_cost: oracle.cost(),
                    partial: Some(Box::new(partial)),
                })
            }
        };
        partial.reveal(pair, value)?;
        iterations += 1;

        let mut step: Option<Certificate> = None;
        for clique in maximal_cliques_with_edge(partial.graph(), pair.hi(), pair.lo())? {
            let (eig, vector) = partial.submatrix(&clique)?.min_eigenpair(config.eig_tol)?;
            if step.as_ref().is_none_or(|s| eig < s.eigenvalue) {
                step = Some(Certificate {
                    indices: clique,
                    vector,
                    eigenvalue: eig,
                });
            }
        }
        best = step.expect("the revealed edge is itself a clique");
        lambda = best.eigenvalue;
        global_min = global_min.min(lambda);
    }

    let status = if iterations == order.len() {
        SeekStatus::Exhausted
    } else {
        SeekStatus::NegativeFound
    };
    Ok(SeekerResult {
        lambda,
        partial,
        iterations,
        status,
        certificate: (lambda < threshold).then_some(best),
        oracle_cost: oracle.cost(),
        global_min: config.track_global_min.then_some(global_min),
        variant: None,
    })
}

/// Embeds the certificate's eigenvector into `n` coordinates, zero elsewhere.
///
/// For the finite-difference matrix `H̃` this gives `dᵀH̃d = λ‖d‖²`.
pub fn descent_direction(
    partial: &PartialHessian,
    certificate: &Certificate,
) -> Result<Vec<f64>, Error> {
    let n = partial.dim();
    let idx = certificate.indices.as_slice();
    if idx.len() != certificate.vector.len() {
        return Err(Error::DimensionMismatch {
            expected: idx.len(),
            actual: certificate.vector.len(),
        });
    }
    let mut d = vec![0.0; n];
    for (&i, &c) in idx.iter().zip(&certificate.vector) {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        d[i] = c;
    }
    Ok(d)
}

/// Upper bound `λ + (5/3)√n L h` on the smallest eigenvalue of the true
/// Hessian. With `h = 0` or `L = 0` (exact oracle) this is just `λ`.
pub fn certified_upper_bound(result: &SeekerResult, lipschitz: f64, h: f64) -> f64 {
    result.lambda + error_bound(result.partial.dim(), lipschitz, h)
}
