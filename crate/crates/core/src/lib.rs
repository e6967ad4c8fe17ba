//! Negative curvature detection for symmetric matrices.
//!
//! The detector reveals off-diagonal coefficients one pair at a time, keeps
//! track of which principal submatrices are fully known (cliques of the fill
//! graph), and stops as soon as one of them has a sufficiently negative
//! eigenvalue. By Cauchy interlacing that eigenvalue is an upper bound on the
//! smallest eigenvalue of the whole matrix.
//!
//! Coefficients come from a [`HessianOracle`]: either a stored matrix
//! ([`ExactOracle`]) or central finite differences of a blackbox function
//! ([`FdOracle`]), the latter with exact evaluation accounting.
//!
//! All indices are 0-based.

pub mod bench;
mod error;
pub mod functions;
pub mod matrix;
pub mod oracle;
pub mod order;
pub mod seeker;

pub use error::{Error, Result};
pub use matrix::{IndexSet, SymMatrix, DEFAULT_EIG_TOL};
pub use oracle::{
    error_bound, fd_diagonal, fd_full_hessian, fd_offdiagonal, BlackboxFunction, ExactOracle,
    FdOracle, FnObjective, HessianOracle, Offset, OracleError,
};
pub use order::{
    Build, EnumerationMode, Heuristic, Pair, Permutation, SelectionOrder, VariantSpec,
};
pub use seeker::{
    certified_upper_bound, descent_direction, maximal_cliques_with_edge, seek, seek_variant,
    Certificate, FillGraph, PartialHessian, SeekError, SeekStatus, SeekerConfig, SeekerRecord,
    SeekerResult,
};
