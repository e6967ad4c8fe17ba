//! Named analytic objectives with known Hessians.
//!
//! | name              | f(x)                         | Hessian              |
//! |-------------------|------------------------------|----------------------|
//! | `sum-of-squares`  | Σ xₖ²                        | 2I                   |
//! | `sum-of-cubes`    | Σ xₖ³                        | diag(6xₖ)            |
//! | `product-coupling`| Σ_{i<j} xᵢxⱼ                 | 11ᵀ − I              |
//! | `exp-coupling`    | exp(Σ xₖ)                    | exp(Σ xₖ) 11ᵀ        |
//! | `quadratic:FILE`  | ½ xᵀQx, Q read from FILE     | Q                    |

use std::path::Path;

use crate::bench::io::{load_matrix, MatrixFormat};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::oracle::BlackboxFunction;

pub const REGISTRY_NAMES: &[&str] = &[
    "sum-of-squares",
    "sum-of-cubes",
    "product-coupling",
    "exp-coupling",
    "quadratic:FILE",
];

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    SumOfSquares { dim: usize },
    SumOfCubes { dim: usize },
    ProductCoupling { dim: usize },
    ExpCoupling { dim: usize },
    Quadratic(SymMatrix),
}

impl TestFunction {
    /// Resolves a registry name for a point of dimension `dim`.
    pub fn resolve(name: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point must have at least one coordinate"));
        }
        let f = match name {
            "sum-of-squares" => TestFunction::SumOfSquares { dim },
            "sum-of-cubes" => TestFunction::SumOfCubes { dim },
            "product-coupling" => TestFunction::ProductCoupling { dim },
            "exp-coupling" => TestFunction::ExpCoupling { dim },
            _ => match name.strip_prefix("quadratic:") {
                Some(path) if !path.is_empty() => {
                    let q = load_matrix(Path::new(path), MatrixFormat::Auto)?;
                    if q.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: q.dim(),
                            actual: dim,
                        });
                    }
                    TestFunction::Quadratic(q)
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "unknown function {name:?}; expected one of {}",
                        REGISTRY_NAMES.join(", ")
                    )))
                }
            },
        };
        Ok(f)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::SumOfSquares { .. } => "sum-of-squares",
            TestFunction::SumOfCubes { .. } => "sum-of-cubes",
            TestFunction::ProductCoupling { .. } => "product-coupling",
            TestFunction::ExpCoupling { .. } => "exp-coupling",
            TestFunction::Quadratic(_) => "quadratic",
        }
    }

    /// Analytic Hessian at `x`.
    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        match self {
            TestFunction::SumOfSquares { .. } => {
                SymMatrix::from_lower_fn(n, |i, j| if i == j { 2.0 } else { 0.0 })
            }
            TestFunction::SumOfCubes { .. } => {
                SymMatrix::from_lower_fn(n, |i, j| if i == j { 6.0 * x[i] } else { 0.0 })
            }
            TestFunction::ProductCoupling { .. } => {
                SymMatrix::from_lower_fn(n, |i, j| if i == j { 0.0 } else { 1.0 })
            }
            TestFunction::ExpCoupling { .. } => {
                let e = x.iter().sum::<f64>().exp();
                SymMatrix::from_lower_fn(n, |_, _| e)
            }
            TestFunction::Quadratic(q) => Ok(q.clone()),
        }
    }

    /// Lipschitz constant of the Hessian (spectral norm) on the ball of radius
    /// `h` around `x`, when known in closed form.
    pub fn hessian_lipschitz(&self, x: &[f64], h: f64) -> Option<f64> {
        match self {
            TestFunction::SumOfSquares { .. }
            | TestFunction::ProductCoupling { .. }
            | TestFunction::Quadratic(_) => Some(0.0),
            // ‖diag(6(y − z))‖₂ = 6‖y − z‖_∞ ≤ 6‖y − z‖₂
            TestFunction::SumOfCubes { .. } => Some(6.0),
            // ∇³f = e^{s} 1⊗1⊗1 with operator norm n^{3/2} e^{s}; s ≤ Σx + √n h on the ball.
            TestFunction::ExpCoupling { dim } => {
                let n = *dim as f64;
                let s = x.iter().sum::<f64>() + n.sqrt() * h;
                Some(n.powf(1.5) * s.exp())
            }
        }
    }
}

impl BlackboxFunction for TestFunction {
    fn dim(&self) -> usize {
        match self {
            TestFunction::SumOfSquares { dim }
            | TestFunction::SumOfCubes { dim }
            | TestFunction::ProductCoupling { dim }
            | TestFunction::ExpCoupling { dim } => *dim,
            TestFunction::Quadratic(q) => q.dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::SumOfSquares { .. } => x.iter().map(|v| v * v).sum(),
            TestFunction::SumOfCubes { .. } => x.iter().map(|v| v * v * v).sum(),
            TestFunction::ProductCoupling { .. } => {
                let s: f64 = x.iter().sum();
                let sq: f64 = x.iter().map(|v| v * v).sum();
                0.5 * (s * s - sq)
            }
            TestFunction::ExpCoupling { .. } => x.iter().sum::<f64>().exp(),
            TestFunction::Quadratic(q) => quadratic_form(q, x),
        }
    }
}

/// `½ xᵀQx`.
pub fn quadratic_form(q: &SymMatrix, x: &[f64]) -> f64 {
    let n = q.dim();
    let mut acc = 0.0;
    for i in 0..n {
        acc += 0.5 * q.get(i, i) * x[i] * x[i];
        for j in 0..i {
            acc += q.get(i, j) * x[i] * x[j];
        }
    }
    acc
}
