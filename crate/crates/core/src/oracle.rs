//! Coefficient-level access to a Hessian, with evaluation accounting.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matrix::SymMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("off-diagonal query ({i}, {j}) requires i > j")]
    NotLowerTriangle { i: usize, j: usize },

    #[error("objective returned non-finite value {value} at {offset}")]
    NonFiniteValue { offset: Offset, value: f64 },

    #[error("base point has dimension {actual}, objective expects {expected}")]
    PointDimension { expected: usize, actual: usize },

    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Sample coefficients of a symmetric matrix one at a time.
///
/// Repeated queries of the same coordinate return the same value and do not
/// add to [`cost`](HessianOracle::cost).
pub trait HessianOracle {
    fn dim(&self) -> usize;

    fn diagonal(&mut self, i: usize) -> Result<f64, OracleError>;

    /// Entry `(i, j)` with `i > j`.
    fn offdiagonal(&mut self, i: usize, j: usize) -> Result<f64, OracleError>;

    /// Budgeted cost so far. For finite differences this is the number of
    /// distinct function evaluations excluding `f(x)`.
    fn cost(&self) -> usize;
}

impl<O: HessianOracle + ?Sized> HessianOracle for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn diagonal(&mut self, i: usize) -> Result<f64, OracleError> {
        (**self).diagonal(i)
    }
    fn offdiagonal(&mut self, i: usize, j: usize) -> Result<f64, OracleError> {
        (**self).offdiagonal(i, j)
    }
    fn cost(&self) -> usize {
        (**self).cost()
    }
}

fn check_index(i: usize, dim: usize) -> Result<(), OracleError> {
    if i < dim {
        Ok(())
    } else {
        Err(OracleError::IndexOutOfRange { index: i, dim })
    }
}

fn check_pair(i: usize, j: usize, dim: usize) -> Result<(), OracleError> {
    check_index(i, dim)?;
    check_index(j, dim)?;
    if i <= j {
        return Err(OracleError::NotLowerTriangle { i, j });
    }
    Ok(())
}

/// Oracle over a stored matrix; cost is the number of distinct coordinates revealed.
#[derive(Debug, Clone)]
pub struct ExactOracle<'a> {
    matrix: &'a SymMatrix,
    revealed: HashSet<(usize, usize)>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(matrix: &'a SymMatrix) -> Self {
        ExactOracle {
            matrix,
            revealed: HashSet::new(),
        }
    }
}

impl HessianOracle for ExactOracle<'_> {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn diagonal(&mut self, i: usize) -> Result<f64, OracleError> {
        check_index(i, self.dim())?;
        self.revealed.insert((i, i));
        Ok(self.matrix.get(i, i))
    }

    fn offdiagonal(&mut self, i: usize, j: usize) -> Result<f64, OracleError> {
        check_pair(i, j, self.dim())?;
        self.revealed.insert((i, j));
        Ok(self.matrix.get(i, j))
    }

    fn cost(&self) -> usize {
        self.revealed.len()
    }
}

/// Deterministic scalar function of `dim()` real variables.
pub trait BlackboxFunction {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F: BlackboxFunction + ?Sized> BlackboxFunction for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

impl<F: BlackboxFunction + ?Sized> BlackboxFunction for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

/// Adapts a closure into a [`BlackboxFunction`].
#[derive(Clone)]
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> BlackboxFunction for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Symbolic description of an evaluation point relative to the base point `x`.
///
/// The cache is keyed by these, never by floating-point coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Offset {
    Base,
    Plus(usize),
    Minus(usize),
    /// `x + h e_i + h e_j` with `i > j`.
    PlusPlus(usize, usize),
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offset::Base => write!(f, "x"),
            Offset::Plus(i) => write!(f, "x+h*e{i}"),
            Offset::Minus(i) => write!(f, "x-h*e{i}"),
            Offset::PlusPlus(i, j) => write!(f, "x+h*e{i}+h*e{j}"),
        }
    }
}

/// Central finite-difference Hessian oracle.
///
/// Diagonal: `(f(x+he_i) - 2f(x) + f(x-he_i)) / h²`.
/// Off-diagonal: `(f(x+he_i+he_j) - f(x+he_i) - f(x+he_j) + f(x)) / h²`.
pub struct FdOracle<F> {
    f: F,
    x: Vec<f64>,
    h: f64,
    cache: HashMap<Offset, f64>,
}

impl<F: BlackboxFunction> FdOracle<F> {
    pub fn new(f: F, x: Vec<f64>, h: f64) -> Result<Self, OracleError> {
        if x.len() != f.dim() {
            return Err(OracleError::PointDimension {
                expected: f.dim(),
                actual: x.len(),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(OracleError::InvalidStep(h));
        }
        Ok(FdOracle {
            f,
            x,
            h,
            cache: HashMap::new(),
        })
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn function(&self) -> &F {
        &self.f
    }

    /// Distinct evaluations including `f(x)`.
    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }

    pub fn is_cached(&self, offset: Offset) -> bool {
        self.cache.contains_key(&offset)
    }

    fn value(&mut self, offset: Offset) -> Result<f64, OracleError> {
        if let Some(&v) = self.cache.get(&offset) {
            return Ok(v);
        }
        let mut p = self.x.clone();
        match offset {
            Offset::Base => {}
            Offset::Plus(i) => p[i] += self.h,
            Offset::Minus(i) => p[i] -= self.h,
            Offset::PlusPlus(i, j) => {
                p[i] += self.h;
                p[j] += self.h;
            }
        }
        let v = self.f.eval(&p);
        if !v.is_finite() {
            return Err(OracleError::NonFiniteValue { offset, value: v });
        }
        self.cache.insert(offset, v);
        Ok(v)
    }

    /// Assembles every coefficient of the finite-difference Hessian.
    pub fn full_hessian(&mut self) -> Result<SymMatrix, OracleError> {
        let n = self.dim();
        let mut m = SymMatrix::zeros(n).expect("objective dimension is at least 1");
        for i in 0..n {
            let d = self.diagonal(i)?;
            m.set(i, i, d).expect("finite value in range");
            for j in 0..i {
                let v = self.offdiagonal(i, j)?;
                m.set(i, j, v).expect("finite value in range");
            }
        }
        Ok(m)
    }
}

impl<F: BlackboxFunction> HessianOracle for FdOracle<F> {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn diagonal(&mut self, i: usize) -> Result<f64, OracleError> {
        check_index(i, self.dim())?;
        let base = self.value(Offset::Base)?;
        let plus = self.value(Offset::Plus(i))?;
        let minus = self.value(Offset::Minus(i))?;
        Ok((plus - 2.0 * base + minus) / (self.h * self.h))
    }

    fn offdiagonal(&mut self, i: usize, j: usize) -> Result<f64, OracleError> {
        check_pair(i, j, self.dim())?;
        let base = self.value(Offset::Base)?;
        let pi = self.value(Offset::Plus(i))?;
        let pj = self.value(Offset::Plus(j))?;
        let pij = self.value(Offset::PlusPlus(i, j))?;
        Ok((pij - pi - pj + base) / (self.h * self.h))
    }

    fn cost(&self) -> usize {
        self.cache.len() - usize::from(self.cache.contains_key(&Offset::Base))
    }
}

/// Central second difference along coordinate `i`.
pub fn fd_diagonal<F: BlackboxFunction>(
    f: F,
    x: &[f64],
    h: f64,
    i: usize,
) -> Result<f64, OracleError> {
    FdOracle::new(f, x.to_vec(), h)?.diagonal(i)
}

/// Four-point mixed difference for the `(i, j)` coefficient, `i > j`.
pub fn fd_offdiagonal<F: BlackboxFunction>(
    f: F,
    x: &[f64],
    h: f64,
    i: usize,
    j: usize,
) -> Result<f64, OracleError> {
    FdOracle::new(f, x.to_vec(), h)?.offdiagonal(i, j)
}

pub fn fd_full_hessian<F: BlackboxFunction>(
    f: F,
    x: &[f64],
    h: f64,
) -> Result<SymMatrix, OracleError> {
    FdOracle::new(f, x.to_vec(), h)?.full_hessian()
}

/// Bound `(5/3) √n L h` on both `‖∇²f(x) − H̃‖₂` and the smallest-eigenvalue
/// gap, when `∇²f` is `L`-Lipschitz on the ball of radius `h` around `x`.
pub fn error_bound(n: usize, lipschitz: f64, h: f64) -> f64 {
    5.0 / 3.0 * (n as f64).sqrt() * lipschitz * h
}
