use std::collections::HashSet;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transform::Transform;
use crate::error::{Error, Result};
use crate::functions::quadratic_form;
use crate::matrix::SymMatrix;
use crate::oracle::{ExactOracle, FdOracle, FnObjective, HessianOracle};
use crate::order::{SelectionOrder, VariantSpec};
use crate::seeker::{seek, seek_variant, SeekError, SeekStatus, SeekerConfig, SeekerResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseSource {
    File(PathBuf),
    Generated { seed: u64 },
    Inline,
}

/// One benchmark instance. With `h` set, the case is run through a
/// finite-difference oracle on `½ xᵀAx` at `x = 0` with that step.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCase {
    pub id: String,
    pub source: CaseSource,
    pub matrix: SymMatrix,
    pub transform: Transform,
    pub h: Option<f64>,
}

impl MatrixCase {
    pub fn new(id: impl Into<String>, matrix: SymMatrix) -> Self {
        MatrixCase {
            id: id.into(),
            source: CaseSource::Inline,
            matrix,
            transform: Transform::None,
            h: None,
        }
    }

    pub fn has_negative_diagonal(&self) -> bool {
        self.matrix.diagonal().iter().any(|&d| d < 0.0)
    }

    /// Runs `f` with a fresh oracle for this case.
    pub fn with_oracle<R>(&self, f: impl FnOnce(&mut dyn HessianOracle) -> R) -> Result<R> {
        match self.h {
            None => Ok(f(&mut ExactOracle::new(&self.matrix))),
            Some(h) => {
                let objective = FnObjective::new(self.matrix.dim(), |x: &[f64]| {
                    quadratic_form(&self.matrix, x)
                });
                let mut oracle = FdOracle::new(objective, vec![0.0; self.matrix.dim()], h)?;
                Ok(f(&mut oracle))
            }
        }
    }

    pub fn seek_variant(
        &self,
        variant: VariantSpec,
        config: &SeekerConfig,
    ) -> Result<SeekerResult, SeekError> {
        self.with_oracle(|mut o| seek_variant(&mut o, variant, config))?
    }

    pub fn seek_order(
        &self,
        order: &SelectionOrder,
        config: &SeekerConfig,
    ) -> Result<SeekerResult, SeekError> {
        self.with_oracle(|mut o| seek(&mut o, order, config))?
    }
}

/// Splits cases into those without and with a strictly negative diagonal entry.
pub fn filter_negative_diagonal(cases: Vec<MatrixCase>) -> (Vec<MatrixCase>, Vec<MatrixCase>) {
    cases.into_iter().partition(|c| !c.has_negative_diagonal())
}

/// One (case, variant) outcome. Failed runs carry `error` and no metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub case_id: String,
    pub variant: VariantSpec,
    pub status: Option<SeekStatus>,
    pub iterations: Option<usize>,
    pub lambda: Option<f64>,
    pub oracle_cost: Option<usize>,
    pub n: usize,
    pub transform: Transform,
    pub h: Option<f64>,
    /// Whether the run certified `lambda < -epsilon`.
    pub negative: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub variants: Vec<VariantSpec>,
    pub seeker: SeekerConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            variants: VariantSpec::all(),
            seeker: SeekerConfig::default(),
        }
    }
}

pub fn run_case(case: &MatrixCase, variant: VariantSpec, config: &SeekerConfig) -> BenchRecord {
    let mut record = BenchRecord {
        case_id: case.id.clone(),
        variant,
        status: None,
        iterations: None,
        lambda: None,
        oracle_cost: None,
        n: case.matrix.dim(),
        transform: case.transform,
        h: case.h,
        negative: false,
        error: None,
    };
    match case.seek_variant(variant, config) {
        Ok(r) => {
            record.status = Some(r.status);
            record.iterations = Some(r.iterations);
            record.lambda = Some(r.lambda);
            record.oracle_cost = Some(r.oracle_cost);
            record.negative = r.found_negative();
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs every variant on every case in parallel. Output is case-major in
/// input order, variants in `config.variants` order.
pub fn run_grid(cases: &[MatrixCase], config: &GridConfig) -> Result<Vec<BenchRecord>> {
    let mut ids = HashSet::new();
    for c in cases {
        if !ids.insert(c.id.as_str()) {
            return Err(Error::invalid(format!("duplicate case id {:?}", c.id)));
        }
    }
    let jobs: Vec<(&MatrixCase, VariantSpec)> = cases
        .iter()
        .flat_map(|c| config.variants.iter().map(move |&v| (c, v)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(c, v)| run_case(c, v, &config.seeker))
        .collect())
}
