//! Comparison of the natural-order variants against the best of an
//! exhaustively enumerated order set.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::MatrixCase;
use crate::error::{Error, Result};
use crate::order::{enumerate_orders, Build, EnumerationMode, Heuristic, Pair, VariantSpec};
use crate::seeker::SeekerConfig;

/// Which natural-order run the best order is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderedBaseline {
    Build1,
    Build2,
    /// The fewer iterations of the two builds.
    BetterOfBoth,
}

impl FromStr for OrderedBaseline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "build1" => Ok(OrderedBaseline::Build1),
            "build2" => Ok(OrderedBaseline::Build2),
            "better" | "better-of-both" => Ok(OrderedBaseline::BetterOfBoth),
            _ => Err(Error::invalid(format!("unknown baseline {s:?}"))),
        }
    }
}

impl fmt::Display for OrderedBaseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderedBaseline::Build1 => "build1",
            OrderedBaseline::Build2 => "build2",
            OrderedBaseline::BetterOfBoth => "better-of-both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveOutcome {
    pub case_id: String,
    pub n: usize,
    pub mode: EnumerationMode,
    pub baseline: OrderedBaseline,
    pub orders_evaluated: usize,
    pub best_iterations: usize,
    /// First order in enumeration order that achieves `best_iterations`.
    pub best_order: Vec<Pair>,
    pub ordered_build1: usize,
    pub ordered_build2: usize,
    pub ordered_iterations: usize,
    pub gap: usize,
}

/// Runs every order of `mode` on the case and compares with the natural order.
pub fn exhaustive_case(
    case: &MatrixCase,
    mode: EnumerationMode,
    config: &SeekerConfig,
    baseline: OrderedBaseline,
) -> Result<ExhaustiveOutcome> {
    let n = case.matrix.dim();
    let iterations = |variant: VariantSpec| -> Result<usize> {
        Ok(case
            .seek_variant(variant, config)
            .map_err(|e| Error::invalid(format!("case {:?}: {e}", case.id)))?
            .iterations)
    };
    let ordered_build1 = iterations(VariantSpec::new(Heuristic::Ordered, Build::Build1))?;
    let ordered_build2 = iterations(VariantSpec::new(Heuristic::Ordered, Build::Build2))?;
    let ordered_iterations = match baseline {
        OrderedBaseline::Build1 => ordered_build1,
        OrderedBaseline::Build2 => ordered_build2,
        OrderedBaseline::BetterOfBoth => ordered_build1.min(ordered_build2),
    };

    let runs: Vec<(usize, usize)> = enumerate_orders(n, mode)?
        .enumerate()
        .par_bridge()
        .map(|(k, order)| {
            case.seek_order(&order, config)
                .map(|r| (r.iterations, k))
                .map_err(|e| Error::invalid(format!("case {:?}: {e}", case.id)))
        })
        .collect::<Result<_>>()?;
    let &(best_iterations, best_index) = runs.iter().min().expect("at least one order");
    let best_order = enumerate_orders(n, mode)?
        .nth(best_index)
        .expect("index from the same enumeration")
        .pairs()
        .to_vec();

    Ok(ExhaustiveOutcome {
        case_id: case.id.clone(),
        n,
        mode,
        baseline,
        orders_evaluated: runs.len(),
        best_iterations,
        best_order,
        ordered_build1,
        ordered_build2,
        ordered_iterations,
        gap: ordered_iterations.saturating_sub(best_iterations),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedVsBest {
    pub outcomes: Vec<ExhaustiveOutcome>,
    /// gap → number of cases
    pub histogram: BTreeMap<usize, usize>,
}

pub fn ordered_vs_best(
    cases: &[MatrixCase],
    mode: EnumerationMode,
    config: &SeekerConfig,
    baseline: OrderedBaseline,
) -> Result<OrderedVsBest> {
    let outcomes = cases
        .iter()
        .map(|c| exhaustive_case(c, mode, config, baseline))
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for o in &outcomes {
        *histogram.entry(o.gap).or_insert(0) += 1;
    }
    Ok(OrderedVsBest {
        outcomes,
        histogram,
    })
}
