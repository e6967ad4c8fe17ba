//! Winner tables, histograms and report files.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::BenchRecord;
use crate::error::{Error, Result};
use crate::order::{Build, Heuristic, VariantSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerRow {
    pub variant: VariantSpec,
    pub wins: usize,
    /// `100 · wins / cases`, rounded to one decimal.
    pub percent: f64,
}

/// Share of cases on which each variant used the fewest iterations. Ties
/// credit every tied variant, so percentages may sum past 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerTable {
    pub cases: usize,
    pub rows: Vec<WinnerRow>,
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Groups records by case in order of first appearance, checking that each
/// case has a successful record for the same set of variants.
fn group_cases(records: &[BenchRecord]) -> Result<(Vec<VariantSpec>, Vec<Vec<&BenchRecord>>)> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<&BenchRecord>> = Vec::new();
    for r in records {
        let k = *index.entry(r.case_id.as_str()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(r);
    }
    let Some(first) = groups.first() else {
        return Err(Error::IncompleteGrid("no records".into()));
    };
    let variants: Vec<VariantSpec> = first.iter().map(|r| r.variant).collect();
    let mut sorted_variants = variants.clone();
    sorted_variants.sort();
    if sorted_variants.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::IncompleteGrid(format!(
            "case {:?} has repeated variants",
            first[0].case_id
        )));
    }
    for g in &groups {
        let mut vs: Vec<VariantSpec> = g.iter().map(|r| r.variant).collect();
        vs.sort();
        if vs != sorted_variants {
            return Err(Error::IncompleteGrid(format!(
                "case {:?} has variants {:?}, expected {:?}",
                g[0].case_id, vs, sorted_variants
            )));
        }
        if let Some(bad) = g.iter().find(|r| r.iterations.is_none()) {
            return Err(Error::IncompleteGrid(format!(
                "case {:?} variant {} has no result: {}",
                bad.case_id,
                bad.variant,
                bad.error.as_deref().unwrap_or("missing iterations")
            )));
        }
    }
    Ok((variants, groups))
}

pub fn winner_table(records: &[BenchRecord]) -> Result<WinnerTable> {
    let (variants, groups) = group_cases(records)?;
    let mut wins: BTreeMap<VariantSpec, usize> = variants.iter().map(|&v| (v, 0)).collect();
    for g in &groups {
        let best = g
            .iter()
            .filter_map(|r| r.iterations)
            .min()
            .expect("nonempty case");
        for r in g.iter().filter(|r| r.iterations == Some(best)) {
            *wins.get_mut(&r.variant).expect("known variant") += 1;
        }
    }
    let cases = groups.len();
    Ok(WinnerTable {
        cases,
        rows: variants
            .into_iter()
            .map(|v| {
                let w = wins[&v];
                WinnerRow {
                    variant: v,
                    wins: w,
                    percent: round1(100.0 * w as f64 / cases as f64),
                }
            })
            .collect(),
    })
}

impl WinnerTable {
    pub fn percent(&self, variant: VariantSpec) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.variant == variant)
            .map(|r| r.percent)
    }

    /// Builds × heuristics grid when all eight variants are present, else one line per variant.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let full = VariantSpec::all()
            .iter()
            .all(|&v| self.percent(v).is_some());
        if full {
            let _ = write!(out, "{:<8}", "");
            for h in Heuristic::ALL {
                let _ = write!(out, "{:>9}", h.as_str());
            }
            out.push('\n');
            for b in Build::ALL {
                let _ = write!(out, "{:<8}", b.as_str());
                for h in Heuristic::ALL {
                    let p = self.percent(VariantSpec::new(h, b)).expect("full grid");
                    let _ = write!(out, "{p:>9.1}");
                }
                out.push('\n');
            }
        } else {
            for r in &self.rows {
                let _ = writeln!(out, "{:<16}{:>7.1}", r.variant.to_string(), r.percent);
            }
        }
        let _ = writeln!(out, "({} cases)", self.cases);
        out
    }
}

/// Iteration-count histogram per variant over successful records.
pub fn iteration_histograms(records: &[BenchRecord]) -> BTreeMap<String, BTreeMap<usize, usize>> {
    let mut out: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    for r in records {
        if let Some(it) = r.iterations {
            *out.entry(r.variant.to_string())
                .or_default()
                .entry(it)
                .or_default() += 1;
        }
    }
    out
}

#[derive(Serialize)]
struct CsvRow<'a> {
    case_id: &'a str,
    variant: String,
    status: &'static str,
    iterations: Option<usize>,
    lambda: Option<f64>,
    oracle_cost: Option<usize>,
    n: usize,
    transform: &'static str,
    h: Option<f64>,
}

/// CSV with columns `case_id, variant, status, iterations, lambda, oracle_cost, n, transform, h`.
pub fn write_records_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(CsvRow {
            case_id: &r.case_id,
            variant: r.variant.to_string(),
            status: r.status.map_or("error", |s| s.as_str()),
            iterations: r.iterations,
            lambda: r.lambda,
            oracle_cost: r.oracle_cost,
            n: r.n,
            transform: r.transform.as_str(),
            h: r.h,
        })?;
    }
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
