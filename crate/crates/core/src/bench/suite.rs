//! Suite construction and the full benchmark pipeline.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, RngExt};
use serde::Serialize;

use super::grid::{
    filter_negative_diagonal, run_grid, BenchRecord, CaseSource, GridConfig, MatrixCase,
};
use super::io::{load_matrix, MatrixFormat};
use super::report::{
    iteration_histograms, winner_table, write_json, write_records_csv, WinnerTable,
};
use super::transform::{generate_synthetic, stream_rng, Transform, DEFAULT_GENERATION_ATTEMPTS};
use crate::error::{Error, Result};

/// `COUNT:NMIN-NMAX:KMIN-KMAX`, e.g. `100:4-10:1-3`. A range may be a
/// single value (`20:4:1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateSpec {
    pub count: usize,
    pub n: (usize, usize),
    pub neg: (usize, usize),
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad number {t:?} in range {s:?}")))
    };
    let (lo, hi) = match s.split_once('-') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(Error::invalid(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

impl FromStr for GenerateSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [count, n, neg] = parts.as_slice() else {
            return Err(Error::invalid(format!(
                "generate spec {s:?} is not COUNT:NMIN-NMAX:KMIN-KMAX"
            )));
        };
        let count = count
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad count {count:?}")))?;
        let spec = GenerateSpec {
            count,
            n: parse_range(n)?,
            neg: parse_range(neg)?,
        };
        if spec.count == 0 || spec.n.0 == 0 {
            return Err(Error::invalid("count and dimension must be positive"));
        }
        if spec.neg.0 > spec.n.1 {
            return Err(Error::invalid(format!(
                "at least {} negative eigenvalues cannot fit in dimension {}",
                spec.neg.0, spec.n.1
            )));
        }
        Ok(spec)
    }
}

/// Synthetic cases `gen-0000`, `gen-0001`, ... Each case draws its size,
/// inertia and matrix from its own seeded stream. The negative count is
/// capped at the drawn dimension.
pub fn generate_suite(spec: &GenerateSpec, seed: u64) -> Result<Vec<MatrixCase>> {
    (0..spec.count)
        .map(|k| {
            let id = format!("gen-{k:04}");
            let mut rng = stream_rng(seed, &id);
            let n = rng.random_range(spec.n.0..=spec.n.1);
            let neg = rng.random_range(spec.neg.0..=spec.neg.1).min(n);
            let case_seed = rng.next_u64();
            let matrix = generate_synthetic(n, neg, case_seed, DEFAULT_GENERATION_ATTEMPTS)?;
            Ok(MatrixCase {
                source: CaseSource::Generated { seed: case_seed },
                ..MatrixCase::new(id, matrix)
            })
        })
        .collect()
}

/// Loads every regular, non-hidden file in `dir` (sorted by name) as a
/// case whose id is the file stem.
pub fn load_suite(dir: &Path) -> Result<Vec<MatrixCase>> {
    let entries =
        fs::read_dir(dir).map_err(|e| Error::io(format!("reading {}", dir.display()), e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(format!("reading {}", dir.display()), e))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_file() && !hidden {
            paths.push(path);
        }
    }
    paths.sort();
    let mut ids = HashSet::new();
    paths
        .into_iter()
        .map(|path| {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            if !ids.insert(id.clone()) {
                return Err(Error::invalid(format!(
                    "duplicate case id {id:?} in {}",
                    dir.display()
                )));
            }
            let matrix = load_matrix(&path, MatrixFormat::Auto)?;
            Ok(MatrixCase {
                source: CaseSource::File(path),
                ..MatrixCase::new(id, matrix)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub transforms: Vec<Transform>,
    /// Finite-difference steps; each adds one grid per transform.
    pub steps: Vec<f64>,
    pub seed: u64,
    pub grid: GridConfig,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            transforms: vec![Transform::None],
            steps: Vec::new(),
            seed: 0,
            grid: GridConfig::default(),
        }
    }
}

/// Aggregates for one (transform, oracle) slice of the records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: String,
    pub h: Option<f64>,
    pub cases: usize,
    /// Cases on which some variant failed; excluded from the winner table.
    pub errored: usize,
    /// Cases on which no variant certified negative curvature; excluded from the winner table.
    pub no_negative_curvature: usize,
    pub winner_table: Option<WinnerTable>,
    pub iteration_histograms: BTreeMap<String, BTreeMap<usize, usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSummary {
    pub transform: Transform,
    pub cases_total: usize,
    pub discarded_negative_diagonal: usize,
    pub discarded_ids: Vec<String>,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub seed: u64,
    pub variants: Vec<String>,
    pub transforms: Vec<TransformSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub summary: BenchSummary,
}

fn summarize(label: String, h: Option<f64>, records: &[BenchRecord]) -> Result<GroupSummary> {
    // key by (case, h) so that pooled FD groups keep steps apart
    let key = |r: &BenchRecord| {
        format!(
            "{}@{}",
            r.case_id,
            r.h.map_or("exact".into(), |h| h.to_string())
        )
    };
    let mut order: Vec<String> = Vec::new();
    let mut by_case: BTreeMap<String, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        let k = key(r);
        if !by_case.contains_key(&k) {
            order.push(k.clone());
        }
        by_case.entry(k).or_default().push(r);
    }
    let mut errored = 0;
    let mut no_negative = 0;
    let mut ranked: Vec<BenchRecord> = Vec::new();
    for k in &order {
        let rs = &by_case[k];
        if rs.iter().any(|r| r.error.is_some()) {
            errored += 1;
        } else if !rs.iter().any(|r| r.negative) {
            no_negative += 1;
        } else {
            ranked.extend(rs.iter().map(|&r| BenchRecord {
                case_id: k.clone(),
                ..r.clone()
            }));
        }
    }
    let winner_table = if ranked.is_empty() {
        None
    } else {
        Some(winner_table(&ranked)?)
    };
    Ok(GroupSummary {
        label,
        h,
        cases: order.len(),
        errored,
        no_negative_curvature: no_negative,
        winner_table,
        iteration_histograms: iteration_histograms(&ranked),
    })
}

/// Applies each transform, drops cases that gain a negative diagonal entry,
/// and runs the exact grid plus one finite-difference grid per step.
/// Records are ordered transform, then oracle (exact first), then case.
pub fn run_bench(cases: &[MatrixCase], plan: &BenchPlan) -> Result<BenchOutput> {
    if cases.is_empty() {
        return Err(Error::invalid("empty suite"));
    }
    if let Some(&h) = plan.steps.iter().find(|&&h| !(h.is_finite() && h > 0.0)) {
        return Err(Error::invalid(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let mut records = Vec::new();
    let mut transforms = Vec::new();
    for &t in &plan.transforms {
        let transformed = cases
            .iter()
            .map(|c| {
                let seed = stream_rng(plan.seed, &format!("{t}/{}", c.id)).next_u64();
                Ok(MatrixCase {
                    matrix: t.apply(&c.matrix, seed)?,
                    transform: t,
                    ..c.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (kept, discarded) = filter_negative_diagonal(transformed);

        let exact = run_grid(&kept, &plan.grid)?;
        let mut groups = vec![summarize("exact".into(), None, &exact)?];
        let mut fd_all = Vec::new();
        for &h in &plan.steps {
            let fd_cases: Vec<MatrixCase> = kept
                .iter()
                .map(|c| MatrixCase {
                    h: Some(h),
                    ..c.clone()
                })
                .collect();
            let fd = run_grid(&fd_cases, &plan.grid)?;
            groups.push(summarize(format!("h={h:e}"), Some(h), &fd)?);
            fd_all.extend(fd);
        }
        if plan.steps.len() > 1 {
            groups.push(summarize("fd-all".into(), None, &fd_all)?);
        }
        records.extend(exact);
        records.extend(fd_all);
        transforms.push(TransformSummary {
            transform: t,
            cases_total: cases.len(),
            discarded_negative_diagonal: discarded.len(),
            discarded_ids: discarded.into_iter().map(|c| c.id).collect(),
            groups,
        });
    }
    Ok(BenchOutput {
        records,
        summary: BenchSummary {
            seed: plan.seed,
            variants: plan.grid.variants.iter().map(|v| v.to_string()).collect(),
            transforms,
        },
    })
}

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Writes `records.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_bench_output(output: &BenchOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    write_records_csv(&output.records, &dir.join(RECORDS_FILE))?;
    write_json(&output.summary, &dir.join(SUMMARY_FILE))
}
