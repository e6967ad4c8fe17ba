//! Benchmark harness: matrix files, transforms, variant grids and reports.

pub mod exhaustive;
pub mod grid;
pub mod io;
pub mod report;
pub mod suite;
pub mod transform;

pub use exhaustive::{
    exhaustive_case, ordered_vs_best, ExhaustiveOutcome, OrderedBaseline, OrderedVsBest,
};
pub use grid::{
    filter_negative_diagonal, run_case, run_grid, BenchRecord, CaseSource, GridConfig, MatrixCase,
};
pub use io::{load_matrix, parse_matrix, save_matrix, MatrixFormat};
pub use report::{winner_table, WinnerRow, WinnerTable};
pub use suite::{
    generate_suite, load_suite, run_bench, write_bench_output, BenchOutput, BenchPlan, GenerateSpec,
};
pub use transform::{
    generate_synthetic, random_orthogonal_transform, random_permutation_transform, Transform,
};
