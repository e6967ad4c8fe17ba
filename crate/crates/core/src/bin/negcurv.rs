use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use negcurv::bench::transform::DEFAULT_GENERATION_ATTEMPTS;
use negcurv::bench::{
    exhaustive_case, generate_suite, generate_synthetic, load_matrix, load_suite, run_bench,
    save_matrix, write_bench_output, BenchPlan, GenerateSpec, GridConfig, MatrixCase, MatrixFormat,
    OrderedBaseline, Transform,
};
use negcurv::functions::TestFunction;
use negcurv::{
    certified_upper_bound, seek_variant, Build, EnumerationMode, ExactOracle, FdOracle, Heuristic,
    SeekerConfig, SeekerRecord, SeekerResult, VariantSpec,
};

const EXIT_FOUND: u8 = 0;
const EXIT_NOT_FOUND: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "negcurv",
    version,
    about = "Detect negative curvature by revealing matrix coefficients incrementally"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detector on a matrix file.
    Detect(DetectArgs),
    /// Run the detector on finite-difference Hessian entries of a registry function.
    DetectFd(DetectFdArgs),
    /// Run the eight-variant grid over a suite and write reports.
    Bench(BenchArgs),
    /// Compare the natural order against every enumerated order.
    Exhaustive(ExhaustiveArgs),
    /// Write a synthetic matrix with a given number of negative eigenvalues.
    Gen(GenArgs),
}

#[derive(Args)]
struct VariantArgs {
    /// ordered, s2lde, l2sde or ide
    #[arg(long, default_value = "ordered")]
    heuristic: Heuristic,
    /// build1 or build2
    #[arg(long, default_value = "build1")]
    build: Build,
    /// Stop once the estimate is below -EPSILON.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Print the result record as JSON.
    #[arg(long)]
    json: bool,
}

impl VariantArgs {
    fn variant(&self) -> VariantSpec {
        VariantSpec::new(self.heuristic, self.build)
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// matrix-market, dense-text or auto
    #[arg(long, default_value = "auto")]
    format: MatrixFormat,
    #[command(flatten)]
    variant: VariantArgs,
}

#[derive(Args)]
struct DetectFdArgs {
    /// sum-of-squares, sum-of-cubes, product-coupling, exp-coupling or quadratic:FILE
    #[arg(long)]
    function: String,
    /// Comma-separated coordinates of the evaluation point.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    point: Vec<f64>,
    #[arg(long)]
    h: f64,
    /// Lipschitz constant of the Hessian; enables the certified upper bound.
    #[arg(long)]
    lipschitz: Option<f64>,
    #[command(flatten)]
    variant: VariantArgs,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["suite", "generate"]))]
struct BenchArgs {
    /// Directory of matrix files.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Synthetic suite COUNT:NMIN-NMAX:KMIN-KMAX.
    #[arg(long)]
    generate: Option<GenerateSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated list of none, permute, orthogonal.
    #[arg(long, value_delimiter = ',', default_value = "none")]
    transform: Vec<Transform>,
    /// Comma-separated finite-difference steps, one extra grid each.
    #[arg(long, value_delimiter = ',')]
    h: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Directory for records.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ExhaustiveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value = "auto")]
    format: MatrixFormat,
    /// perm-build or all-pairs
    #[arg(long, default_value = "perm-build")]
    mode: EnumerationMode,
    /// build1, build2 or better-of-both
    #[arg(long, default_value = "better-of-both")]
    baseline: OrderedBaseline,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    neg: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (Matrix Market).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GENERATION_ATTEMPTS)]
    attempts: usize,
}

type CmdResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_FOUND
            });
        }
    };
    let outcome = match cli.command {
        Command::Detect(a) => detect(a),
        Command::DetectFd(a) => detect_fd(a),
        Command::Bench(a) => bench(a),
        Command::Exhaustive(a) => exhaustive(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn summary_line(r: &SeekerResult) -> String {
    let cert = r
        .certificate
        .as_ref()
        .map(|c| format!(" certificate={:?}", c.indices.as_slice()))
        .unwrap_or_default();
    format!(
        "status={} lambda={} iterations={} oracle_cost={}{cert}",
        r.status, r.lambda, r.iterations, r.oracle_cost
    )
}

fn exit_for(r: &SeekerResult) -> u8 {
    if r.found_negative() {
        EXIT_FOUND
    } else {
        EXIT_NOT_FOUND
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map_err(|e| e.to_string())
}

fn detect(a: DetectArgs) -> CmdResult {
    let m = load_matrix(&a.matrix, a.format).map_err(|e| e.to_string())?;
    let cfg = SeekerConfig::with_epsilon(a.variant.epsilon);
    let r = seek_variant(&mut ExactOracle::new(&m), a.variant.variant(), &cfg)
        .map_err(|e| e.to_string())?;
    if a.variant.json {
        println!("{}", json(&r.record())?);
    } else {
        println!("{}", summary_line(&r));
    }
    Ok(exit_for(&r))
}

#[derive(Serialize)]
struct FdRecord {
    #[serde(flatten)]
    record: SeekerRecord,
    function: String,
    h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified_upper_bound: Option<f64>,
}

fn detect_fd(a: DetectFdArgs) -> CmdResult {
    let f = TestFunction::resolve(&a.function, a.point.len()).map_err(|e| e.to_string())?;
    if let Some(l) = a.lipschitz {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(format!(
                "lipschitz constant must be finite and nonnegative, got {l}"
            ));
        }
    }
    let cfg = SeekerConfig::with_epsilon(a.variant.epsilon);
    let mut oracle = FdOracle::new(&f, a.point.clone(), a.h).map_err(|e| e.to_string())?;
    let r = seek_variant(&mut oracle, a.variant.variant(), &cfg).map_err(|e| e.to_string())?;
    let bound = a.lipschitz.map(|l| certified_upper_bound(&r, l, a.h));
    if a.variant.json {
        let rec = FdRecord {
            record: r.record(),
            function: a.function,
            h: a.h,
            certified_upper_bound: bound,
        };
        println!("{}", json(&rec)?);
    } else {
        let b = bound
            .map(|b| format!(" certified_upper_bound={b}"))
            .unwrap_or_default();
        println!("{}{b}", summary_line(&r));
    }
    Ok(exit_for(&r))
}

fn bench(a: BenchArgs) -> CmdResult {
    let cases = match (&a.suite, &a.generate) {
        (Some(dir), _) => load_suite(dir),
        (None, Some(spec)) => generate_suite(spec, a.seed),
        (None, None) => unreachable!("clap requires one input"),
    }
    .map_err(|e| e.to_string())?;
    if cases.is_empty() {
        return Err("suite is empty".into());
    }
    let mut transforms = a.transform.clone();
    transforms.dedup();
    let plan = BenchPlan {
        transforms,
        steps: a.h.clone(),
        seed: a.seed,
        grid: GridConfig {
            seeker: SeekerConfig::with_epsilon(a.epsilon),
            ..GridConfig::default()
        },
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        if t == 0 {
            return Err("--threads must be at least 1".into());
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let output = pool
        .install(|| run_bench(&cases, &plan))
        .map_err(|e| e.to_string())?;
    write_bench_output(&output, &a.out).map_err(|e| e.to_string())?;

    let failed = output.records.iter().filter(|r| r.error.is_some()).count();
    println!(
        "cases={} records={} failed_runs={} out={}",
        cases.len(),
        output.records.len(),
        failed,
        a.out.display()
    );
    for t in &output.summary.transforms {
        for g in &t.groups {
            println!(
                "\n[{} / {}] discarded_negative_diagonal={} no_negative_curvature={} errored={}",
                t.transform,
                g.label,
                t.discarded_negative_diagonal,
                g.no_negative_curvature,
                g.errored
            );
            if let Some(w) = &g.winner_table {
                print!("{}", w.render());
            }
        }
    }
    Ok(EXIT_FOUND)
}

#[derive(Serialize)]
struct ExhaustiveReport {
    best_iterations: usize,
    ordered_iterations: usize,
    gap: usize,
    orders_evaluated: usize,
    best_order: Vec<[usize; 2]>,
    mode: EnumerationMode,
    baseline: OrderedBaseline,
}

fn exhaustive(a: ExhaustiveArgs) -> CmdResult {
    let m = load_matrix(&a.matrix, a.format).map_err(|e| e.to_string())?;
    let case = MatrixCase::new("matrix", m);
    let cfg = SeekerConfig::with_epsilon(a.epsilon);
    let o = exhaustive_case(&case, a.mode, &cfg, a.baseline).map_err(|e| e.to_string())?;
    let order: Vec<[usize; 2]> = o.best_order.iter().map(|&p| p.into()).collect();
    if a.json {
        let rep = ExhaustiveReport {
            best_iterations: o.best_iterations,
            ordered_iterations: o.ordered_iterations,
            gap: o.gap,
            orders_evaluated: o.orders_evaluated,
            best_order: order,
            mode: o.mode,
            baseline: o.baseline,
        };
        println!("{}", json(&rep)?);
    } else {
        let pairs: Vec<String> = o.best_order.iter().map(|p| p.to_string()).collect();
        println!(
            "best={} ordered={} gap={} orders={} mode={} baseline={}",
            o.best_iterations, o.ordered_iterations, o.gap, o.orders_evaluated, o.mode, o.baseline
        );
        println!("order={}", pairs.join(","));
    }
    Ok(EXIT_FOUND)
}

fn gen(a: GenArgs) -> CmdResult {
    let m = generate_synthetic(a.n, a.neg, a.seed, a.attempts).map_err(|e| e.to_string())?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    }
    save_matrix(&m, &a.out, MatrixFormat::MatrixMarket).map_err(|e| e.to_string())?;
    println!(
        "wrote {} (n={}, negative eigenvalues={})",
        a.out.display(),
        a.n,
        a.neg
    );
    Ok(EXIT_FOUND)
}
