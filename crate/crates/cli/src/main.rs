use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use progs::solver::{enumerate_with, SolverError, TargetStatus};
use progs::transforms::TransformError;
use progs::{
    eliminate_paths, export_asp, export_graph_json, fold_operators, import_graph_json, parse_document,
    reduce_to_single_target, solve, Assignment, PropertyGraph, ShapeSet, SolverConfig, Strategy, TransformTrace,
    ValidationReport,
};
use serde_json::json;

const CONFORMS: u8 = 0;
const NOT_CONFORMING: u8 = 1;
const FAILURE: u8 = 2;
const OVER_BUDGET: u8 = 3;

/// Validate property graphs against shapes.
///
/// Exit codes: 0 conforms (or the input is well-formed), 1 does not conform,
/// 2 usage, I/O or parse error, 3 search budget or atom limit exceeded.
#[derive(Parser)]
#[command(name = "progs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a graph conforms to a shape file.
    Validate {
        /// Graph document (JSON).
        graph: PathBuf,
        /// Shape file.
        shapes: PathBuf,
        /// List every strictly faithful assignment that satisfies all targets.
        #[arg(long)]
        all: bool,
        /// On failure, classify each failing target.
        #[arg(long)]
        explain: bool,
        /// Use exhaustive enumeration instead of backtracking.
        #[arg(long)]
        oracle: bool,
        /// Atom limit for exhaustive search and enumeration.
        #[arg(long, default_value_t = progs::solver::DEFAULT_MAX_ATOMS)]
        max_atoms: usize,
        /// Maximum number of search decisions.
        #[arg(long)]
        budget: Option<u64>,
        /// Wall-clock limit in milliseconds.
        #[arg(long)]
        timeout_ms: Option<u64>,
        /// Eliminate paths, reduce to one target and fold operators first.
        #[arg(long)]
        normalize: bool,
        /// Print a machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Parse and link a shape file.
    Check { shapes: PathBuf },
    /// Write a graph and shapes as ASP facts.
    ExportAsp {
        graph: PathBuf,
        shapes: PathBuf,
        /// Output file, `-` for standard output.
        out: PathBuf,
    },
    /// Re-encode a graph document.
    Convert {
        input: PathBuf,
        /// Output file, `-` for standard output.
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        to: Format,
        /// Shapes to include in ASP output.
        #[arg(long)]
        shapes: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Asp,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { FAILURE } else { CONFORMS });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { graph, shapes, all, explain, oracle, max_atoms, budget, timeout_ms, normalize, json } => {
            let g = read_graph(&graph)?;
            let s = read_shapes(&shapes)?;
            let cfg = SolverConfig {
                strategy: if oracle { Strategy::BruteForce } else { Strategy::Backtracking },
                max_atoms,
                max_branches: budget,
                time_budget: timeout_ms.map(Duration::from_millis),
                explain,
            };
            validate(&g, &s, &cfg, all, normalize, json)
        }
        Command::Check { shapes } => {
            let s = read_shapes(&shapes)?;
            let cycles = s.reference_cycles().len();
            println!("{} shape{}, {} cycle{}", s.len(), plural(s.len()), cycles, plural(cycles));
            Ok(CONFORMS)
        }
        Command::ExportAsp { graph, shapes, out } => {
            let g = read_graph(&graph)?;
            let s = read_shapes(&shapes)?;
            let text = export_asp(&g, &s).map_err(|e| Failure::new(FAILURE, e.to_string()))?;
            write_output(&out, text.as_bytes())?;
            Ok(CONFORMS)
        }
        Command::Convert { input, output, to, shapes } => {
            let g = read_graph(&input)?;
            let bytes = match to {
                Format::Json => export_graph_json(&g),
                Format::Asp => {
                    let s = match shapes {
                        Some(path) => read_shapes(&path)?,
                        None => ShapeSet::empty(),
                    };
                    export_asp(&g, &s).map_err(|e| Failure::new(FAILURE, e.to_string()))?.into_bytes()
                }
            };
            write_output(&output, &bytes)?;
            Ok(CONFORMS)
        }
    }
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(FAILURE, format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<PropertyGraph, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::new(FAILURE, format!("{}: {e}", path.display())))?;
    import_graph_json(&bytes).map_err(|e| Failure::new(FAILURE, format!("{}: {e}", path.display())))
}

fn read_shapes(path: &Path) -> Result<ShapeSet, Failure> {
    let text = read_text(path)?;
    match parse_document(&text) {
        Ok(doc) => Ok(doc.shapes),
        Err(e) => {
            // Located errors already start with `line:column: `.
            let sep = if e.span().is_some() { ":" } else { ": " };
            let mut message = format!("{}{sep}{e}", path.display());
            if let Some(span) = e.span() {
                if let Some(line) = text.lines().nth(span.line - 1) {
                    message.push_str(&format!("\n  | {line}\n  | {}^", " ".repeat(span.column.saturating_sub(1))));
                }
            }
            Err(Failure::new(FAILURE, message))
        }
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let result = if path.as_os_str() == "-" { io::stdout().write_all(bytes) } else { fs::write(path, bytes) };
    result.map_err(|e| Failure::new(FAILURE, format!("{}: {e}", path.display())))
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::TooLarge { .. } | SolverError::BudgetExceeded { .. } => Failure::new(OVER_BUDGET, e.to_string()),
        SolverError::Eval(_) => Failure::new(FAILURE, e.to_string()),
    }
}

/// The transformed instance and how to map its assignments back.
struct Normalized {
    g: PropertyGraph,
    s: ShapeSet,
    trace: TransformTrace,
}

fn normalize(g: &PropertyGraph, s: &ShapeSet) -> Result<Normalized, TransformError> {
    let (g1, s1, mut trace) = eliminate_paths(g, s);
    let (g2, s2, _root, t2) = reduce_to_single_target(&g1, &s1);
    trace.extend(t2);
    let (s3, t3) = fold_operators(&s2)?;
    trace.extend(t3);
    Ok(Normalized { g: g2, s: s3, trace })
}

fn validate(
    g: &PropertyGraph,
    s: &ShapeSet,
    cfg: &SolverConfig,
    all: bool,
    normalized: bool,
    json: bool,
) -> Result<u8, Failure> {
    let prepared =
        if normalized { Some(normalize(g, s).map_err(|e| Failure::new(FAILURE, e.to_string()))?) } else { None };
    let (vg, vs) = match &prepared {
        Some(n) => (&n.g, &n.s),
        None => (g, s),
    };
    let back = |sigma: Assignment| match &prepared {
        Some(n) => n.trace.project(&sigma),
        None => sigma,
    };

    let mut report = solve(vg, vs, &SolverConfig { explain: false, ..cfg.clone() }).map_err(solver_failure)?;
    report.witness = report.witness.take().map(back);
    if normalized && cfg.explain && !report.conforms {
        // Target classification refers to the original targets.
        report.targets = solve(g, s, cfg).map_err(solver_failure)?.targets;
    } else if cfg.explain && !report.conforms {
        report = solve(g, s, cfg).map_err(solver_failure)?;
    }
    let assignments = if all {
        let found = enumerate_with(vg, vs, usize::MAX, cfg).map_err(solver_failure)?;
        let mut found: Vec<Assignment> = found.into_iter().map(back).collect();
        found.dedup();
        Some(found)
    } else {
        None
    };

    if json {
        let mut doc = serde_json::to_value(&report).expect("report serializes");
        if let Some(list) = &assignments {
            doc["assignments"] = json!(list);
        }
        println!("{doc}");
    } else {
        print_report(&report, cfg.explain, assignments.as_deref());
    }
    Ok(if report.conforms { CONFORMS } else { NOT_CONFORMING })
}

fn print_assignment(sigma: &Assignment) {
    for (atom, value) in sigma.iter() {
        println!("{atom} = {}", value.word());
    }
}

fn print_report(report: &ValidationReport, explain: bool, assignments: Option<&[Assignment]>) {
    println!("{}", if report.conforms { "CONFORMS" } else { "DOES NOT CONFORM" });
    match assignments {
        Some(list) => {
            println!("{} faithful assignment{}", list.len(), plural(list.len()));
            for (i, sigma) in list.iter().enumerate() {
                println!("assignment {}:", i + 1);
                print_assignment(sigma);
            }
        }
        None => {
            if let Some(sigma) = &report.witness {
                print_assignment(sigma);
            }
        }
    }
    if explain && !report.conforms {
        for t in report.violated_targets() {
            let why = match t.status {
                TargetStatus::Violated => "cannot be satisfied",
                TargetStatus::Conflicting => "conflicts with other targets",
                TargetStatus::Undetermined => "undetermined within the budget",
                TargetStatus::Satisfied => continue,
            };
            println!("target {}: {why}", t.atom);
        }
    }
}
