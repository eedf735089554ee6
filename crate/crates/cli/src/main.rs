//! Command-line surface: generate instances, run certification checks,
//! solve, and export. Exit codes: 0 the checked claim holds (or the run
//! completed), 1 it fails, 2 input or file error, 3 a resource budget was
//! hit before an answer was determined.

use linkage_cli::{export, instance_file, report};

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linkage_core::{
    build_default, build_instance, canonical_linkage, control_instance, is_k_connected,
    min_vertex_cut, non_grid_chords, solve, validate_linkage, vital_check, width_report, Budget,
    Count, CutResult, DppInstance, Engine, Mode, Outcome, SolveError, SolveReport, VitalVerdict,
};

use instance_file::{FileError, InstanceFile};
use report::{stats_json, RunReport, Verdict};

#[derive(Parser)]
#[command(name = "linkage", version, about = "Hard disjoint-paths instances: generation, certification, exact solving")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a family instance and write it to a file.
    Gen {
        /// Number of terminal pairs (construction depth).
        #[arg(long)]
        k: usize,
        /// Width parameter; defaults to 2^k - 1.
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one of the named control instances.
    Control {
        /// grid-one-pair, grid-two-pair-loose or path-infeasible.
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a certification check against an instance file.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide, count or enumerate disjoint-paths solutions.
    Solve {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Decide)]
        mode: ModeArg,
        /// Maximum number of solutions to emit in enumerate mode.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Export an instance file as DOT or DIMACS.
    Export {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Grid,
    Linkage,
    Vital,
    Irrelevant,
    Width,
    Cut,
    Connectivity,
}

impl CheckArg {
    fn name(self) -> &'static str {
        match self {
            CheckArg::Grid => "grid",
            CheckArg::Linkage => "linkage",
            CheckArg::Vital => "vital",
            CheckArg::Irrelevant => "irrelevant",
            CheckArg::Width => "width",
            CheckArg::Cut => "cut",
            CheckArg::Connectivity => "connectivity",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Backtrack,
    TdDp,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Backtrack => Engine::Backtrack,
            EngineArg::TdDp => Engine::TdDp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decide,
    Count,
    Enumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
    Dimacs,
}

#[derive(Clone, Copy, clap::Args)]
struct BudgetArgs {
    /// Backtracking node budget.
    #[arg(long, default_value_t = 50_000_000)]
    node_budget: u64,
    /// Dynamic-programming live-state budget.
    #[arg(long, default_value_t = 4_000_000)]
    state_budget: usize,
    /// Reject path decompositions wider than this.
    #[arg(long, default_value_t = 12)]
    width_budget: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<u64>,
}

impl From<BudgetArgs> for Budget {
    fn from(b: BudgetArgs) -> Budget {
        Budget {
            max_nodes: b.node_budget,
            max_states: b.state_budget,
            max_dp_width: b.width_budget,
            time_limit: b.time_budget.map(Duration::from_secs),
        }
    }
}

enum CliError {
    /// Bad input: parameters, malformed files, unwritable paths.
    Input(String),
    /// A budget or size cap prevented an answer.
    Resource(String),
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Resource(_) | SolveError::NoDecomposition => {
                CliError::Resource(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Gen { k, p, out } => cmd_gen(k, p, &out),
        Cmd::Control { name, out } => cmd_control(&name, &out),
        Cmd::Verify {
            file,
            check,
            engine,
            budget,
        } => cmd_verify(&file, check, engine.into(), &budget.into()),
        Cmd::Solve {
            file,
            mode,
            limit,
            engine,
            budget,
        } => cmd_solve(&file, mode, limit, engine.into(), &budget.into()),
        Cmd::Export { file, format, out } => cmd_export(&file, format, out.as_deref()),
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<(InstanceFile, DppInstance), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file = InstanceFile::parse(&bytes)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn cmd_gen(k: usize, p: Option<usize>, out: &Path) -> Result<i32, CliError> {
    let inst = match p {
        Some(p) => build_instance(k, p),
        None => build_default(k),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    if inst.graph.vertex_count() == 1 {
        eprintln!("warning: the requested parameters give a degenerate single-vertex instance");
    }
    let file = InstanceFile::from_instance(&inst)?;
    write_out(out, &file.to_bytes())?;
    Ok(0)
}

fn cmd_control(name: &str, out: &Path) -> Result<i32, CliError> {
    let inst = control_instance(name).map_err(|e| CliError::Input(e.to_string()))?;
    let file = InstanceFile::from_instance(&inst)?;
    write_out(out, &file.to_bytes())?;
    Ok(0)
}

fn cmd_export(path: &Path, format: FormatArg, out: Option<&Path>) -> Result<i32, CliError> {
    let (file, _) = read_instance(path)?;
    let text = match format {
        FormatArg::Dot => export::to_dot(&file),
        FormatArg::Dimacs => export::to_dimacs(&file),
    };
    match out {
        Some(p) => write_out(p, text.as_bytes())?,
        None => {
            use std::io::Write;
            let _ = write!(std::io::stdout(), "{text}");
        }
    }
    Ok(0)
}

fn cmd_solve(
    path: &Path,
    mode: ModeArg,
    limit: usize,
    engine: Engine,
    budget: &Budget,
) -> Result<i32, CliError> {
    let (_, inst) = read_instance(path)?;
    let mode = match mode {
        ModeArg::Decide => Mode::Decide,
        ModeArg::Count => Mode::Count,
        ModeArg::Enumerate => Mode::Enumerate(limit),
    };
    let report = solve(&inst, mode, engine, budget)?;
    let (verdict, result) = solve_result_json(&report);
    let params = json!({
        "mode": match mode {
            Mode::Decide => "decide",
            Mode::Count => "count",
            Mode::Enumerate(_) => "enumerate",
        },
        "limit": if matches!(mode, Mode::Enumerate(_)) { Some(limit) } else { None },
        "engine": report.engine.name(),
    });
    let run = RunReport::new(&inst.name, "solve", params, result, verdict)
        .with_stats(stats_json(&report.stats));
    run.print();
    Ok(verdict.exit_code())
}

fn solve_result_json(report: &SolveReport) -> (Verdict, Value) {
    let (solvable, count): (Value, Value) = match report.outcome {
        Outcome::Unsolvable => (json!(false), json!(0)),
        Outcome::Solvable(Count::Exact(c)) => (json!(true), json!(c)),
        Outcome::Solvable(Count::AtLeast(c)) => (json!(true), json!({ "at_least": c })),
        Outcome::Capped => (json!(null), json!({ "unknown": true })),
    };
    // Stopping at the first solution (decide) or at the enumeration limit
    // is the requested behavior; only spent budgets make the run capped.
    let verdict = if report.budget_exhausted || report.outcome == Outcome::Capped {
        Verdict::Capped
    } else {
        Verdict::Holds
    };
    let solutions: Value = if report.solutions.is_empty() {
        json!(null)
    } else {
        json!(report
            .solutions
            .iter()
            .map(|l| l.paths.iter().map(|p| p.vertices.clone()).collect::<Vec<_>>())
            .collect::<Vec<_>>())
    };
    (
        verdict,
        json!({
            "solvable": solvable,
            "count": count,
            "solutions": solutions,
        }),
    )
}

fn cmd_verify(
    path: &Path,
    check: CheckArg,
    engine: Engine,
    budget: &Budget,
) -> Result<i32, CliError> {
    let (file, inst) = read_instance(path)?;
    let started = std::time::Instant::now();
    let (verdict, result, mut stats) = match check {
        CheckArg::Grid => check_grid(&file, &inst)?,
        CheckArg::Linkage => check_linkage(&inst)?,
        CheckArg::Vital => check_vital(&inst, budget)?,
        CheckArg::Irrelevant => check_irrelevant(&inst, budget)?,
        CheckArg::Width => check_width(&inst)?,
        CheckArg::Cut => check_cut(&file, &inst)?,
        CheckArg::Connectivity => check_connectivity(&inst)?,
    };
    if let Some(map) = stats.as_object_mut() {
        map.insert(
            "elapsed_ms".to_string(),
            json!(started.elapsed().as_millis() as u64),
        );
    }
    let params = json!({ "check": check.name(), "engine": engine_name(engine) });
    let run = RunReport::new(&inst.name, "verify", params, result, verdict).with_stats(stats);
    run.print();
    Ok(verdict.exit_code())
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Auto => "auto",
        Engine::Backtrack => "backtrack",
        Engine::TdDp => "td-dp",
    }
}

type CheckOutput = (Verdict, Value, Value);

/// Grid claim: the stored layout is an injective certificate whose grid
/// edges all exist; for family instances it must be a bijection and the
/// leftover edges must be same-column chords, 2^k - k - 1 of them.
fn check_grid(file: &InstanceFile, inst: &DppInstance) -> Result<CheckOutput, CliError> {
    let cert = match file.certificate() {
        Ok(c) => c,
        Err(e) => {
            return Ok((
                Verdict::Fails,
                json!({ "reason": e.to_string() }),
                json!({}),
            ));
        }
    };
    if let Err(e) = cert.validate(&inst.graph) {
        return Ok((
            Verdict::Fails,
            json!({ "reason": e.to_string() }),
            json!({}),
        ));
    }
    let bijective = cert.is_bijective_for(&inst.graph);
    let mut result = json!({
        "rows": cert.rows(),
        "cols": cert.cols(),
        "bijective": bijective,
    });
    let mut verdict = Verdict::Holds;
    if let Some((k, _)) = inst.family_params() {
        if !bijective {
            verdict = Verdict::Fails;
        }
        match non_grid_chords(inst, &cert) {
            Ok(chords) => {
                let expected = (1usize << k) - k - 1;
                result["chords"] = json!(chords.len());
                result["expected_chords"] = json!(expected);
                if chords.len() != expected {
                    verdict = Verdict::Fails;
                }
            }
            Err(e) => {
                result["reason"] = json!(e.to_string());
                verdict = Verdict::Fails;
            }
        }
    }
    Ok((verdict, result, json!({})))
}

/// Linkage claim: the construction rows form a valid spanning linkage
/// whose pattern is exactly the terminal pairs.
fn check_linkage(inst: &DppInstance) -> Result<CheckOutput, CliError> {
    let linkage = canonical_linkage(inst).map_err(|e| CliError::Input(e.to_string()))?;
    let sizes: Vec<usize> = linkage.paths.iter().map(|p| p.len()).collect();
    match validate_linkage(&inst.graph, &linkage) {
        Ok(pattern) => {
            let spanning = linkage.vertex_set().len() == inst.graph.vertex_count();
            let pattern_ok = pattern == inst.terminal_pattern();
            let verdict = if spanning && pattern_ok {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            Ok((
                verdict,
                json!({
                    "valid": true,
                    "spanning": spanning,
                    "pattern_matches": pattern_ok,
                    "component_sizes": sizes,
                }),
                json!({}),
            ))
        }
        Err(e) => Ok((
            Verdict::Fails,
            json!({ "valid": false, "reason": e.to_string() }),
            json!({}),
        )),
    }
}

/// Vitality claim: the canonical linkage spans the graph and is the only
/// linkage with its pattern (solution count one).
fn check_vital(inst: &DppInstance, budget: &Budget) -> Result<CheckOutput, CliError> {
    let linkage = canonical_linkage(inst).map_err(|e| CliError::Input(e.to_string()))?;
    match vital_check(inst, &linkage, budget) {
        Ok(VitalVerdict::Vital) => Ok((Verdict::Holds, json!({ "vital": true }), json!({}))),
        Ok(VitalVerdict::NotSpanning) => Ok((
            Verdict::Fails,
            json!({ "vital": false, "reason": "not spanning" }),
            json!({}),
        )),
        Ok(VitalVerdict::NotUnique { witness }) => Ok((
            Verdict::Fails,
            json!({
                "vital": false,
                "reason": "not unique",
                "witness": witness
                    .paths
                    .iter()
                    .map(|p| p.vertices.clone())
                    .collect::<Vec<_>>(),
            }),
            json!({}),
        )),
        Err(e @ (SolveError::Resource(_) | SolveError::NoDecomposition)) => {
            Ok((Verdict::Capped, json!({ "reason": e.to_string() }), json!({})))
        }
        Err(e) => Err(e.into()),
    }
}

/// No-irrelevant-vertex claim: deleting any single non-terminal flips
/// solvability, so the scan comes back empty.
fn check_irrelevant(inst: &DppInstance, budget: &Budget) -> Result<CheckOutput, CliError> {
    let scan = linkage_core::irrelevant_scan(inst, budget)?;
    if !scan.complete() {
        return Ok((
            Verdict::Capped,
            json!({
                "checked": scan.checked,
                "unresolved": scan.unresolved.iter().copied().collect::<Vec<_>>(),
            }),
            json!({}),
        ));
    }
    let irrelevant: Vec<_> = scan.irrelevant.iter().copied().collect();
    let verdict = if irrelevant.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok((
        verdict,
        json!({ "checked": scan.checked, "irrelevant": irrelevant }),
        json!({}),
    ))
}

/// Width claim: the grid lower bound meets the column-sweep upper bound.
fn check_width(inst: &DppInstance) -> Result<CheckOutput, CliError> {
    let report = width_report(inst).map_err(|e| CliError::Input(e.to_string()))?;
    let verdict = if report.lower == report.upper {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok((
        verdict,
        json!({
            "lower": report.lower,
            "upper": report.upper,
            "exact": report.exact,
            "sweep_bags": report.upper_decomposition.bags.len(),
        }),
        json!({}),
    ))
}

/// Menger claim: the minimum vertex cut between the first and last layout
/// columns equals the row count.
fn check_cut(file: &InstanceFile, inst: &DppInstance) -> Result<CheckOutput, CliError> {
    let cert = file.certificate()?;
    if cert.cols() < 2 {
        return Err(CliError::Input(
            "cut check needs at least two layout columns".to_string(),
        ));
    }
    let a: BTreeSet<_> = cert.column(1).into_iter().collect();
    let b: BTreeSet<_> = cert.column(cert.cols()).into_iter().collect();
    let cut = min_vertex_cut(&inst.graph, &a, &b).map_err(|e| CliError::Input(e.to_string()))?;
    let expected = cert.rows();
    let (size, vertices): (Value, Value) = match &cut {
        CutResult::Inseparable => (json!("inseparable"), json!(null)),
        CutResult::Cut { vertices } => (
            json!(vertices.len()),
            json!(vertices.iter().copied().collect::<Vec<_>>()),
        ),
    };
    let verdict = if cut.size() == Some(expected) {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok((
        verdict,
        json!({ "cut_size": size, "expected": expected, "cut": vertices }),
        json!({}),
    ))
}

/// Connectivity claim: contracting the level-1 edge at the first terminal
/// leaves a 3-connected graph. Reported as computed; the depth-2 member
/// genuinely fails this.
fn check_connectivity(inst: &DppInstance) -> Result<CheckOutput, CliError> {
    let (k, _) = inst
        .family_params()
        .ok_or_else(|| CliError::Input("connectivity check needs a family instance".into()))?;
    if k < 2 {
        return Err(CliError::Input(
            "connectivity check needs k >= 2 (no level-1 edge to contract at k = 1)".into(),
        ));
    }
    let s1 = inst.terminals[0].0;
    let (contracted, _) = inst
        .graph
        .contract_edge((s1, s1 + 1))
        .map_err(|e| CliError::Input(e.to_string()))?;
    let connected = is_k_connected(&contracted, 3);
    let verdict = if connected {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok((
        verdict,
        json!({
            "contracted_edge": [s1, s1 + 1],
            "three_connected": connected,
            "vertices_after_contraction": contracted.vertex_count(),
        }),
        json!({}),
    ))
}
