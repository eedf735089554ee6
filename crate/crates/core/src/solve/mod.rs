//! Exact decision, counting and enumeration of disjoint-paths solutions.
//!
//! Two independent engines back each other up: a backtracking search that
//! routes the pairs one path at a time, and a dynamic program over a path
//! decomposition whose states are interface partitions into labeled open
//! fragments. A solution is a set of paths, one per terminal pair; two
//! solutions are distinct iff some path's vertex sequence differs (a
//! reversed sequence is not a new solution, paths are read from `s` to
//! `t`).

mod backtrack;
mod pathdp;

use std::collections::BTreeSet;
use std::time::Duration;
use thiserror::Error;

use crate::family::{grid_certificate, DppInstance, GridCertificate};
use crate::graph::{Linkage, VertexId};
use crate::width::{
    exact_pathwidth, validate_decomposition, DecompositionError, TreeDecomposition,
    EXACT_SOLVER_CAP,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("terminal {0} out of range")]
    TerminalOutOfRange(VertexId),
    #[error("terminal {0} is shared by two different pairs")]
    TerminalClash(VertexId),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("no path decomposition obtainable for this instance")]
    NoDecomposition,
    #[error("enumeration is only implemented by the backtracking engine")]
    EnumerateNeedsBacktrack,
    #[error("decomposition rejected: {0}")]
    Decomposition(#[from] DecompositionError),
    #[error("linkage invalid: {0}")]
    InvalidLinkage(String),
    #[error("linkage pattern differs from the terminal pattern")]
    PatternMismatch,
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decide,
    Count,
    /// Emit up to this many solutions, lexicographically by the id
    /// sequences of path 1, then path 2, and so on.
    Enumerate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Backtrack,
    TdDp,
    Auto,
}

/// Which engine actually ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Backtrack,
    TdDp,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Backtrack => "backtrack",
            EngineKind::TdDp => "td-dp",
        }
    }
}

/// Exact or budget-capped solution count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Exact(u64),
    /// The search was cut short; at least this many solutions exist.
    AtLeast(u64),
}

impl Count {
    pub fn exact(self) -> Option<u64> {
        match self {
            Count::Exact(c) => Some(c),
            Count::AtLeast(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Unsolvable,
    Solvable(Count),
    /// A budget ran out before anything was determined.
    Capped,
}

impl Outcome {
    pub fn solvable(self) -> Option<bool> {
        match self {
            Outcome::Unsolvable => Some(false),
            Outcome::Solvable(_) => Some(true),
            Outcome::Capped => None,
        }
    }

    pub fn exact_count(self) -> Option<u64> {
        match self {
            Outcome::Unsolvable => Some(0),
            Outcome::Solvable(c) => c.exact(),
            Outcome::Capped => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Search nodes expanded (backtracking) .
    pub nodes: u64,
    /// Peak live state-table size (dynamic program).
    pub peak_states: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub engine: EngineKind,
    /// Filled by `Mode::Enumerate`, empty otherwise.
    pub solutions: Vec<Linkage>,
    /// True when a resource budget stopped the run. Stopping at the
    /// first solution in decide mode or at the requested enumeration
    /// limit is by design and does not set this.
    pub budget_exhausted: bool,
    pub stats: SolveStats,
}

/// Explicit resource caps. Exceeding one yields a capped report or a
/// resource error, never a wrong count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_states: usize,
    /// Path decompositions wider than this are rejected up front.
    pub max_dp_width: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 50_000_000,
            max_states: 4_000_000,
            max_dp_width: 12,
            time_limit: None,
        }
    }
}

/// Column occupancy oracle derived from a grid certificate. While paths
/// are still owed a crossing of column `c`, at least that many free
/// vertices must remain in the column; otherwise the branch is dead.
#[derive(Debug, Clone)]
pub struct ColumnCutOracle {
    cols: usize,
    col_of: Vec<Option<usize>>,
}

impl ColumnCutOracle {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column_of(&self, v: VertexId) -> Option<usize> {
        self.col_of.get(v).copied().flatten()
    }

    /// `true` when some column has fewer free vertices than paths that
    /// must still cross it. `routes` lists, per unfinished path, the pair
    /// of columns its remaining segment must join.
    pub fn prunes(&self, free_per_col: &[usize], routes: &[(usize, usize)]) -> bool {
        debug_assert_eq!(free_per_col.len(), self.cols + 1);
        let mut required = vec![0usize; self.cols + 1];
        for &(a, b) in routes {
            let (lo, hi) = (a.min(b), a.max(b));
            for c in (lo + 1)..hi {
                required[c] += 1;
            }
        }
        (1..=self.cols).any(|c| free_per_col[c] < required[c])
    }
}

/// Builds the column pruning oracle for the backtracking engine.
pub fn column_cut_prune(inst: &DppInstance, cert: &GridCertificate) -> ColumnCutOracle {
    let pos = cert.positions(inst.graph.vertex_count());
    ColumnCutOracle {
        cols: cert.cols(),
        col_of: pos.into_iter().map(|p| p.map(|(_, c)| c)).collect(),
    }
}

fn validate_terminals(inst: &DppInstance) -> Result<(), SolveError> {
    let n = inst.graph.vertex_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, &(s, t)) in inst.terminals.iter().enumerate() {
        for v in [s, t] {
            if v >= n {
                return Err(SolveError::TerminalOutOfRange(v));
            }
            match owner[v] {
                Some(j) if j != i => return Err(SolveError::TerminalClash(v)),
                _ => owner[v] = Some(i),
            }
        }
    }
    Ok(())
}

/// Solves the instance in the requested mode. `Engine::Auto` picks the
/// decomposition engine for generated instances (when the sweep width
/// fits the budget) and backtracking otherwise; enumeration always
/// backtracks.
pub fn solve(
    inst: &DppInstance,
    mode: Mode,
    engine: Engine,
    budget: &Budget,
) -> Result<SolveReport, SolveError> {
    validate_terminals(inst)?;
    match engine {
        Engine::Backtrack => {
            let oracle = family_oracle(inst);
            backtrack::run(inst, mode, budget, oracle.as_ref())
        }
        Engine::TdDp => {
            if matches!(mode, Mode::Enumerate(_)) {
                return Err(SolveError::EnumerateNeedsBacktrack);
            }
            let td = obtain_decomposition(inst)?;
            solve_with_decomposition(inst, mode, &td, budget)
        }
        Engine::Auto => match mode {
            Mode::Enumerate(_) => {
                let oracle = family_oracle(inst);
                backtrack::run(inst, mode, budget, oracle.as_ref())
            }
            _ => {
                if inst.family_params().is_some() {
                    if let Ok(td) = obtain_decomposition(inst) {
                        if td.width() <= budget.max_dp_width {
                            return solve_with_decomposition(inst, mode, &td, budget);
                        }
                    }
                }
                let oracle = family_oracle(inst);
                backtrack::run(inst, mode, budget, oracle.as_ref())
            }
        },
    }
}

/// Backtracking entry point with explicit pruning control, used by the
/// pruning soundness tests.
pub fn solve_backtrack_with_pruning(
    inst: &DppInstance,
    mode: Mode,
    budget: &Budget,
    oracle: Option<&ColumnCutOracle>,
) -> Result<SolveReport, SolveError> {
    validate_terminals(inst)?;
    backtrack::run(inst, mode, budget, oracle)
}

/// Runs the decomposition engine over an explicitly supplied path
/// decomposition, which is validated first.
pub fn solve_with_decomposition(
    inst: &DppInstance,
    mode: Mode,
    td: &TreeDecomposition,
    budget: &Budget,
) -> Result<SolveReport, SolveError> {
    validate_terminals(inst)?;
    if matches!(mode, Mode::Enumerate(_)) {
        return Err(SolveError::EnumerateNeedsBacktrack);
    }
    if td.shape != crate::width::Shape::Path {
        return Err(SolveError::Decomposition(DecompositionError::NotAPath));
    }
    let width = validate_decomposition(&inst.graph, td)?;
    if width > budget.max_dp_width {
        return Err(SolveError::Resource(format!(
            "decomposition width {width} exceeds the dynamic-programming cap {}",
            budget.max_dp_width
        )));
    }
    pathdp::run(inst, mode, td, budget)
}

fn family_oracle(inst: &DppInstance) -> Option<ColumnCutOracle> {
    let cert = grid_certificate(inst).ok()?;
    Some(column_cut_prune(inst, &cert))
}

fn obtain_decomposition(inst: &DppInstance) -> Result<TreeDecomposition, SolveError> {
    if inst.family_params().is_some() {
        let cert = grid_certificate(inst).map_err(|_| SolveError::NoDecomposition)?;
        return crate::width::column_sweep_decomposition(inst, &cert)
            .map_err(|_| SolveError::NoDecomposition);
    }
    if inst.graph.vertex_count() <= EXACT_SOLVER_CAP && inst.graph.vertex_count() > 0 {
        return Ok(exact_pathwidth(&inst.graph)
            .map_err(|_| SolveError::NoDecomposition)?
            .decomposition);
    }
    Err(SolveError::NoDecomposition)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VitalVerdict {
    Vital,
    NotSpanning,
    NotUnique { witness: Box<Linkage> },
}

/// Checks whether `l` is a vital linkage of the instance: it must span
/// the vertex set and be the only linkage with the terminal pattern.
/// Uniqueness quantifies over all linkages with that pattern, spanning
/// or not, so exact solution counting is the right oracle.
pub fn vital_check(
    inst: &DppInstance,
    l: &Linkage,
    budget: &Budget,
) -> Result<VitalVerdict, SolveError> {
    let pattern = crate::graph::validate_linkage(&inst.graph, l)
        .map_err(|e| SolveError::InvalidLinkage(e.to_string()))?;
    if pattern != inst.terminal_pattern() {
        return Err(SolveError::PatternMismatch);
    }
    if l.vertex_set().len() != inst.graph.vertex_count() {
        return Ok(VitalVerdict::NotSpanning);
    }
    let report = solve(inst, Mode::Count, Engine::Auto, budget)?;
    match report.outcome {
        Outcome::Solvable(Count::Exact(1)) => Ok(VitalVerdict::Vital),
        Outcome::Solvable(_) => {
            let canon = canonical_paths(inst, l);
            let listed = solve(inst, Mode::Enumerate(2), Engine::Backtrack, budget)?;
            for sol in listed.solutions {
                if canonical_paths(inst, &sol) != canon {
                    return Ok(VitalVerdict::NotUnique {
                        witness: Box::new(sol),
                    });
                }
            }
            Err(SolveError::Internal(
                "count disagrees with enumeration".into(),
            ))
        }
        Outcome::Unsolvable => Err(SolveError::Internal(
            "instance reported unsolvable although a linkage was given".into(),
        )),
        Outcome::Capped => Err(SolveError::Resource(
            "budget exhausted during uniqueness counting".into(),
        )),
    }
}

/// Normal form for comparing linkages: paths ordered by terminal pair,
/// each read from `s` to `t`.
fn canonical_paths(inst: &DppInstance, l: &Linkage) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new(); inst.terminals.len()];
    for path in &l.paths {
        let (a, b) = path.endpoints().expect("validated linkage");
        for (i, &(s, t)) in inst.terminals.iter().enumerate() {
            if (a, b) == (s, t) {
                out[i] = path.vertices.clone();
                break;
            }
            if (b, a) == (s, t) {
                out[i] = path.vertices.iter().rev().copied().collect();
                break;
            }
        }
    }
    out
}

/// Scan result: the set of non-terminals whose deletion preserves
/// solvability. Vertices whose check hit a resource cap are reported
/// separately; the scan is complete iff that set is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub irrelevant: BTreeSet<VertexId>,
    pub unresolved: BTreeSet<VertexId>,
    pub checked: usize,
}

impl ScanReport {
    pub fn complete(&self) -> bool {
        self.unresolved.is_empty()
    }
}

/// Deletes each non-terminal in turn and compares solvability with the
/// base instance. Generated instances reuse the column-sweep
/// decomposition restricted to the surviving vertices.
pub fn irrelevant_scan(inst: &DppInstance, budget: &Budget) -> Result<ScanReport, SolveError> {
    validate_terminals(inst)?;
    let sweep = if inst.family_params().is_some() {
        obtain_decomposition(inst)
            .ok()
            .filter(|td| td.width() <= budget.max_dp_width)
    } else {
        None
    };

    let base = match &sweep {
        Some(td) => solve_with_decomposition(inst, Mode::Decide, td, budget)?,
        None => solve(inst, Mode::Decide, Engine::Auto, budget)?,
    };
    let base_solvable = base
        .outcome
        .solvable()
        .ok_or_else(|| SolveError::Resource("budget exhausted on the base instance".into()))?;

    let mut irrelevant = BTreeSet::new();
    let mut unresolved = BTreeSet::new();
    let mut checked = 0;
    for v in 0..inst.graph.vertex_count() {
        if inst.is_terminal(v) {
            continue;
        }
        checked += 1;
        let (graph, map) = inst
            .graph
            .delete_vertex(v)
            .expect("scan only deletes existing vertices");
        let terminals = inst
            .terminals
            .iter()
            .map(|&(s, t)| {
                (
                    map.map(s).expect("terminals survive"),
                    map.map(t).expect("terminals survive"),
                )
            })
            .collect();
        let info = (0..graph.vertex_count())
            .map(|u| crate::family::VertexInfo {
                level: 1,
                index: u + 1,
            })
            .collect();
        let reduced = DppInstance::custom(format!("{}-minus-{v}", inst.name), graph, terminals, info);
        let outcome = match &sweep {
            Some(td) => {
                let restricted = td.without_vertex(v, &map);
                solve_with_decomposition(&reduced, Mode::Decide, &restricted, budget)?.outcome
            }
            None => solve(&reduced, Mode::Decide, Engine::Auto, budget)?.outcome,
        };
        match outcome.solvable() {
            Some(s) if s == base_solvable => {
                irrelevant.insert(v);
            }
            Some(_) => {}
            None => {
                unresolved.insert(v);
            }
        }
    }
    Ok(ScanReport {
        irrelevant,
        unresolved,
        checked,
    })
}
