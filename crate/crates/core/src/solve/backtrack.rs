//! Exhaustive backtracking: route pair 1, then pair 2, and so on,
//! extending the current path one vertex at a time in ascending neighbor
//! order. That ordering makes enumeration come out in canonical
//! lexicographic order. Branches die when the current head can no longer
//! reach its target, when a later pair gets disconnected, or when a grid
//! column runs out of free vertices for the crossings still owed.

use std::time::Instant;

use crate::family::DppInstance;
use crate::graph::{Graph, Linkage, Path, VertexId};

use super::{
    Budget, ColumnCutOracle, Count, EngineKind, Mode, Outcome, SolveError, SolveReport, SolveStats,
};

pub(super) fn run(
    inst: &DppInstance,
    mode: Mode,
    budget: &Budget,
    oracle: Option<&ColumnCutOracle>,
) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let mut search = Search {
        graph: &inst.graph,
        pairs: &inst.terminals,
        mode,
        limit: match mode {
            Mode::Enumerate(l) => l as u64,
            _ => u64::MAX,
        },
        used: vec![false; inst.graph.vertex_count()],
        paths: Vec::new(),
        count: 0,
        solutions: Vec::new(),
        nodes: 0,
        hit_budget: false,
        limit_reached: false,
        budget: *budget,
        started,
        oracle,
        col_free: Vec::new(),
    };
    for &(s, t) in &inst.terminals {
        search.used[s] = true;
        search.used[t] = true;
    }
    if let Some(o) = oracle {
        let mut free = vec![0usize; o.cols() + 1];
        for v in 0..inst.graph.vertex_count() {
            if !search.used[v] {
                if let Some(c) = o.column_of(v) {
                    free[c] += 1;
                }
            }
        }
        search.col_free = free;
    }

    search.start_pair(0);

    let found = search.count;
    let hit_budget = search.hit_budget;
    let full_search = !hit_budget && !search.limit_reached;
    let outcome = match mode {
        Mode::Decide => {
            if found > 0 {
                Outcome::Solvable(Count::AtLeast(found))
            } else if full_search {
                Outcome::Unsolvable
            } else {
                Outcome::Capped
            }
        }
        // A full search yields exact numbers; a truncated one only a
        // lower bound, and nothing at all when it found no solution.
        Mode::Count | Mode::Enumerate(_) => {
            if full_search {
                if found > 0 {
                    Outcome::Solvable(Count::Exact(found))
                } else {
                    Outcome::Unsolvable
                }
            } else if found > 0 {
                Outcome::Solvable(Count::AtLeast(found))
            } else {
                Outcome::Capped
            }
        }
    };
    Ok(SolveReport {
        outcome,
        engine: EngineKind::Backtrack,
        solutions: search.solutions,
        budget_exhausted: hit_budget,
        stats: SolveStats {
            nodes: search.nodes,
            peak_states: 0,
            elapsed: started.elapsed(),
        },
    })
}

enum Flow {
    Continue,
    Stop,
}

struct Search<'a> {
    graph: &'a Graph,
    pairs: &'a [(VertexId, VertexId)],
    mode: Mode,
    limit: u64,
    used: Vec<bool>,
    paths: Vec<Vec<VertexId>>,
    count: u64,
    solutions: Vec<Linkage>,
    nodes: u64,
    hit_budget: bool,
    limit_reached: bool,
    budget: Budget,
    started: Instant,
    oracle: Option<&'a ColumnCutOracle>,
    col_free: Vec<usize>,
}

impl<'a> Search<'a> {
    fn start_pair(&mut self, pair: usize) -> Flow {
        if pair == self.pairs.len() {
            return self.record_solution();
        }
        let (s, t) = self.pairs[pair];
        self.paths.push(vec![s]);
        let flow = if s == t {
            self.start_pair(pair + 1)
        } else {
            self.extend(pair, s)
        };
        self.paths.pop();
        flow
    }

    fn extend(&mut self, pair: usize, head: VertexId) -> Flow {
        if let Flow::Stop = self.tick() {
            return Flow::Stop;
        }
        if self.dead_end(pair, head) {
            return Flow::Continue;
        }
        let (_, target) = self.pairs[pair];
        let neighbors: Vec<VertexId> = self.graph.neighbors(head).to_vec();
        for v in neighbors {
            if v == target {
                self.paths[pair].push(v);
                let flow = self.start_pair(pair + 1);
                self.paths[pair].pop();
                if let Flow::Stop = flow {
                    return Flow::Stop;
                }
            } else if !self.used[v] {
                self.occupy(v);
                self.paths[pair].push(v);
                let flow = self.extend(pair, v);
                self.paths[pair].pop();
                self.release(v);
                if let Flow::Stop = flow {
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    }

    fn occupy(&mut self, v: VertexId) {
        self.used[v] = true;
        if let Some(o) = self.oracle {
            if let Some(c) = o.column_of(v) {
                self.col_free[c] -= 1;
            }
        }
    }

    fn release(&mut self, v: VertexId) {
        self.used[v] = false;
        if let Some(o) = self.oracle {
            if let Some(c) = o.column_of(v) {
                self.col_free[c] += 1;
            }
        }
    }

    fn tick(&mut self) -> Flow {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            self.hit_budget = true;
            return Flow::Stop;
        }
        if self.nodes % 4096 == 0 {
            if let Some(limit) = self.budget.time_limit {
                if self.started.elapsed() > limit {
                    self.hit_budget = true;
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    }

    /// Sound pruning only: every check must hold for any completion.
    fn dead_end(&mut self, pair: usize, head: VertexId) -> bool {
        let (_, target) = self.pairs[pair];
        if !self.reachable(head, target) {
            return true;
        }
        for later in (pair + 1)..self.pairs.len() {
            let (s, t) = self.pairs[later];
            if s != t && !self.reachable(s, t) {
                return true;
            }
        }
        if let Some(o) = self.oracle {
            let mut routes = Vec::with_capacity(self.pairs.len() - pair);
            if let (Some(a), Some(b)) = (o.column_of(head), o.column_of(target)) {
                routes.push((a, b));
            }
            for later in (pair + 1)..self.pairs.len() {
                let (s, t) = self.pairs[later];
                if let (Some(a), Some(b)) = (o.column_of(s), o.column_of(t)) {
                    routes.push((a, b));
                }
            }
            if o.prunes(&self.col_free, &routes) {
                return true;
            }
        }
        false
    }

    /// BFS from `from` to `to` through free vertices; the endpoints
    /// themselves are allowed to be occupied.
    fn reachable(&self, from: VertexId, to: VertexId) -> bool {
        if from == to || self.graph.has_edge(from, to) {
            return true;
        }
        let mut seen = vec![false; self.graph.vertex_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &v in self.graph.neighbors(u) {
                if v == to {
                    return true;
                }
                if !seen[v] && !self.used[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    fn record_solution(&mut self) -> Flow {
        self.count += 1;
        if let Mode::Enumerate(_) = self.mode {
            self.solutions.push(Linkage::new(
                self.paths.iter().cloned().map(Path::new).collect(),
            ));
        }
        match self.mode {
            Mode::Decide => Flow::Stop,
            Mode::Count => Flow::Continue,
            Mode::Enumerate(_) => {
                if self.count >= self.limit {
                    self.limit_reached = true;
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            }
        }
    }
}
