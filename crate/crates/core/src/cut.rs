//! Minimum vertex cuts and vertex connectivity, computed by unit-capacity
//! max-flow on the split network: every candidate vertex turns into an
//! in/out arc of capacity one, so flow value equals the number of
//! internally disjoint paths.

use std::collections::BTreeSet;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("terminal sides must be non-empty")]
    EmptySide,
    #[error("terminal sides overlap at vertex {0}")]
    Overlap(VertexId),
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(VertexId, usize),
}

/// Result of a minimum-cut query between two vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutResult {
    /// Some edge joins the two sides directly, so no set of third-party
    /// vertices can separate them.
    Inseparable,
    Cut { vertices: BTreeSet<VertexId> },
}

impl CutResult {
    /// Cut size, `None` for the inseparable sentinel.
    pub fn size(&self) -> Option<usize> {
        match self {
            CutResult::Inseparable => None,
            CutResult::Cut { vertices } => Some(vertices.len()),
        }
    }
}

struct Arc {
    to: usize,
    cap: u32,
}

/// Plain BFS-augmenting max flow. Arc `i ^ 1` is the reverse of arc `i`.
struct FlowNetwork {
    arcs: Vec<Arc>,
    caps0: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            caps0: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: u32) {
        let i = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap: 0 });
        self.caps0.push(cap);
        self.caps0.push(0);
        self.adj[u].push(i);
        self.adj[v].push(i + 1);
    }

    fn reset(&mut self) {
        for (arc, &c) in self.arcs.iter_mut().zip(&self.caps0) {
            arc.cap = c;
        }
    }

    /// Augments unit paths until none is left or `limit` is reached.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let mut flow = 0;
        let mut parent = vec![usize::MAX; self.adj.len()];
        while flow < limit {
            for p in parent.iter_mut() {
                *p = usize::MAX;
            }
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            parent[s] = usize::MAX - 1;
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &i in &self.adj[u] {
                    let v = self.arcs[i].to;
                    if self.arcs[i].cap > 0 && parent[v] == usize::MAX {
                        parent[v] = i;
                        if v == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut v = t;
            while v != s {
                let i = parent[v];
                self.arcs[i].cap -= 1;
                self.arcs[i ^ 1].cap += 1;
                v = self.arcs[i ^ 1].to;
            }
            flow += 1;
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network.
    fn residual_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &i in &self.adj[u] {
                let v = self.arcs[i].to;
                if self.arcs[i].cap > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Minimum set of vertices outside `a` and `b` whose removal separates
/// `a` from `b`. Adjacent (or touching) sides are reported as
/// [`CutResult::Inseparable`].
pub fn min_vertex_cut(
    g: &Graph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
) -> Result<CutResult, CutError> {
    if a.is_empty() || b.is_empty() {
        return Err(CutError::EmptySide);
    }
    let n = g.vertex_count();
    for &v in a.iter().chain(b.iter()) {
        if v >= n {
            return Err(CutError::VertexOutOfRange(v, n));
        }
    }
    if let Some(&v) = a.intersection(b).next() {
        return Err(CutError::Overlap(v));
    }
    for &u in a {
        for &v in g.neighbors(u) {
            if b.contains(&v) {
                return Ok(CutResult::Inseparable);
            }
        }
    }

    // Node layout: candidate v -> in = 2v, out = 2v + 1; source = 2n, sink = 2n + 1.
    let source = 2 * n;
    let sink = 2 * n + 1;
    let inf = (n + 1) as u32;
    let mut net = FlowNetwork::new(2 * n + 2);
    let side = |v: VertexId| -> u8 {
        if a.contains(&v) {
            1
        } else if b.contains(&v) {
            2
        } else {
            0
        }
    };
    for v in 0..n {
        if side(v) == 0 {
            net.add(2 * v, 2 * v + 1, 1);
        }
    }
    for (u, v) in g.edges() {
        match (side(u), side(v)) {
            (0, 0) => {
                net.add(2 * u + 1, 2 * v, inf);
                net.add(2 * v + 1, 2 * u, inf);
            }
            (1, 0) => net.add(source, 2 * v, inf),
            (0, 1) => net.add(source, 2 * u, inf),
            (2, 0) => net.add(2 * v + 1, sink, inf),
            (0, 2) => net.add(2 * u + 1, sink, inf),
            _ => {}
        }
    }
    net.max_flow(source, sink, inf);
    let reach = net.residual_side(source);
    let mut vertices = BTreeSet::new();
    for v in 0..n {
        if side(v) == 0 && reach[2 * v] && !reach[2 * v + 1] {
            vertices.insert(v);
        }
    }
    Ok(CutResult::Cut { vertices })
}

/// True iff `g` has more than `c` vertices and no vertex set of size
/// less than `c` disconnects it.
pub fn is_k_connected(g: &Graph, c: usize) -> bool {
    let n = g.vertex_count();
    if n <= c {
        return false;
    }
    if c == 0 {
        return true;
    }
    // A low-degree vertex is separated from the rest by its neighborhood.
    for v in 0..n {
        if g.degree(v) < c && n > g.degree(v) + 1 {
            return false;
        }
    }
    // Split every vertex once; a query from out(u) to in(v) then measures
    // the internally disjoint u-v paths.
    let mut net = FlowNetwork::new(2 * n);
    let inf = (n + 1) as u32;
    for v in 0..n {
        net.add(2 * v, 2 * v + 1, 1);
    }
    for (u, v) in g.edges() {
        net.add(2 * u + 1, 2 * v, inf);
        net.add(2 * v + 1, 2 * u, inf);
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if g.has_edge(u, v) {
                continue;
            }
            net.reset();
            if net.max_flow(2 * u + 1, 2 * v, c as u32) < c as u32 {
                return false;
            }
        }
    }
    true
}
