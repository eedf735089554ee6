//! Foundational graph values: undirected simple graphs over dense integer
//! ids, paths, linkages and their patterns.
//!
//! Graphs are immutable. Operations that change the vertex set return a
//! fresh graph together with an [`IdMap`] describing how old ids were
//! remapped, so downstream tables can stay flat arrays.

use std::collections::BTreeSet;
use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(VertexId, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("grid dimensions must be positive")]
    EmptyGrid,
}

/// Undirected simple graph with vertex ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects loops, duplicates and
    /// out-of-range endpoints; neighbor lists come out sorted.
    pub fn new(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            m: seen.len(),
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut cnt = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    cnt += 1;
                    stack.push(v);
                }
            }
        }
        cnt == self.n
    }

    /// Removes `v` and remaps the remaining ids densely.
    pub fn delete_vertex(&self, v: VertexId) -> Result<(Graph, IdMap), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        let mut forward = vec![None; self.n];
        let mut next = 0;
        for old in 0..self.n {
            if old != v {
                forward[old] = Some(next);
                next += 1;
            }
        }
        let map = IdMap { forward };
        let mut edges = Vec::new();
        for (a, b) in self.edges() {
            if let (Some(x), Some(y)) = (map.map(a), map.map(b)) {
                edges.push((x, y));
            }
        }
        let g = Graph::new(self.n - 1, &edges).expect("deletion keeps the edge list simple");
        Ok((g, map))
    }

    /// Contracts the edge `{u, v}`: the endpoints merge into a single
    /// vertex, parallel edges collapse and no self-loop is kept.
    pub fn contract_edge(&self, e: (VertexId, VertexId)) -> Result<(Graph, IdMap), GraphError> {
        let (u, v) = e;
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let keep = u.min(v);
        let drop = u.max(v);
        let mut forward = vec![None; self.n];
        let mut next = 0;
        for old in 0..self.n {
            if old != drop {
                forward[old] = Some(next);
                next += 1;
            }
        }
        forward[drop] = forward[keep];
        let map = IdMap { forward };
        let mut edges = BTreeSet::new();
        for (a, b) in self.edges() {
            let x = map.map(a).unwrap();
            let y = map.map(b).unwrap();
            if x != y {
                edges.insert((x.min(y), x.max(y)));
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        let g = Graph::new(self.n - 1, &edges).expect("contraction output is simple by construction");
        Ok((g, map))
    }
}

/// Old-id to new-id translation produced by vertex deletion/contraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    forward: Vec<Option<VertexId>>,
}

impl IdMap {
    pub fn map(&self, old: VertexId) -> Option<VertexId> {
        self.forward.get(old).copied().flatten()
    }

    pub fn old_len(&self) -> usize {
        self.forward.len()
    }
}

/// The `(rows x cols)`-grid with row-major ids: cell `(r, c)` (1-based)
/// becomes vertex `(r-1)*cols + (c-1)`.
pub fn make_grid(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows == 0 || cols == 0 {
        return Err(GraphError::EmptyGrid);
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::new(rows * cols, &edges)
}

/// A path as a sequence of pairwise distinct, consecutively adjacent
/// vertices. A single vertex is a valid path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path { vertices }
    }

    pub fn endpoints(&self) -> Option<(VertexId, VertexId)> {
        let first = *self.vertices.first()?;
        let last = *self.vertices.last()?;
        Some((first, last))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// An ordered collection of pairwise vertex-disjoint paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linkage {
    pub paths: Vec<Path>,
}

impl Linkage {
    pub fn new(paths: Vec<Path>) -> Self {
        Linkage { paths }
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.paths
            .iter()
            .flat_map(|p| p.vertices.iter().copied())
            .collect()
    }
}

/// The matching induced on a linkage's endpoints. A pair degenerates to
/// `(v, v)` when the path is a single vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pattern {
    pairs: BTreeSet<(VertexId, VertexId)>,
}

impl Pattern {
    pub fn from_pairs<I: IntoIterator<Item = (VertexId, VertexId)>>(iter: I) -> Self {
        Pattern {
            pairs: iter
                .into_iter()
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect(),
        }
    }

    pub fn pairs(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.pairs
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkageError {
    #[error("path {path}: vertex {vertex} out of range")]
    VertexOutOfRange { path: usize, vertex: VertexId },
    #[error("path {path} is empty")]
    EmptyPath { path: usize },
    #[error("path {path}: vertices {u} and {v} are not adjacent")]
    BrokenPath { path: usize, u: VertexId, v: VertexId },
    #[error("vertex {vertex} is used by more than one position")]
    Overlap { vertex: VertexId },
}

/// Checks that every path of `l` is a path in `g` and that the paths are
/// pairwise vertex-disjoint; returns the induced endpoint pattern.
pub fn validate_linkage(g: &Graph, l: &Linkage) -> Result<Pattern, LinkageError> {
    let mut used = vec![false; g.vertex_count()];
    let mut pairs = Vec::new();
    for (i, path) in l.paths.iter().enumerate() {
        if path.is_empty() {
            return Err(LinkageError::EmptyPath { path: i });
        }
        for &v in &path.vertices {
            if v >= g.vertex_count() {
                return Err(LinkageError::VertexOutOfRange { path: i, vertex: v });
            }
            if used[v] {
                return Err(LinkageError::Overlap { vertex: v });
            }
            used[v] = true;
        }
        for w in path.vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(LinkageError::BrokenPath {
                    path: i,
                    u: w[0],
                    v: w[1],
                });
            }
        }
        let (s, t) = path.endpoints().expect("non-empty path");
        pairs.push((s, t));
    }
    Ok(Pattern::from_pairs(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let g = make_grid(1, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));

        let g = make_grid(3, 3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));

        // m(n-1) + n(m-1) with m = 2, n = 5.
        let g = make_grid(2, 5).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 13));

        assert_eq!(make_grid(0, 3), Err(GraphError::EmptyGrid));
    }

    #[test]
    fn grid_ids_are_row_major() {
        let g = make_grid(2, 3).unwrap();
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(0, 3));
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn constructor_rejects_bad_edges() {
        assert_eq!(
            Graph::new(2, &[(0, 0)]),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::new(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange(2, 2))
        );
    }

    #[test]
    fn delete_center_of_grid() {
        let g = make_grid(3, 3).unwrap();
        let (h, map) = g.delete_vertex(4).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (8, 8));
        assert_eq!(map.map(4), None);
        assert_eq!(map.map(0), Some(0));
        assert_eq!(map.map(8), Some(7));
    }

    #[test]
    fn delete_last_vertex_empties_graph() {
        let g = Graph::new(1, &[]).unwrap();
        let (h, _) = g.delete_vertex(0).unwrap();
        assert_eq!(h.vertex_count(), 0);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn delete_cut_vertex_of_path() {
        let g = make_grid(1, 3).unwrap();
        let (h, _) = g.delete_vertex(1).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 0));
        assert!(!h.is_connected());
    }

    #[test]
    fn contract_path_edge() {
        let g = make_grid(1, 3).unwrap();
        let (h, map) = g.contract_edge((0, 1)).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 1));
        assert_eq!(map.map(0), map.map(1));
    }

    #[test]
    fn contract_triangle_edge_collapses_parallels() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (h, _) = g.contract_edge((0, 1)).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 1));
    }

    #[test]
    fn contract_requires_an_edge() {
        let g = make_grid(1, 3).unwrap();
        assert!(matches!(
            g.contract_edge((0, 2)),
            Err(GraphError::NotAnEdge(0, 2))
        ));
    }

    #[test]
    fn linkage_validation() {
        let g = make_grid(1, 4).unwrap();
        let l = Linkage::new(vec![Path::new(vec![0, 1, 2, 3])]);
        let pat = validate_linkage(&g, &l).unwrap();
        assert_eq!(pat, Pattern::from_pairs([(0, 3)]));

        let broken = Linkage::new(vec![Path::new(vec![0, 2])]);
        assert_eq!(
            validate_linkage(&g, &broken),
            Err(LinkageError::BrokenPath { path: 0, u: 0, v: 2 })
        );

        let overlap = Linkage::new(vec![Path::new(vec![0, 1]), Path::new(vec![1, 2])]);
        assert_eq!(
            validate_linkage(&g, &overlap),
            Err(LinkageError::Overlap { vertex: 1 })
        );

        let single = Linkage::new(vec![Path::new(vec![2])]);
        let pat = validate_linkage(&g, &single).unwrap();
        assert_eq!(pat, Pattern::from_pairs([(2, 2)]));
    }

    #[test]
    fn linkage_union_size_equals_sum_of_lengths() {
        let g = make_grid(3, 3).unwrap();
        let l = Linkage::new(vec![Path::new(vec![0, 1, 2]), Path::new(vec![6, 7, 8])]);
        validate_linkage(&g, &l).unwrap();
        let total: usize = l.paths.iter().map(|p| p.len()).sum();
        assert_eq!(l.vertex_set().len(), total);
    }
}
