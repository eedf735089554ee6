//! Tree and path decompositions: validation, the column-sweep path
//! decomposition for certified instances, and exact small-graph width
//! solvers by dynamic programming over vertex subsets.

use std::collections::VecDeque;
use thiserror::Error;

use crate::family::{grid_certificate, DppInstance, FamilyError, GridCertificate};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WidthError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph has {0} vertices, exact solver is capped at {1}")]
    TooLarge(usize, usize),
    #[error("certificate is not a bijection onto the vertex set")]
    NotBijective,
    #[error("decomposition invalid: {0}")]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("decomposition has no bags")]
    NoBags,
    #[error("bag {bag} contains out-of-range vertex {vertex}")]
    BagVertexOutOfRange { bag: usize, vertex: VertexId },
    #[error("link ({0}, {1}) is out of range or degenerate")]
    BadLink(usize, usize),
    #[error("the bag graph is not a tree")]
    NotATree,
    #[error("the bag graph is not a path")]
    NotAPath,
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(VertexId),
    #[error("edge {{{0}, {1}}} is inside no bag")]
    UncoveredEdge(VertexId, VertexId),
    #[error("occurrence set of vertex {0} is disconnected")]
    DisconnectedOccurrence(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Tree,
    Path,
}

/// A tree of bags. For `Shape::Path` the bag graph must be a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub shape: Shape,
    pub bags: Vec<Vec<VertexId>>,
    pub links: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// A path-shaped decomposition from a bag sequence, chained in order.
    pub fn chain(bags: Vec<Vec<VertexId>>) -> Self {
        let links = (1..bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition {
            shape: Shape::Path,
            bags,
            links,
        }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1) - 1
    }

    /// Drops a vertex from every bag; the result is a decomposition of
    /// the graph without that vertex, translated through `map`.
    pub fn without_vertex(&self, v: VertexId, map: &crate::graph::IdMap) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|bag| {
                bag.iter()
                    .filter(|&&u| u != v)
                    .filter_map(|&u| map.map(u))
                    .collect()
            })
            .collect();
        TreeDecomposition {
            shape: self.shape,
            bags,
            links: self.links.clone(),
        }
    }
}

/// Checks the three decomposition conditions plus tree-ness (and
/// path-ness when the shape says so). Returns the width.
pub fn validate_decomposition(
    g: &Graph,
    d: &TreeDecomposition,
) -> Result<usize, DecompositionError> {
    let nb = d.bags.len();
    if nb == 0 {
        return Err(DecompositionError::NoBags);
    }
    let n = g.vertex_count();
    for (i, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(DecompositionError::BagVertexOutOfRange { bag: i, vertex: v });
            }
        }
    }

    // Tree-ness: nb - 1 distinct links and connected.
    if d.links.len() != nb - 1 {
        return Err(DecompositionError::NotATree);
    }
    let mut tree_adj = vec![Vec::new(); nb];
    for &(a, b) in &d.links {
        if a >= nb || b >= nb || a == b {
            return Err(DecompositionError::BadLink(a, b));
        }
        tree_adj[a].push(b);
        tree_adj[b].push(a);
    }
    let mut seen = vec![false; nb];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut cnt = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &tree_adj[u] {
            if !seen[v] {
                seen[v] = true;
                cnt += 1;
                queue.push_back(v);
            }
        }
    }
    if cnt != nb {
        return Err(DecompositionError::NotATree);
    }
    if d.shape == Shape::Path && tree_adj.iter().any(|l| l.len() > 2) {
        return Err(DecompositionError::NotAPath);
    }

    // Occurrence lists per vertex.
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in d.bags.iter().enumerate() {
        let mut sorted = bag.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for v in sorted {
            occ[v].push(i);
        }
    }
    for v in 0..n {
        if occ[v].is_empty() {
            return Err(DecompositionError::UncoveredVertex(v));
        }
    }
    for (u, v) in g.edges() {
        let mut iu = occ[u].iter().peekable();
        let mut iv = occ[v].iter().peekable();
        let mut found = false;
        while let (Some(&&a), Some(&&b)) = (iu.peek(), iv.peek()) {
            if a == b {
                found = true;
                break;
            } else if a < b {
                iu.next();
            } else {
                iv.next();
            }
        }
        if !found {
            return Err(DecompositionError::UncoveredEdge(u, v));
        }
    }

    // Occurrence sets must induce connected subtrees.
    let mut mark = vec![usize::MAX; nb];
    for v in 0..n {
        for &b in &occ[v] {
            mark[b] = v;
        }
        let mut reached = 1;
        let mut stack = vec![occ[v][0]];
        let mut visited = vec![occ[v][0]];
        mark[occ[v][0]] = usize::MAX - 1;
        while let Some(b) = stack.pop() {
            for &nbr in &tree_adj[b] {
                if mark[nbr] == v {
                    mark[nbr] = usize::MAX - 1;
                    reached += 1;
                    stack.push(nbr);
                    visited.push(nbr);
                }
            }
        }
        for b in visited {
            mark[b] = usize::MAX;
        }
        if reached != occ[v].len() {
            return Err(DecompositionError::DisconnectedOccurrence(v));
        }
    }

    let max_bag = d.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    Ok(max_bag - 1)
}

/// The column sweep over a bijective grid certificate: bag `(i, j)` holds
/// rows `j..` of column `i` plus rows `..=j` of column `i + 1`, chained in
/// lexicographic order. Every bag has `rows + 1` cells, so the width is
/// exactly the row count, and bag `(i, 1)` contains column `i` entirely,
/// which covers same-column chords.
pub fn column_sweep_decomposition(
    inst: &DppInstance,
    cert: &GridCertificate,
) -> Result<TreeDecomposition, WidthError> {
    if !cert.is_bijective_for(&inst.graph) {
        return Err(WidthError::NotBijective);
    }
    cert.validate(&inst.graph).map_err(FamilyError::from)?;
    let rows = cert.rows();
    let cols = cert.cols();
    if cols == 1 {
        return Ok(TreeDecomposition::chain(vec![cert.column(1)]));
    }
    let mut bags = Vec::with_capacity((cols - 1) * rows);
    for i in 1..cols {
        for j in 1..=rows {
            let mut bag: Vec<VertexId> = (j..=rows).map(|r| cert.cell(r, i)).collect();
            bag.extend((1..=j).map(|r| cert.cell(r, i + 1)));
            bags.push(bag);
        }
    }
    Ok(TreeDecomposition::chain(bags))
}

/// Exact width value together with a witness decomposition.
#[derive(Debug, Clone)]
pub struct ExactWidth {
    pub width: usize,
    pub decomposition: TreeDecomposition,
}

/// Hard cap for the exact solvers: the subset tables grow as `2^n`.
pub const EXACT_SOLVER_CAP: usize = 18;

fn check_exact_size(g: &Graph) -> Result<(), WidthError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(WidthError::EmptyGraph);
    }
    if n > EXACT_SOLVER_CAP {
        return Err(WidthError::TooLarge(n, EXACT_SOLVER_CAP));
    }
    Ok(())
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.vertex_count())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .fold(0u32, |acc, &u| acc | (1 << u))
        })
        .collect()
}

/// Number of vertices outside `prior | {v}` that `v` reaches through
/// `prior` alone: the degree `v` would have when eliminated after `prior`.
fn elimination_degree(adj: &[u32], prior: u32, v: usize) -> u32 {
    let vbit = 1u32 << v;
    let mut out = adj[v] & !prior & !vbit;
    let mut visited = adj[v] & prior;
    let mut frontier = visited;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let a = adj[u];
        out |= a & !prior;
        let fresh = a & prior & !visited;
        visited |= fresh;
        frontier |= fresh;
    }
    (out & !vbit).count_ones()
}

/// Exact tree-width by dynamic programming over elimination prefixes.
pub fn exact_treewidth(g: &Graph) -> Result<ExactWidth, WidthError> {
    check_exact_size(g)?;
    let n = g.vertex_count();
    let adj = adjacency_masks(g);
    let full: u32 = (1 << n) - 1;

    let mut f = vec![u8::MAX; (full as usize) + 1];
    f[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prior = s & !(1 << v);
            let cost = f[prior as usize].max(elimination_degree(&adj, prior, v) as u8);
            best = best.min(cost);
        }
        f[s as usize] = best;
    }
    let width = f[full as usize] as usize;

    // Reconstruct an order realizing the optimum, last pick first.
    let mut order = vec![0usize; n];
    let mut s = full;
    for slot in (0..n).rev() {
        let mut chosen = None;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prior = s & !(1 << v);
            let cost = f[prior as usize].max(elimination_degree(&adj, prior, v) as u8);
            if cost as usize <= width {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("optimal prefix always extends");
        order[slot] = v;
        s &= !(1 << v);
    }

    let decomposition = decomposition_from_elimination(g, &order);
    debug_assert_eq!(decomposition.width(), width);
    Ok(ExactWidth {
        width,
        decomposition,
    })
}

/// Builds the clique-tree style decomposition of an elimination order:
/// bag `i` is `order[i]` plus its not-yet-eliminated neighbors in the
/// fill graph, linked to the bag of its first-eliminated such neighbor.
fn decomposition_from_elimination(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.vertex_count();
    let mut adj = adjacency_masks(g);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    let mut links = Vec::new();
    let mut eliminated = 0u32;
    for (i, &v) in order.iter().enumerate() {
        let later = adj[v] & !eliminated & !(1 << v);
        let mut bag = vec![v];
        let mut parent: Option<usize> = None;
        let mut rest = later;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            bag.push(u);
            parent = Some(match parent {
                Some(p) if pos[p] <= pos[u] => p,
                _ => u,
            });
        }
        bag.sort_unstable();
        bags.push(bag);
        if let Some(p) = parent {
            links.push((i, pos[p]));
        }
        // Fill: the remaining neighbors become a clique.
        let mut a = later;
        while a != 0 {
            let u = a.trailing_zeros() as usize;
            a &= a - 1;
            adj[u] |= later & !(1 << u);
        }
        eliminated |= 1 << v;
    }
    // Chain component roots so the bag graph is a single tree.
    let mut has_parent = vec![false; n];
    for &(child, _) in &links {
        has_parent[child] = true;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| !has_parent[i]).collect();
    for w in roots.windows(2) {
        links.push((w[0], w[1]));
    }
    TreeDecomposition {
        shape: Shape::Tree,
        bags,
        links,
    }
}

/// Exact path-width via the vertex-separation formulation: lay vertices
/// out one by one; the cost of a prefix is how many of its vertices still
/// have neighbors outside.
pub fn exact_pathwidth(g: &Graph) -> Result<ExactWidth, WidthError> {
    check_exact_size(g)?;
    let n = g.vertex_count();
    let adj = adjacency_masks(g);
    let full: u32 = (1 << n) - 1;

    let boundary = |s: u32| -> u8 {
        let mut b = 0u8;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & !s != 0 {
                b += 1;
            }
        }
        b
    };

    let mut f = vec![u8::MAX; (full as usize) + 1];
    f[0] = 0;
    for s in 1..=full {
        let b = boundary(s);
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            best = best.min(f[(s & !(1 << v)) as usize]);
        }
        f[s as usize] = best.max(b);
    }
    let width = f[full as usize] as usize;

    let mut layout = vec![0usize; n];
    let mut s = full;
    for slot in (0..n).rev() {
        let mut chosen = None;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if f[(s & !(1 << v)) as usize] as usize <= width {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("optimal layout always extends");
        layout[slot] = v;
        s &= !(1 << v);
    }

    // Bags: boundary of the prefix before v, plus v itself.
    let mut bags = Vec::with_capacity(n);
    let mut prefix = 0u32;
    for &v in &layout {
        let mut bag = Vec::new();
        let mut rest = prefix;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[u] & !prefix != 0 {
                bag.push(u);
            }
        }
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        prefix |= 1 << v;
    }
    let decomposition = TreeDecomposition::chain(bags);
    debug_assert_eq!(decomposition.width(), width);
    Ok(ExactWidth {
        width,
        decomposition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundKind {
    /// A validated `q x q` grid certificate with `q >= 2`.
    GridSubgraph { q: usize },
    /// Single-vertex degenerate case.
    Trivial,
}

/// Certified width bounds for a default-width family instance.
#[derive(Debug, Clone)]
pub struct WidthReport {
    pub lower: usize,
    pub lower_kind: LowerBoundKind,
    pub upper: usize,
    pub upper_decomposition: TreeDecomposition,
    pub exact: Option<usize>,
}

/// Lower bound from the validated grid certificate, upper bound from the
/// validated column sweep. For the square family both equal the side
/// length, which pins the exact value.
pub fn width_report(inst: &DppInstance) -> Result<WidthReport, WidthError> {
    let (k, p) = inst.family_params().ok_or(FamilyError::NotFamily)?;
    if p != crate::family::default_width(k) {
        return Err(WidthError::Family(FamilyError::NotFamily));
    }
    let cert = grid_certificate(inst)?;
    cert.validate(&inst.graph).map_err(FamilyError::from)?;
    let q = cert.rows();
    let (lower, lower_kind) = if q >= 2 {
        (q, LowerBoundKind::GridSubgraph { q })
    } else {
        (0, LowerBoundKind::Trivial)
    };
    let sweep = column_sweep_decomposition(inst, &cert)?;
    let upper = validate_decomposition(&inst.graph, &sweep)?;
    let exact = if lower == upper {
        Some(lower)
    } else if inst.graph.vertex_count() <= EXACT_SOLVER_CAP {
        Some(exact_treewidth(&inst.graph)?.width)
    } else {
        None
    };
    debug_assert!(lower <= upper);
    Ok(WidthReport {
        lower,
        lower_kind,
        upper,
        upper_decomposition: sweep,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_default, build_instance};
    use crate::graph::make_grid;

    #[test]
    fn single_bag_width() {
        let g = make_grid(2, 2).unwrap();
        let d = TreeDecomposition::chain(vec![vec![0, 1, 2, 3]]);
        assert_eq!(validate_decomposition(&g, &d).unwrap(), 3);
    }

    #[test]
    fn path_bags_width_one() {
        let g = make_grid(1, 6).unwrap();
        let bags = (0..5).map(|i| vec![i, i + 1]).collect();
        let d = TreeDecomposition::chain(bags);
        assert_eq!(validate_decomposition(&g, &d).unwrap(), 1);
    }

    #[test]
    fn validator_rejects_each_violation() {
        let g = make_grid(1, 3).unwrap();

        let missing_vertex = TreeDecomposition::chain(vec![vec![0, 1]]);
        assert_eq!(
            validate_decomposition(&g, &missing_vertex),
            Err(DecompositionError::UncoveredVertex(2))
        );

        let missing_edge = TreeDecomposition::chain(vec![vec![0, 1], vec![2]]);
        assert_eq!(
            validate_decomposition(&g, &missing_edge),
            Err(DecompositionError::UncoveredEdge(1, 2))
        );

        let disconnected_occurrence =
            TreeDecomposition::chain(vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(
            validate_decomposition(&g, &disconnected_occurrence),
            Err(DecompositionError::DisconnectedOccurrence(0))
        );

        let not_a_tree = TreeDecomposition {
            shape: Shape::Tree,
            bags: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            links: vec![(0, 1), (1, 2), (2, 0)],
        };
        assert_eq!(
            validate_decomposition(&g, &not_a_tree),
            Err(DecompositionError::NotATree)
        );

        let star = TreeDecomposition {
            shape: Shape::Path,
            bags: vec![vec![0, 1], vec![1, 2], vec![0, 1], vec![0, 1]],
            links: vec![(0, 1), (0, 2), (0, 3)],
        };
        assert_eq!(
            validate_decomposition(&g, &star),
            Err(DecompositionError::NotAPath)
        );

        let empty = TreeDecomposition::chain(vec![]);
        assert_eq!(
            validate_decomposition(&g, &empty),
            Err(DecompositionError::NoBags)
        );
    }

    #[test]
    fn sweep_of_level_two() {
        let inst = build_default(2).unwrap();
        let cert = grid_certificate(&inst).unwrap();
        let d = column_sweep_decomposition(&inst, &cert).unwrap();
        assert_eq!(d.bags.len(), 6);
        assert!(d.bags.iter().all(|b| b.len() == 4));
        assert_eq!(validate_decomposition(&inst.graph, &d).unwrap(), 3);
    }

    #[test]
    fn sweep_widths_match_side_length() {
        for k in 2..=4 {
            let inst = build_default(k).unwrap();
            let cert = grid_certificate(&inst).unwrap();
            let d = column_sweep_decomposition(&inst, &cert).unwrap();
            let w = validate_decomposition(&inst.graph, &d).unwrap();
            assert_eq!(w, (1 << k) - 1, "k={k}");
        }
    }

    #[test]
    fn sweep_requires_a_bijective_certificate() {
        let inst = build_default(2).unwrap();
        let partial = crate::family::GridCertificate::new(1, 2, vec![0, 1]).unwrap();
        assert!(matches!(
            column_sweep_decomposition(&inst, &partial),
            Err(WidthError::NotBijective)
        ));
    }

    #[test]
    fn sweep_handles_rectangles() {
        let inst = build_instance(2, 5).unwrap();
        let cert = grid_certificate(&inst).unwrap();
        let d = column_sweep_decomposition(&inst, &cert).unwrap();
        let w = validate_decomposition(&inst.graph, &d).unwrap();
        assert_eq!(w, 3);
    }

    #[test]
    fn exact_widths_of_known_graphs() {
        let tree = Graph::new(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]).unwrap();
        let tw = exact_treewidth(&tree).unwrap();
        assert_eq!(tw.width, 1);
        assert_eq!(validate_decomposition(&tree, &tw.decomposition).unwrap(), 1);

        let path = make_grid(1, 6).unwrap();
        let pw = exact_pathwidth(&path).unwrap();
        assert_eq!(pw.width, 1);
        assert_eq!(validate_decomposition(&path, &pw.decomposition).unwrap(), 1);

        let grid = make_grid(3, 3).unwrap();
        assert_eq!(exact_treewidth(&grid).unwrap().width, 3);
        assert_eq!(exact_pathwidth(&grid).unwrap().width, 3);

        let g2 = build_default(2).unwrap();
        let tw = exact_treewidth(&g2.graph).unwrap();
        let pw = exact_pathwidth(&g2.graph).unwrap();
        assert_eq!(tw.width, 3);
        assert_eq!(pw.width, 3);
        assert_eq!(
            validate_decomposition(&g2.graph, &tw.decomposition).unwrap(),
            3
        );
        assert_eq!(
            validate_decomposition(&g2.graph, &pw.decomposition).unwrap(),
            3
        );
    }

    #[test]
    fn exact_solver_cap() {
        let g = make_grid(4, 5).unwrap();
        assert!(matches!(
            exact_treewidth(&g),
            Err(WidthError::TooLarge(20, EXACT_SOLVER_CAP))
        ));
        assert!(matches!(
            exact_pathwidth(&g),
            Err(WidthError::TooLarge(20, EXACT_SOLVER_CAP))
        ));
    }

    #[test]
    fn report_for_small_members() {
        let r = width_report(&build_default(2).unwrap()).unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (3, 3, Some(3)));

        let r = width_report(&build_default(4).unwrap()).unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (15, 15, Some(15)));

        let r = width_report(&build_default(1).unwrap()).unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (0, 0, Some(0)));
        assert_eq!(r.lower_kind, LowerBoundKind::Trivial);
    }

    #[test]
    fn pathwidth_dominates_treewidth() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..30 {
            let n = 3 + (next() % 6) as usize;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if next() % 100 < 40 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let tw = exact_treewidth(&g).unwrap();
            let pw = exact_pathwidth(&g).unwrap();
            assert!(pw.width >= tw.width);
            assert_eq!(
                validate_decomposition(&g, &tw.decomposition).unwrap(),
                tw.width
            );
            assert_eq!(
                validate_decomposition(&g, &pw.decomposition).unwrap(),
                pw.width
            );
        }
    }
}
