//! The generated instance family and its structural certificates.
//!
//! An instance of width parameter `p` and depth `k` starts from a path of
//! `p * 2^(k-1)` vertices (level 1) and repeatedly folds: step `j` adds a
//! fresh row of `m = p * 2^(k-j)` vertices (level `j`), joins consecutive
//! row vertices by path edges, and attaches row vertex `i` to positions
//! `i` and `2m + 1 - i` of the current bottom row. Each level contributes
//! one terminal pair, its row ends. Folding a `1 x (2m)` strip in half
//! around the new row yields a grid-shaped layout, which is what the
//! [`GridCertificate`] records.

use std::collections::BTreeSet;
use thiserror::Error;

use crate::graph::{Graph, Linkage, Path, Pattern, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("k and p must be positive")]
    InvalidParameter,
    #[error("vertex {0} lies outside the certificate layout")]
    OutsideCertificate(VertexId),
    #[error("instance too large: {0} vertices requested")]
    TooLarge(u128),
    #[error("unknown control instance '{0}'")]
    UnknownControl(String),
    #[error("operation requires a generated family instance")]
    NotFamily,
    #[error("certificate invalid: {0}")]
    Certificate(#[from] CertificateError),
    #[error("edge {{{u}, {v}}} spans certificate columns {cu} and {cv}")]
    ChordAcrossColumns {
        u: VertexId,
        v: VertexId,
        cu: usize,
        cv: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("cell count {0} does not match rows x cols")]
    WrongCellCount(usize),
    #[error("cell ({r}, {c}) maps to out-of-range vertex {id}")]
    CellOutOfRange { r: usize, c: usize, id: VertexId },
    #[error("vertex {0} appears in more than one cell")]
    DuplicateCell(VertexId),
    #[error("grid edge between cells ({r1}, {c1}) and ({r2}, {c2}) is missing: {{{u}, {v}}} not in graph")]
    MissingGridEdge {
        r1: usize,
        c1: usize,
        r2: usize,
        c2: usize,
        u: VertexId,
        v: VertexId,
    },
}

/// Construction coordinates of a vertex: which added row it belongs to
/// (level, 1-based) and its position within that row (index, 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexInfo {
    pub level: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlKind {
    GridOnePair,
    GridTwoPairLoose,
    PathInfeasible,
}

impl ControlKind {
    pub fn name(self) -> &'static str {
        match self {
            ControlKind::GridOnePair => "grid-one-pair",
            ControlKind::GridTwoPairLoose => "grid-two-pair-loose",
            ControlKind::PathInfeasible => "path-infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Built by [`build_instance`] with the given parameters.
    Family { k: usize, p: usize },
    Control(ControlKind),
    Custom,
}

/// A disjoint-paths instance: a graph plus ordered terminal pairs, with
/// per-vertex construction metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DppInstance {
    pub name: String,
    pub graph: Graph,
    pub terminals: Vec<(VertexId, VertexId)>,
    pub info: Vec<VertexInfo>,
    pub origin: Origin,
}

impl DppInstance {
    pub fn custom(
        name: impl Into<String>,
        graph: Graph,
        terminals: Vec<(VertexId, VertexId)>,
        info: Vec<VertexInfo>,
    ) -> Self {
        DppInstance {
            name: name.into(),
            graph,
            terminals,
            info,
            origin: Origin::Custom,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminal_pattern(&self) -> Pattern {
        Pattern::from_pairs(self.terminals.iter().copied())
    }

    pub fn family_params(&self) -> Option<(usize, usize)> {
        match self.origin {
            Origin::Family { k, p } => Some((k, p)),
            _ => None,
        }
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.iter().any(|&(s, t)| s == v || t == v)
    }
}

/// Default width parameter: `2^k - 1`.
pub fn default_width(k: usize) -> usize {
    (1usize << k) - 1
}

const MAX_VERTICES: u128 = 5_000_000;

/// Builds the level-`k`, width-`p` instance. Vertex ids are assigned by
/// sorting (level, index) with level 1 first, so level `j` occupies one
/// contiguous id block.
pub fn build_instance(k: usize, p: usize) -> Result<DppInstance, FamilyError> {
    if k == 0 || p == 0 {
        return Err(FamilyError::InvalidParameter);
    }
    if k >= 64 {
        return Err(FamilyError::TooLarge(u128::MAX));
    }
    let total = (p as u128) * ((1u128 << k) - 1);
    if total > MAX_VERTICES {
        return Err(FamilyError::TooLarge(total));
    }

    let level_len = |j: usize| p << (k - j);
    let mut offsets = vec![0usize; k + 2];
    for j in 1..=k {
        offsets[j + 1] = offsets[j] + level_len(j);
    }
    let n = offsets[k + 1];

    let mut info = Vec::with_capacity(n);
    for j in 1..=k {
        for i in 1..=level_len(j) {
            info.push(VertexInfo { level: j, index: i });
        }
    }

    let mut edges = Vec::new();
    // Level-1 path.
    for i in 0..level_len(1).saturating_sub(1) {
        edges.push((i, i + 1));
    }

    // Rows tracked as id sequences; both start as the level-1 path.
    let mut top: Vec<VertexId> = (0..level_len(1)).collect();
    let mut bottom = top.clone();

    for j in 2..=k {
        let m = level_len(j);
        assert_eq!(bottom.len(), 2 * m, "bottom row halves at each fold");
        let row = |i: usize| offsets[j] + i - 1;
        for i in 1..m {
            edges.push((row(i), row(i + 1)));
        }
        for i in 1..=m {
            edges.push((row(i), bottom[i - 1]));
            edges.push((row(i), bottom[2 * m - i]));
        }
        let new_top: Vec<VertexId> = top[..m].to_vec();
        let mut new_bottom: Vec<VertexId> = top[m..].to_vec();
        new_bottom.reverse();
        top = new_top;
        bottom = new_bottom;
        assert_contiguous_level1(&top);
        assert_contiguous_level1(&bottom);
    }

    let terminals: Vec<(VertexId, VertexId)> = (1..=k)
        .map(|j| (offsets[j], offsets[j] + level_len(j) - 1))
        .collect();

    let graph = Graph::new(n, &edges).expect("construction produces a simple edge list");
    let name = if p == default_width(k) {
        format!("G_{k}")
    } else {
        format!("G_{k}_p{p}")
    };
    Ok(DppInstance {
        name,
        graph,
        terminals,
        info,
        origin: Origin::Family { k, p },
    })
}

/// Builds the square member: width defaults to `2^k - 1`.
pub fn build_default(k: usize) -> Result<DppInstance, FamilyError> {
    if k == 0 || k >= 32 {
        return Err(FamilyError::InvalidParameter);
    }
    build_instance(k, default_width(k))
}

// Tracked rows stay contiguous runs of the level-1 path (ascending or
// descending); level-1 ids equal index - 1, so id arithmetic suffices.
fn assert_contiguous_level1(row: &[VertexId]) {
    for w in row.windows(2) {
        let step = w[1] as i64 - w[0] as i64;
        assert!(
            step == 1 || step == -1,
            "tracked row must stay a contiguous level-1 run"
        );
    }
}

/// The linkage where path `j` is exactly the level-`j` row in index
/// order. It spans the whole vertex set.
pub fn canonical_linkage(inst: &DppInstance) -> Result<Linkage, FamilyError> {
    let (k, p) = inst.family_params().ok_or(FamilyError::NotFamily)?;
    let mut paths = Vec::with_capacity(k);
    let mut offset = 0;
    for j in 1..=k {
        let len = p << (k - j);
        paths.push(Path::new((offset..offset + len).collect()));
        offset += len;
    }
    Ok(Linkage::new(paths))
}

/// An injection from grid cells to vertex ids witnessing that the grid
/// is a subgraph: grid-adjacent cells always map to graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCertificate {
    rows: usize,
    cols: usize,
    cells: Vec<VertexId>,
}

impl GridCertificate {
    pub fn new(rows: usize, cols: usize, cells: Vec<VertexId>) -> Result<Self, CertificateError> {
        if cells.len() != rows * cols {
            return Err(CertificateError::WrongCellCount(cells.len()));
        }
        Ok(GridCertificate { rows, cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Vertex at 1-based cell (r, c).
    pub fn cell(&self, r: usize, c: usize) -> VertexId {
        self.cells[(r - 1) * self.cols + (c - 1)]
    }

    /// Inverse map: vertex id to 1-based (row, col), when present.
    pub fn positions(&self, n: usize) -> Vec<Option<(usize, usize)>> {
        let mut pos = vec![None; n];
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                let v = self.cell(r, c);
                if v < n {
                    pos[v] = Some((r, c));
                }
            }
        }
        pos
    }

    pub fn column(&self, c: usize) -> Vec<VertexId> {
        (1..=self.rows).map(|r| self.cell(r, c)).collect()
    }

    pub fn is_bijective_for(&self, g: &Graph) -> bool {
        self.rows * self.cols == g.vertex_count()
    }

    /// Checks injectivity, id range, and that every grid-adjacent cell
    /// pair maps to an edge of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), CertificateError> {
        let n = g.vertex_count();
        let mut seen = vec![false; n];
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                let id = self.cell(r, c);
                if id >= n {
                    return Err(CertificateError::CellOutOfRange { r, c, id });
                }
                if seen[id] {
                    return Err(CertificateError::DuplicateCell(id));
                }
                seen[id] = true;
            }
        }
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                if c < self.cols && !g.has_edge(self.cell(r, c), self.cell(r, c + 1)) {
                    return Err(CertificateError::MissingGridEdge {
                        r1: r,
                        c1: c,
                        r2: r,
                        c2: c + 1,
                        u: self.cell(r, c),
                        v: self.cell(r, c + 1),
                    });
                }
                if r < self.rows && !g.has_edge(self.cell(r, c), self.cell(r + 1, c)) {
                    return Err(CertificateError::MissingGridEdge {
                        r1: r,
                        c1: c,
                        r2: r + 1,
                        c2: c,
                        u: self.cell(r, c),
                        v: self.cell(r + 1, c),
                    });
                }
            }
        }
        Ok(())
    }

    /// Set of edges used by the grid, normalized `(min, max)`.
    pub fn grid_edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        let mut set = BTreeSet::new();
        let mut put = |a: VertexId, b: VertexId| {
            set.insert((a.min(b), a.max(b)));
        };
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                if c < self.cols {
                    put(self.cell(r, c), self.cell(r, c + 1));
                }
                if r < self.rows {
                    put(self.cell(r, c), self.cell(r + 1, c));
                }
            }
        }
        set
    }
}

/// Rebuilds the fold layout of a family instance: a `(2^k - 1) x p`
/// certificate. Cells of the inner strip keep their column in the left
/// half and mirror into the bottom half on the right; the fresh row goes
/// in the middle.
pub fn grid_certificate(inst: &DppInstance) -> Result<GridCertificate, FamilyError> {
    let (k, p) = inst.family_params().ok_or(FamilyError::NotFamily)?;
    let level_len = |j: usize| p << (k - j);
    let mut offset = level_len(1);

    // 1 x (p * 2^(k-1)) base strip: the level-1 path.
    let mut rows: Vec<Vec<VertexId>> = vec![(0..level_len(1)).collect()];

    for j in 2..=k {
        let m = level_len(j);
        let h = rows.len();
        let mut next: Vec<Vec<VertexId>> = vec![vec![0; m]; 2 * h + 1];
        for (r, row) in rows.iter().enumerate() {
            for (c, &id) in row.iter().enumerate() {
                if c < m {
                    next[r][c] = id;
                } else {
                    // 1-based fold: (r, c) -> (2h + 2 - r, 2m + 1 - c).
                    next[2 * h - r][2 * m - 1 - c] = id;
                }
            }
        }
        for i in 0..m {
            next[h][i] = offset + i;
        }
        offset += m;
        rows = next;
    }

    let cols = p;
    let cells: Vec<VertexId> = rows.into_iter().flatten().collect();
    let cert = GridCertificate::new((1 << k) - 1, cols, cells)?;
    // Fails only when the instance does not match its declared origin.
    cert.validate(&inst.graph)?;
    Ok(cert)
}

/// All edges of the instance that are not grid edges under `cert`, each
/// annotated with the single column containing both endpoints.
pub fn non_grid_chords(
    inst: &DppInstance,
    cert: &GridCertificate,
) -> Result<Vec<((VertexId, VertexId), usize)>, FamilyError> {
    let grid = cert.grid_edges();
    let pos = cert.positions(inst.graph.vertex_count());
    let mut out = Vec::new();
    for (u, v) in inst.graph.edges() {
        if grid.contains(&(u, v)) {
            continue;
        }
        let (_, cu) = pos[u].ok_or(FamilyError::OutsideCertificate(u))?;
        let (_, cv) = pos[v].ok_or(FamilyError::OutsideCertificate(v))?;
        if cu != cv {
            return Err(FamilyError::ChordAcrossColumns { u, v, cu, cv });
        }
        out.push(((u, v), cu));
    }
    Ok(out)
}

/// Small fixed instances used as negative controls: solvable with many
/// solutions, or not solvable at all.
pub fn control_instance(name: &str) -> Result<DppInstance, FamilyError> {
    let kind = match name {
        "grid-one-pair" => ControlKind::GridOnePair,
        "grid-two-pair-loose" => ControlKind::GridTwoPairLoose,
        "path-infeasible" => ControlKind::PathInfeasible,
        other => return Err(FamilyError::UnknownControl(other.to_string())),
    };
    let (graph, terminals, info) = match kind {
        ControlKind::GridOnePair => {
            let g = crate::graph::make_grid(3, 3).expect("3x3 grid");
            (g, vec![(0, 2)], grid_info(3, 3))
        }
        ControlKind::GridTwoPairLoose => {
            let g = crate::graph::make_grid(3, 3).expect("3x3 grid");
            (g, vec![(0, 6), (2, 8)], grid_info(3, 3))
        }
        ControlKind::PathInfeasible => {
            let g = crate::graph::make_grid(1, 5).expect("path of five");
            (g, vec![(0, 4), (1, 3)], grid_info(1, 5))
        }
    };
    Ok(DppInstance {
        name: kind.name().to_string(),
        graph,
        terminals,
        info,
        origin: Origin::Control(kind),
    })
}

fn grid_info(rows: usize, cols: usize) -> Vec<VertexInfo> {
    let mut info = Vec::with_capacity(rows * cols);
    for r in 1..=rows {
        for c in 1..=cols {
            info.push(VertexInfo { level: r, index: c });
        }
    }
    info
}

/// Closed-form vertex count of the default-width instance.
pub fn expected_vertices(k: usize) -> usize {
    let q = (1usize << k) - 1;
    q * q
}

/// Closed-form edge count of the default-width instance.
pub fn expected_edges(k: usize) -> usize {
    let q = (1usize << k) - 1;
    q * ((1 << (k + 1)) - 3) - k
}

/// Edge count derived by the step recursion instead of the closed form:
/// a strip of width w has w - 1 edges and each fold over width m adds
/// 3m - 1.
pub fn edges_by_recursion(k: usize, p: usize) -> usize {
    let mut edges = (p << (k - 1)) - 1;
    for j in 2..=k {
        edges += 3 * (p << (k - j)) - 1;
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_linkage;

    #[test]
    fn base_case_is_a_path() {
        let inst = build_instance(1, 6).unwrap();
        assert_eq!(inst.graph.vertex_count(), 6);
        assert_eq!(inst.graph.edge_count(), 5);
        assert_eq!(inst.terminals, vec![(0, 5)]);
    }

    #[test]
    fn degenerate_single_vertex() {
        let inst = build_instance(1, 1).unwrap();
        assert_eq!(inst.graph.vertex_count(), 1);
        assert_eq!(inst.terminals, vec![(0, 0)]);
    }

    #[test]
    fn level_two_counts_and_edges() {
        let inst = build_instance(2, 3).unwrap();
        assert_eq!(inst.graph.vertex_count(), 9);
        assert_eq!(inst.graph.edge_count(), 13);
        assert_eq!(inst.terminals, vec![(0, 5), (6, 8)]);
        // Row 2 attaches to both ends of the level-1 path.
        assert!(inst.graph.has_edge(6, 0));
        assert!(inst.graph.has_edge(6, 5));
        assert!(inst.graph.has_edge(7, 1));
        assert!(inst.graph.has_edge(7, 4));
        assert!(inst.graph.has_edge(8, 2));
        assert!(inst.graph.has_edge(8, 3));
    }

    #[test]
    fn default_counts_match_both_derivations() {
        for k in 1..=6 {
            let inst = build_default(k).unwrap();
            assert_eq!(inst.graph.vertex_count(), expected_vertices(k), "k={k}");
            if k >= 1 {
                assert_eq!(inst.graph.edge_count(), expected_edges(k), "k={k}");
                assert_eq!(
                    inst.graph.edge_count(),
                    edges_by_recursion(k, default_width(k)),
                    "k={k}"
                );
            }
        }
        let g4 = build_default(4).unwrap();
        assert_eq!(g4.graph.vertex_count(), 225);
        assert_eq!(g4.graph.edge_count(), 431);
    }

    #[test]
    fn invalid_parameters() {
        assert_eq!(build_instance(0, 3), Err(FamilyError::InvalidParameter));
        assert_eq!(build_instance(3, 0), Err(FamilyError::InvalidParameter));
    }

    #[test]
    fn canonical_linkage_is_spanning_and_valid() {
        for k in 1..=6 {
            let inst = build_default(k).unwrap();
            let l = canonical_linkage(&inst).unwrap();
            let pat = validate_linkage(&inst.graph, &l).unwrap();
            assert_eq!(pat, inst.terminal_pattern(), "k={k}");
            assert_eq!(l.vertex_set().len(), inst.graph.vertex_count(), "k={k}");
            for (j, path) in l.paths.iter().enumerate() {
                let expect = default_width(k) << (k - (j + 1));
                assert_eq!(path.len(), expect, "k={k} level={}", j + 1);
            }
        }
        let g4 = build_default(4).unwrap();
        let sizes: Vec<usize> = canonical_linkage(&g4)
            .unwrap()
            .paths
            .iter()
            .map(|p| p.len())
            .collect();
        assert_eq!(sizes, vec![120, 60, 30, 15]);
    }

    #[test]
    fn canonical_linkage_requires_family() {
        let inst = control_instance("grid-one-pair").unwrap();
        assert_eq!(canonical_linkage(&inst), Err(FamilyError::NotFamily));
    }

    #[test]
    fn certificate_of_level_two() {
        let inst = build_default(2).unwrap();
        let cert = grid_certificate(&inst).unwrap();
        assert_eq!((cert.rows(), cert.cols()), (3, 3));
        assert_eq!(cert.column(1), vec![0, 6, 5]);
        assert_eq!(cert.column(2), vec![1, 7, 4]);
        assert_eq!(cert.column(3), vec![2, 8, 3]);
        cert.validate(&inst.graph).unwrap();
        assert!(cert.is_bijective_for(&inst.graph));

        let chords = non_grid_chords(&inst, &cert).unwrap();
        assert_eq!(chords, vec![((2, 3), 3)]);
    }

    #[test]
    fn certificate_validates_for_all_small_k() {
        for k in 1..=6 {
            let inst = build_default(k).unwrap();
            let cert = grid_certificate(&inst).unwrap();
            assert_eq!(cert.rows(), (1 << k) - 1, "k={k}");
            assert_eq!(cert.cols(), default_width(k), "k={k}");
            cert.validate(&inst.graph).unwrap();
            assert!(cert.is_bijective_for(&inst.graph), "k={k}");
            let chords = non_grid_chords(&inst, &cert).unwrap();
            assert_eq!(chords.len(), (1usize << k) - k - 1, "k={k}");
        }
    }

    #[test]
    fn level_three_certificate_shape() {
        let inst = build_default(3).unwrap();
        let cert = grid_certificate(&inst).unwrap();
        assert_eq!((cert.rows(), cert.cols()), (7, 7));
        assert_eq!(cert.grid_edges().len(), 84);
        let chords = non_grid_chords(&inst, &cert).unwrap();
        assert_eq!(chords.len(), 4);
    }

    #[test]
    fn rectangular_instances_also_fold() {
        let inst = build_instance(3, 30).unwrap();
        assert_eq!(inst.graph.vertex_count(), 210);
        let cert = grid_certificate(&inst).unwrap();
        assert_eq!((cert.rows(), cert.cols()), (7, 30));
        cert.validate(&inst.graph).unwrap();
        let chords = non_grid_chords(&inst, &cert).unwrap();
        assert_eq!(chords.len(), (1usize << 3) - 3 - 1);
    }

    #[test]
    fn chords_crossing_columns_are_reported() {
        // A diagonal in a plain grid layout is not a grid edge and joins
        // two different columns, which the chord scan must flag.
        let mut edges = crate::graph::make_grid(3, 3).unwrap().edges();
        edges.push((0, 4));
        let graph = Graph::new(9, &edges).unwrap();
        let inst = DppInstance::custom("diagonal", graph, vec![(0, 2)], grid_info(3, 3));
        let cert = GridCertificate::new(3, 3, (0..9).collect()).unwrap();
        cert.validate(&inst.graph).unwrap();
        assert_eq!(
            non_grid_chords(&inst, &cert),
            Err(FamilyError::ChordAcrossColumns {
                u: 0,
                v: 4,
                cu: 1,
                cv: 2
            })
        );
    }

    #[test]
    fn contraction_at_first_terminal() {
        let inst = build_default(3).unwrap();
        let s1 = inst.terminals[0].0;
        let (contracted, _) = inst.graph.contract_edge((s1, s1 + 1)).unwrap();
        assert_eq!(contracted.vertex_count(), 48);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_instance(3, 7).unwrap();
        let b = build_instance(3, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn controls_have_expected_shape() {
        let c = control_instance("grid-one-pair").unwrap();
        assert_eq!(c.graph.vertex_count(), 9);
        assert_eq!(c.terminals, vec![(0, 2)]);

        let c = control_instance("grid-two-pair-loose").unwrap();
        assert_eq!(c.terminals, vec![(0, 6), (2, 8)]);

        let c = control_instance("path-infeasible").unwrap();
        assert_eq!(c.graph.vertex_count(), 5);
        assert_eq!(c.terminals, vec![(0, 4), (1, 3)]);

        assert!(matches!(
            control_instance("nope"),
            Err(FamilyError::UnknownControl(_))
        ));
    }
}
