//! Generation and certification of a family of hard vertex-disjoint-paths
//! instances, together with the machinery needed to check their structural
//! claims: grid-subgraph certificates, exact tree-width and path-width
//! solvers, Menger-style vertex cuts, and two independent exact engines for
//! deciding, counting and enumerating disjoint-paths solutions.

pub mod cut;
pub mod family;
pub mod graph;
pub mod solve;
pub mod width;

pub use cut::{is_k_connected, min_vertex_cut, CutError, CutResult};
pub use family::{
    build_default, build_instance, canonical_linkage, control_instance, default_width,
    edges_by_recursion, expected_edges, expected_vertices, grid_certificate, non_grid_chords,
    ControlKind, DppInstance, FamilyError, GridCertificate, Origin, VertexInfo,
};
pub use graph::{
    make_grid, validate_linkage, Graph, GraphError, IdMap, Linkage, LinkageError, Path, Pattern,
    VertexId,
};
pub use solve::{
    column_cut_prune, irrelevant_scan, solve, solve_backtrack_with_pruning,
    solve_with_decomposition, vital_check, Budget, ColumnCutOracle, Count, Engine, EngineKind,
    Mode, Outcome, ScanReport, SolveError, SolveReport, SolveStats, VitalVerdict,
};
pub use width::{
    column_sweep_decomposition, exact_pathwidth, exact_treewidth, validate_decomposition,
    width_report, DecompositionError, ExactWidth, LowerBoundKind, Shape, TreeDecomposition,
    WidthError, WidthReport, EXACT_SOLVER_CAP,
};
