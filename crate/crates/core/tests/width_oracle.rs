//! Brute-force cross-checks for the exact width solvers on tiny graphs:
//! minimize over every vertex permutation, computing elimination width
//! for tree-width and prefix boundary size for path-width. Entirely
//! independent of the subset dynamic programs.

use std::collections::BTreeSet;

use linkage_core::{exact_pathwidth, exact_treewidth, make_grid, Graph};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap(&mut items, n, &mut out);
    out
}

fn heap(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Width of one elimination order: eliminate in sequence, connecting the
/// remaining neighbors of each eliminated vertex into a clique.
fn elimination_width(g: &Graph, order: &[usize]) -> usize {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let mut width = 0;
    for &v in order {
        let nbrs: Vec<usize> = adj[v].iter().copied().filter(|&u| alive[u]).collect();
        width = width.max(nbrs.len());
        for &a in &nbrs {
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
            adj[a].remove(&v);
        }
        alive[v] = false;
    }
    width
}

/// Cost of one layout: the largest number of laid-out vertices that still
/// have a neighbor outside the prefix.
fn separation_width(g: &Graph, layout: &[usize]) -> usize {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    let mut width = 0;
    for &v in layout {
        inside[v] = true;
        let boundary = (0..n)
            .filter(|&u| inside[u] && g.neighbors(u).iter().any(|&w| !inside[w]))
            .count();
        width = width.max(boundary);
    }
    width
}

fn brute_treewidth(g: &Graph) -> usize {
    permutations(g.vertex_count())
        .iter()
        .map(|p| elimination_width(g, p))
        .min()
        .unwrap()
}

fn brute_pathwidth(g: &Graph) -> usize {
    permutations(g.vertex_count())
        .iter()
        .map(|p| separation_width(g, p))
        .min()
        .unwrap()
}

#[test]
fn solvers_match_brute_force_on_named_graphs() {
    let cases: Vec<Graph> = vec![
        make_grid(1, 7).unwrap(),
        make_grid(2, 3).unwrap(),
        Graph::new(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]).unwrap(),
        Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
        Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap(),
        Graph::new(5, &[]).unwrap(),
    ];
    for (i, g) in cases.iter().enumerate() {
        assert_eq!(
            exact_treewidth(g).unwrap().width,
            brute_treewidth(g),
            "case {i} tree-width"
        );
        assert_eq!(
            exact_pathwidth(g).unwrap().width,
            brute_pathwidth(g),
            "case {i} path-width"
        );
    }
}

#[test]
fn solvers_match_brute_force_on_seeded_graphs() {
    let mut state = 0xdeadbeefcafef00du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for trial in 0..25 {
        let n = 4 + (next() % 4) as usize;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if next() % 100 < 45 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, &edges).unwrap();
        assert_eq!(
            exact_treewidth(&g).unwrap().width,
            brute_treewidth(&g),
            "trial {trial} tree-width of {g:?}"
        );
        assert_eq!(
            exact_pathwidth(&g).unwrap().width,
            brute_pathwidth(&g),
            "trial {trial} path-width of {g:?}"
        );
    }
}

#[test]
fn width_is_monotone_under_subgraphs() {
    let mut state = 0x0123456789abcdefu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..20 {
        let n = 5 + (next() % 5) as usize;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if next() % 100 < 50 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, &edges).unwrap();
        let tw = exact_treewidth(&g).unwrap().width;
        let pw = exact_pathwidth(&g).unwrap().width;

        // Induced subgraph from a vertex deletion.
        let (h, _) = g.delete_vertex((next() % n as u64) as usize).unwrap();
        assert!(exact_treewidth(&h).unwrap().width <= tw);
        assert!(exact_pathwidth(&h).unwrap().width <= pw);

        // Spanning subgraph from an edge deletion.
        if !edges.is_empty() {
            let skip = (next() % edges.len() as u64) as usize;
            let fewer: Vec<_> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &e)| e)
                .collect();
            let h = Graph::new(n, &fewer).unwrap();
            assert!(exact_treewidth(&h).unwrap().width <= tw);
            assert!(exact_pathwidth(&h).unwrap().width <= pw);
        }
    }
}
