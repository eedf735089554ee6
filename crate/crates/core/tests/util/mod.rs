//! Shared test helpers: an independent brute-force solution counter and a
//! deterministic instance generator. The counter enumerates every simple
//! path per terminal pair and combines pairwise-disjoint choices, so it
//! shares no code path with either engine.

use linkage_core::{DppInstance, Graph, VertexId};

pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

pub fn all_simple_paths(g: &Graph, s: VertexId, t: VertexId) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    if s == t {
        out.push(vec![s]);
        return out;
    }
    let mut on_path = vec![false; g.vertex_count()];
    let mut path = vec![s];
    on_path[s] = true;
    walk(g, t, &mut path, &mut on_path, &mut out);
    out
}

fn walk(
    g: &Graph,
    t: VertexId,
    path: &mut Vec<VertexId>,
    on_path: &mut Vec<bool>,
    out: &mut Vec<Vec<VertexId>>,
) {
    let head = *path.last().unwrap();
    for &v in g.neighbors(head) {
        if v == t {
            let mut full = path.clone();
            full.push(v);
            out.push(full);
        } else if !on_path[v] {
            on_path[v] = true;
            path.push(v);
            walk(g, t, path, on_path, out);
            path.pop();
            on_path[v] = false;
        }
    }
}

/// Number of solutions by exhaustive combination of per-pair path lists.
pub fn brute_count(g: &Graph, pairs: &[(VertexId, VertexId)]) -> u64 {
    let lists: Vec<Vec<Vec<VertexId>>> = pairs
        .iter()
        .map(|&(s, t)| all_simple_paths(g, s, t))
        .collect();
    let mut used = vec![false; g.vertex_count()];
    combine(&lists, 0, &mut used)
}

fn combine(lists: &[Vec<Vec<VertexId>>], i: usize, used: &mut Vec<bool>) -> u64 {
    if i == lists.len() {
        return 1;
    }
    let mut total = 0;
    'paths: for path in &lists[i] {
        for &v in path {
            if used[v] {
                continue 'paths;
            }
        }
        for &v in path {
            used[v] = true;
        }
        total += combine(lists, i + 1, used);
        for &v in path {
            used[v] = false;
        }
    }
    total
}

/// Random instance with at most `max_n` vertices and one to three
/// terminal pairs; occasionally a pair degenerates to a single vertex.
pub fn random_instance(rng: &mut SplitMix, max_n: usize) -> DppInstance {
    let n = 4 + (rng.below((max_n - 4) as u64 + 1) as usize);
    let density = 25 + rng.below(40);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.below(100) < density {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::new(n, &edges).unwrap();
    let k = 1 + rng.below(3) as usize;
    let mut free: Vec<VertexId> = (0..n).collect();
    let mut terminals = Vec::new();
    for _ in 0..k {
        if free.len() < 2 {
            break;
        }
        let s = free.remove(rng.below(free.len() as u64) as usize);
        let t = if rng.below(10) == 0 {
            s
        } else {
            free.remove(rng.below(free.len() as u64) as usize)
        };
        terminals.push((s, t));
    }
    DppInstance::custom("random", graph, terminals, Vec::new())
}
