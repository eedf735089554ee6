//! Counting DP over a path decomposition. A state describes, for every
//! vertex of the current bag, its role in the partial linkage: untouched,
//! saturated, or the open end of a path fragment. Open ends are either
//! matched with the fragment's other open end inside the bag, or labeled
//! with the terminal the fragment's far side is already pinned to. A
//! fragment closes when its two ends turn out to be the two terminals of
//! one pair; anything else dies. Forgetting a vertex forces it into a
//! final role, so surviving full runs are exactly the linkages with the
//! terminal pattern, and summing multiplicities counts them.

use std::collections::HashMap;
use std::time::Instant;

use crate::family::DppInstance;
use crate::graph::VertexId;
use crate::width::TreeDecomposition;

use super::{
    Budget, Count, EngineKind, Mode, Outcome, SolveError, SolveReport, SolveStats,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Free,
    Done,
    /// Open end, fragment's other open end sits at this slot index.
    Matched(u8),
    /// Open end, fragment's far side is finalized at terminal `code`.
    Anchored(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VClass {
    Plain,
    /// Terminal of a pair with two distinct ends; `code = 2 * pair + side`.
    Proper(u8),
    /// Terminal of a one-vertex pair; it must stay untouched.
    Degenerate,
}

enum Op {
    Introduce(VertexId),
    IntroduceEdge(VertexId, VertexId),
    Forget(VertexId),
}

type State = Vec<Slot>;

pub(super) fn run(
    inst: &DppInstance,
    mode: Mode,
    td: &TreeDecomposition,
    budget: &Budget,
) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let classes = classes_of(inst)?;
    let ops = op_chain(inst, td);

    let mut bag: Vec<VertexId> = Vec::new();
    let mut table: HashMap<State, u64> = HashMap::new();
    table.insert(Vec::new(), 1);
    let mut peak = 1usize;
    let mut capped = false;

    for op in &ops {
        match *op {
            Op::Introduce(v) => {
                let pos = bag.binary_search(&v).unwrap_err();
                bag.insert(pos, v);
                let mut next = HashMap::with_capacity(table.len());
                for (mut state, c) in table.drain() {
                    for slot in state.iter_mut() {
                        if let Slot::Matched(i) = slot {
                            if *i as usize >= pos {
                                *i += 1;
                            }
                        }
                    }
                    state.insert(pos, Slot::Free);
                    next.insert(state, c);
                }
                table = next;
            }
            Op::IntroduceEdge(u, v) => {
                let pu = bag.binary_search(&u).expect("edge endpoint in bag");
                let pv = bag.binary_search(&v).expect("edge endpoint in bag");
                let cu = classes[u];
                let cv = classes[v];
                let mut next = HashMap::with_capacity(table.len() * 2);
                for (state, c) in table.drain() {
                    if let Some(used) = apply_edge(&state, pu, pv, cu, cv) {
                        *next.entry(used).or_insert(0) += c;
                    }
                    *next.entry(state).or_insert(0) += c;
                }
                table = next;
            }
            Op::Forget(v) => {
                let pos = bag.binary_search(&v).expect("forgotten vertex in bag");
                bag.remove(pos);
                let ok = |slot: Slot| match classes[v] {
                    VClass::Plain => matches!(slot, Slot::Free | Slot::Done),
                    VClass::Proper(_) => matches!(slot, Slot::Done),
                    VClass::Degenerate => matches!(slot, Slot::Free),
                };
                let mut next = HashMap::with_capacity(table.len());
                for (mut state, c) in table.drain() {
                    if !ok(state[pos]) {
                        continue;
                    }
                    state.remove(pos);
                    for slot in state.iter_mut() {
                        if let Slot::Matched(i) = slot {
                            debug_assert_ne!(*i as usize, pos);
                            if *i as usize > pos {
                                *i -= 1;
                            }
                        }
                    }
                    *next.entry(state).or_insert(0) += c;
                }
                table = next;
            }
        }
        peak = peak.max(table.len());
        if table.len() > budget.max_states {
            capped = true;
            break;
        }
        if let Some(limit) = budget.time_limit {
            if started.elapsed() > limit {
                capped = true;
                break;
            }
        }
        if table.is_empty() {
            break;
        }
    }

    let outcome = if capped {
        Outcome::Capped
    } else {
        let total: u64 = table.values().sum();
        debug_assert!(table.len() <= 1, "final states have no slots left");
        if total == 0 {
            Outcome::Unsolvable
        } else {
            match mode {
                Mode::Decide | Mode::Count => Outcome::Solvable(Count::Exact(total)),
                Mode::Enumerate(_) => unreachable!("enumeration never reaches the DP"),
            }
        }
    };
    Ok(SolveReport {
        outcome,
        engine: EngineKind::TdDp,
        solutions: Vec::new(),
        budget_exhausted: capped,
        stats: SolveStats {
            nodes: 0,
            peak_states: peak,
            elapsed: started.elapsed(),
        },
    })
}

fn classes_of(inst: &DppInstance) -> Result<Vec<VClass>, SolveError> {
    if inst.terminals.len() > 100 {
        return Err(SolveError::Resource("too many terminal pairs".into()));
    }
    let mut classes = vec![VClass::Plain; inst.graph.vertex_count()];
    for (i, &(s, t)) in inst.terminals.iter().enumerate() {
        if s == t {
            classes[s] = VClass::Degenerate;
        } else {
            classes[s] = VClass::Proper((2 * i) as u8);
            classes[t] = VClass::Proper((2 * i + 1) as u8);
        }
    }
    Ok(classes)
}

/// Lays the validated path decomposition out as an introduce/edge/forget
/// chain. Each edge is introduced exactly once, when its later endpoint
/// arrives in the bag.
fn op_chain(inst: &DppInstance, td: &TreeDecomposition) -> Vec<Op> {
    let order = walk_order(td);
    let mut ops = Vec::new();
    let mut current: Vec<VertexId> = Vec::new();
    let mut edges_introduced = 0usize;
    for &b in &order {
        let mut target = td.bags[b].clone();
        target.sort_unstable();
        target.dedup();
        for &v in current.iter() {
            if target.binary_search(&v).is_err() {
                ops.push(Op::Forget(v));
            }
        }
        current.retain(|v| target.binary_search(v).is_ok());
        for &v in &target {
            if current.binary_search(&v).is_err() {
                let pos = current.binary_search(&v).unwrap_err();
                current.insert(pos, v);
                ops.push(Op::Introduce(v));
                for &u in inst.graph.neighbors(v) {
                    if u != v && current.binary_search(&u).is_ok() {
                        ops.push(Op::IntroduceEdge(v, u));
                        edges_introduced += 1;
                    }
                }
            }
        }
    }
    for &v in &current {
        ops.push(Op::Forget(v));
    }
    debug_assert_eq!(edges_introduced, inst.graph.edge_count());
    ops
}

/// Bag visiting order along the path shape: start at an endpoint of the
/// link chain and walk to the other end.
fn walk_order(td: &TreeDecomposition) -> Vec<usize> {
    let nb = td.bags.len();
    if nb <= 1 {
        return (0..nb).collect();
    }
    let mut adj = vec![Vec::new(); nb];
    for &(a, b) in &td.links {
        adj[a].push(b);
        adj[b].push(a);
    }
    let start = (0..nb).find(|&i| adj[i].len() <= 1).unwrap_or(0);
    let mut order = Vec::with_capacity(nb);
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        order.push(cur);
        let next = adj[cur].iter().copied().find(|&x| x != prev);
        match next {
            Some(nxt) => {
                prev = cur;
                cur = nxt;
            }
            None => break,
        }
    }
    debug_assert_eq!(order.len(), nb);
    order
}

/// One end of the fragment being formed or extended by an edge.
enum End {
    Open(usize),
    Anchor(u8),
}

/// Applies one edge to a state, or `None` when doing so cannot lead to a
/// valid linkage (degree overflow, premature cycle, mismatched pairs).
fn apply_edge(state: &State, pu: usize, pv: usize, cu: VClass, cv: VClass) -> Option<State> {
    // Both ends of one fragment joining up would close a cycle.
    if state[pu] == Slot::Matched(pv as u8) {
        return None;
    }
    let mut s = state.clone();
    let eu = take_end(&mut s, pu, cu)?;
    let ev = take_end(&mut s, pv, cv)?;
    match (eu, ev) {
        (End::Open(a), End::Open(b)) => {
            s[a] = Slot::Matched(b as u8);
            s[b] = Slot::Matched(a as u8);
        }
        (End::Open(a), End::Anchor(code)) | (End::Anchor(code), End::Open(a)) => {
            s[a] = Slot::Anchored(code);
        }
        (End::Anchor(c1), End::Anchor(c2)) => {
            // Closing a fragment: its ends must be the two terminals of
            // one pair.
            if c1 / 2 != c2 / 2 || c1 == c2 {
                return None;
            }
        }
    }
    Some(s)
}

fn take_end(s: &mut State, p: usize, class: VClass) -> Option<End> {
    match s[p] {
        Slot::Free => match class {
            VClass::Plain => Some(End::Open(p)),
            VClass::Proper(code) => {
                s[p] = Slot::Done;
                Some(End::Anchor(code))
            }
            VClass::Degenerate => None,
        },
        Slot::Matched(far) => {
            s[p] = Slot::Done;
            Some(End::Open(far as usize))
        }
        Slot::Anchored(code) => {
            s[p] = Slot::Done;
            Some(End::Anchor(code))
        }
        Slot::Done => None,
    }
}
