//! Graph complement on vertices `@v0, @v1, ...`.

use std::collections::BTreeSet;

use crate::machine::Machine;
use crate::state::State;
use crate::values::Value;

use super::{blank_state, put};

pub type Edges = BTreeSet<(usize, usize)>;

pub fn vertex(i: usize) -> Value {
    Value::atom(&format!("v{i}"))
}

/// A directed graph; an undirected edge is two directed ones.
pub fn graph_state(m: &Machine, n: usize, edges: &Edges) -> State {
    let mut s = blank_state(&m.vocab, (0..n).map(vertex));
    for i in 0..n {
        put(&mut s, "V", &[vertex(i)], Value::Bool(true));
    }
    for &(a, b) in edges {
        put(&mut s, "E", &[vertex(a), vertex(b)], Value::Bool(true));
    }
    s
}

/// The edge relation stored in a state over `n` vertices.
pub fn edges_of(s: &State, n: usize) -> Edges {
    let mut out = Edges::new();
    for a in 0..n {
        for b in 0..n {
            if s.lookup_name("E", &[vertex(a), vertex(b)]).is_ok_and(|v| v.is_true()) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Every ordered pair of distinct vertices not in `edges`.
pub fn oracle(n: usize, edges: &Edges) -> Edges {
    let mut out = Edges::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && !edges.contains(&(a, b)) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// All loopless directed graphs on `n` vertices.
/// Ordered pairs of distinct vertices.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect()
}

pub fn all_graphs(n: usize) -> Vec<Edges> {
    let pairs = all_pairs(n);
    (0..1u64 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| *p).collect())
        .collect()
}

/// Symmetric closure of a list of undirected edges.
pub fn undirected(pairs: &[(usize, usize)]) -> Edges {
    pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
}
