//! Breadth-first colouring by message passing.

use crate::state::State;
use crate::values::{mult, Value};

/// `darkest(m)`: the darkest colour occurring in the multiset `m`
/// (black, then grey, then white), or `undef` when none occurs.
pub fn darkest(s: &State, args: &[Value]) -> Value {
    for name in ["black", "grey", "white"] {
        let c = s.constant(name);
        if c != Value::Undef && mult(&c, &args[0]) > 0 {
            return c;
        }
    }
    Value::Undef
}

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;

use super::{blank_state, put};
use crate::machine::Machine;
use crate::values::Multiset;

pub type Graph = BTreeSet<(usize, usize)>;

pub fn vertex(i: usize) -> Value {
    Value::atom(&format!("v{i}"))
}

fn colour_atom(name: &str) -> Value {
    Value::atom(name)
}

/// Vertices `0..n`, undirected `edges`, and `source` grey. Phase starts at map.
pub fn bfs_state(m: &Machine, n: usize, edges: &Graph, source: usize) -> State {
    let names = ["white", "grey", "black", "map", "shuffle", "reduce"];
    let carrier = (0..n).map(vertex).chain(names.iter().map(|c| colour_atom(c)));
    let mut s = blank_state(&m.vocab, carrier);
    for c in names {
        put(&mut s, c, &[], colour_atom(c));
    }
    put(&mut s, "phase", &[], colour_atom("map"));
    for i in 0..n {
        put(&mut s, "f_V", &[vertex(i)], Value::Bool(true));
        let nb = edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .map(vertex);
        put(&mut s, "neighb", &[vertex(i)], Value::multiset(Multiset::from_values(nb)));
        let c = if i == source { "grey" } else { "white" };
        put(&mut s, "colour", &[vertex(i)], colour_atom(c));
    }
    s
}

pub fn colour_of(s: &State, i: usize) -> String {
    match s.lookup_name("colour", &[vertex(i)]).expect("colour is unary") {
        Value::Atom(a) => a.label().map(|l| l.to_string()).unwrap_or_default(),
        v => format!("{v}"),
    }
}

/// Breadth-first distances from `source`; `None` for unreachable vertices.
pub fn oracle(n: usize, edges: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in edges {
            let v = if a == u { b } else if b == u { a } else { continue };
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// The colour the oracle predicts after `rounds` complete map, shuffle and
/// reduce rounds.
pub fn expected_colour(dist: Option<usize>, rounds: usize) -> &'static str {
    match dist {
        Some(d) if d < rounds => "black",
        Some(d) if d == rounds => "grey",
        _ => "white",
    }
}

/// A random simple undirected graph stored with `a < b`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.insert((a, b));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fixture;
    use rand::SeedableRng;

    fn check_rounds(n: usize, g: &Graph, source: usize) {
        let m = fixture("bfs").unwrap().machine();
        let t = m.run(&bfs_state(&m, n, g, source), 3 * (n + 2)).unwrap();
        let dist = oracle(n, g, source);
        for (k, st) in t.states.iter().enumerate().step_by(3) {
            for (i, d) in dist.iter().enumerate() {
                assert_eq!(colour_of(st, i), expected_colour(*d, k / 3), "{g:?} vertex {i} round {}", k / 3);
            }
        }
        for (i, d) in dist.iter().enumerate() {
            let want = if d.is_some() { "black" } else { "white" };
            assert_eq!(colour_of(t.last(), i), want);
        }
    }

    #[test]
    fn shipped_path_colours_b_before_c() {
        let f = fixture("bfs").unwrap();
        let m = f.machine();
        let t = m.run(&f.state(&m), 9).unwrap();
        let c = |k: usize, v: &str| t.states[k].lookup_name("colour", &[Value::atom(v)]).unwrap();
        assert_eq!(c(3, "b"), Value::atom("grey"));
        assert_eq!(c(3, "c"), Value::atom("white"));
        assert_eq!(c(6, "c"), Value::atom("grey"));
        assert_eq!(c(9, "d"), Value::atom("white"));
    }

    #[test]
    fn path_levels() {
        check_rounds(4, &Graph::from([(0, 1), (1, 2), (2, 3)]), 0);
    }

    #[test]
    fn random_graphs_match_the_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.gen_range(1..=8);
            let g = random_graph(&mut rng, n, 0.3);
            let src = rng.gen_range(0..n);
            check_rounds(n, &g, src);
        }
    }
}
