//! First-order sentences over finite structures with one binary relation
//! `E` and one unary predicate `P`, evaluated bottom-up in parallel.
//!
//! The machine's carrier holds one node per pair of a subformula occurrence
//! and an assignment to that subformula's free variables. Atomic nodes carry
//! their truth value in `eval`; the machine propagates values upward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use super::{blank_state, put};
use crate::machine::Machine;
use crate::state::State;
use crate::values::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Edge(usize, usize),
    Pred(usize),
    Eq(usize, usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            Formula::Edge(a, b) | Formula::Eq(a, b) => BTreeSet::from([*a, *b]),
            Formula::Pred(a) => BTreeSet::from([*a]),
            Formula::Not(f) => f.free_vars(),
            Formula::And(f, g) | Formula::Or(f, g) => &f.free_vars() | &g.free_vars(),
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                let mut v = f.free_vars();
                v.remove(x);
                v
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Edge(a, b) => write!(f, "E(x{a}, x{b})"),
            Formula::Pred(a) => write!(f, "P(x{a})"),
            Formula::Eq(a, b) => write!(f, "x{a} = x{b}"),
            Formula::Not(g) => write!(f, "not ({g})"),
            Formula::And(g, h) => write!(f, "({g}) and ({h})"),
            Formula::Or(g, h) => write!(f, "({g}) or ({h})"),
            Formula::Exists(x, g) => write!(f, "exists x{x} ({g})"),
            Formula::Forall(x, g) => write!(f, "forall x{x} ({g})"),
        }
    }
}

/// Elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub pred: BTreeSet<usize>,
}

type Assignment = BTreeMap<usize, usize>;

/// Tarskian truth by direct recursion.
pub fn holds(st: &Structure, f: &Formula, env: &Assignment) -> bool {
    match f {
        Formula::Edge(a, b) => st.edges.contains(&(env[a], env[b])),
        Formula::Pred(a) => st.pred.contains(&env[a]),
        Formula::Eq(a, b) => env[a] == env[b],
        Formula::Not(g) => !holds(st, g, env),
        Formula::And(g, h) => holds(st, g, env) && holds(st, h, env),
        Formula::Or(g, h) => holds(st, g, env) || holds(st, h, env),
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let mut each = (0..st.n).map(|a| {
                let mut e2 = env.clone();
                e2.insert(*x, a);
                holds(st, g, &e2)
            });
            if matches!(f, Formula::Exists(..)) {
                each.any(|b| b)
            } else {
                each.all(|b| b)
            }
        }
    }
}

pub fn oracle(st: &Structure, sentence: &Formula) -> bool {
    holds(st, sentence, &Assignment::new())
}

pub fn node(i: usize) -> Value {
    Value::atom(&format!("n{i}"))
}

const CONNECTIVES: [&str; 5] = ["AND", "OR", "NOT", "EXISTS", "FORALL"];

/// A subformula (by address) with the assignment to its free variables.
type NodeKey = (*const Formula, Vec<(usize, usize)>);

struct Builder<'a> {
    st: &'a Structure,
    s: State,
    nodes: BTreeMap<NodeKey, Value>,
}

impl Builder<'_> {
    fn visit(&mut self, f: &Formula, env: &Assignment) -> Value {
        let fv = f.free_vars();
        let key: Vec<(usize, usize)> = env.iter().filter(|(x, _)| fv.contains(x)).map(|(x, a)| (*x, *a)).collect();
        let id = (f as *const Formula, key);
        if let Some(v) = self.nodes.get(&id) {
            return v.clone();
        }
        let me = node(self.nodes.len());
        self.nodes.insert(id, me.clone());
        self.s.add_element(me.clone()).expect("an atom");
        put(&mut self.s, "subForm", std::slice::from_ref(&me), Value::Bool(true));
        let children: Vec<Value> = match f {
            Formula::Edge(..) | Formula::Pred(_) | Formula::Eq(..) => {
                put(&mut self.s, "Atomic", std::slice::from_ref(&me), Value::Bool(true));
                put(&mut self.s, "eval", std::slice::from_ref(&me), Value::Bool(holds(self.st, f, env)));
                Vec::new()
            }
            Formula::Not(g) => {
                self.connective(&me, "mainConnect", "NOT");
                vec![self.visit(g, env)]
            }
            Formula::And(g, h) | Formula::Or(g, h) => {
                let c = if matches!(f, Formula::And(..)) { "AND" } else { "OR" };
                self.connective(&me, "mainConnect", c);
                vec![self.visit(g, env), self.visit(h, env)]
            }
            Formula::Exists(x, g) | Formula::Forall(x, g) => {
                let q = if matches!(f, Formula::Exists(..)) { "EXISTS" } else { "FORALL" };
                self.connective(&me, "mainQuant", q);
                (0..self.st.n)
                    .map(|a| {
                        let mut e2 = env.clone();
                        e2.insert(*x, a);
                        self.visit(g, &e2)
                    })
                    .collect()
            }
        };
        for c in children {
            put(&mut self.s, "superForm", &[me.clone(), c], Value::Bool(true));
        }
        me
    }

    fn connective(&mut self, me: &Value, sym: &str, c: &str) {
        put(&mut self.s, sym, std::slice::from_ref(me), Value::atom(&c.to_lowercase()));
    }
}

/// The evaluation state for `sentence` over `st`; the root node is `@n0`.
pub fn fo_state(m: &Machine, st: &Structure, sentence: &Formula) -> State {
    let mut s = blank_state(&m.vocab, CONNECTIVES.iter().map(|c| Value::atom(&c.to_lowercase())));
    for c in CONNECTIVES {
        put(&mut s, c, &[], Value::atom(&c.to_lowercase()));
    }
    let mut b = Builder { st, s, nodes: BTreeMap::new() };
    b.visit(sentence, &Assignment::new());
    b.s
}

pub fn root_value(s: &State) -> Value {
    s.lookup_name("truthVal", &[node(0)]).expect("truthVal is unary")
}

/// A random formula of the given depth over variables `0..vars`, closed
/// by existential or universal quantifiers for its remaining free variables.
pub fn random_sentence(rng: &mut impl Rng, depth: usize, vars: usize) -> Formula {
    let mut f = random_formula(rng, depth, vars);
    for x in f.free_vars() {
        f = if rng.gen_bool(0.5) { Formula::Exists(x, Box::new(f)) } else { Formula::Forall(x, Box::new(f)) };
    }
    f
}

fn random_formula(rng: &mut impl Rng, depth: usize, vars: usize) -> Formula {
    let v = |rng: &mut dyn rand::RngCore| rng.gen_range(0..vars);
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Formula::Edge(v(rng), v(rng)),
            1 => Formula::Pred(v(rng)),
            _ => Formula::Eq(v(rng), v(rng)),
        };
    }
    let sub = |rng: &mut _| Box::new(random_formula(rng, depth - 1, vars));
    match rng.gen_range(0..6) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Exists(v(rng), sub(rng)),
        4 => Formula::Forall(v(rng), sub(rng)),
        _ => random_formula(rng, 0, vars),
    }
}

pub fn random_structure(rng: &mut impl Rng, n: usize) -> Structure {
    let mut edges = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(0.4) {
                edges.insert((a, b));
            }
        }
    }
    let pred = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Structure { n, edges, pred }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fixture;
    use crate::machine::Halt;
    use crate::surface::print_state;
    use rand::SeedableRng;

    fn engine(st: &Structure, f: &Formula) -> Value {
        let m = fixture("fo").unwrap().machine();
        let t = m.run(&fo_state(&m, st, f), 64).unwrap();
        assert_eq!(t.halt, Halt::Fixpoint);
        root_value(t.last())
    }

    /// `exists x0 forall x1 E(x0, x1)`
    fn dominating() -> Formula {
        Formula::Exists(0, Box::new(Formula::Forall(1, Box::new(Formula::Edge(0, 1)))))
    }

    fn two_elements() -> Structure {
        Structure { n: 2, edges: BTreeSet::from([(0, 0), (0, 1)]), pred: BTreeSet::new() }
    }

    #[test]
    fn dominating_vertex() {
        let st = two_elements();
        assert!(oracle(&st, &dominating()));
        assert_eq!(engine(&st, &dominating()), Value::Bool(true));
        let st2 = Structure { edges: BTreeSet::from([(0, 1), (1, 0)]), ..st };
        assert_eq!(engine(&st2, &dominating()), Value::Bool(false));
    }

    #[test]
    fn shipped_state_is_the_generated_one() {
        let f = fixture("fo").unwrap();
        let m = f.machine();
        let built = fo_state(&m, &two_elements(), &dominating());
        assert_eq!(print_state(&f.state(&m)), print_state(&built));
    }

    #[test]
    fn random_sentences_match_the_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let f = random_sentence(&mut rng, 3, 2);
            let n = rng.gen_range(1..=4);
            let st = random_structure(&mut rng, n);
            assert_eq!(engine(&st, &f), Value::Bool(oracle(&st, &f)), "{f} on {st:?}");
        }
    }
}
