//! Alternating Turing machine evaluation by tree expansion.
//!
//! A configuration is `(q, (left, right))`. `left` lists the cells left of
//! the head, nearest first; `right` starts at the head cell. Lists are
//! right-nested pairs ending in `undef`. The blank symbol and the two head
//! moves are read from the nullary symbols `blank`, `moveL` and `moveR`.

use crate::state::State;
use crate::values::{first, second, Value};

/// `state(c)`: the control state of a configuration.
pub fn conf_state(_: &State, args: &[Value]) -> Value {
    first(&args[0])
}

/// `read(c)`: the symbol under the head.
pub fn conf_read(s: &State, args: &[Value]) -> Value {
    let right = second(&second(&args[0]));
    match right {
        Value::Pair(p) => p.0.clone(),
        Value::Undef => s.constant("blank"),
        _ => Value::Undef,
    }
}

/// `nextConf(c, q, a, m)`: write `a`, move by `m`, enter `q`.
pub fn next_conf(s: &State, args: &[Value]) -> Value {
    let [c, q, a, m] = args else { return Value::Undef };
    let Value::Pair(_) = c else { return Value::Undef };
    let tape = second(c);
    let (left, right) = (first(&tape), second(&tape));
    let rest = match &right {
        Value::Pair(p) => p.1.clone(),
        _ => Value::Undef,
    };
    let written = Value::pair(a.clone(), rest.clone());
    let (left, right) = if *m == s.constant("moveL") {
        match &left {
            Value::Pair(p) => (p.1.clone(), Value::pair(p.0.clone(), written)),
            _ => (Value::Undef, Value::pair(s.constant("blank"), written)),
        }
    } else if *m == s.constant("moveR") {
        (Value::pair(a.clone(), left), rest)
    } else {
        return Value::Undef;
    };
    Value::pair(q.clone(), Value::pair(left, right))
}

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{blank_state, put, FixtureError};
use crate::machine::Machine;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Exists,
    Forall,
    Accept,
    Reject,
}

/// Control states are `0..kinds.len()` with 0 the start state. Symbols are
/// `0..symbols` with 0 the blank. Moves are 0 (left) and 1 (right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atm {
    pub kinds: Vec<Kind>,
    pub symbols: i64,
    /// `(q, a, q', a', move)`
    pub delta: BTreeSet<(i64, i64, i64, i64, i64)>,
}

pub fn root() -> Value {
    Value::atom("root")
}

/// The root node in the start configuration with the head on the first
/// input cell, and levels bounded by `depth`.
pub fn atm_state(m: &Machine, atm: &Atm, input: &[i64], depth: i64) -> State {
    let top = (atm.kinds.len() as i64).max(atm.symbols).max(2);
    let mut s = blank_state(&m.vocab, std::iter::once(root()).chain((0..top).map(Value::Int)));
    put(&mut s, "blank", &[], Value::Int(0));
    put(&mut s, "moveL", &[], Value::Int(0));
    put(&mut s, "moveR", &[], Value::Int(1));
    put(&mut s, "maxDepth", &[], Value::Int(depth));
    for (q, k) in atm.kinds.iter().enumerate() {
        let name = match k {
            Kind::Exists => "Q_exists",
            Kind::Forall => "Q_forall",
            Kind::Accept => "Q_acc",
            Kind::Reject => "Q_rej",
        };
        put(&mut s, name, &[Value::Int(q as i64)], Value::Bool(true));
    }
    for &(q, a, q2, a2, mv) in &atm.delta {
        let args = [q, a, q2, a2, mv].map(Value::Int);
        put(&mut s, "delta", &args, Value::Bool(true));
    }
    let right = input.iter().rev().fold(Value::Undef, |acc, &c| Value::pair(Value::Int(c), acc));
    let conf = Value::pair(Value::Int(0), Value::pair(Value::Undef, right));
    put(&mut s, "config", &[root()], conf);
    put(&mut s, "active", &[root()], Value::Bool(true));
    put(&mut s, "level", &[root()], Value::Int(0));
    s
}

pub fn root_value(s: &State) -> Value {
    s.lookup_name("value", &[root()]).expect("value is unary")
}

/// Acceptance by direct recursion over the computation tree, cut at
/// `depth`: `Ok(verdict)`, or `Inconclusive` when the cut hides it.
pub fn oracle(atm: &Atm, input: &[i64], depth: i64) -> Result<bool, FixtureError> {
    let tape: BTreeMap<i64, i64> = input.iter().enumerate().map(|(i, &c)| (i as i64, c)).collect();
    node(atm, 0, &tape, 0, 0, depth).ok_or(FixtureError::Inconclusive)
}

fn node(atm: &Atm, q: i64, tape: &BTreeMap<i64, i64>, head: i64, level: i64, depth: i64) -> Option<bool> {
    let kind = atm.kinds[q as usize];
    match kind {
        Kind::Accept => return Some(true),
        Kind::Reject => return Some(false),
        _ if level >= depth => return None,
        _ => {}
    }
    let read = tape.get(&head).copied().unwrap_or(0);
    let kids: Vec<Option<bool>> = atm
        .delta
        .iter()
        .filter(|t| t.0 == q && t.1 == read)
        .map(|&(_, _, q2, a2, mv)| {
            let mut t2 = tape.clone();
            t2.insert(head, a2);
            let h2 = if mv == 0 { head - 1 } else { head + 1 };
            node(atm, q2, &t2, h2, level + 1, depth)
        })
        .collect();
    let any = |b: bool| kids.contains(&Some(b));
    let all = |b: bool| kids.iter().all(|k| *k == Some(b));
    if kind == Kind::Exists {
        if any(true) {
            Some(true)
        } else if all(false) {
            Some(false)
        } else {
            None
        }
    } else if kids.is_empty() || any(false) {
        Some(false)
    } else if all(true) {
        Some(true)
    } else {
        None
    }
}

/// A random machine with `states` control states (the start state is
/// existential or universal) and at most `per_pair` transitions for each
/// state and symbol.
pub fn random_atm(rng: &mut impl Rng, states: usize, symbols: i64, per_pair: usize) -> Atm {
    let kinds: Vec<Kind> = (0..states)
        .map(|q| match rng.gen_range(if q == 0 { 0..2 } else { 0..4 }) {
            0 => Kind::Exists,
            1 => Kind::Forall,
            2 => Kind::Accept,
            _ => Kind::Reject,
        })
        .collect();
    let mut delta = BTreeSet::new();
    for q in 0..states as i64 {
        if matches!(kinds[q as usize], Kind::Accept | Kind::Reject) {
            continue;
        }
        for a in 0..symbols {
            for _ in 0..rng.gen_range(0..=per_pair) {
                delta.insert((q, a, rng.gen_range(0..states as i64), rng.gen_range(0..symbols), rng.gen_range(0..2)));
            }
        }
    }
    Atm { kinds, symbols, delta }
}

/// Every word of length at most `len` over the non-blank symbols.
pub fn inputs(symbols: i64, len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let next: Vec<Vec<i64>> = frontier
            .iter()
            .flat_map(|w: &Vec<i64>| {
                (1..symbols).map(move |c| {
                    let mut w2 = w.clone();
                    w2.push(c);
                    w2
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
