//! Bounded-exploration witnesses: extraction from rules, evaluation,
//! coincidence and similarity of states, and the sampled plausibility check.
//!
//! A witness term is a closed comprehension `{{ (t0, ..., tn) | guard }}`
//! whose binder lists every free variable of the head and the guard. The
//! head tuple is encoded with right-nested pairs, so a one-element head is
//! just the term itself.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::machine::{canonical_updates, Machine};
use crate::rules::Rule;
use crate::state::{State, UpdateSet, Vocabulary};
use crate::terms::{eval, eval_closed, Env, Term};
use crate::values::Value;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessTerm {
    pub head: Vec<Term>,
    pub guard: Term,
    term: Term,
}

impl WitnessTerm {
    pub fn new(head: Vec<Term>, guard: Term) -> WitnessTerm {
        let mut vars = Vec::new();
        for t in head.iter().chain([&guard]) {
            for v in t.free_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let term = Term::compr(Term::tuple(&head), vars, guard.clone());
        WitnessTerm { head, guard, term }
    }

    /// The comprehension itself.
    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn vars(&self) -> &[Arc<str>] {
        match &self.term {
            Term::Compr(c) => &c.binder.vars,
            _ => unreachable!("witness terms are comprehensions"),
        }
    }

    /// Number of head components.
    pub fn arity(&self) -> usize {
        self.head.len()
    }

    /// Drops `true and` conjuncts from the guard.
    pub fn simplified(&self) -> WitnessTerm {
        WitnessTerm::new(self.head.clone(), drop_true(&self.guard))
    }

    pub fn render(&self, vocab: &Vocabulary) -> String {
        self.term.render(vocab)
    }

    pub fn eval(&self, s: &State) -> Value {
        eval_closed(s, &self.term)
    }
}

fn drop_true(t: &Term) -> Term {
    match t {
        Term::App(f, args) if *f == crate::state::sym::AND => {
            let (a, b) = (drop_true(&args[0]), drop_true(&args[1]));
            match (a == Term::tt(), b == Term::tt()) {
                (true, _) => b,
                (_, true) => a,
                _ => Term::and(a, b),
            }
        }
        Term::App(f, args) => Term::App(*f, args.iter().map(drop_true).collect()),
        _ => t.clone(),
    }
}

/// A finite set of witness terms in extraction order, without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessSet {
    pub terms: Vec<WitnessTerm>,
}

impl WitnessSet {
    pub fn new(terms: impl IntoIterator<Item = WitnessTerm>) -> WitnessSet {
        let mut w = WitnessSet::default();
        for t in terms {
            w.insert(t);
        }
        w
    }

    pub fn insert(&mut self, t: WitnessTerm) {
        if !self.terms.contains(&t) {
            self.terms.push(t);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &WitnessTerm> {
        self.terms.iter()
    }

    /// Removes the term at `i`; used to build deliberately weakened sets.
    pub fn without(&self, i: usize) -> WitnessSet {
        let mut terms = self.terms.clone();
        terms.remove(i);
        WitnessSet { terms }
    }

    pub fn simplified(&self) -> WitnessSet {
        WitnessSet::new(self.terms.iter().map(WitnessTerm::simplified))
    }

    /// Adds `{{ t_j | exists rest (guard) }}` for every head component of
    /// every term, with the binder restricted to the component's variables.
    pub fn subterm_closure(&self) -> WitnessSet {
        let mut out = self.clone();
        for w in &self.terms {
            if w.arity() < 2 {
                continue;
            }
            for t in &w.head {
                let keep = t.free_vars();
                let rest: Vec<Arc<str>> = w.vars().iter().filter(|v| !keep.contains(v)).cloned().collect();
                let guard = if rest.is_empty() { w.guard.clone() } else { Term::exists(rest, w.guard.clone()) };
                out.insert(WitnessTerm::new(vec![t.clone()], guard));
            }
        }
        out
    }
}

/// Witness terms of a closed rule: assignments contribute their
/// `(rhs, args...)` tuple, conditionals their guard and `{{ true | true }}`,
/// and `forall` conjoins its guard and its negation to the body's terms.
/// An `import c` body sees `c` replaced by the key term
/// `(site, (v1, (v2, ...)))` over the enclosing bound variables.
pub fn extract_witness(rule: &Rule) -> WitnessSet {
    let mut out = Vec::new();
    extract(rule, &mut Vec::new(), &mut out);
    WitnessSet::new(out.into_iter().map(|(h, g)| WitnessTerm::new(h, g)))
}

type Raw = (Vec<Term>, Term);

fn extract(r: &Rule, scope: &mut Vec<Arc<str>>, out: &mut Vec<Raw>) {
    match r {
        Rule::Assign { args, rhs, .. } => {
            let mut head = vec![rhs.clone()];
            head.extend(args.iter().cloned());
            out.push((head, Term::tt()));
        }
        Rule::Par(rs) => rs.iter().for_each(|r| extract(r, scope, out)),
        Rule::If { guard, body } => {
            out.push((vec![guard.clone()], Term::tt()));
            out.push((vec![Term::tt()], Term::tt()));
            let mut inner = Vec::new();
            extract(body, scope, &mut inner);
            out.extend(inner.into_iter().map(|(h, g)| (h, Term::and(g, guard.clone()))));
        }
        Rule::Forall { binder, body } => {
            let n = scope.len();
            scope.extend(binder.vars.iter().cloned());
            let mut inner = Vec::new();
            extract(body, scope, &mut inner);
            scope.truncate(n);
            let phi = &binder.guard;
            for (h, g) in &inner {
                out.push((h.clone(), Term::and(g.clone(), phi.clone())));
            }
            for (h, g) in inner {
                out.push((h, Term::and(g, Term::not(phi.clone()))));
            }
        }
        Rule::Import { var, body, site } => {
            let env: Vec<Term> = scope.iter().map(|v| Term::Var(v.clone())).collect();
            let key = Term::pair(Term::Lit(*site as i64), Term::tuple(&env));
            scope.push(var.clone());
            let mut inner = Vec::new();
            extract(body, scope, &mut inner);
            scope.pop();
            let map = BTreeMap::from([(var.clone(), key)]);
            out.extend(inner.into_iter().map(|(h, g)| (h.iter().map(|t| t.subst(&map)).collect(), g.subst(&map))));
        }
    }
}

/// Value of every witness term at `s`, in set order.
pub fn eval_witness(w: &WitnessSet, s: &State) -> Vec<Value> {
    w.iter().map(|t| t.eval(s)).collect()
}

/// Do the states agree on every witness term?
pub fn coincide(s1: &State, s2: &State, w: &WitnessSet) -> bool {
    w.iter().all(|t| t.eval(s1) == t.eval(s2))
}

/// The equality pattern among witness values: `pattern[i][j]` for `i < j`.
pub fn equality_pattern(w: &WitnessSet, s: &State) -> Vec<bool> {
    let vals = eval_witness(w, s);
    let mut out = Vec::new();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            out.push(vals[i] == vals[j]);
        }
    }
    out
}

/// Same equality pattern among witness values in both states.
pub fn w_similar(s1: &State, s2: &State, w: &WitnessSet) -> bool {
    equality_pattern(w, s1) == equality_pattern(w, s2)
}

/// A closed Boolean term that holds exactly in the states W-similar to `s`:
/// the conjunction over `i < j` of `αi = αj` or `αi != αj`.
pub fn similarity_formula(s: &State, w: &WitnessSet) -> Term {
    let pattern = equality_pattern(w, s);
    let mut k = 0;
    let mut parts = Vec::new();
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            let e = Term::eq(w.terms[i].term().clone(), w.terms[j].term().clone());
            parts.push(if pattern[k] { e } else { Term::not(e) });
            k += 1;
        }
    }
    Term::and_all(parts)
}

/// Every value occurring as a head component of some witness term at `s`.
pub fn critical_values(s: &State, w: &WitnessSet) -> BTreeSet<Value> {
    let mut out = BTreeSet::new();
    for t in w.iter() {
        if let Value::Multiset(m) = t.eval(s) {
            for (v, _) in m.entries() {
                if let Some(parts) = v.untuple(t.arity()) {
                    out.extend(parts);
                }
            }
        }
    }
    out
}

/// Values of an update set (arguments and new values) that are not
/// critical. Fresh atoms count through their import keys.
pub fn non_critical(
    updates: &UpdateSet,
    keys: &BTreeMap<crate::values::Atom, Value>,
    critical: &BTreeSet<Value>,
) -> Vec<Value> {
    update_values(updates, keys).into_iter().filter(|v| !critical.contains(v)).collect()
}

/// The values of `wanted` that are not critical at `s`. Terms with fewer
/// bound variables are searched first, and the search stops as soon as
/// every value has been seen, so expensive terms are usually skipped.
pub fn uncritical_among(s: &State, w: &WitnessSet, wanted: impl IntoIterator<Item = Value>) -> BTreeSet<Value> {
    let mut pending: BTreeSet<Value> = wanted.into_iter().collect();
    let mut order: Vec<&WitnessTerm> = w.iter().collect();
    order.sort_by_key(|t| t.vars().len());
    for t in order {
        if pending.is_empty() {
            break;
        }
        let Term::Compr(c) = t.term() else { unreachable!("witness terms are comprehensions") };
        let _ = c.binder.for_each(s, &mut Env::new(), &mut |env| {
            for h in &t.head {
                pending.remove(&eval(s, h, env));
            }
            if pending.is_empty() {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    }
    pending
}

/// Arguments and new values of an update set, with fresh atoms replaced by
/// their import keys.
pub fn update_values(updates: &UpdateSet, keys: &BTreeMap<crate::values::Atom, Value>) -> BTreeSet<Value> {
    let mut out = BTreeSet::new();
    for u in updates.updates.iter().filter(|u| u.loc.sym != crate::state::sym::RESERVE) {
        for v in u.loc.args.iter().chain([&u.val]) {
            out.insert(match v {
                Value::Atom(a) => keys.get(a).unwrap_or(v).clone(),
                _ => v.clone(),
            });
        }
    }
    out
}

/// A coinciding pair whose steps differ.
#[derive(Clone, Debug)]
pub struct Violation {
    pub index: usize,
    pub left: Result<UpdateSet, String>,
    pub right: Result<UpdateSet, String>,
}

#[derive(Clone, Debug, Default)]
pub struct ExplorationReport {
    pub pairs: usize,
    pub coinciding: usize,
    /// Coinciding pairs where a step failed on one side only.
    pub errors: usize,
    pub violations: Vec<Violation>,
}

impl ExplorationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every pair that coincides over `w`, compares the two update sets
/// (imports compared through their keys).
pub fn check_bounded_exploration(m: &Machine, w: &WitnessSet, pairs: &[(State, State)]) -> ExplorationReport {
    let mut rep = ExplorationReport { pairs: pairs.len(), ..Default::default() };
    for (i, (a, b)) in pairs.iter().enumerate() {
        if !coincide(a, b, w) {
            continue;
        }
        rep.coinciding += 1;
        let step = |s: &State| m.updates(s).map(|o| canonical_updates(&o)).map_err(|e| e.to_string());
        let (l, r) = (step(a), step(b));
        if l.is_err() != r.is_err() {
            rep.errors += 1;
        }
        let differ = match (&l, &r) {
            (Ok(x), Ok(y)) => x != y,
            (Err(_), Err(_)) => false,
            _ => true,
        };
        if differ {
            rep.violations.push(Violation { index: i, left: l, right: r });
        }
    }
    rep
}

/// Does `v` occur as a head component of some witness term at `s`?
pub fn is_critical(s: &State, w: &WitnessSet, v: &Value) -> bool {
    uncritical_among(s, w, [v.clone()]).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_machine, parse_state_with, parse_term};

    const COMPLEMENT: &str = include_str!("../examples/gallery/complement.pasm");

    fn graph(m: &Machine, n: usize, edges: &[(usize, usize)]) -> State {
        let mut src = String::from("carrier");
        for i in 0..n {
            src += &format!(" @v{i}");
        }
        for i in 0..n {
            src += &format!(" fun V(@v{i}) = true");
        }
        for (a, b) in edges {
            src += &format!(" fun E(@v{a}, @v{b}) = true");
        }
        parse_state_with(&src, Some(&m.vocab)).unwrap()
    }

    #[test]
    fn complement_witness_matches_the_six_terms() {
        let m = parse_machine(COMPLEMENT).unwrap();
        let w = extract_witness(&m.rule).simplified();
        let expect = [
            "{{ (not E(x, y), x, y) | x, y with x != y and (V(x) and V(y)) }}",
            "{{ x != y | x, y with V(x) and V(y) }}",
            "{{ true | x, y with V(x) and V(y) }}",
            "{{ (not E(x, y), x, y) | x, y with x != y and not (V(x) and V(y)) }}",
            "{{ x != y | x, y with not (V(x) and V(y)) }}",
            "{{ true | x, y with not (V(x) and V(y)) }}",
        ];
        let got: BTreeSet<Term> = w.iter().map(|t| t.term().clone()).collect();
        let want: BTreeSet<Term> = expect.iter().map(|e| parse_term(e, &m.vocab, &[]).unwrap()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn coincidence_and_similarity() {
        let m = parse_machine(COMPLEMENT).unwrap();
        let w = extract_witness(&m.rule);
        let k3 = graph(&m, 3, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        let e3 = graph(&m, 3, &[]);
        assert!(coincide(&k3, &k3, &w));
        assert!(!coincide(&k3, &e3, &w));
        // One vertex versus three: the distinct-pair terms are empty on one side only.
        let one = graph(&m, 1, &[]);
        assert!(!w_similar(&one, &k3, &w));
        assert!(w_similar(&k3, &e3, &w));
        let phi = similarity_formula(&k3, &w);
        assert!(eval_closed(&k3, &phi).is_true());
        assert!(!eval_closed(&one, &phi).is_true());
    }

    #[test]
    fn truncated_witness_misses_a_difference() {
        let m = parse_machine(COMPLEMENT).unwrap();
        let w = extract_witness(&m.rule);
        let a = graph(&m, 2, &[(0, 1)]);
        let b = graph(&m, 2, &[(1, 0)]);
        assert!(check_bounded_exploration(&m, &w, &[(a.clone(), b.clone())]).ok());
        let weak = WitnessSet::new(w.iter().filter(|t| t.arity() != 3).cloned());
        let rep = check_bounded_exploration(&m, &weak, &[(a, b)]);
        assert_eq!(rep.coinciding, 1);
        assert_eq!(rep.violations.len(), 1);
    }

    #[test]
    fn critical_values_of_k3() {
        let m = parse_machine(COMPLEMENT).unwrap();
        let w = extract_witness(&m.rule);
        let k3 = graph(&m, 3, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        let got = critical_values(&k3, &w);
        let mut want: BTreeSet<Value> = ["v0", "v1", "v2"].iter().map(|a| Value::atom(a)).collect();
        want.insert(Value::Bool(true));
        want.insert(Value::Bool(false));
        assert_eq!(got, want);
        let out = m.updates(&k3).unwrap();
        assert!(non_critical(&out.updates, &out.keys, &got).is_empty());
        let vals = update_values(&out.updates, &out.keys);
        assert!(uncritical_among(&k3, &w, vals).is_empty());
        let odd = Value::Int(7);
        assert_eq!(uncritical_among(&k3, &w, [odd.clone(), Value::Bool(true)]), BTreeSet::from([odd]));
    }

    #[test]
    fn constant_term_counts_one_instance() {
        let m = parse_machine(COMPLEMENT).unwrap();
        let s = graph(&m, 2, &[]);
        let t = WitnessTerm::new(vec![Term::tt()], Term::tt());
        assert_eq!(t.eval(&s).to_string(), "{{ true : 1 }}");
    }
}
