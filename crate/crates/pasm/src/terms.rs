//! Terms, their evaluation, and stratification into point and bridge terms.
//!
//! Multiset comprehensions and `forall` rules share a [`Binder`]: a list of
//! variables ranging over the primary carrier and a guard. Evaluation splits
//! the guard into its conjuncts and checks each one as soon as all the
//! variables it mentions are bound. When a conjunct is a table-backed
//! relation applied to the variable being bound, candidate values come from
//! that table instead of the whole carrier.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::state::{sym, State, SymId, SymKind, Vocabulary};
use crate::values::{self, Multiset, Value, FALSE};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Arc<str>),
    Lit(i64),
    App(SymId, Vec<Term>),
    Compr(Arc<Comprehension>),
}

/// `{{ head | guard }}` with the binder's variables ranging over the carrier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Comprehension {
    pub head: Term,
    pub binder: Binder,
}

/// Variables plus guard, with a precomputed evaluation plan.
#[derive(Clone, Debug)]
pub struct Binder {
    pub vars: Vec<Arc<str>>,
    pub guard: Term,
    plan: Plan,
}

impl PartialEq for Binder {
    fn eq(&self, o: &Binder) -> bool {
        self.vars == o.vars && self.guard == o.guard
    }
}
impl Eq for Binder {}
impl PartialOrd for Binder {
    fn partial_cmp(&self, o: &Binder) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Binder {
    fn cmp(&self, o: &Binder) -> std::cmp::Ordering {
        (&self.vars, &self.guard).cmp(&(&o.vars, &o.guard))
    }
}
impl std::hash::Hash for Binder {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.vars.hash(h);
        self.guard.hash(h);
    }
}

#[derive(Clone, Debug, Default)]
struct Plan {
    conjuncts: Vec<Term>,
    /// `level[i]`: number of bound binder variables after which conjunct `i` is checked.
    level: Vec<usize>,
    /// Per binder variable: (conjunct, argument position) pairs that can generate candidates.
    gens: Vec<Vec<(usize, usize)>>,
}

impl Binder {
    pub fn new(vars: Vec<Arc<str>>, guard: Term) -> Binder {
        let mut conjuncts = Vec::new();
        flatten_and(&guard, &mut conjuncts);
        let mut level = Vec::with_capacity(conjuncts.len());
        let mut gens = vec![Vec::new(); vars.len()];
        for (ci, c) in conjuncts.iter().enumerate() {
            let fv = c.free_vars();
            let lv = vars.iter().rposition(|v| fv.contains(v)).map_or(0, |i| i + 1);
            level.push(lv);
            if lv == 0 {
                continue;
            }
            let var = &vars[lv - 1];
            if let Term::App(_, args) = c {
                for (p, a) in args.iter().enumerate() {
                    if matches!(a, Term::Var(x) if x == var) {
                        gens[lv - 1].push((ci, p));
                    }
                }
            }
        }
        Binder { vars, guard, plan: Plan { conjuncts, level, gens } }
    }

    /// Calls `f` once per binding (in carrier order, outermost variable
    /// slowest) that satisfies the guard. `f` sees the extended environment.
    pub fn for_each<'s>(
        &self,
        s: &'s State,
        env: &mut Env,
        f: &mut dyn FnMut(&mut Env) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if !self.check_level(s, env, 0) {
            return ControlFlow::Continue(());
        }
        self.bind(s, env, 0, f)
    }

    fn check_level(&self, s: &State, env: &mut Env, lv: usize) -> bool {
        let p = &self.plan;
        (0..p.conjuncts.len()).filter(|&i| p.level[i] == lv).all(|i| eval(s, &p.conjuncts[i], env).is_true())
    }

    fn bind(
        &self,
        s: &State,
        env: &mut Env,
        depth: usize,
        f: &mut dyn FnMut(&mut Env) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == self.vars.len() {
            return f(env);
        }
        let var = self.vars[depth].clone();
        let mut visit = |v: &Value, env: &mut Env| -> ControlFlow<()> {
            env.push(var.clone(), v.clone());
            let r = if self.check_level(s, env, depth + 1) { self.bind(s, env, depth + 1, f) } else { ControlFlow::Continue(()) };
            env.pop();
            r
        };
        match self.candidates(s, env, depth) {
            Some(cands) => {
                for v in &cands {
                    visit(v, env)?;
                }
            }
            None => {
                for v in s.carrier() {
                    visit(v, env)?;
                }
            }
        }
        ControlFlow::Continue(())
    }

    /// Candidate values for the variable at `depth`, read off a relation table.
    fn candidates(&self, s: &State, env: &mut Env, depth: usize) -> Option<BTreeSet<Value>> {
        let vocab = s.vocab();
        for &(ci, pos) in &self.plan.gens[depth] {
            let Term::App(rel, args) = &self.plan.conjuncts[ci] else { continue };
            if !vocab.is_table(*rel) || !vocab.symbol(*rel).relational {
                continue;
            }
            let var = &self.vars[depth];
            // Other positions that do not mention the variable can be fixed now.
            let fixed: Vec<Option<Value>> = args
                .iter()
                .enumerate()
                .map(|(q, a)| (q != pos && !a.mentions(var)).then(|| eval(s, a, env)))
                .collect();
            let mut out = BTreeSet::new();
            for (key, val) in s.table(*rel) {
                if !val.is_true() {
                    continue;
                }
                if fixed.iter().zip(key).all(|(want, got)| want.as_ref().is_none_or(|w| w == got)) && s.in_carrier(&key[pos]) {
                    out.insert(key[pos].clone());
                }
            }
            return Some(out);
        }
        None
    }

    /// Whether at least one binding satisfies the guard.
    pub fn any(&self, s: &State, env: &mut Env) -> bool {
        self.for_each(s, env, &mut |_| ControlFlow::Break(())).is_break()
    }
}

fn flatten_and(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::App(f, args) if *f == sym::AND => {
            flatten_and(&args[0], out);
            flatten_and(&args[1], out);
        }
        _ => out.push(t.clone()),
    }
}

/// Variable bindings, innermost last.
#[derive(Clone, Default, Debug)]
pub struct Env {
    vars: Vec<(Arc<str>, Value)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Arc<str>, Value)>>(items: I) -> Env {
        Env { vars: items.into_iter().collect() }
    }

    pub fn push(&mut self, name: Arc<str>, v: Value) {
        self.vars.push((name, v));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| &**n == name).map(|(_, v)| v)
    }

    /// Bound values, outermost first.
    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.vars.iter().map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Evaluates a term. Unbound variables evaluate to `undef`; use
/// [`Term::free_vars`] first when that matters.
pub fn eval(s: &State, t: &Term, env: &mut Env) -> Value {
    match t {
        Term::Var(x) => env.get(x).cloned().unwrap_or(Value::Undef),
        Term::Lit(n) => Value::Int(*n),
        Term::Compr(c) => {
            let mut counts: BTreeMap<Value, u64> = BTreeMap::new();
            let _ = c.binder.for_each(s, env, &mut |env| {
                *counts.entry(eval(s, &c.head, env)).or_insert(0) += 1;
                ControlFlow::Continue(())
            });
            Value::multiset(Multiset::from_map(counts))
        }
        Term::App(f, args) => {
            match (*f, args.as_slice()) {
                (sym::AND, [a, b]) => {
                    let x = eval(s, a, env);
                    if !x.is_true() {
                        return FALSE;
                    }
                    return values::and(&x, &eval(s, b, env));
                }
                (sym::EQ, [Term::Compr(c), e]) | (sym::EQ, [e, Term::Compr(c)]) if is_empty_const(e) => {
                    return Value::Bool(!c.binder.any(s, env));
                }
                _ => {}
            }
            let vals: Vec<Value> = args.iter().map(|a| eval(s, a, env)).collect();
            s.apply(*f, &vals)
        }
    }
}

fn is_empty_const(t: &Term) -> bool {
    matches!(t, Term::App(f, a) if *f == sym::EMPTY && a.is_empty())
}

/// Evaluates a closed term in the empty environment.
pub fn eval_closed(s: &State, t: &Term) -> Value {
    eval(s, t, &mut Env::new())
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn app(f: SymId, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    pub fn constant(f: SymId) -> Term {
        Term::App(f, Vec::new())
    }

    pub fn tt() -> Term {
        Term::constant(sym::TRUE)
    }

    pub fn ff() -> Term {
        Term::constant(sym::FALSE)
    }

    pub fn undef() -> Term {
        Term::constant(sym::UNDEF)
    }

    pub fn empty() -> Term {
        Term::constant(sym::EMPTY)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        Term::App(sym::NOT, vec![t])
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::App(sym::AND, vec![a, b])
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::App(sym::OR, vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::App(sym::EQ, vec![a, b])
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::App(sym::PAIR, vec![a, b])
    }

    /// Left-leaning conjunction; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Term>>(items: I) -> Term {
        items.into_iter().reduce(Term::and).unwrap_or_else(Term::tt)
    }

    /// Left-leaning disjunction; `false` when empty.
    pub fn or_all<I: IntoIterator<Item = Term>>(items: I) -> Term {
        items.into_iter().reduce(Term::or).unwrap_or_else(Term::ff)
    }

    /// Right-nested pair term mirroring [`Value::tuple`].
    pub fn tuple(items: &[Term]) -> Term {
        match items {
            [] => Term::undef(),
            [x] => x.clone(),
            [x, rest @ ..] => Term::pair(x.clone(), Term::tuple(rest)),
        }
    }

    pub fn compr(head: Term, vars: Vec<Arc<str>>, guard: Term) -> Term {
        Term::Compr(Arc::new(Comprehension { head, binder: Binder::new(vars, guard) }))
    }

    /// `exists x̄ φ`, encoded as `{{ (x̄) | φ }} != emptyset`.
    pub fn exists(vars: Vec<Arc<str>>, phi: Term) -> Term {
        let head = Term::tuple(&vars.iter().map(|v| Term::Var(v.clone())).collect::<Vec<_>>());
        Term::not(Term::eq(Term::compr(head, vars, phi), Term::empty()))
    }

    /// `forall x̄ φ`, encoded as `{{ (x̄) | not φ }} = emptyset`.
    pub fn forall(vars: Vec<Arc<str>>, phi: Term) -> Term {
        let head = Term::tuple(&vars.iter().map(|v| Term::Var(v.clone())).collect::<Vec<_>>());
        Term::eq(Term::compr(head, vars, Term::not(phi)), Term::empty())
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Arc<str>>, out: &mut Vec<Arc<str>>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Lit(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Compr(c) => {
                let n = bound.len();
                bound.extend(c.binder.vars.iter().cloned());
                c.binder.guard.collect_free(bound, out);
                c.head.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// True when `x` occurs free.
    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => &**v == x,
            Term::Lit(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(x)),
            Term::Compr(c) => {
                !c.binder.vars.iter().any(|v| &**v == x) && (c.head.mentions(x) || c.binder.guard.mentions(x))
            }
        }
    }

    /// Replaces free occurrences of variables. Binders are not renamed, so
    /// replacement terms must not mention variables bound inside `self`.
    pub fn subst(&self, map: &BTreeMap<Arc<str>, Term>) -> Term {
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Lit(_) => self.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.subst(map)).collect()),
            Term::Compr(c) => {
                let mut inner = map.clone();
                for v in &c.binder.vars {
                    inner.remove(v);
                }
                if inner.is_empty() {
                    return self.clone();
                }
                Term::compr(c.head.subst(&inner), c.binder.vars.clone(), c.binder.guard.subst(&inner))
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lit(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.all_vars(out)),
            Term::Compr(c) => {
                out.extend(c.binder.vars.iter().cloned());
                c.head.all_vars(out);
                c.binder.guard.all_vars(out);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Lit(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Compr(c) => 1 + c.head.size() + c.binder.guard.size(),
        }
    }

    /// Symbols used, in no particular order.
    pub fn symbols(&self, out: &mut BTreeSet<SymId>) {
        match self {
            Term::Var(_) | Term::Lit(_) => {}
            Term::App(f, args) => {
                out.insert(*f);
                args.iter().for_each(|a| a.symbols(out));
            }
            Term::Compr(c) => {
                c.head.symbols(out);
                c.binder.guard.symbols(out);
            }
        }
    }

    pub fn render(&self, vocab: &Vocabulary) -> String {
        crate::surface::printer::term_to_string(vocab, self)
    }
}

/// Point terms denote carrier elements; everything else is a bridge term.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stratum {
    Point,
    Bridge,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("`{symbol}` is a {kind} symbol and needs point arguments, but argument {position} is a bridge term")]
    Stratification { symbol: String, kind: &'static str, position: usize },
    #[error("`{symbol}` expects {expected} arguments, got {got}")]
    Arity { symbol: String, expected: usize, got: usize },
}

/// Computes the stratum of a well-stratified term.
pub fn stratum(vocab: &Vocabulary, t: &Term) -> Result<Stratum, TermError> {
    match t {
        Term::Var(_) => Ok(Stratum::Point),
        Term::Lit(_) => Ok(Stratum::Bridge),
        Term::Compr(c) => {
            stratum(vocab, &c.head)?;
            stratum(vocab, &c.binder.guard)?;
            Ok(Stratum::Bridge)
        }
        Term::App(f, args) => {
            let s = vocab.symbol(*f);
            if s.arity != args.len() {
                return Err(TermError::Arity { symbol: s.name.to_string(), expected: s.arity, got: args.len() });
            }
            let mut strata = Vec::with_capacity(args.len());
            for a in args {
                strata.push(stratum(vocab, a)?);
            }
            match s.kind {
                SymKind::Primary | SymKind::Bridge => {
                    if let Some(p) = strata.iter().position(|x| *x == Stratum::Bridge) {
                        return Err(TermError::Stratification {
                            symbol: s.name.to_string(),
                            kind: s.kind.as_str(),
                            position: p,
                        });
                    }
                    Ok(if s.kind == SymKind::Primary { Stratum::Point } else { Stratum::Bridge })
                }
                SymKind::Secondary | SymKind::Background => Ok(Stratum::Bridge),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Symbol;
    use crate::values::{Atom, TRUE};
    use proptest::prelude::*;

    fn vocab() -> Arc<Vocabulary> {
        Arc::new(
            Vocabulary::new()
                .with(Symbol::new("V", 1, SymKind::Bridge).relational())
                .unwrap()
                .with(Symbol::new("E", 2, SymKind::Bridge).relational().dynamic())
                .unwrap()
                .with(Symbol::new("succ", 1, SymKind::Primary))
                .unwrap()
                .with(Symbol::new("c", 0, SymKind::Primary))
                .unwrap(),
        )
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> State {
        let mut s = State::new(vocab());
        for i in 0..n {
            let a = Value::atom(&format!("v{i}"));
            s.add_element(a.clone()).unwrap();
            s.set_by_name("V", vec![a], TRUE).unwrap();
        }
        for &(i, j) in edges {
            s.set_by_name("E", vec![Value::atom(&format!("v{i}")), Value::atom(&format!("v{j}"))], TRUE).unwrap();
        }
        s
    }

    fn e(x: &str, y: &str, v: &Vocabulary) -> Term {
        Term::app(v.get("E").unwrap(), vec![Term::var(x), Term::var(y)])
    }

    fn names(xs: &[&str]) -> Vec<Arc<str>> {
        xs.iter().map(|x| Arc::from(*x)).collect()
    }

    #[test]
    fn counts_edges_with_multiplicity() {
        let s = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let v = s.vocab().clone();
        let t = Term::compr(Term::tt(), names(&["x", "y"]), e("x", "y", &v));
        let m = eval_closed(&s, &t);
        assert_eq!(values::mult(&TRUE, &m), 3);
        let t2 = Term::compr(Term::var("x"), names(&["x", "y"]), e("x", "y", &v));
        assert_eq!(eval_closed(&s, &t2).as_multiset().unwrap().distinct(), 3);
    }

    #[test]
    fn quantifier_encodings() {
        let s = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let v = s.vocab().clone();
        let every_vertex_has_successor =
            Term::forall(names(&["x"]), Term::exists(names(&["y"]), e("x", "y", &v)));
        assert_eq!(eval_closed(&s, &every_vertex_has_successor), TRUE);
        let s2 = graph(3, &[(0, 1)]);
        assert_eq!(eval_closed(&s2, &every_vertex_has_successor), FALSE);
        let loop_exists = Term::exists(names(&["x"]), e("x", "x", &v));
        assert_eq!(eval_closed(&s, &loop_exists), FALSE);
    }

    #[test]
    fn empty_binder_list_checks_guard_once() {
        let s = graph(2, &[]);
        let t = Term::compr(Term::Lit(7), vec![], Term::tt());
        assert_eq!(eval_closed(&s, &t), values::singleton(Value::Int(7)));
        let f = Term::compr(Term::Lit(7), vec![], Term::ff());
        assert_eq!(eval_closed(&s, &f), Value::empty_multiset());
    }

    #[test]
    fn unbound_variables_are_undef() {
        let s = graph(1, &[]);
        assert_eq!(eval_closed(&s, &Term::var("z")), Value::Undef);
    }

    #[test]
    fn free_vars_and_subst() {
        let v = vocab();
        let t = Term::and(e("x", "y", &v), Term::exists(names(&["y"]), e("y", "z", &v)));
        assert_eq!(t.free_vars(), names(&["x", "y", "z"]));
        let map: BTreeMap<Arc<str>, Term> = [(Arc::from("y"), Term::Lit(1))].into();
        let u = t.subst(&map);
        assert_eq!(u.free_vars(), names(&["x", "z"]));
        assert!(!u.mentions("y"));
    }

    #[test]
    fn stratification() {
        let v = vocab();
        let succ = v.get("succ").unwrap();
        let ok = Term::app(v.get("E").unwrap(), vec![Term::app(succ, vec![Term::var("x")]), Term::var("x")]);
        assert_eq!(stratum(&v, &ok), Ok(Stratum::Bridge));
        assert_eq!(stratum(&v, &Term::constant(v.get("c").unwrap())), Ok(Stratum::Point));
        let bad = Term::app(succ, vec![Term::Lit(3)]);
        assert!(matches!(stratum(&v, &bad), Err(TermError::Stratification { .. })));
        let arity = Term::app(succ, vec![]);
        assert!(matches!(stratum(&v, &arity), Err(TermError::Arity { .. })));
    }

    /// Reference evaluator: plain nested loops over the carrier, no pruning.
    fn naive(s: &State, t: &Term, env: &mut Vec<(Arc<str>, Value)>) -> Value {
        match t {
            Term::Var(x) => env.iter().rev().find(|(n, _)| n == x).map(|(_, v)| v.clone()).unwrap_or(Value::Undef),
            Term::Lit(n) => Value::Int(*n),
            Term::App(f, args) => {
                let vals: Vec<Value> = args.iter().map(|a| naive(s, a, env)).collect();
                s.apply(*f, &vals)
            }
            Term::Compr(c) => {
                let carrier = s.carrier_vec();
                let k = c.binder.vars.len();
                let mut acc = Vec::new();
                let mut idx = vec![0usize; k];
                if k > 0 && carrier.is_empty() {
                    return Value::empty_multiset();
                }
                loop {
                    for (i, v) in c.binder.vars.iter().enumerate() {
                        env.push((v.clone(), carrier[idx[i]].clone()));
                    }
                    if naive(s, &c.binder.guard, env).is_true() {
                        acc.push(naive(s, &c.head, env));
                    }
                    env.truncate(env.len() - k);
                    let mut i = k;
                    loop {
                        if i == 0 {
                            return Value::multiset(Multiset::from_values(acc));
                        }
                        i -= 1;
                        idx[i] += 1;
                        if idx[i] < carrier.len() {
                            break;
                        }
                        idx[i] = 0;
                    }
                }
            }
        }
    }

    fn arb_guard() -> impl Strategy<Value = Term> {
        let v = vocab();
        let (ve, vv) = (v.get("E").unwrap(), v.get("V").unwrap());
        let var = prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var);
        let leaf = prop_oneof![
            (var.clone(), var.clone()).prop_map(move |(a, b)| Term::app(ve, vec![a, b])),
            var.clone().prop_map(move |a| Term::app(vv, vec![a])),
            (var.clone(), var.clone()).prop_map(|(a, b)| Term::eq(a, b)),
            Just(Term::tt()),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::or(a, b)),
                inner.prop_map(Term::not),
            ]
        })
    }

    proptest! {
        #[test]
        fn pruned_evaluation_matches_naive_loops(
            guard in arb_guard(),
            edges in prop::collection::vec((0usize..3, 0usize..3), 0..6),
            inner in any::<bool>(),
        ) {
            let s = graph(3, &edges);
            let head = Term::tuple(&[Term::var("x"), Term::var("z")]);
            let t = if inner {
                // Nested comprehension with an outer variable in scope.
                Term::compr(
                    Term::compr(head, names(&["y", "z"]), guard),
                    names(&["x"]),
                    Term::tt(),
                )
            } else {
                Term::compr(head, names(&["x", "y", "z"]), guard)
            };
            prop_assert_eq!(eval_closed(&s, &t), naive(&s, &t, &mut Vec::new()));
            let empty_test = Term::eq(t.clone(), Term::empty());
            prop_assert_eq!(eval_closed(&s, &empty_test), naive(&s, &empty_test, &mut Vec::new()));
        }
    }

    #[test]
    fn fresh_atoms_are_not_generated_from_tables() {
        let mut s = graph(2, &[(0, 1)]);
        let outsider = Value::Atom(Atom::named("outsider"));
        s.set_by_name("E", vec![Value::atom("v0"), outsider], TRUE).unwrap();
        let v = s.vocab().clone();
        let t = Term::compr(Term::var("y"), names(&["y"]), e("x0", "y", &v));
        let mut env = Env::from_pairs([(Arc::from("x0"), Value::atom("v0"))]);
        assert_eq!(eval(&s, &t, &mut env), values::singleton(Value::atom("v1")));
    }
}
