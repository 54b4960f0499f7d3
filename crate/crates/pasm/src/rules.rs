//! Rules and the update sets they produce.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::state::{render_location, sym, Location, State, SymId, SymKind, Update, UpdateSet, Vocabulary};
use crate::terms::{eval, stratum, Binder, Env, Stratum, Term, TermError};
use crate::values::{Atom, Value, FALSE};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    Assign { sym: SymId, args: Vec<Term>, rhs: Term },
    Par(Vec<Rule>),
    If { guard: Term, body: Box<Rule> },
    Forall { binder: Binder, body: Box<Rule> },
    /// `import x do r enddo`. `site` is the preorder index among the
    /// machine's import rules, assigned by [`Rule::number_sites`].
    Import { var: Arc<str>, body: Box<Rule>, site: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("range error at {location}: {reason}")]
    Range { location: String, reason: String },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{0}` is not a dynamic user symbol and cannot be updated")]
    StaticTarget(String),
    #[error("variable `{0}` is bound twice in the same scope")]
    Shadowing(String),
    #[error("guard is not a Boolean term: {0}")]
    NonBooleanGuard(String),
    #[error("target argument {position} of `{symbol}` must be a point term")]
    BridgeArgument { symbol: String, position: usize },
    #[error(transparent)]
    Term(#[from] TermError),
}

impl Rule {
    pub fn assign(sym: SymId, args: Vec<Term>, rhs: Term) -> Rule {
        Rule::Assign { sym, args, rhs }
    }

    pub fn if_then(guard: Term, body: Rule) -> Rule {
        Rule::If { guard, body: Box::new(body) }
    }

    pub fn forall(vars: Vec<Arc<str>>, guard: Term, body: Rule) -> Rule {
        Rule::Forall { binder: Binder::new(vars, guard), body: Box::new(body) }
    }

    pub fn import(var: &str, body: Rule) -> Rule {
        Rule::Import { var: Arc::from(var), body: Box::new(body), site: 0 }
    }

    pub fn skip() -> Rule {
        Rule::Par(Vec::new())
    }

    /// Renumbers import sites in preorder, starting at 0.
    pub fn number_sites(&mut self) {
        fn go(r: &mut Rule, next: &mut u32) {
            match r {
                Rule::Assign { .. } => {}
                Rule::Par(rs) => rs.iter_mut().for_each(|r| go(r, next)),
                Rule::If { body, .. } | Rule::Forall { body, .. } => go(body, next),
                Rule::Import { body, site, .. } => {
                    *site = *next;
                    *next += 1;
                    go(body, next);
                }
            }
        }
        go(self, &mut 0);
    }

    pub fn has_imports(&self) -> bool {
        match self {
            Rule::Assign { .. } => false,
            Rule::Par(rs) => rs.iter().any(Rule::has_imports),
            Rule::If { body, .. } | Rule::Forall { body, .. } => body.has_imports(),
            Rule::Import { .. } => true,
        }
    }

    /// Calls `f` on every term directly contained in the rule.
    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Rule::Assign { args, rhs, .. } => {
                args.iter().for_each(&mut *f);
                f(rhs);
            }
            Rule::Par(rs) => rs.iter().for_each(|r| r.for_each_term(f)),
            Rule::If { guard, body } => {
                f(guard);
                body.for_each_term(f);
            }
            Rule::Forall { binder, body } => {
                f(&binder.guard);
                body.for_each_term(f);
            }
            Rule::Import { body, .. } => body.for_each_term(f),
        }
    }

    /// Symbols updated by some assignment.
    pub fn targets(&self, out: &mut BTreeSet<SymId>) {
        match self {
            Rule::Assign { sym, .. } => {
                out.insert(*sym);
            }
            Rule::Par(rs) => rs.iter().for_each(|r| r.targets(out)),
            Rule::If { body, .. } | Rule::Forall { body, .. } | Rule::Import { body, .. } => body.targets(out),
        }
    }

    pub fn render(&self, vocab: &Vocabulary) -> String {
        crate::surface::printer::rule_to_string(vocab, self)
    }
}

/// Is the term syntactically Boolean-valued?
pub fn is_boolean_term(vocab: &Vocabulary, t: &Term) -> bool {
    match t {
        Term::App(f, _) => vocab.symbol(*f).relational,
        _ => false,
    }
}

/// Static well-formedness: closed terms, updatable targets, stratification,
/// Boolean guards and no rebinding of a variable already in scope.
pub fn well_formed(vocab: &Vocabulary, rule: &Rule) -> Vec<RuleError> {
    let mut errs = Vec::new();
    check_rule(vocab, rule, &mut Vec::new(), &mut errs);
    errs
}

fn check_rule(vocab: &Vocabulary, r: &Rule, scope: &mut Vec<Arc<str>>, errs: &mut Vec<RuleError>) {
    match r {
        Rule::Assign { sym, args, rhs } => {
            let s = vocab.symbol(*sym);
            if Vocabulary::is_obligatory(*sym) || !s.dynamic || s.builtin.is_some() {
                errs.push(RuleError::StaticTarget(s.name.to_string()));
            }
            if s.arity != args.len() {
                errs.push(TermError::Arity { symbol: s.name.to_string(), expected: s.arity, got: args.len() }.into());
            }
            for (i, a) in args.iter().enumerate() {
                check_term(vocab, a, scope, errs);
                if matches!(s.kind, SymKind::Primary | SymKind::Bridge) && stratum(vocab, a) == Ok(Stratum::Bridge) {
                    errs.push(RuleError::BridgeArgument { symbol: s.name.to_string(), position: i });
                }
            }
            check_term(vocab, rhs, scope, errs);
        }
        Rule::Par(rs) => rs.iter().for_each(|r| check_rule(vocab, r, scope, errs)),
        Rule::If { guard, body } => {
            check_guard(vocab, guard, scope, errs);
            check_rule(vocab, body, scope, errs);
        }
        Rule::Forall { binder, body } => {
            let n = scope.len();
            bind_vars(&binder.vars, scope, errs);
            check_guard(vocab, &binder.guard, scope, errs);
            check_rule(vocab, body, scope, errs);
            scope.truncate(n);
        }
        Rule::Import { var, body, .. } => {
            let n = scope.len();
            bind_vars(std::slice::from_ref(var), scope, errs);
            check_rule(vocab, body, scope, errs);
            scope.truncate(n);
        }
    }
}

fn bind_vars(vars: &[Arc<str>], scope: &mut Vec<Arc<str>>, errs: &mut Vec<RuleError>) {
    for v in vars {
        if scope.contains(v) {
            errs.push(RuleError::Shadowing(v.to_string()));
        }
        scope.push(v.clone());
    }
}

fn check_guard(vocab: &Vocabulary, g: &Term, scope: &mut Vec<Arc<str>>, errs: &mut Vec<RuleError>) {
    check_term(vocab, g, scope, errs);
    if !is_boolean_term(vocab, g) {
        errs.push(RuleError::NonBooleanGuard(g.render(vocab)));
    }
}

fn check_term(vocab: &Vocabulary, t: &Term, scope: &mut Vec<Arc<str>>, errs: &mut Vec<RuleError>) {
    if let Err(e) = stratum(vocab, t) {
        errs.push(e.into());
    }
    check_scopes(t, scope, errs);
}

fn check_scopes(t: &Term, scope: &mut Vec<Arc<str>>, errs: &mut Vec<RuleError>) {
    match t {
        Term::Var(x) => {
            if !scope.contains(x) {
                errs.push(RuleError::Unbound(x.to_string()));
            }
        }
        Term::Lit(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| check_scopes(a, scope, errs)),
        Term::Compr(c) => {
            let n = scope.len();
            bind_vars(&c.binder.vars, scope, errs);
            check_scopes(&c.binder.guard, scope, errs);
            check_scopes(&c.head, scope, errs);
            scope.truncate(n);
        }
    }
}

/// The import key of a site under the current environment.
pub fn import_key(site: u32, env: &Env) -> Value {
    let vals: Vec<Value> = env.values().cloned().collect();
    Value::pair(Value::Int(site as i64), Value::tuple(&vals))
}

/// Everything a single step produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub updates: UpdateSet,
    /// Import key of every atom allocated in this step.
    pub keys: BTreeMap<Atom, Value>,
}

struct Ctx<'a> {
    s: &'a State,
    out: UpdateSet,
    by_key: BTreeMap<Value, Atom>,
    next: u64,
}

/// Computes the update set of `rule` at `s`.
pub fn updates(rule: &Rule, s: &State) -> Result<StepOutcome, RuleError> {
    let mut cx = Ctx { s, out: UpdateSet::new(), by_key: BTreeMap::new(), next: s.reserve_next() };
    exec(rule, &mut cx, &mut Env::new())?;
    let keys = cx.by_key.into_iter().map(|(k, a)| (a, k)).collect();
    Ok(StepOutcome { updates: cx.out, keys })
}

fn exec(r: &Rule, cx: &mut Ctx, env: &mut Env) -> Result<(), RuleError> {
    match r {
        Rule::Assign { sym, args, rhs } => {
            let vals: Vec<Value> = args.iter().map(|a| eval(cx.s, a, env)).collect();
            let v = eval(cx.s, rhs, env);
            range_check(cx, *sym, &vals, &v)?;
            cx.out.insert(Update::new(*sym, vals, v));
            Ok(())
        }
        Rule::Par(rs) => rs.iter().try_for_each(|r| exec(r, cx, env)),
        Rule::If { guard, body } => {
            if eval(cx.s, guard, env).is_true() {
                exec(body, cx, env)?;
            }
            Ok(())
        }
        Rule::Forall { binder, body } => {
            let mut res = Ok(());
            let s = cx.s;
            let _ = binder.for_each(s, env, &mut |env| match exec(body, cx, env) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    res = Err(e);
                    ControlFlow::Break(())
                }
            });
            res
        }
        Rule::Import { var, body, site } => {
            let key = import_key(*site, env);
            let atom = match cx.by_key.get(&key) {
                Some(a) => *a,
                None => {
                    let a = Atom::fresh(cx.next);
                    cx.next += 1;
                    cx.by_key.insert(key, a);
                    a
                }
            };
            cx.out.imported.insert(atom);
            cx.out.insert(Update::new(sym::RESERVE, vec![Value::Atom(atom)], FALSE));
            env.push(var.clone(), Value::Atom(atom));
            let r = exec(body, cx, env);
            env.pop();
            r
        }
    }
}

fn range_check(cx: &Ctx, f: SymId, args: &[Value], v: &Value) -> Result<(), RuleError> {
    let s = cx.s;
    let in_carrier = |x: &Value| s.in_carrier(x) || x.as_atom().is_some_and(|a| cx.out.imported.contains(&a));
    let atomic = |x: &Value| s.is_atomic(x) || in_carrier(x);
    let kind = s.vocab().symbol(f).kind;
    let fail = |reason: String| {
        Err(RuleError::Range {
            location: render_location(s.vocab(), &Location { sym: f, args: args.to_vec() }),
            reason,
        })
    };
    match kind {
        SymKind::Primary | SymKind::Bridge => {
            if let Some(a) = args.iter().find(|a| !in_carrier(a)) {
                return fail(format!("argument {a} is not in the primary carrier"));
            }
            let ok = if kind == SymKind::Primary {
                in_carrier(v) || matches!(v, Value::Bool(_) | Value::Undef)
            } else {
                atomic(v)
            };
            if !ok {
                return fail(format!("value {v} is outside the range of a {} symbol", kind.as_str()));
            }
        }
        SymKind::Secondary | SymKind::Background => {
            if let Some(x) = args.iter().chain(std::iter::once(v)).find(|x| !atomic(x)) {
                return fail(format!("{x} is not an element of the base set"));
            }
        }
    }
    Ok(())
}
