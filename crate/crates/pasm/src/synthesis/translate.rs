//! Translation of equality-free formulas over the critical vocabulary into
//! Boolean terms over the state vocabulary.
//!
//! A variable of the formula denotes either a critical value or a tag. A
//! value variable is carried as a term producing it; a tag variable as the
//! witness term it belongs to plus terms for its binder variables. An
//! existential quantifier becomes a disjunction over every witness term
//! column (for values) and every witness term (for tags) of an `exists`
//! over freshly named binder variables, guarded by the witness guard.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::state::sym;
use crate::terms::Term;
use crate::witness::{WitnessSet, WitnessTerm};

use super::fowo::EqFree;

#[derive(Clone, Debug)]
enum Sort {
    Value(Term),
    Tag(usize, Vec<Term>),
}

/// Produces fresh binder names `name_n` for copies of witness binders.
#[derive(Debug, Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    /// Renamed copy of a witness term's binder: the new variable names, the
    /// renamed guard and the renamed head.
    pub fn instance(&mut self, t: &WitnessTerm) -> (Vec<Arc<str>>, Term, Vec<Term>) {
        let n = self.next;
        self.next += 1;
        let vars: Vec<Arc<str>> = t.vars().iter().map(|v| Arc::from(format!("{v}_{n}"))).collect();
        let map: BTreeMap<Arc<str>, Term> =
            t.vars().iter().cloned().zip(vars.iter().map(|v| Term::Var(v.clone()))).collect();
        let guard = t.simplified().guard.subst(&map);
        let head = t.head.iter().map(|h| h.subst(&map)).collect();
        (vars, guard, head)
    }
}

pub(crate) fn t_not(a: Term) -> Term {
    if a == Term::tt() {
        Term::ff()
    } else if a == Term::ff() {
        Term::tt()
    } else if let Term::App(f, args) = &a {
        if *f == sym::NOT {
            return args[0].clone();
        }
        Term::not(a)
    } else {
        Term::not(a)
    }
}

pub(crate) fn t_and(parts: impl IntoIterator<Item = Term>) -> Term {
    let mut out = Vec::new();
    for p in parts {
        if p == Term::ff() {
            return Term::ff();
        }
        if p != Term::tt() && !out.contains(&p) {
            out.push(p);
        }
    }
    Term::and_all(out)
}

fn t_or(parts: impl IntoIterator<Item = Term>) -> Term {
    let mut out = Vec::new();
    for p in parts {
        if p == Term::tt() {
            return Term::tt();
        }
        if p != Term::ff() && !out.contains(&p) {
            out.push(p);
        }
    }
    Term::or_all(out)
}

fn t_exists(vars: Vec<Arc<str>>, body: Term) -> Term {
    if vars.is_empty() || body == Term::ff() {
        body
    } else {
        Term::exists(vars, body)
    }
}

struct Translator<'a> {
    w: &'a WitnessSet,
    fresh: &'a mut Fresh,
}

impl Translator<'_> {
    fn tr(&mut self, f: &EqFree, env: &mut Vec<Option<Sort>>) -> Term {
        match f {
            EqFree::True => Term::tt(),
            EqFree::False => Term::ff(),
            EqFree::Atom(r, vars) => {
                let sorts: Vec<&Sort> = vars.iter().map(|&v| env[v].as_ref().expect("bound variable")).collect();
                let Some((Sort::Tag(i, binding), heads)) = sorts.split_last() else { return Term::ff() };
                if i != r {
                    return Term::ff();
                }
                let t = &self.w.terms[*i];
                let map: BTreeMap<Arc<str>, Term> = t.vars().iter().cloned().zip(binding.iter().cloned()).collect();
                let mut eqs = Vec::new();
                for (j, s) in heads.iter().enumerate() {
                    let Sort::Value(x) = s else { return Term::ff() };
                    eqs.push(Term::eq(x.clone(), t.head[j].subst(&map)));
                }
                t_and(eqs)
            }
            EqFree::Not(g) => t_not(self.tr(g, env)),
            EqFree::And(gs) => {
                let parts: Vec<Term> = gs.iter().map(|g| self.tr(g, env)).collect();
                t_and(parts)
            }
            EqFree::Or(gs) => {
                let parts: Vec<Term> = gs.iter().map(|g| self.tr(g, env)).collect();
                t_or(parts)
            }
            EqFree::Exists(x, g) => self.exists(*x, g, env),
            EqFree::Forall(x, g) => {
                let neg = EqFree::not((**g).clone());
                t_not(self.exists(*x, &neg, env))
            }
        }
    }

    fn exists(&mut self, x: usize, g: &EqFree, env: &mut Vec<Option<Sort>>) -> Term {
        if env.len() <= x {
            env.resize(x + 1, None);
        }
        let saved = env[x].take();
        let mut disjuncts = Vec::new();
        for i in 0..self.w.len() {
            let t = &self.w.terms[i];
            for j in 0..=t.arity() {
                let (vars, guard, head) = self.fresh.instance(t);
                env[x] = Some(if j < t.arity() {
                    Sort::Value(head[j].clone())
                } else {
                    Sort::Tag(i, vars.iter().map(|v| Term::Var(v.clone())).collect())
                });
                let body = self.tr(g, env);
                disjuncts.push(t_exists(vars, t_and([guard, body])));
            }
        }
        env[x] = saved;
        t_or(disjuncts)
    }
}

/// `t_χ`: a Boolean term over the state vocabulary with
/// `val(t_χ)[x̄ ↦ b̄] = true` iff `S|_W ⊨ χ[b̄]` for tuples `b̄` of critical
/// values, where the free variable `k` of `χ` is replaced by `free[k]`.
pub fn isolating_term_with(chi: &EqFree, w: &WitnessSet, free: &[Term], fresh: &mut Fresh) -> Term {
    let mut env: Vec<Option<Sort>> = free.iter().cloned().map(|t| Some(Sort::Value(t))).collect();
    Translator { w, fresh }.tr(chi, &mut env)
}

/// As [`isolating_term_with`], with free variable `k` written `xk`.
pub fn isolating_term(chi: &EqFree, w: &WitnessSet, free_vars: usize) -> Term {
    let free: Vec<Term> = (0..free_vars).map(|k| Term::var(&format!("x{k}"))).collect();
    isolating_term_with(chi, w, &free, &mut Fresh::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{complement, fixture};
    use crate::synthesis::fowo::{all_tuples, holds_at};
    use crate::synthesis::structure::critical_structure;
    use crate::terms::{eval, Env};
    use crate::witness::extract_witness;
    use rand::{Rng, SeedableRng};

    fn random_formula(rng: &mut impl Rng, arities: &[usize], vars: usize, depth: usize) -> EqFree {
        if depth == 0 || rng.gen_bool(0.3) {
            let r = rng.gen_range(0..arities.len());
            return EqFree::Atom(r, (0..arities[r]).map(|_| rng.gen_range(0..vars)).collect());
        }
        match rng.gen_range(0..4) {
            0 => EqFree::not(random_formula(rng, arities, vars, depth - 1)),
            1 => EqFree::and([random_formula(rng, arities, vars, depth - 1), random_formula(rng, arities, vars, depth - 1)]),
            2 => EqFree::or([random_formula(rng, arities, vars, depth - 1), random_formula(rng, arities, vars, depth - 1)]),
            _ => EqFree::exists(vars, random_formula(rng, arities, vars + 1, depth - 1)),
        }
    }

    #[test]
    fn translation_agrees_with_model_checking() {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        let s = complement::graph_state(&m, 3, &complement::undirected(&[(0, 1)]));
        let cs = critical_structure(&s, &w);
        let arities: Vec<usize> = cs.structure.relations.iter().map(|r| r.arity).collect();
        let values = cs.value_elements();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let chi = random_formula(&mut rng, &arities, 2, 3);
            let term = isolating_term(&chi, &w, 2);
            for t in all_tuples(values.len(), 2).unwrap() {
                let b: Vec<usize> = t.iter().map(|&i| values[i]).collect();
                let mut env = Env::new();
                for (k, &e) in b.iter().enumerate() {
                    let super::super::structure::Element::Value(v) = &cs.elements[e] else { unreachable!() };
                    env.push(Arc::from(format!("x{k}")), v.clone());
                }
                let got = eval(&s, &term, &mut env);
                assert_eq!(got.is_true(), holds_at(&cs.structure, &chi, &b), "{}", chi.render(&cs.structure));
            }
        }
    }

    #[test]
    fn positive_atom_becomes_head_equalities() {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        // exists x3 R2(x0, x1, x2, x3): (x0, x1, x2) is a head of the assignment term.
        let chi = EqFree::exists(3, EqFree::Atom(2, vec![0, 1, 2, 3]));
        let t = isolating_term(&chi, &w, 3);
        assert_eq!(
            t.render(&m.vocab),
            "exists x_7, y_7 (x_7 != y_7 and (V(x_7) and V(y_7)) and (x0 = (not E(x_7, y_7)) and x1 = x_7 and x2 = y_7))"
        );
    }
}
