//! Rules and machines synthesised from an oracle's observed steps.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::machine::Machine;
use crate::rules::{Rule, RuleError};
use crate::state::{render_update, State, StateError, Update, UpdateSet};
use crate::terms::{eval_closed, Term};
use crate::values::Value;
use crate::witness::{similarity_formula, w_similar, WitnessSet};

use super::fowo::{all_tuples, isolating_formula_with, ScaleError, TypeOracle};
use super::structure::{critical_structure, CriticalStructure, Element};
use super::translate::{isolating_term_with, t_and, Fresh};

/// A one-step transformation of states.
pub type Oracle<'a> = dyn Fn(&State) -> Result<State, String> + 'a;

/// One step of `m`, as an oracle.
pub fn machine_oracle(m: &Machine) -> impl Fn(&State) -> Result<State, String> + '_ {
    move |s| m.step(s).map(|(next, _)| next).map_err(|e| e.to_string())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("update {0} mentions a value that is not critical for the witness set")]
    CriticalityViolation(String),
    #[error("the oracle failed: {0}")]
    Oracle(String),
    #[error("the oracle imported fresh elements, which synthesis does not model")]
    Import,
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("the synthesised rule is not well formed: {0:?}")]
    IllFormed(Vec<RuleError>),
    #[error("no sampled representative is similar to the state (coverage gap)")]
    CoverageGap,
}

/// `Δ = oracle(s) − s`.
pub fn observed_updates(oracle: &Oracle, s: &State) -> Result<UpdateSet, SynthesisError> {
    let next = oracle(s).map_err(SynthesisError::Oracle)?;
    let delta = next.diff(s)?;
    if !delta.imported.is_empty() {
        return Err(SynthesisError::Import);
    }
    Ok(delta)
}

/// The critical tuple `(b0, b1, ..., br)` of an update `f(b1, ..., br) := b0`.
fn critical_tuple(cs: &CriticalStructure, u: &Update, s: &State) -> Result<Vec<usize>, SynthesisError> {
    std::iter::once(&u.val)
        .chain(&u.loc.args)
        .map(|v| cs.value_index(v))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| SynthesisError::CriticalityViolation(render_update(s.vocab(), u)))
}

/// Updates of `Δ` grouped by target symbol and type of critical tuple,
/// each group represented by its first update.
fn representatives(
    cs: &CriticalStructure,
    types: &TypeOracle,
    delta: &UpdateSet,
    s: &State,
) -> Result<Vec<(Update, Vec<usize>)>, SynthesisError> {
    let mut reps: Vec<(Update, Vec<usize>)> = Vec::new();
    for u in &delta.updates {
        let t = critical_tuple(cs, u, s)?;
        if !reps.iter().any(|(r, rt)| r.loc.sym == u.loc.sym && types.same_type(rt, &t)) {
            reps.push((u.clone(), t));
        }
    }
    Ok(reps)
}

/// For each component of `tuple`, a witness binding and column producing
/// it. Bindings covering most still-uncovered components are chosen first;
/// among those, bindings that keep the components in their own column
/// order win, so that `f(a, b) := g(a, b)` is read off a binding with head
/// `(g(a, b), a, b)` rather than one that only agrees on the values.
fn sources(cs: &CriticalStructure, tuple: &[usize]) -> Vec<(usize, Vec<Option<usize>>)> {
    let mut covered = vec![false; tuple.len()];
    let mut out = Vec::new();
    while covered.iter().any(|c| !c) {
        // ((covered count, aligned count), relation index, columns)
        type Pick = ((usize, usize), usize, Vec<Option<usize>>);
        let mut best: Option<Pick> = None;
        for (i, rel) in cs.structure.relations.iter().enumerate() {
            for t in &rel.tuples {
                let head = &t[..t.len() - 1];
                let cols: Vec<Option<usize>> = (0..tuple.len())
                    .map(|k| {
                        if covered[k] {
                            None
                        } else if head.get(k) == Some(&tuple[k]) {
                            Some(k)
                        } else {
                            head.iter().position(|&h| h == tuple[k])
                        }
                    })
                    .collect();
                let n = cols.iter().flatten().count();
                let aligned = cols.iter().enumerate().filter(|(k, c)| **c == Some(*k)).count();
                if n > 0 && best.as_ref().is_none_or(|b| (n, aligned) > b.0) {
                    best = Some(((n, aligned), i, cols));
                }
            }
        }
        let (_, i, cols) = best.expect("every component of a critical tuple is a head value");
        for (k, c) in cols.iter().enumerate() {
            if c.is_some() {
                covered[k] = true;
            }
        }
        out.push((i, cols));
    }
    out
}

/// Whether some head of relation `rel` carries the components of
/// `candidate` in the columns `cols`, so that the source binding can
/// produce them.
fn realizable(cs: &CriticalStructure, rel: usize, cols: &[Option<usize>], candidate: &[usize]) -> bool {
    cs.structure.relations[rel]
        .tuples
        .iter()
        .any(|t| cols.iter().zip(candidate).all(|(c, &v)| c.is_none_or(|j| t[j] == v)))
}

/// A rule for state `s`: a parallel combination of one `forall` rule per
/// update class of the updates the oracle makes at `s`. Each rule ranges over witness bindings that
/// produce a tuple of the representative's type and updates accordingly.
pub fn synthesize_rule(oracle: &Oracle, s: &State, w: &WitnessSet) -> Result<Rule, SynthesisError> {
    let delta = observed_updates(oracle, s)?;
    let cs = critical_structure(s, w);
    let types = TypeOracle::new(&cs.structure)?;
    let reps = representatives(&cs, &types, &delta, s)?;
    let mut fresh = Fresh::default();
    let mut rules = Vec::new();
    for (u, tuple) in reps {
        let values = cs.value_elements();
        let src = sources(&cs, &tuple);
        let candidates: Vec<Vec<usize>> = all_tuples(values.len(), tuple.len())?
            .into_iter()
            .map(|t| t.into_iter().map(|i| values[i]).collect::<Vec<usize>>())
            .filter(|c| src.iter().all(|(i, cols)| realizable(&cs, *i, cols, c)))
            .collect();
        let chi = isolating_formula_with(&cs.structure, &types, &tuple, &candidates)?;
        let mut vars: Vec<Arc<str>> = Vec::new();
        let mut guards = Vec::new();
        let mut comp: Vec<Option<Term>> = vec![None; tuple.len()];
        for (i, cols) in src {
            let (vs, guard, head) = fresh.instance(&w.terms[i]);
            vars.extend(vs);
            guards.push(guard);
            for (k, c) in cols.iter().enumerate() {
                if let Some(j) = c {
                    comp[k] = Some(head[*j].clone());
                }
            }
        }
        let comp: Vec<Term> = comp.into_iter().map(|c| c.expect("all components sourced")).collect();
        guards.push(isolating_term_with(&chi, w, &comp, &mut fresh));
        let guard = t_and(guards);
        let body = Rule::assign(u.loc.sym, comp[1..].to_vec(), comp[0].clone());
        rules.push(if vars.is_empty() { Rule::if_then(guard, body) } else { Rule::forall(vars, guard, body) });
    }
    Ok(Rule::Par(rules))
}

/// A machine over `s`'s vocabulary running [`synthesize_rule`]'s result.
pub fn synthesize_rule_machine(oracle: &Oracle, s: &State, w: &WitnessSet) -> Result<Machine, SynthesisError> {
    let rule = synthesize_rule(oracle, s, w)?;
    Machine::new("synthesized", s.vocab().clone(), rule).map_err(SynthesisError::IllFormed)
}

/// Similarity-guarded synthesised rules for one representative per
/// W-similarity class of the sample.
#[derive(Clone, Debug)]
pub struct SynthesizedMachine {
    pub machine: Machine,
    pub representatives: Vec<State>,
    pub guards: Vec<Term>,
    pub rules: Vec<Rule>,
}

impl SynthesizedMachine {
    /// Index of the representative W-similar to `s`.
    pub fn class_of(&self, s: &State, w: &WitnessSet) -> Result<usize, SynthesisError> {
        self.representatives.iter().position(|r| w_similar(r, s, w)).ok_or(SynthesisError::CoverageGap)
    }

    /// Each representative satisfies its own guard and no other.
    pub fn guards_exclusive(&self) -> bool {
        self.representatives.iter().enumerate().all(|(i, r)| {
            self.guards.iter().enumerate().all(|(j, g)| eval_closed(r, g).is_true() == (i == j))
        })
    }
}

pub fn synthesize_machine(oracle: &Oracle, sample: &[State], w: &WitnessSet) -> Result<SynthesizedMachine, SynthesisError> {
    let mut representatives: Vec<State> = Vec::new();
    for s in sample {
        if !representatives.iter().any(|r| w_similar(r, s, w)) {
            representatives.push(s.clone());
        }
    }
    let vocab = match sample.first() {
        Some(s) => s.vocab().clone(),
        None => return Err(SynthesisError::CoverageGap),
    };
    let mut guards = Vec::new();
    let mut rules = Vec::new();
    for r in &representatives {
        guards.push(similarity_formula(r, w));
        rules.push(synthesize_rule(oracle, r, w)?);
    }
    let rule = Rule::Par(guards.iter().cloned().zip(rules.iter().cloned()).map(|(g, r)| Rule::if_then(g, r)).collect());
    let machine = Machine::new("synthesized", vocab, rule).map_err(SynthesisError::IllFormed)?;
    Ok(SynthesizedMachine { machine, representatives, guards, rules })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferReport {
    /// Transferred updates checked.
    pub checked: usize,
    /// Transferred updates missing from the oracle's step, rendered.
    pub violations: Vec<String>,
}

/// For every update `f(b̄) := b0` of the oracle's step and every critical
/// tuple of the same type as `(b0, b̄)`, checks that the corresponding
/// update is part of the step too.
pub fn check_type_update_transfer(oracle: &Oracle, s: &State, w: &WitnessSet) -> Result<TransferReport, SynthesisError> {
    let delta = observed_updates(oracle, s)?;
    let cs = critical_structure(s, w);
    let types = TypeOracle::new(&cs.structure)?;
    let values = cs.value_elements();
    let value_of = |e: usize| match &cs.elements[e] {
        Element::Value(v) => v.clone(),
        Element::Tag(_) => unreachable!("value elements only"),
    };
    let mut report = TransferReport::default();
    let mut seen = BTreeSet::new();
    for u in &delta.updates {
        let t = critical_tuple(&cs, u, s)?;
        for c in all_tuples(values.len(), t.len())? {
            let c: Vec<usize> = c.into_iter().map(|i| values[i]).collect();
            if c == t || !types.same_type(&t, &c) {
                continue;
            }
            let vals: Vec<Value> = c.iter().map(|&e| value_of(e)).collect();
            let moved = Update::new(u.loc.sym, vals[1..].to_vec(), vals[0].clone());
            if !seen.insert(moved.clone()) {
                continue;
            }
            report.checked += 1;
            if !delta.updates.contains(&moved) {
                report.violations.push(render_update(s.vocab(), &moved));
            }
        }
    }
    Ok(report)
}
