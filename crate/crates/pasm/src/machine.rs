//! Machines, steps, runs, and the behavioural checks built on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::rules::{self, well_formed, Rule, RuleError, StepOutcome};
use crate::state::{rename_updates, sym, State, StateError, Update, UpdateSet, Vocabulary};
use crate::values::{Atom, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub vocab: Arc<Vocabulary>,
    pub rule: Rule,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("the state's vocabulary does not match the machine's")]
    VocabularyMismatch,
}

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halt {
    /// The update set became trivial.
    Fixpoint,
    StepLimit,
    /// Clashing locations, rendered.
    Clash(Vec<String>),
    RangeError(String),
}

impl Halt {
    pub fn as_str(&self) -> &'static str {
        match self {
            Halt::Fixpoint => "fixpoint",
            Halt::StepLimit => "step_limit",
            Halt::Clash(_) => "clash",
            Halt::RangeError(_) => "range_error",
        }
    }
}

/// States `s0, s1, ...` and the update sets between consecutive states.
/// `updates[i]` turns `states[i]` into `states[i + 1]`.
#[derive(Clone, Debug)]
pub struct Trace {
    pub states: Vec<State>,
    pub updates: Vec<UpdateSet>,
    pub halt: Halt,
}

impl Trace {
    pub fn last(&self) -> &State {
        self.states.last().expect("a trace has an initial state")
    }

    /// Number of recorded (non-trivial) steps.
    pub fn steps(&self) -> usize {
        self.updates.len()
    }
}

impl Machine {
    /// Numbers import sites and checks well-formedness.
    pub fn new(name: &str, vocab: Arc<Vocabulary>, mut rule: Rule) -> Result<Machine, Vec<RuleError>> {
        rule.number_sites();
        let errs = well_formed(&vocab, &rule);
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(Machine { name: name.to_string(), vocab, rule })
    }

    pub fn check_state(&self, s: &State) -> Result<(), MachineError> {
        if **s.vocab() != *self.vocab {
            return Err(MachineError::VocabularyMismatch);
        }
        Ok(())
    }

    /// The update set at `s` together with the import key of every fresh atom.
    pub fn updates(&self, s: &State) -> Result<StepOutcome, MachineError> {
        self.check_state(s)?;
        Ok(rules::updates(&self.rule, s)?)
    }

    /// One step: `s + Δ(s)`. Fails on clashes and range errors.
    pub fn step(&self, s: &State) -> Result<(State, StepOutcome), MachineError> {
        let out = self.updates(s)?;
        let next = s.fire(&out.updates)?;
        Ok((next, out))
    }

    /// Runs until the update set is trivial, a step fails, or `max_steps`
    /// non-trivial steps have been taken. A trivial step is not recorded.
    pub fn run(&self, s0: &State, max_steps: usize) -> Result<Trace, MachineError> {
        self.check_state(s0)?;
        let mut trace = Trace { states: vec![s0.clone()], updates: Vec::new(), halt: Halt::StepLimit };
        for _ in 0..max_steps {
            let s = trace.last();
            let out = match rules::updates(&self.rule, s) {
                Ok(o) => o,
                Err(e) => {
                    trace.halt = Halt::RangeError(e.to_string());
                    return Ok(trace);
                }
            };
            if out.updates.is_trivial(s) {
                trace.halt = Halt::Fixpoint;
                return Ok(trace);
            }
            match s.fire(&out.updates) {
                Ok(next) => {
                    trace.states.push(next);
                    trace.updates.push(out.updates);
                }
                Err(StateError::Clash { rendered, .. }) => {
                    trace.halt = Halt::Clash(rendered);
                    return Ok(trace);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(trace)
    }

    pub fn render(&self) -> String {
        crate::surface::print_machine(self)
    }
}

/// Replaces every freshly imported atom by `(@import, key)` so that update
/// sets of different runs can be compared independently of reserve order.
pub fn canonical_updates(out: &StepOutcome) -> UpdateSet {
    let tag = Value::atom("import");
    let by_atom: BTreeMap<Atom, Value> =
        out.keys.iter().map(|(a, k)| (*a, Value::pair(tag.clone(), k.clone()))).collect();
    let canon = |v: &Value| -> Value { replace_atoms(v, &by_atom) };
    UpdateSet {
        updates: out
            .updates
            .updates
            .iter()
            .map(|u| Update::new(u.loc.sym, u.loc.args.iter().map(canon).collect(), canon(&u.val)))
            .collect(),
        imported: Default::default(),
    }
}

fn replace_atoms(v: &Value, map: &BTreeMap<Atom, Value>) -> Value {
    match v {
        Value::Atom(a) => map.get(a).cloned().unwrap_or_else(|| v.clone()),
        Value::Pair(p) => Value::pair(replace_atoms(&p.0, map), replace_atoms(&p.1, map)),
        Value::Multiset(m) => Value::multiset(crate::values::Multiset::from_counts(
            m.entries().iter().map(|(x, n)| (replace_atoms(x, map), *n)),
        )),
        _ => v.clone(),
    }
}

/// A state where two machines disagree.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub state: State,
    pub left: Result<UpdateSet, String>,
    pub right: Result<UpdateSet, String>,
}

fn canonical_or_error(m: &Machine, s: &State) -> Result<UpdateSet, String> {
    m.updates(s).map(|o| canonical_updates(&o)).map_err(|e| e.to_string())
}

/// Checks that two machines produce the same update sets at every given state.
pub fn check_behavioural_equivalence(a: &Machine, b: &Machine, states: &[State]) -> Result<(), Box<Disagreement>> {
    for s in states {
        let (l, r) = (canonical_or_error(a, s), canonical_or_error(b, s));
        if l != r {
            return Err(Box::new(Disagreement { state: s.clone(), left: l, right: r }));
        }
    }
    Ok(())
}

/// Checks `Δ(ζ(s)) = ζ(Δ(s))` for an atom renaming `ζ`.
pub fn check_isomorphism_preservation(
    m: &Machine,
    s: &State,
    zeta: &BTreeMap<Atom, Atom>,
) -> Result<bool, MachineError> {
    let renamed = s.rename(zeta)?;
    let lhs = canonical_updates(&m.updates(&renamed)?);
    let rhs = rename_updates(&canonical_updates(&m.updates(s)?), zeta);
    Ok(lhs == rhs)
}

/// The reserve updates of an update set, for display filtering.
pub fn is_reserve_update(u: &Update) -> bool {
    u.loc.sym == sym::RESERVE
}
