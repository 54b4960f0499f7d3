//! Seeded random states, mutations and atom permutations for property checks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use std::sync::Arc;

use crate::state::{State, SymId, Update, UpdateSet, Vocabulary};
use crate::values::{Atom, Value};

/// Candidate values for a location of `f`: booleans for relational symbols,
/// otherwise carrier elements, logic constants, small integers and the
/// values `f` already stores.
pub fn value_pool(s: &State, f: SymId) -> Vec<Value> {
    if s.vocab().symbol(f).relational {
        return vec![Value::Bool(true), Value::Bool(false)];
    }
    let mut pool = s.carrier_vec();
    pool.extend([Value::Bool(true), Value::Bool(false), Value::Undef]);
    pool.extend((0..3).map(Value::Int));
    pool.extend(s.table(f).values().cloned());
    pool.sort();
    pool.dedup();
    pool
}

/// Symbols with a table that a mutation may touch.
pub fn mutable_symbols(s: &State, dynamic_only: bool) -> Vec<SymId> {
    let v = s.vocab();
    v.user_symbols()
        .filter(|(id, sym)| v.is_table(*id) && (sym.dynamic || !dynamic_only))
        .map(|(id, _)| id)
        .collect()
}

/// A random location of `f`: half the time an existing table key, otherwise
/// a tuple of carrier elements.
pub fn random_location(s: &State, f: SymId, rng: &mut impl Rng) -> Vec<Value> {
    let arity = s.vocab().symbol(f).arity;
    let keys: Vec<&Vec<Value>> = s.table(f).keys().collect();
    if !keys.is_empty() && rng.gen_bool(0.5) {
        return keys[rng.gen_range(0..keys.len())].clone();
    }
    let carrier = s.carrier_vec();
    (0..arity).map(|_| carrier.choose(rng).cloned().unwrap_or(Value::Undef)).collect()
}

/// A random update on a dynamic symbol, or `None` when there is none.
pub fn random_update(s: &State, rng: &mut impl Rng) -> Option<Update> {
    let syms = mutable_symbols(s, true);
    let f = *syms.choose(rng)?;
    let args = random_location(s, f, rng);
    let val = value_pool(s, f).choose(rng).cloned().unwrap_or(Value::Undef);
    Some(Update::new(f, args, val))
}

pub fn random_update_set(s: &State, rng: &mut impl Rng, max: usize) -> UpdateSet {
    UpdateSet::from_updates((0..rng.gen_range(0..=max)).filter_map(|_| random_update(s, rng)))
}

/// Rewrites up to `changes` random locations of any table-backed symbol,
/// static ones included.
pub fn mutate(s: &State, rng: &mut impl Rng, changes: usize) -> State {
    let mut out = s.clone();
    let syms = mutable_symbols(s, false);
    if syms.is_empty() {
        return out;
    }
    for _ in 0..rng.gen_range(1..=changes.max(1)) {
        let f = *syms.choose(rng).expect("non-empty");
        let args = random_location(&out, f, rng);
        let val = value_pool(&out, f).choose(rng).cloned().unwrap_or(Value::Undef);
        out.set(f, args, val).expect("arity matches");
    }
    out
}

/// A random state over `vocab` with 1 to `max_atoms` carrier atoms
/// `@e0, @e1, ...`. Each location of a table-backed symbol of arity at most
/// 3 is set with probability one half, to a value drawn uniformly from
/// [`value_pool`].
pub fn random_state(vocab: &Arc<Vocabulary>, rng: &mut impl Rng, max_atoms: usize) -> State {
    let mut s = State::new(vocab.clone());
    for i in 0..rng.gen_range(1..=max_atoms.max(1)) {
        s.add_element(Value::atom(&format!("e{i}"))).expect("atoms are carrier elements");
    }
    let carrier = s.carrier_vec();
    for f in mutable_symbols(&s, false) {
        let arity = vocab.symbol(f).arity;
        if arity > 3 {
            continue;
        }
        let pool = value_pool(&s, f);
        for idx in 0..carrier.len().pow(arity as u32) {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut rest = idx;
            let mut args = vec![Value::Undef; arity];
            for slot in args.iter_mut().rev() {
                *slot = carrier[rest % carrier.len()].clone();
                rest /= carrier.len();
            }
            let val = pool.choose(rng).cloned().unwrap_or(Value::Undef);
            s.set(f, args, val).expect("arity matches");
        }
    }
    s
}

/// A uniformly random permutation of the carrier's atoms.
pub fn random_permutation(s: &State, rng: &mut impl Rng) -> BTreeMap<Atom, Atom> {
    let atoms: Vec<Atom> = s.carrier().iter().filter_map(Value::as_atom).collect();
    let mut image = atoms.clone();
    image.shuffle(rng);
    atoms.into_iter().zip(image).collect()
}
