//! Vocabularies, computation states, locations, updates and update sets.
//!
//! A [`Vocabulary`] always starts with the obligatory background symbols at
//! fixed ids (see [`sym`]); user symbols follow in declaration order. A
//! [`State`] stores a finite primary carrier plus one table per table-backed
//! user symbol. Lookups outside the table fall back to `false` for relational
//! symbols and `undef` otherwise, so every lookup is total.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::values::{self, Atom, Value, FALSE, TRUE};

/// Index of a symbol inside its vocabulary.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SymId(pub u32);

impl SymId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ids of the obligatory background symbols.
pub mod sym {
    use super::SymId;
    pub const TRUE: SymId = SymId(0);
    pub const FALSE: SymId = SymId(1);
    pub const UNDEF: SymId = SymId(2);
    pub const EMPTY: SymId = SymId(3);
    pub const RESERVE: SymId = SymId(4);
    pub const ATOMIC: SymId = SymId(5);
    pub const FIRST: SymId = SymId(6);
    pub const SECOND: SymId = SymId(7);
    pub const BOOLE: SymId = SymId(8);
    pub const NOT: SymId = SymId(9);
    pub const SINGLETON: SymId = SymId(10);
    pub const BIGUNION: SymId = SymId(11);
    pub const ASSET: SymId = SymId(12);
    pub const EQ: SymId = SymId(13);
    pub const AND: SymId = SymId(14);
    pub const OR: SymId = SymId(15);
    pub const IMPLIES: SymId = SymId(16);
    pub const IFF: SymId = SymId(17);
    pub const UNION: SymId = SymId(18);
    pub const PAIR: SymId = SymId(19);
    pub const ADD: SymId = SymId(20);
    pub const SUB: SymId = SymId(21);
    pub const MUL: SymId = SymId(22);
    pub const LT: SymId = SymId(23);
    pub const LE: SymId = SymId(24);
    /// Number of obligatory symbols; user symbols start here.
    pub const COUNT: u32 = 25;
}

/// (name, arity, relational, dynamic) for each obligatory symbol, by id.
const OBLIGATORY: [(&str, usize, bool, bool); sym::COUNT as usize] = [
    ("true", 0, true, false),
    ("false", 0, true, false),
    ("undef", 0, false, false),
    ("emptyset", 0, false, false),
    ("reserve", 1, true, true),
    ("atomic", 1, true, false),
    ("first", 1, false, false),
    ("second", 1, false, false),
    ("boole", 1, true, false),
    ("not", 1, true, false),
    ("singleton", 1, false, false),
    ("bigunion", 1, false, false),
    ("asset", 1, false, false),
    ("=", 2, true, false),
    ("and", 2, true, false),
    ("or", 2, true, false),
    ("implies", 2, true, false),
    ("iff", 2, true, false),
    ("union", 2, false, false),
    ("pair", 2, false, false),
    ("+", 2, false, false),
    ("-", 2, false, false),
    ("*", 2, false, false),
    ("<", 2, true, false),
    ("<=", 2, true, false),
];

/// Which part of a meta-finite state a symbol belongs to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SymKind {
    Primary,
    Secondary,
    Bridge,
    Background,
}

impl SymKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SymKind::Primary => "primary",
            SymKind::Secondary => "secondary",
            SymKind::Bridge => "bridge",
            SymKind::Background => "background",
        }
    }

    pub fn parse(s: &str) -> Option<SymKind> {
        Some(match s {
            "primary" => SymKind::Primary,
            "secondary" => SymKind::Secondary,
            "bridge" => SymKind::Bridge,
            "background" => SymKind::Background,
            _ => return None,
        })
    }
}

/// A static interpretation computed by Rust code instead of a table.
pub type BuiltinFn = fn(&State, &[Value]) -> Value;

/// Resolves a builtin interpretation by its registered name.
pub fn builtin(name: &str) -> Option<BuiltinFn> {
    Some(match name {
        "listedIn" => listed_in,
        "atm.state" => crate::gallery::atm::conf_state,
        "atm.read" => crate::gallery::atm::conf_read,
        "atm.next_conf" => crate::gallery::atm::next_conf,
        "bfs.darkest" => crate::gallery::bfs::darkest,
        _ => return None,
    })
}

/// `listedIn(x, m)` holds iff `x` occurs in the multiset `m`.
fn listed_in(_: &State, args: &[Value]) -> Value {
    Value::Bool(values::mult(&args[0], &args[1]) >= 1)
}

#[derive(Clone)]
pub struct Symbol {
    pub name: Arc<str>,
    pub arity: usize,
    pub kind: SymKind,
    pub dynamic: bool,
    pub relational: bool,
    pub builtin: Option<(Arc<str>, BuiltinFn)>,
}

impl PartialEq for Symbol {
    fn eq(&self, o: &Symbol) -> bool {
        self.name == o.name
            && self.arity == o.arity
            && self.kind == o.kind
            && self.dynamic == o.dynamic
            && self.relational == o.relational
            && self.builtin.as_ref().map(|b| &b.0) == o.builtin.as_ref().map(|b| &b.0)
    }
}
impl Eq for Symbol {}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl Symbol {
    pub fn new(name: &str, arity: usize, kind: SymKind) -> Symbol {
        Symbol { name: Arc::from(name), arity, kind, dynamic: false, relational: false, builtin: None }
    }

    pub fn dynamic(mut self) -> Symbol {
        self.dynamic = true;
        self
    }

    pub fn relational(mut self) -> Symbol {
        self.relational = true;
        self
    }

    pub fn with_builtin(mut self, name: &str) -> Result<Symbol, StateError> {
        let f = builtin(name).ok_or_else(|| StateError::Vocabulary(format!("unknown builtin `{name}`")))?;
        self.builtin = Some((Arc::from(name), f));
        Ok(self)
    }

    pub fn default_value(&self) -> Value {
        if self.relational {
            FALSE
        } else {
            Value::Undef
        }
    }

    /// One declaration line in the state/machine file syntax.
    pub fn declaration(&self) -> String {
        let mut s = format!("{}/{} {}", self.name, self.arity, self.kind.as_str());
        s.push_str(if self.dynamic { " dynamic" } else { " static" });
        if self.relational {
            s.push_str(" relational");
        }
        if let Some((b, _)) = &self.builtin {
            s.push_str(" builtin=");
            s.push_str(b);
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("vocabulary error: {0}")]
    Vocabulary(String),
    #[error("clashing updates at {}", .rendered.join(", "))]
    Clash { locations: Vec<Location>, rendered: Vec<String> },
    #[error("isomorphism error: {0}")]
    Isomorphism(String),
    #[error("carrier error: {0}")]
    Carrier(String),
}

/// The vocabulary of a state: obligatory background symbols first, then the
/// user symbols in declaration order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    index: HashMap<Arc<str>, SymId>,
    /// Whether pairs are elements of the base set of atoms (`atomic` holds on them).
    pub atomic_pairs: bool,
    /// Whether multisets are elements of the base set of atoms.
    pub atomic_multisets: bool,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::new()
    }
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        let mut v = Vocabulary {
            symbols: Vec::new(),
            index: HashMap::new(),
            atomic_pairs: false,
            atomic_multisets: false,
        };
        for (name, arity, relational, dynamic) in OBLIGATORY {
            let s = Symbol {
                name: Arc::from(name),
                arity,
                kind: SymKind::Background,
                dynamic,
                relational,
                builtin: None,
            };
            v.index.insert(s.name.clone(), SymId(v.symbols.len() as u32));
            v.symbols.push(s);
        }
        v
    }

    pub fn add(&mut self, s: Symbol) -> Result<SymId, StateError> {
        if self.index.contains_key(&s.name) {
            return Err(StateError::Vocabulary(format!("duplicate symbol `{}`", s.name)));
        }
        if s.builtin.is_some() && s.dynamic {
            return Err(StateError::Vocabulary(format!("builtin symbol `{}` must be static", s.name)));
        }
        let id = SymId(self.symbols.len() as u32);
        self.index.insert(s.name.clone(), id);
        self.symbols.push(s);
        Ok(id)
    }

    /// Adds a symbol and returns the vocabulary, for builder-style setup.
    pub fn with(mut self, s: Symbol) -> Result<Vocabulary, StateError> {
        self.add(s)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<SymId> {
        self.index.get(name).copied()
    }

    pub fn id(&self, name: &str) -> Result<SymId, StateError> {
        self.get(name).ok_or_else(|| StateError::Vocabulary(format!("unknown symbol `{name}`")))
    }

    pub fn symbol(&self, id: SymId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_obligatory(id: SymId) -> bool {
        id.0 < sym::COUNT
    }

    /// The user-declared symbols with their ids.
    pub fn user_symbols(&self) -> impl Iterator<Item = (SymId, &Symbol)> {
        self.symbols.iter().enumerate().skip(sym::COUNT as usize).map(|(i, s)| (SymId(i as u32), s))
    }

    pub fn all_symbols(&self) -> impl Iterator<Item = (SymId, &Symbol)> {
        self.symbols.iter().enumerate().map(|(i, s)| (SymId(i as u32), s))
    }

    /// True for user symbols whose interpretation is stored in a table.
    pub fn is_table(&self, id: SymId) -> bool {
        !Vocabulary::is_obligatory(id) && self.symbols[id.index()].builtin.is_none()
    }
}

/// A memory cell: a dynamic symbol applied to argument values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Location {
    pub sym: SymId,
    pub args: Vec<Value>,
}

/// A write request for one location.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Update {
    pub loc: Location,
    pub val: Value,
}

impl Update {
    pub fn new(sym: SymId, args: Vec<Value>, val: Value) -> Update {
        Update { loc: Location { sym, args }, val }
    }
}

/// A set of updates plus the atoms the step imports from the reserve.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct UpdateSet {
    pub updates: BTreeSet<Update>,
    pub imported: BTreeSet<Atom>,
}

impl UpdateSet {
    pub fn new() -> UpdateSet {
        UpdateSet::default()
    }

    pub fn from_updates<I: IntoIterator<Item = Update>>(items: I) -> UpdateSet {
        UpdateSet { updates: items.into_iter().collect(), imported: BTreeSet::new() }
    }

    pub fn insert(&mut self, u: Update) {
        self.updates.insert(u);
    }

    pub fn extend(&mut self, other: UpdateSet) {
        self.updates.extend(other.updates);
        self.imported.extend(other.imported);
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty() && self.imported.is_empty()
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    /// Consistency check: every location receives at most one value.
    /// Returns the clashing locations, each once, in canonical order.
    pub fn clashes(&self) -> Vec<Location> {
        let mut out: Vec<Location> = Vec::new();
        let mut prev: Option<&Update> = None;
        for u in &self.updates {
            if let Some(p) = prev {
                if p.loc == u.loc && out.last() != Some(&u.loc) {
                    out.push(u.loc.clone());
                }
            }
            prev = Some(u);
        }
        out
    }

    pub fn is_consistent(&self) -> (bool, Vec<Location>) {
        let c = self.clashes();
        (c.is_empty(), c)
    }

    /// Drops updates that would not change `s`.
    pub fn nontrivial(&self, s: &State) -> UpdateSet {
        UpdateSet {
            updates: self.updates.iter().filter(|u| s.apply(u.loc.sym, &u.loc.args) != u.val).cloned().collect(),
            imported: self.imported.clone(),
        }
    }

    pub fn is_trivial(&self, s: &State) -> bool {
        self.imported.is_empty() && self.updates.iter().all(|u| s.apply(u.loc.sym, &u.loc.args) == u.val)
    }

    /// Renders each update as `f(args) := value`, one per line.
    pub fn render(&self, vocab: &Vocabulary) -> Vec<String> {
        let mut out: Vec<String> = self.imported.iter().map(|a| format!("import {a}")).collect();
        out.extend(self.updates.iter().map(|u| render_update(vocab, u)));
        out
    }
}

pub fn render_location(vocab: &Vocabulary, loc: &Location) -> String {
    let name = vocab.name(loc.sym);
    if loc.args.is_empty() {
        return name.to_string();
    }
    let args: Vec<String> = loc.args.iter().map(|v| v.to_string()).collect();
    format!("{name}({})", args.join(", "))
}

pub fn render_update(vocab: &Vocabulary, u: &Update) -> String {
    format!("{} := {}", render_location(vocab, &u.loc), u.val)
}

/// A computation state over a vocabulary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct State {
    vocab: Arc<Vocabulary>,
    carrier: BTreeSet<Value>,
    tables: Vec<BTreeMap<Vec<Value>, Value>>,
    reserve_next: u64,
}

impl State {
    /// An empty state: no carrier elements, all tables at their defaults.
    pub fn new(vocab: Arc<Vocabulary>) -> State {
        let n = vocab.len();
        State { vocab, carrier: BTreeSet::new(), tables: vec![BTreeMap::new(); n], reserve_next: 0 }
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn carrier(&self) -> &BTreeSet<Value> {
        &self.carrier
    }

    /// Carrier elements in canonical order, for enumeration.
    pub fn carrier_vec(&self) -> Vec<Value> {
        self.carrier.iter().cloned().collect()
    }

    pub fn reserve_next(&self) -> u64 {
        self.reserve_next
    }

    pub fn in_carrier(&self, v: &Value) -> bool {
        self.carrier.contains(v)
    }

    /// Adds an atom or integer to the primary carrier.
    pub fn add_element(&mut self, v: Value) -> Result<(), StateError> {
        match &v {
            Value::Atom(a) => {
                if let Some(n) = a.reserve_index() {
                    self.reserve_next = self.reserve_next.max(n + 1);
                }
            }
            Value::Int(_) => {}
            other => return Err(StateError::Carrier(format!("{other} cannot be a carrier element"))),
        }
        self.carrier.insert(v);
        Ok(())
    }

    pub fn set_reserve_next(&mut self, n: u64) {
        let floor = self.carrier.iter().filter_map(|v| v.as_atom()?.reserve_index()).map(|n| n + 1).max();
        self.reserve_next = n.max(floor.unwrap_or(0));
    }

    /// Stores a value in a table-backed symbol (dynamic or static user symbol).
    pub fn set(&mut self, f: SymId, args: Vec<Value>, val: Value) -> Result<(), StateError> {
        let s = self.vocab.symbol(f);
        if !self.vocab.is_table(f) {
            return Err(StateError::Vocabulary(format!("`{}` has no table", s.name)));
        }
        if s.arity != args.len() {
            return Err(StateError::Vocabulary(format!(
                "`{}` expects {} arguments, got {}",
                s.name,
                s.arity,
                args.len()
            )));
        }
        self.store(f, args, val);
        Ok(())
    }

    pub fn set_by_name(&mut self, name: &str, args: Vec<Value>, val: Value) -> Result<(), StateError> {
        let f = self.vocab.id(name)?;
        self.set(f, args, val)
    }

    fn store(&mut self, f: SymId, args: Vec<Value>, val: Value) {
        if val == self.vocab.symbol(f).default_value() {
            self.tables[f.index()].remove(&args);
        } else {
            self.tables[f.index()].insert(args, val);
        }
    }

    /// Explicitly stored entries of a table-backed symbol.
    pub fn table(&self, f: SymId) -> &BTreeMap<Vec<Value>, Value> {
        &self.tables[f.index()]
    }

    /// Checked lookup: arity must match.
    pub fn lookup(&self, f: SymId, args: &[Value]) -> Result<Value, StateError> {
        let s = self.vocab.symbol(f);
        if s.arity != args.len() {
            return Err(StateError::Vocabulary(format!(
                "`{}` expects {} arguments, got {}",
                s.name,
                s.arity,
                args.len()
            )));
        }
        Ok(self.apply(f, args))
    }

    pub fn lookup_name(&self, name: &str, args: &[Value]) -> Result<Value, StateError> {
        self.lookup(self.vocab.id(name)?, args)
    }

    /// Value of a nullary symbol, `undef` when the name is unknown.
    pub fn constant(&self, name: &str) -> Value {
        self.vocab.get(name).map_or(Value::Undef, |f| self.apply(f, &[]))
    }

    /// Unchecked lookup used by the evaluator; `args.len()` must equal the arity.
    pub fn apply(&self, f: SymId, args: &[Value]) -> Value {
        match f {
            sym::TRUE => TRUE,
            sym::FALSE => FALSE,
            sym::UNDEF => Value::Undef,
            sym::EMPTY => Value::empty_multiset(),
            sym::RESERVE => Value::Bool(self.is_reserve(&args[0])),
            sym::ATOMIC => Value::Bool(self.is_atomic(&args[0])),
            sym::FIRST => values::first(&args[0]),
            sym::SECOND => values::second(&args[0]),
            sym::BOOLE => values::is_boole(&args[0]),
            sym::NOT => values::not(&args[0]),
            sym::SINGLETON => values::singleton(args[0].clone()),
            sym::BIGUNION => values::big_union(&args[0]),
            sym::ASSET => values::as_set(&args[0]),
            sym::EQ => values::eq(&args[0], &args[1]),
            sym::AND => values::and(&args[0], &args[1]),
            sym::OR => values::or(&args[0], &args[1]),
            sym::IMPLIES => values::implies(&args[0], &args[1]),
            sym::IFF => values::iff(&args[0], &args[1]),
            sym::UNION => values::union(&args[0], &args[1]),
            sym::PAIR => values::mk_pair(args[0].clone(), args[1].clone()),
            sym::ADD | sym::SUB | sym::MUL => match (&args[0], &args[1]) {
                (Value::Int(a), Value::Int(b)) => {
                    let r = match f {
                        sym::ADD => a.checked_add(*b),
                        sym::SUB => a.checked_sub(*b),
                        _ => a.checked_mul(*b),
                    };
                    r.map_or(Value::Undef, Value::Int)
                }
                _ => Value::Undef,
            },
            sym::LT | sym::LE => match (&args[0], &args[1]) {
                (Value::Int(a), Value::Int(b)) => Value::Bool(if f == sym::LT { a < b } else { a <= b }),
                _ => FALSE,
            },
            _ => {
                let s = self.vocab.symbol(f);
                if let Some((_, b)) = &s.builtin {
                    return b(self, args);
                }
                match self.tables[f.index()].get(args) {
                    Some(v) => v.clone(),
                    None => s.default_value(),
                }
            }
        }
    }

    /// `reserve(x)`: `x` is a not-yet-imported reserve atom.
    pub fn is_reserve(&self, v: &Value) -> bool {
        match v {
            Value::Atom(a) => a.reserve_index().is_some_and(|n| n >= self.reserve_next) && !self.carrier.contains(v),
            _ => false,
        }
    }

    /// Membership in the base set of atoms of this state.
    pub fn is_atomic(&self, v: &Value) -> bool {
        match v {
            Value::Atom(_) => self.carrier.contains(v),
            Value::Bool(_) | Value::Undef | Value::Int(_) => true,
            Value::Pair(_) => self.vocab.atomic_pairs,
            Value::Multiset(_) => self.vocab.atomic_multisets,
        }
    }

    /// Fires a consistent update set.
    pub fn fire(&self, delta: &UpdateSet) -> Result<State, StateError> {
        let clashes = delta.clashes();
        if !clashes.is_empty() {
            let rendered = clashes.iter().map(|l| render_location(&self.vocab, l)).collect();
            return Err(StateError::Clash { locations: clashes, rendered });
        }
        let mut next = self.clone();
        for a in &delta.imported {
            next.add_element(Value::Atom(*a))?;
        }
        for u in &delta.updates {
            let s = self.vocab.symbol(u.loc.sym);
            if !s.dynamic {
                return Err(StateError::Vocabulary(format!("update to static symbol `{}`", s.name)));
            }
            if s.arity != u.loc.args.len() {
                return Err(StateError::Vocabulary(format!("arity mismatch in update to `{}`", s.name)));
            }
            if u.loc.sym == sym::RESERVE {
                // Derived from the carrier and the reserve counter.
                continue;
            }
            next.store(u.loc.sym, u.loc.args.clone(), u.val.clone());
        }
        Ok(next)
    }

    /// The unique minimal update set turning `before` into `self`.
    pub fn diff(&self, before: &State) -> Result<UpdateSet, StateError> {
        if self.vocab != before.vocab {
            return Err(StateError::Vocabulary("states have different vocabularies".into()));
        }
        if !before.carrier.is_subset(&self.carrier) {
            return Err(StateError::Carrier("the later state lost carrier elements".into()));
        }
        let mut out = UpdateSet::new();
        for v in self.carrier.difference(&before.carrier) {
            let Value::Atom(a) = v else {
                return Err(StateError::Carrier(format!("{v} appeared in the carrier")));
            };
            out.imported.insert(*a);
            out.insert(Update::new(sym::RESERVE, vec![v.clone()], FALSE));
        }
        for (id, s) in self.vocab.user_symbols() {
            if !self.vocab.is_table(id) {
                continue;
            }
            let (t1, t0) = (&self.tables[id.index()], &before.tables[id.index()]);
            if !s.dynamic {
                if t1 != t0 {
                    return Err(StateError::Vocabulary(format!("static symbol `{}` changed", s.name)));
                }
                continue;
            }
            let keys: BTreeSet<&Vec<Value>> = t1.keys().chain(t0.keys()).collect();
            for k in keys {
                let (v1, v0) = (self.apply(id, k), before.apply(id, k));
                if v1 != v0 {
                    out.insert(Update::new(id, k.clone(), v1));
                }
            }
        }
        Ok(out)
    }

    /// Isomorphic copy under an atom bijection. Atoms outside the map stay put.
    pub fn rename(&self, zeta: &BTreeMap<Atom, Atom>) -> Result<State, StateError> {
        check_bijection(zeta, &self.carrier)?;
        let f = |v: &Value| rename_value(v, zeta);
        let mut out = State::new(self.vocab.clone());
        for v in &self.carrier {
            out.carrier.insert(f(v));
        }
        for (i, t) in self.tables.iter().enumerate() {
            out.tables[i] = t.iter().map(|(k, v)| (k.iter().map(f).collect(), f(v))).collect();
        }
        out.set_reserve_next(self.reserve_next);
        Ok(out)
    }

    /// Moves the next reserve atom into the carrier.
    pub fn import_element(&self) -> (State, Atom) {
        let mut s = self.clone();
        let a = Atom::fresh(s.reserve_next);
        s.carrier.insert(Value::Atom(a));
        s.reserve_next += 1;
        (s, a)
    }

    /// Every atom mentioned anywhere in the state.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut add = |a: Atom| {
            out.insert(a);
        };
        for v in &self.carrier {
            v.for_each_atom(&mut add);
        }
        for t in &self.tables {
            for (k, v) in t {
                k.iter().for_each(|x| x.for_each_atom(&mut add));
                v.for_each_atom(&mut add);
            }
        }
        out
    }
}

fn check_bijection(zeta: &BTreeMap<Atom, Atom>, carrier: &BTreeSet<Value>) -> Result<(), StateError> {
    let image: BTreeSet<Atom> = zeta.values().copied().collect();
    if image.len() != zeta.len() {
        return Err(StateError::Isomorphism("the renaming is not injective".into()));
    }
    for v in carrier {
        if let Value::Atom(a) = v {
            if !zeta.contains_key(a) && image.contains(a) {
                return Err(StateError::Isomorphism(format!("{a} is both fixed and a renaming target")));
            }
        }
    }
    Ok(())
}

pub fn rename_value(v: &Value, zeta: &BTreeMap<Atom, Atom>) -> Value {
    v.map_atoms(&mut |a| *zeta.get(&a).unwrap_or(&a))
}

/// Renames every value in an update set.
pub fn rename_updates(delta: &UpdateSet, zeta: &BTreeMap<Atom, Atom>) -> UpdateSet {
    UpdateSet {
        updates: delta
            .updates
            .iter()
            .map(|u| Update {
                loc: Location { sym: u.loc.sym, args: u.loc.args.iter().map(|v| rename_value(v, zeta)).collect() },
                val: rename_value(&u.val, zeta),
            })
            .collect(),
        imported: delta.imported.iter().map(|a| *zeta.get(a).unwrap_or(a)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph_vocab() -> Arc<Vocabulary> {
        let v = Vocabulary::new()
            .with(Symbol::new("V", 1, SymKind::Bridge).relational())
            .unwrap()
            .with(Symbol::new("E", 2, SymKind::Bridge).relational().dynamic())
            .unwrap()
            .with(Symbol::new("w", 2, SymKind::Bridge).dynamic())
            .unwrap();
        Arc::new(v)
    }

    fn atom(s: &str) -> Value {
        Value::atom(s)
    }

    /// Directed triangle a -> b -> c -> a.
    fn triangle() -> State {
        let mut s = State::new(graph_vocab());
        for x in ["a", "b", "c"] {
            s.add_element(atom(x)).unwrap();
            s.set_by_name("V", vec![atom(x)], TRUE).unwrap();
        }
        for (x, y) in [("a", "b"), ("b", "c"), ("c", "a")] {
            s.set_by_name("E", vec![atom(x), atom(y)], TRUE).unwrap();
            s.set_by_name("w", vec![atom(x), atom(y)], Value::Int(1)).unwrap();
        }
        s
    }

    #[test]
    fn obligatory_symbols_are_static_except_reserve() {
        let v = Vocabulary::new();
        for (id, s) in v.all_symbols() {
            assert_eq!(s.dynamic, id == sym::RESERVE, "{}", s.name);
            assert_eq!(s.kind, SymKind::Background);
        }
        assert_eq!(v.get("pair"), Some(sym::PAIR));
        assert!(v.symbol(sym::AND).relational);
    }

    #[test]
    fn lookup_defaults() {
        let s = triangle();
        assert_eq!(s.lookup_name("E", &[atom("a"), atom("b")]).unwrap(), TRUE);
        assert_eq!(s.lookup_name("E", &[atom("b"), atom("a")]).unwrap(), FALSE);
        assert_eq!(s.lookup_name("w", &[atom("b"), atom("a")]).unwrap(), Value::Undef);
        assert!(s.lookup_name("E", &[atom("a")]).is_err());
        assert!(s.lookup_name("nope", &[]).is_err());
        let fresh = Value::Atom(Atom::fresh(0));
        assert_eq!(s.lookup(sym::RESERVE, &[fresh]).unwrap(), TRUE);
        assert_eq!(s.lookup(sym::ADD, &[Value::Int(2), Value::Int(3)]).unwrap(), Value::Int(5));
        assert_eq!(s.lookup(sym::LT, &[Value::Int(2), atom("a")]).unwrap(), FALSE);
    }

    #[test]
    fn atomic_follows_the_base_set() {
        let s = triangle();
        assert!(s.is_atomic(&atom("a")));
        assert!(!s.is_atomic(&atom("zzz")));
        assert!(s.is_atomic(&Value::Undef));
        assert!(!s.is_atomic(&Value::pair(atom("a"), atom("b"))));
    }

    #[test]
    fn consistency() {
        let e = SymId(sym::COUNT + 1);
        let l = vec![atom("a"), atom("b")];
        assert!(UpdateSet::new().is_consistent().0);
        let dup = UpdateSet::from_updates([Update::new(e, l.clone(), TRUE), Update::new(e, l.clone(), TRUE)]);
        assert_eq!(dup.len(), 1);
        assert!(dup.is_consistent().0);
        let clash = UpdateSet::from_updates([
            Update::new(e, l.clone(), TRUE),
            Update::new(e, l.clone(), FALSE),
            Update::new(e, l.clone(), Value::Undef),
        ]);
        assert_eq!(clash.is_consistent(), (false, vec![Location { sym: e, args: l }]));
        assert!(matches!(triangle().fire(&clash), Err(StateError::Clash { .. })));
    }

    #[test]
    fn fire_and_diff() {
        let s = triangle();
        assert_eq!(s.fire(&UpdateSet::new()).unwrap(), s);
        let e = s.vocab().id("E").unwrap();
        let trivial = UpdateSet::from_updates([Update::new(e, vec![atom("a"), atom("b")], TRUE)]);
        assert_eq!(s.fire(&trivial).unwrap(), s);
        assert!(trivial.is_trivial(&s));
        let one = UpdateSet::from_updates([Update::new(e, vec![atom("b"), atom("a")], TRUE)]);
        let t = s.fire(&one).unwrap();
        assert_eq!(t.diff(&s).unwrap(), one);
        assert_eq!(s.diff(&s).unwrap(), UpdateSet::new());
        let v = s.vocab().id("V").unwrap();
        let bad = UpdateSet::from_updates([Update::new(v, vec![atom("a")], FALSE)]);
        assert!(s.fire(&bad).is_err());
    }

    #[test]
    fn import_adds_a_fresh_atom() {
        let s = triangle();
        let (t, c) = s.import_element();
        let cv = Value::Atom(c);
        assert!(!s.in_carrier(&cv) && t.in_carrier(&cv));
        assert_eq!(t.lookup(sym::RESERVE, std::slice::from_ref(&cv)).unwrap(), FALSE);
        assert_eq!(t.lookup(sym::ATOMIC, std::slice::from_ref(&cv)).unwrap(), TRUE);
        assert_eq!(t.lookup_name("E", &[cv.clone(), cv.clone()]).unwrap(), FALSE);
        let (_, d) = t.import_element();
        assert_ne!(c, d);
        let delta = t.diff(&s).unwrap();
        assert_eq!(delta.imported.len(), 1);
        assert_eq!(s.fire(&delta).unwrap(), t);
    }

    #[test]
    fn rename_swaps_atoms() {
        let s = triangle();
        let a = Atom::named("a");
        let b = Atom::named("b");
        let zeta: BTreeMap<Atom, Atom> = [(a, b), (b, a)].into();
        let r = s.rename(&zeta).unwrap();
        let e = s.vocab().id("E").unwrap();
        assert_eq!(r.table(e).len(), s.table(e).len());
        assert_eq!(r.lookup(e, &[atom("b"), atom("a")]).unwrap(), TRUE);
        assert_eq!(s.rename(&BTreeMap::new()).unwrap(), s);
        let bad: BTreeMap<Atom, Atom> = [(a, b)].into();
        assert!(s.rename(&bad).is_err());
    }

    fn arb_delta() -> impl Strategy<Value = Vec<(usize, usize, u8)>> {
        prop::collection::vec((0usize..3, 0usize..3, 0u8..3), 0..8)
    }

    proptest! {
        #[test]
        fn diff_inverts_fire(items in arb_delta()) {
            let s = triangle();
            let names = ["a", "b", "c"];
            let e = s.vocab().id("E").unwrap();
            let w = s.vocab().id("w").unwrap();
            let mut delta = UpdateSet::new();
            for (x, y, v) in items {
                let args = vec![atom(names[x]), atom(names[y])];
                if v < 2 {
                    delta.insert(Update::new(e, args, Value::Bool(v == 1)));
                } else {
                    delta.insert(Update::new(w, args, Value::Int(x as i64)));
                }
            }
            prop_assume!(delta.is_consistent().0);
            let t = s.fire(&delta).unwrap();
            prop_assert_eq!(t.diff(&s).unwrap(), delta.nontrivial(&s));
        }

        #[test]
        fn rename_commutes_with_fire(items in arb_delta(), perm in Just([2usize, 0, 1])) {
            let s = triangle();
            let names = ["a", "b", "c"];
            let e = s.vocab().id("E").unwrap();
            let delta = UpdateSet::from_updates(items.into_iter().filter(|t| t.2 < 2).map(|(x, y, v)| {
                Update::new(e, vec![atom(names[x]), atom(names[y])], Value::Bool(v == 1))
            }));
            prop_assume!(delta.is_consistent().0);
            let zeta: BTreeMap<Atom, Atom> =
                (0..3).map(|i| (Atom::named(names[i]), Atom::named(names[perm[i]]))).collect();
            let lhs = s.fire(&delta).unwrap().rename(&zeta).unwrap();
            let rhs = s.rename(&zeta).unwrap().fire(&rename_updates(&delta, &zeta)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
