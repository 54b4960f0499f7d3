//! The value domain of computation states.
//!
//! A [`Value`] is an atom, a truth value, `undef`, an integer, an ordered pair
//! or a finite multiset. Multisets are kept in canonical form (entries sorted
//! by [`Value`]'s total order, multiplicities at least one), so derived
//! structural equality is mathematical equality.
//!
//! All obligatory background operations are total: whenever an argument has
//! the wrong shape the result is `undef` (or `false` for the relational ones).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

/// Ids at or above this bound belong to reserve atoms, which carry no label.
pub const FRESH_BASE: u64 = 1 << 40;

/// An opaque element of a primary carrier.
///
/// Atoms compare by id only. Labelled atoms are interned process-wide, so two
/// states that mention `@a` share the same atom.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(u64);

#[derive(Default)]
struct Registry {
    by_label: HashMap<Arc<str>, u64>,
    labels: Vec<Arc<str>>,
}

fn registry() -> &'static RwLock<Registry> {
    static REG: OnceLock<RwLock<Registry>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(Registry::default()))
}

impl Atom {
    /// The atom carrying `label`, interning it on first use.
    pub fn named(label: &str) -> Atom {
        if let Some(id) = registry().read().unwrap().by_label.get(label) {
            return Atom(*id);
        }
        let mut reg = registry().write().unwrap();
        if let Some(id) = reg.by_label.get(label) {
            return Atom(*id);
        }
        let label: Arc<str> = Arc::from(label);
        reg.labels.push(label.clone());
        let id = reg.labels.len() as u64;
        reg.by_label.insert(label, id);
        Atom(id)
    }

    /// The `n`-th reserve atom. These never collide with labelled atoms.
    pub fn fresh(n: u64) -> Atom {
        Atom(FRESH_BASE + n)
    }

    pub fn id(self) -> u64 {
        self.0
    }

    /// Position in the reserve, for atoms drawn from it.
    pub fn reserve_index(self) -> Option<u64> {
        self.0.checked_sub(FRESH_BASE)
    }

    pub fn label(self) -> Option<Arc<str>> {
        if self.0 == 0 || self.0 >= FRESH_BASE {
            return None;
        }
        registry().read().unwrap().labels.get(self.0 as usize - 1).cloned()
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.reserve_index(), self.label()) {
            (Some(n), _) => write!(f, "@#{n}"),
            (None, Some(l)) => write!(f, "@{l}"),
            (None, None) => write!(f, "@?{}", self.0),
        }
    }
}

/// A finite multiset in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multiset {
    entries: Vec<(Value, u64)>,
}

impl Multiset {
    pub fn empty() -> Multiset {
        Multiset::default()
    }

    /// Builds a multiset from arbitrary `(value, multiplicity)` pairs; zero
    /// multiplicities vanish and repeated values add up.
    pub fn from_counts<I: IntoIterator<Item = (Value, u64)>>(items: I) -> Multiset {
        let mut map: BTreeMap<Value, u64> = BTreeMap::new();
        for (v, n) in items {
            if n > 0 {
                *map.entry(v).or_insert(0) += n;
            }
        }
        Multiset { entries: map.into_iter().collect() }
    }

    pub fn from_values<I: IntoIterator<Item = Value>>(items: I) -> Multiset {
        Multiset::from_counts(items.into_iter().map(|v| (v, 1)))
    }

    pub fn from_map(map: BTreeMap<Value, u64>) -> Multiset {
        Multiset { entries: map.into_iter().filter(|(_, n)| *n > 0).collect() }
    }

    pub fn entries(&self) -> &[(Value, u64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct elements.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Total number of elements counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, n)| n).sum()
    }

    pub fn mult(&self, x: &Value) -> u64 {
        match self.entries.binary_search_by(|(v, _)| v.cmp(x)) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&Value::Multiset(Arc::new(self.clone())), f)
    }
}

/// An element of a computation state's base set.
///
/// The variant order is the kind rank of the total order:
/// `Undef < Bool < Int < Atom < Pair < Multiset`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Undef,
    Bool(bool),
    Int(i64),
    Atom(Atom),
    Pair(Arc<(Value, Value)>),
    Multiset(Arc<Multiset>),
}

pub const TRUE: Value = Value::Bool(true);
pub const FALSE: Value = Value::Bool(false);

impl Value {
    pub fn atom(label: &str) -> Value {
        Value::Atom(Atom::named(label))
    }

    pub fn pair(x: Value, y: Value) -> Value {
        Value::Pair(Arc::new((x, y)))
    }

    /// Right-nested pair encoding of a tuple: `(t0, (t1, (..., tn)))`.
    /// A one-element tuple is the element itself.
    pub fn tuple(items: &[Value]) -> Value {
        match items {
            [] => Value::Undef,
            [x] => x.clone(),
            [x, rest @ ..] => Value::pair(x.clone(), Value::tuple(rest)),
        }
    }

    /// Inverse of [`Value::tuple`] for a known length.
    pub fn untuple(&self, len: usize) -> Option<Vec<Value>> {
        let mut out = Vec::with_capacity(len);
        let mut cur = self;
        for _ in 1..len {
            let Value::Pair(p) = cur else { return None };
            out.push(p.0.clone());
            cur = &p.1;
        }
        if len > 0 {
            out.push(cur.clone());
        }
        Some(out)
    }

    pub fn multiset(m: Multiset) -> Value {
        Value::Multiset(Arc::new(m))
    }

    pub fn empty_multiset() -> Value {
        Value::multiset(Multiset::empty())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Value::Atom(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_multiset(&self) -> Option<&Multiset> {
        match self {
            Value::Multiset(m) => Some(m),
            _ => None,
        }
    }

    /// Applies `f` to every atom, rebuilding pairs and multisets around it.
    pub fn map_atoms(&self, f: &mut impl FnMut(Atom) -> Atom) -> Value {
        match self {
            Value::Atom(a) => Value::Atom(f(*a)),
            Value::Pair(p) => Value::pair(p.0.map_atoms(f), p.1.map_atoms(f)),
            Value::Multiset(m) => Value::multiset(Multiset::from_counts(
                m.entries.iter().map(|(v, n)| (v.map_atoms(f), *n)),
            )),
            other => other.clone(),
        }
    }

    /// Calls `f` on every atom occurring anywhere inside the value.
    pub fn for_each_atom(&self, f: &mut impl FnMut(Atom)) {
        match self {
            Value::Atom(a) => f(*a),
            Value::Pair(p) => {
                p.0.for_each_atom(f);
                p.1.for_each_atom(f);
            }
            Value::Multiset(m) => m.entries.iter().for_each(|(v, _)| v.for_each_atom(f)),
            _ => {}
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Value {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Value {
        Value::Int(n)
    }
}

impl From<Atom> for Value {
    fn from(a: Atom) -> Value {
        Value::Atom(a)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => f.write_str("undef"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Value::Multiset(m) => {
                if m.is_empty() {
                    return f.write_str("{{}}");
                }
                f.write_str("{{ ")?;
                for (i, (v, n)) in m.entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v} : {n}")?;
                }
                f.write_str(" }}")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The total order on values used for canonicalization.
pub fn value_order(a: &Value, b: &Value) -> std::cmp::Ordering {
    a.cmp(b)
}

pub fn mk_pair(x: Value, y: Value) -> Value {
    Value::pair(x, y)
}

pub fn first(x: &Value) -> Value {
    match x {
        Value::Pair(p) => p.0.clone(),
        _ => Value::Undef,
    }
}

pub fn second(x: &Value) -> Value {
    match x {
        Value::Pair(p) => p.1.clone(),
        _ => Value::Undef,
    }
}

pub fn singleton(x: Value) -> Value {
    Value::multiset(Multiset::from_values([x]))
}

pub fn union(x: &Value, y: &Value) -> Value {
    match (x, y) {
        (Value::Multiset(a), Value::Multiset(b)) => Value::multiset(Multiset::from_counts(
            a.entries.iter().chain(b.entries.iter()).cloned(),
        )),
        _ => Value::Undef,
    }
}

/// Generalized union: `Mult(x, ⨄M) = Σ Mult(x, Mi) · Mult(Mi, M)`.
pub fn big_union(x: &Value) -> Value {
    let Value::Multiset(outer) = x else { return Value::Undef };
    let mut acc: BTreeMap<Value, u64> = BTreeMap::new();
    for (inner, k) in &outer.entries {
        let Value::Multiset(inner) = inner else { return Value::Undef };
        for (v, n) in &inner.entries {
            *acc.entry(v.clone()).or_insert(0) += n * k;
        }
    }
    Value::multiset(Multiset::from_map(acc))
}

pub fn as_set(x: &Value) -> Value {
    match x {
        Value::Multiset(m) => {
            Value::multiset(Multiset { entries: m.entries.iter().map(|(v, _)| (v.clone(), 1)).collect() })
        }
        _ => Value::Undef,
    }
}

/// Multiplicity of `x` in `m`; zero when `m` is not a multiset.
pub fn mult(x: &Value, m: &Value) -> u64 {
    m.as_multiset().map_or(0, |m| m.mult(x))
}

fn both_bool(x: &Value, y: &Value) -> Option<(bool, bool)> {
    Some((x.as_bool()?, y.as_bool()?))
}

pub fn not(x: &Value) -> Value {
    Value::Bool(x.as_bool().is_some_and(|b| !b))
}

pub fn and(x: &Value, y: &Value) -> Value {
    Value::Bool(both_bool(x, y).is_some_and(|(a, b)| a && b))
}

pub fn or(x: &Value, y: &Value) -> Value {
    Value::Bool(both_bool(x, y).is_some_and(|(a, b)| a || b))
}

pub fn implies(x: &Value, y: &Value) -> Value {
    Value::Bool(both_bool(x, y).is_some_and(|(a, b)| !a || b))
}

pub fn iff(x: &Value, y: &Value) -> Value {
    Value::Bool(both_bool(x, y).is_some_and(|(a, b)| a == b))
}

pub fn eq(x: &Value, y: &Value) -> Value {
    Value::Bool(x == y)
}

pub fn is_boole(x: &Value) -> Value {
    Value::Bool(matches!(x, Value::Bool(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn a() -> Value {
        Value::atom("a")
    }
    fn b() -> Value {
        Value::atom("b")
    }

    #[test]
    fn kind_rank_orders_values() {
        assert_eq!(value_order(&Value::Undef, &FALSE), Ordering::Less);
        assert_eq!(value_order(&FALSE, &Value::Int(-4)), Ordering::Less);
        assert_eq!(value_order(&Value::Int(9), &a()), Ordering::Less);
        assert_eq!(value_order(&a(), &Value::pair(a(), a())), Ordering::Less);
        assert_eq!(value_order(&Value::pair(a(), a()), &Value::empty_multiset()), Ordering::Less);
        let seven = Value::Atom(Atom::fresh(7));
        assert_eq!(value_order(&seven, &seven), Ordering::Equal);
    }

    #[test]
    fn pairs_compare_lexicographically() {
        let c = Value::atom("c");
        assert_eq!(b().cmp(&c), Ordering::Less);
        assert_eq!(Value::pair(a(), b()).cmp(&Value::pair(a(), c)), Ordering::Less);
    }

    #[test]
    fn pair_projections() {
        assert_eq!(first(&mk_pair(a(), Value::Int(3))), a());
        assert_eq!(second(&Value::Int(5)), Value::Undef);
        assert_eq!(first(&first(&mk_pair(mk_pair(a(), b()), Value::atom("c")))), a());
    }

    #[test]
    fn multiset_operations() {
        let aa = Value::multiset(Multiset::from_values([a(), a()]));
        let ab = Value::multiset(Multiset::from_values([a(), b()]));
        let u = union(&aa, &ab);
        assert_eq!(mult(&a(), &u), 3);
        assert_eq!(mult(&b(), &u), 1);
        let single_a = Value::multiset(Multiset::from_values([a()]));
        let nested = Value::multiset(Multiset::from_counts([(aa.clone(), 1), (single_a, 2)]));
        assert_eq!(big_union(&nested), Value::multiset(Multiset::from_counts([(a(), 4)])));
        let m = Value::multiset(Multiset::from_counts([(a(), 3), (b(), 2)]));
        assert_eq!(as_set(&m), Value::multiset(Multiset::from_values([a(), b()])));
        assert_eq!(union(&Value::Int(3), &Value::empty_multiset()), Value::Undef);
        assert_eq!(big_union(&aa), Value::Undef);
    }

    #[test]
    fn connectives_reject_non_booleans() {
        assert_eq!(and(&TRUE, &TRUE), TRUE);
        assert_eq!(not(&Value::Int(3)), FALSE);
        assert_eq!(or(&TRUE, &Value::Undef), FALSE);
        assert_eq!(implies(&FALSE, &FALSE), TRUE);
        assert_eq!(iff(&FALSE, &FALSE), TRUE);
        let m = Value::multiset(Multiset::from_counts([(a(), 2)]));
        assert_eq!(eq(&m, &m.clone()), TRUE);
        assert_eq!(is_boole(&Value::Undef), FALSE);
    }

    #[test]
    fn tuple_encoding_round_trips() {
        let items = vec![a(), Value::Int(1), b()];
        let t = Value::tuple(&items);
        assert_eq!(t, Value::pair(a(), Value::pair(Value::Int(1), b())));
        assert_eq!(t.untuple(3).unwrap(), items);
        assert_eq!(Value::tuple(&[a()]), a());
    }

    #[test]
    fn rendering() {
        assert_eq!(Value::pair(a(), Value::Int(-2)).to_string(), "(@a, -2)");
        let m = Value::multiset(Multiset::from_counts([(TRUE, 2), (FALSE, 1)]));
        assert_eq!(m.to_string(), "{{ false : 1, true : 2 }}");
        assert_eq!(Value::empty_multiset().to_string(), "{{}}");
        assert_eq!(Value::Atom(Atom::fresh(3)).to_string(), "@#3");
    }

    pub(crate) fn arb_value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            Just(Value::Undef),
            any::<bool>().prop_map(Value::Bool),
            (-3i64..4).prop_map(Value::Int),
            prop::sample::select(vec!["a", "b", "c"]).prop_map(Value::atom),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Value::pair(x, y)),
                prop::collection::vec((inner, 1u64..3), 0..4)
                    .prop_map(|items| Value::multiset(Multiset::from_counts(items))),
            ]
        })
    }

    fn arb_multiset() -> impl Strategy<Value = Value> {
        prop::collection::vec((arb_value(), 1u64..4), 0..5)
            .prop_map(|items| Value::multiset(Multiset::from_counts(items)))
    }

    proptest! {
        #[test]
        fn canonical_form_ignores_insertion_order(items in prop::collection::vec((arb_value(), 1u64..4), 0..6)) {
            let mut rev = items.clone();
            rev.reverse();
            prop_assert_eq!(Multiset::from_counts(items), Multiset::from_counts(rev));
        }

        #[test]
        fn big_union_of_singleton_is_identity(m in arb_multiset()) {
            prop_assert_eq!(big_union(&singleton(m.clone())), m);
        }

        #[test]
        fn union_laws(x in arb_multiset(), y in arb_multiset(), z in arb_multiset(), probe in arb_value()) {
            prop_assert_eq!(union(&x, &y), union(&y, &x));
            prop_assert_eq!(union(&union(&x, &y), &z), union(&x, &union(&y, &z)));
            prop_assert_eq!(mult(&probe, &union(&x, &y)), mult(&probe, &x) + mult(&probe, &y));
        }

        #[test]
        fn as_set_is_idempotent(m in arb_multiset()) {
            prop_assert_eq!(as_set(&as_set(&m)), as_set(&m));
        }

        #[test]
        fn order_is_total_and_consistent(x in arb_value(), y in arb_value()) {
            prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
            prop_assert_eq!(x.cmp(&y) == Ordering::Equal, x == y);
        }
    }
}
