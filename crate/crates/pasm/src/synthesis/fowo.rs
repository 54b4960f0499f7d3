//! First-order logic without equality over finite relational structures:
//! formulas, model checking, the back-and-forth refinement of tuple
//! partitions, exact type equivalence, and isolating formulas.
//!
//! Exact equivalence uses the fact that a structure and its quotient by
//! the indiscernibility congruence satisfy the same equality-free
//! formulas, and that in the quotient equality is definable. Two tuples
//! therefore have the same type iff an automorphism of the quotient maps
//! one image onto the other.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::structure::RelStructure;

/// Upper bound on the number of tuples or automorphisms materialised.
pub const SCALE_LIMIT: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0} exceeds the desk-scale limit")]
pub struct ScaleError(pub String);

/// An equality-free formula. Variables are numbered.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EqFree {
    True,
    False,
    Atom(usize, Vec<usize>),
    Not(Box<EqFree>),
    And(Vec<EqFree>),
    Or(Vec<EqFree>),
    Exists(usize, Box<EqFree>),
    Forall(usize, Box<EqFree>),
}

impl EqFree {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: EqFree) -> EqFree {
        match f {
            EqFree::True => EqFree::False,
            EqFree::False => EqFree::True,
            EqFree::Not(g) => *g,
            g => EqFree::Not(Box::new(g)),
        }
    }

    /// Conjunction with constant folding, flattening and duplicate removal.
    pub fn and(parts: impl IntoIterator<Item = EqFree>) -> EqFree {
        let mut out: Vec<EqFree> = Vec::new();
        for p in parts {
            match p {
                EqFree::True => {}
                EqFree::False => return EqFree::False,
                EqFree::And(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        dedup(&mut out);
        match out.len() {
            0 => EqFree::True,
            1 => out.pop().unwrap(),
            _ => EqFree::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = EqFree>) -> EqFree {
        let mut out: Vec<EqFree> = Vec::new();
        for p in parts {
            match p {
                EqFree::False => {}
                EqFree::True => return EqFree::True,
                EqFree::Or(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        dedup(&mut out);
        match out.len() {
            0 => EqFree::False,
            1 => out.pop().unwrap(),
            _ => EqFree::Or(out),
        }
    }

    pub fn exists(x: usize, f: EqFree) -> EqFree {
        match f {
            EqFree::True | EqFree::False => f,
            g => EqFree::Exists(x, Box::new(g)),
        }
    }

    pub fn forall(x: usize, f: EqFree) -> EqFree {
        match f {
            EqFree::True | EqFree::False => f,
            g => EqFree::Forall(x, Box::new(g)),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            EqFree::True | EqFree::False | EqFree::Atom(..) => 0,
            EqFree::Not(f) => f.rank(),
            EqFree::And(fs) | EqFree::Or(fs) => fs.iter().map(EqFree::rank).max().unwrap_or(0),
            EqFree::Exists(_, f) | EqFree::Forall(_, f) => 1 + f.rank(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            EqFree::True | EqFree::False | EqFree::Atom(..) => 1,
            EqFree::Not(f) | EqFree::Exists(_, f) | EqFree::Forall(_, f) => 1 + f.size(),
            EqFree::And(fs) | EqFree::Or(fs) => 1 + fs.iter().map(EqFree::size).sum::<usize>(),
        }
    }

    /// Renders with relation names from `a`.
    pub fn render(&self, a: &RelStructure) -> String {
        Render(self, a).to_string()
    }
}

fn dedup(v: &mut Vec<EqFree>) {
    let mut seen = BTreeSet::new();
    v.retain(|f| seen.insert(f.clone()));
}

struct Render<'a>(&'a EqFree, &'a RelStructure);

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.1;
        let join = |f: &mut fmt::Formatter<'_>, fs: &[EqFree], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{}", Render(g, a))?;
            }
            write!(f, ")")
        };
        match self.0 {
            EqFree::True => write!(f, "true"),
            EqFree::False => write!(f, "false"),
            EqFree::Atom(r, args) => {
                let vs: Vec<String> = args.iter().map(|v| format!("x{v}")).collect();
                write!(f, "{}({})", a.relations[*r].name, vs.join(", "))
            }
            EqFree::Not(g) => write!(f, "not {}", Render(g, a)),
            EqFree::And(fs) => join(f, fs, "and"),
            EqFree::Or(fs) => join(f, fs, "or"),
            EqFree::Exists(x, g) => write!(f, "exists x{x} {}", Render(g, a)),
            EqFree::Forall(x, g) => write!(f, "forall x{x} {}", Render(g, a)),
        }
    }
}

/// Truth of `f` in `a` with variable `i` assigned `env[i]`.
pub fn holds(a: &RelStructure, f: &EqFree, env: &mut Vec<Option<usize>>) -> bool {
    match f {
        EqFree::True => true,
        EqFree::False => false,
        EqFree::Atom(r, vars) => {
            let args: Vec<usize> = vars.iter().map(|&v| env[v].expect("free variable is assigned")).collect();
            a.holds(*r, &args)
        }
        EqFree::Not(g) => !holds(a, g, env),
        EqFree::And(fs) => fs.iter().all(|g| holds(a, g, env)),
        EqFree::Or(fs) => fs.iter().any(|g| holds(a, g, env)),
        EqFree::Exists(x, g) | EqFree::Forall(x, g) => {
            if env.len() <= *x {
                env.resize(x + 1, None);
            }
            let saved = env[*x];
            let want = matches!(f, EqFree::Exists(..));
            let mut result = !want;
            for c in 0..a.size {
                env[*x] = Some(c);
                if holds(a, g, env) == want {
                    result = want;
                    break;
                }
            }
            env[*x] = saved;
            result
        }
    }
}

/// Truth of `f` with variables `0..tuple.len()` set to `tuple`.
pub fn holds_at(a: &RelStructure, f: &EqFree, tuple: &[usize]) -> bool {
    let mut env: Vec<Option<usize>> = tuple.iter().copied().map(Some).collect();
    holds(a, f, &mut env)
}

/// Every tuple of length `len`, in lexicographic order.
pub fn all_tuples(size: usize, len: usize) -> Result<Vec<Vec<usize>>, ScaleError> {
    let count = checked_pow(size, len).ok_or_else(|| ScaleError(format!("{size}^{len} tuples")))?;
    Ok((0..count)
        .map(|mut i| {
            let mut t = vec![0; len];
            for p in (0..len).rev() {
                t[p] = i % size;
                i /= size;
            }
            t
        })
        .collect())
}

fn checked_pow(size: usize, len: usize) -> Option<usize> {
    let n = size.checked_pow(len as u32)?;
    (n <= SCALE_LIMIT).then_some(n)
}

/// The atoms over variables `0..k`, in a fixed order: relation first, then
/// argument tuples lexicographically.
fn atoms(a: &RelStructure, k: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (r, rel) in a.relations.iter().enumerate() {
        if k == 0 && rel.arity > 0 {
            continue;
        }
        for args in all_tuples(k.max(1), rel.arity).unwrap_or_default() {
            out.push((r, args));
        }
    }
    out
}

/// The atomic profile of a tuple: which atoms over its positions hold.
pub fn profile(a: &RelStructure, t: &[usize]) -> Vec<bool> {
    atoms(a, t.len()).iter().map(|(r, args)| a.holds(*r, &args.iter().map(|&i| t[i]).collect::<Vec<_>>())).collect()
}

/// A partition of `A^len` given by a block id per tuple (lexicographic index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub len: usize,
    pub size: usize,
    pub block: Vec<usize>,
    /// The refinement level at which the partition was reached.
    pub level: usize,
}

impl Partition {
    pub fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.size + x)
    }

    pub fn same(&self, x: &[usize], y: &[usize]) -> bool {
        self.block[self.index(x)] == self.block[self.index(y)]
    }

    pub fn blocks(&self) -> usize {
        self.block.iter().collect::<BTreeSet<_>>().len()
    }

    /// Same blocks, ignoring ids and levels.
    pub fn same_blocks(&self, other: &Partition) -> bool {
        if self.block.len() != other.block.len() {
            return false;
        }
        let mut fwd = HashMap::new();
        let mut bwd = HashMap::new();
        self.block.iter().zip(&other.block).all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *bwd.entry(y).or_insert(x) == x)
    }
}

fn canonical_ids<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k).or_insert(n)
        })
        .collect()
}

/// The partition of `A^len` by the equivalence of the `m`-round game:
/// level 0 compares atomic profiles, and level `m + 1` additionally
/// compares the sets of level-`m` classes of all one-element extensions.
pub fn level_partition(a: &RelStructure, len: usize, m: usize) -> Result<Partition, ScaleError> {
    let block = level_classes(a, len, m)?;
    Ok(Partition { len, size: a.size, block, level: m })
}

fn level_classes(a: &RelStructure, k: usize, m: usize) -> Result<Vec<usize>, ScaleError> {
    let tuples = all_tuples(a.size, k)?;
    if m == 0 {
        return Ok(canonical_ids(tuples.iter().map(|t| profile(a, t)).collect()));
    }
    let lower = level_classes(a, k, m - 1)?;
    let ext = level_classes(a, k + 1, m - 1)?;
    let keys = (0..tuples.len())
        .map(|i| {
            let succ: BTreeSet<usize> = (0..a.size).map(|c| ext[i * a.size + c]).collect();
            (lower[i], succ)
        })
        .collect();
    Ok(canonical_ids(keys))
}

/// Exact equality-free type equivalence through the indiscernibility
/// quotient and its automorphism group.
#[derive(Clone, Debug)]
pub struct TypeOracle {
    /// Quotient class of every element.
    pub class: Vec<usize>,
    pub quotient: RelStructure,
    pub automorphisms: Vec<Vec<usize>>,
}

impl TypeOracle {
    pub fn new(a: &RelStructure) -> Result<TypeOracle, ScaleError> {
        let class = indiscernibility(a);
        let size = class.iter().max().map_or(0, |m| m + 1);
        let relations = a
            .relations
            .iter()
            .map(|r| super::structure::Relation {
                name: r.name.clone(),
                arity: r.arity,
                tuples: r.tuples.iter().map(|t| t.iter().map(|&e| class[e]).collect()).collect(),
            })
            .collect();
        let quotient = RelStructure { size, relations };
        let automorphisms = automorphisms(&quotient)?;
        Ok(TypeOracle { class, quotient, automorphisms })
    }

    pub fn same_type(&self, x: &[usize], y: &[usize]) -> bool {
        if x.len() != y.len() {
            return false;
        }
        let px: Vec<usize> = x.iter().map(|&e| self.class[e]).collect();
        let py: Vec<usize> = y.iter().map(|&e| self.class[e]).collect();
        self.automorphisms.iter().any(|s| px.iter().zip(&py).all(|(&u, &v)| s[u] == v))
    }

    /// The type partition of `A^len`.
    pub fn partition(&self, len: usize) -> Result<Partition, ScaleError> {
        let size = self.class.len();
        let tuples = all_tuples(size, len)?;
        let mut block = vec![usize::MAX; tuples.len()];
        let mut next = 0;
        let index = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * size + x);
        // Group original tuples by the orbit of their quotient image.
        let mut orbit_id: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, t) in tuples.iter().enumerate() {
            let img: Vec<usize> = t.iter().map(|&e| self.class[e]).collect();
            let id = match orbit_id.get(&img) {
                Some(&id) => id,
                None => {
                    let id = next;
                    next += 1;
                    for s in &self.automorphisms {
                        orbit_id.insert(img.iter().map(|&u| s[u]).collect(), id);
                    }
                    id
                }
            };
            block[index(t)] = id;
            debug_assert_eq!(index(t), i);
        }
        Ok(Partition { len, size, block, level: usize::MAX })
    }
}

/// `a ~ b` iff exchanging any occurrences of `a` and `b` in any tuple never
/// changes membership in any relation. Returns a class id per element.
pub fn indiscernibility(a: &RelStructure) -> Vec<usize> {
    let swap_closed = |x: usize, y: usize| {
        a.relations.iter().all(|r| {
            r.tuples.iter().all(|t| {
                let pos: Vec<usize> = (0..t.len()).filter(|&p| t[p] == x).collect();
                (1u32..1 << pos.len()).all(|mask| {
                    let mut u = t.clone();
                    for (bit, &p) in pos.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            u[p] = y;
                        }
                    }
                    r.tuples.contains(&u)
                })
            })
        })
    };
    let mut class = vec![usize::MAX; a.size];
    let mut next = 0;
    for x in 0..a.size {
        if class[x] != usize::MAX {
            continue;
        }
        class[x] = next;
        for (y, c) in class.iter_mut().enumerate().skip(x + 1) {
            if *c == usize::MAX && swap_closed(x, y) && swap_closed(y, x) {
                *c = next;
            }
        }
        next += 1;
    }
    class
}

/// All automorphisms by backtracking over elements with matching
/// occurrence signatures.
pub fn automorphisms(a: &RelStructure) -> Result<Vec<Vec<usize>>, ScaleError> {
    let n = a.size;
    let mut sig: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    let mut occurs: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
    for (r, rel) in a.relations.iter().enumerate() {
        for t in &rel.tuples {
            for (p, &e) in t.iter().enumerate() {
                sig[e].push((r, p, 0));
            }
            let last = *t.iter().max().expect("relations have positive arity");
            occurs[last].push((r, t.clone()));
        }
    }
    for s in &mut sig {
        s.sort();
        let mut counted: Vec<(usize, usize, usize)> = Vec::new();
        for &(r, p, _) in s.iter() {
            match counted.last_mut() {
                Some(c) if c.0 == r && c.1 == p => c.2 += 1,
                _ => counted.push((r, p, 1)),
            }
        }
        *s = counted;
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        a: &RelStructure,
        e: usize,
        sig: &[Vec<(usize, usize, usize)>],
        occurs: &[Vec<(usize, Vec<usize>)>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), ScaleError> {
        if e == a.size {
            if out.len() >= SCALE_LIMIT / 16 {
                return Err(ScaleError("the automorphism group".into()));
            }
            out.push(map.clone());
            return Ok(());
        }
        for c in 0..a.size {
            if used[c] || sig[c] != sig[e] {
                continue;
            }
            map[e] = c;
            // Tuples whose largest element is `e` are now fully mapped.
            let ok = occurs[e].iter().all(|(r, t)| a.holds(*r, &t.iter().map(|&x| map[x]).collect::<Vec<_>>()));
            if ok {
                used[c] = true;
                go(a, e + 1, sig, occurs, map, used, out)?;
                used[c] = false;
            }
        }
        map[e] = usize::MAX;
        Ok(())
    }
    go(a, 0, &sig, &occurs, &mut map, &mut used, &mut out)?;
    Ok(out)
}

/// The equality-free type partition of `A^len`, reached by iterating the
/// back-and-forth refinement until it matches exact type equivalence. The
/// partition's `level` is the stabilisation level `m*`.
pub fn fo_woeq_partition(a: &RelStructure, len: usize) -> Result<Partition, ScaleError> {
    let exact = TypeOracle::new(a)?.partition(len)?;
    for m in 0.. {
        checked_pow(a.size, len + m).ok_or_else(|| ScaleError(format!("refinement level {m} over {} elements", a.size)))?;
        let p = level_partition(a, len, m)?;
        if p.same_blocks(&exact) {
            return Ok(p);
        }
    }
    unreachable!("the loop returns or fails")
}

/// Two tuples, a quantifier budget and whether to minimise size.
type SeparatorKey = (Vec<usize>, Vec<usize>, usize, bool);

/// Builds separating formulas from the refinement game. A separator for
/// `(x, y)` holds at `x` and fails at `y`.
pub struct Separator<'a> {
    a: &'a RelStructure,
    profiles: HashMap<Vec<usize>, Vec<bool>>,
    memo: HashMap<SeparatorKey, Option<EqFree>>,
}

impl<'a> Separator<'a> {
    pub fn new(a: &'a RelStructure) -> Separator<'a> {
        Separator { a, profiles: HashMap::new(), memo: HashMap::new() }
    }

    fn profile(&mut self, t: &[usize]) -> &Vec<bool> {
        let a = self.a;
        self.profiles.entry(t.to_vec()).or_insert_with(|| profile(a, t))
    }

    /// A separator of quantifier rank at most `m`, if there is one.
    pub fn separate(&mut self, x: &[usize], y: &[usize], m: usize) -> Option<EqFree> {
        self.separate_with(x, y, m, false)
    }

    /// With `smallest`, the outermost quantifier step compares every
    /// game move and keeps the smallest formula; inner steps take the
    /// first move that works.
    fn separate_with(&mut self, x: &[usize], y: &[usize], m: usize, smallest: bool) -> Option<EqFree> {
        let key = (x.to_vec(), y.to_vec(), m, smallest);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let r = self.compute(x, y, m, smallest);
        self.memo.insert(key, r.clone());
        r
    }

    fn compute(&mut self, x: &[usize], y: &[usize], m: usize, smallest: bool) -> Option<EqFree> {
        let px = self.profile(x).clone();
        let py = self.profile(y);
        if let Some(i) = px.iter().zip(py).position(|(u, v)| u != v) {
            let (r, args) = atoms(self.a, x.len()).swap_remove(i);
            let atom = EqFree::Atom(r, args);
            return Some(if px[i] { atom } else { EqFree::not(atom) });
        }
        if m == 0 {
            return None;
        }
        let k = x.len();
        let n = self.a.size;
        let ext = |t: &[usize], c: usize| {
            let mut u = t.to_vec();
            u.push(c);
            u
        };
        // Forth: some extension of x is unmatched by every extension of y.
        // Back: some extension of y is unmatched by every extension of x.
        let mut best: Option<EqFree> = None;
        for (from, to, negate) in [(x, y, false), (y, x, true)] {
            for c in 0..n {
                let fc = ext(from, c);
                let parts: Option<Vec<EqFree>> = (0..n).map(|d| self.separate(&fc, &ext(to, d), m - 1)).collect();
                if let Some(parts) = parts {
                    let body = EqFree::exists(k, EqFree::and(parts));
                    let f = if negate { EqFree::not(body) } else { body };
                    if !smallest {
                        return Some(f);
                    }
                    if best.as_ref().is_none_or(|b| f.size() < b.size()) {
                        best = Some(f);
                    }
                }
            }
        }
        best
    }

    /// A separator of least quantifier rank, searching up to `max_rank`.
    pub fn least(&mut self, x: &[usize], y: &[usize], max_rank: usize) -> Option<EqFree> {
        (0..=max_rank).find_map(|m| self.separate_with(x, y, m, true))
    }
}

/// Largest quantifier rank tried when separating two tuples of different type.
pub const MAX_SEPARATOR_RANK: usize = 3;

/// A formula that holds in `a` exactly at the tuples with the same
/// equality-free type as `t`: a conjunction of least-rank separators. Each
/// round adds the separator that rejects the most tuples the conjunction
/// still wrongly accepts, the smaller one on ties.
pub fn isolating_formula(a: &RelStructure, t: &[usize]) -> Result<EqFree, ScaleError> {
    let types = TypeOracle::new(a)?;
    isolating_formula_with(a, &types, t, &all_tuples(a.size, t.len())?)
}

/// As [`isolating_formula`], separating `t` only from `candidates`.
pub fn isolating_formula_with(
    a: &RelStructure,
    types: &TypeOracle,
    t: &[usize],
    candidates: &[Vec<usize>],
) -> Result<EqFree, ScaleError> {
    let mut sep = Separator::new(a);
    let mut open: Vec<&Vec<usize>> = candidates.iter().filter(|y| !types.same_type(t, y)).collect();
    let mut parts = Vec::new();
    while !open.is_empty() {
        let mut best: Option<(usize, EqFree)> = None;
        for y in &open {
            let psi = sep
                .least(t, y, MAX_SEPARATOR_RANK)
                .ok_or_else(|| ScaleError(format!("separating tuples beyond rank {MAX_SEPARATOR_RANK}")))?;
            let rejected = open.iter().filter(|z| !holds_at(a, &psi, z)).count();
            let better = match &best {
                None => true,
                Some((r, b)) => rejected > *r || (rejected == *r && psi.size() < b.size()),
            };
            if better {
                best = Some((rejected, psi));
            }
        }
        let (_, psi) = best.expect("open is non-empty");
        open.retain(|z| holds_at(a, &psi, z));
        parts.push(psi);
    }
    Ok(EqFree::and(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::structure::Relation;

    fn unary(size: usize, rels: &[(&str, &[usize])]) -> RelStructure {
        RelStructure {
            size,
            relations: rels
                .iter()
                .map(|(n, xs)| Relation { name: n.to_string(), arity: 1, tuples: xs.iter().map(|&x| vec![x]).collect() })
                .collect(),
        }
    }

    fn graph(size: usize, edges: &[(usize, usize)]) -> RelStructure {
        RelStructure {
            size,
            relations: vec![Relation {
                name: "E".into(),
                arity: 2,
                tuples: edges.iter().map(|&(x, y)| vec![x, y]).collect(),
            }],
        }
    }

    #[test]
    fn symmetric_unary_elements_share_a_block() {
        let a = unary(3, &[("R", &[0, 1])]);
        let p = fo_woeq_partition(&a, 1).unwrap();
        assert!(p.same(&[0], &[1]));
        assert!(!p.same(&[0], &[2]));
        let chi = isolating_formula(&a, &[0]).unwrap();
        assert!(holds_at(&a, &chi, &[0]));
        assert!(holds_at(&a, &chi, &[1]));
        assert!(!holds_at(&a, &chi, &[2]));
    }

    #[test]
    fn a_second_predicate_splits_at_level_zero() {
        let a = unary(3, &[("R", &[0, 1]), ("S", &[0])]);
        let p = fo_woeq_partition(&a, 1).unwrap();
        assert!(!p.same(&[0], &[1]));
        assert_eq!(p.level, 0);
        assert!(!holds_at(&a, &isolating_formula(&a, &[0]).unwrap(), &[1]));
    }

    #[test]
    fn without_equality_duplicates_are_invisible() {
        // Two sources pointing at one sink are indiscernible, and a single
        // source pointing at a single sink has the same types.
        let a = graph(3, &[(0, 1), (2, 1)]);
        let o = TypeOracle::new(&a).unwrap();
        assert_eq!(o.quotient.size, 2);
        assert!(o.same_type(&[0, 0], &[0, 2]));
        let p = fo_woeq_partition(&a, 2).unwrap();
        assert!(p.same(&[0, 1], &[2, 1]));
        assert!(p.same(&[0, 2], &[2, 2]));
    }

    #[test]
    fn path_levels_need_quantifiers() {
        // 0 -> 1 -> 2: the middle vertex differs at level 0 (no loops) only
        // through quantified edges.
        let a = graph(3, &[(0, 1), (1, 2)]);
        let p0 = level_partition(&a, 1, 0).unwrap();
        assert_eq!(p0.blocks(), 1);
        let p = fo_woeq_partition(&a, 1).unwrap();
        assert_eq!(p.blocks(), 3);
        assert_eq!(p.level, 1);
        let next = level_partition(&a, 1, p.level + 1).unwrap();
        assert!(next.same_blocks(&p));
        for x in 0..3 {
            let chi = isolating_formula(&a, &[x]).unwrap();
            for y in 0..3 {
                assert_eq!(holds_at(&a, &chi, &[y]), x == y, "{}", chi.render(&a));
            }
        }
    }

    #[test]
    fn separators_hold_on_the_left_only() {
        let a = graph(3, &[(0, 1), (1, 2), (2, 2)]);
        let mut s = Separator::new(&a);
        for x in 0..3 {
            for y in 0..3 {
                if let Some(f) = s.least(&[x], &[y], 3) {
                    assert!(holds_at(&a, &f, &[x]));
                    assert!(!holds_at(&a, &f, &[y]));
                }
            }
        }
    }
}
