//! Finite purely relational structures and the critical structure of a
//! state with respect to a witness set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use crate::state::State;
use crate::terms::{eval, Env};
use crate::values::Value;
use crate::witness::WitnessSet;

/// Elements are `0..size`. No equality relation is assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelStructure {
    pub size: usize,
    pub relations: Vec<Relation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

impl RelStructure {
    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        self.relations[rel].tuples.contains(args)
    }
}

/// Identifies one binding of one witness term: the term index, the head
/// values and the binder values. Distinct bindings give distinct tags.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultTag {
    pub term_index: usize,
    pub head_values: Vec<Value>,
    pub binding: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Value(Value),
    Tag(MultTag),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Value(v) => write!(f, "{v}"),
            Element::Tag(t) => {
                let b: Vec<String> = t.binding.iter().map(ToString::to_string).collect();
                write!(f, "#{}[{}]", t.term_index, b.join(", "))
            }
        }
    }
}

/// `S|_W`: for the witness term `αi` with head arity `n + 1` the relation
/// `R_i` of arity `n + 2` holds of `(b0, ..., bn, tag)` for every binding
/// that satisfies the guard and produces the head `(b0, ..., bn)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalStructure {
    pub elements: Vec<Element>,
    pub index: BTreeMap<Element, usize>,
    pub structure: RelStructure,
}

impl CriticalStructure {
    pub fn element(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn value_index(&self, v: &Value) -> Option<usize> {
        self.element(&Element::Value(v.clone()))
    }

    /// Indices of the elements that are values rather than tags.
    pub fn value_elements(&self) -> Vec<usize> {
        (0..self.elements.len()).filter(|&i| matches!(self.elements[i], Element::Value(_))).collect()
    }

    pub fn render_tuple(&self, t: &[usize]) -> String {
        let parts: Vec<String> = t.iter().map(|&i| self.elements[i].to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// Every binding of every witness term at `s`, as (term index, head, binding).
pub fn witness_bindings(s: &State, w: &WitnessSet) -> Vec<MultTag> {
    let mut out = Vec::new();
    for (i, t) in w.iter().enumerate() {
        let crate::terms::Term::Compr(c) = t.term() else { continue };
        let n = t.vars().len();
        let mut env = Env::new();
        let _ = c.binder.for_each(s, &mut env, &mut |env| {
            let head: Vec<Value> = t.head.iter().map(|h| eval(s, h, env)).collect();
            let binding: Vec<Value> = env.values().skip(env.len() - n).cloned().collect();
            out.push(MultTag { term_index: i, head_values: head, binding });
            ControlFlow::Continue(())
        });
    }
    out
}

pub fn critical_structure(s: &State, w: &WitnessSet) -> CriticalStructure {
    let bindings = witness_bindings(s, w);
    let mut elements: BTreeSet<Element> = BTreeSet::new();
    for b in &bindings {
        elements.extend(b.head_values.iter().cloned().map(Element::Value));
        elements.insert(Element::Tag(b.clone()));
    }
    let elements: Vec<Element> = elements.into_iter().collect();
    let index: BTreeMap<Element, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut relations: Vec<Relation> = w
        .iter()
        .enumerate()
        .map(|(i, t)| Relation { name: format!("R{i}"), arity: t.arity() + 1, tuples: BTreeSet::new() })
        .collect();
    for b in bindings {
        let mut tuple: Vec<usize> = b.head_values.iter().map(|v| index[&Element::Value(v.clone())]).collect();
        let i = b.term_index;
        tuple.push(index[&Element::Tag(b)]);
        relations[i].tuples.insert(tuple);
    }
    let structure = RelStructure { size: elements.len(), relations };
    CriticalStructure { elements, index, structure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{complement, fixture};
    use crate::witness::{critical_values, extract_witness};

    #[test]
    fn k3_structure() {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        let s = complement::graph_state(&m, 3, &complement::oracle(3, &Default::default()));
        let cs = critical_structure(&s, &w);
        let sizes: Vec<usize> = cs.structure.relations.iter().map(|r| r.tuples.len()).collect();
        // Terms in extraction order: (x != y), (true), the assignment, then
        // the same three under the negated forall guard.
        assert_eq!(sizes, vec![9, 9, 6, 0, 0, 0]);
        let values: BTreeSet<Value> = cs
            .elements
            .iter()
            .filter_map(|e| match e {
                Element::Value(v) => Some(v.clone()),
                Element::Tag(_) => None,
            })
            .collect();
        assert_eq!(values, critical_values(&s, &w));
    }

    #[test]
    fn tags_count_multiplicities() {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        let s = complement::graph_state(&m, 3, &complement::undirected(&[(0, 1)]));
        let cs = critical_structure(&s, &w);
        for (i, t) in w.iter().enumerate() {
            let Value::Multiset(ms) = t.eval(&s) else { panic!() };
            for (head, mult) in ms.entries() {
                let parts = head.untuple(t.arity()).unwrap();
                let ix: Vec<usize> = parts.iter().map(|v| cs.value_index(v).unwrap()).collect();
                let tagged = cs.structure.relations[i].tuples.iter().filter(|tu| tu[..tu.len() - 1] == ix[..]).count();
                assert_eq!(tagged as u64, *mult);
            }
        }
    }

    #[test]
    fn empty_graph_on_no_vertices() {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        let s = complement::graph_state(&m, 0, &Default::default());
        let cs = critical_structure(&s, &w);
        assert!(cs.elements.is_empty());
    }
}
