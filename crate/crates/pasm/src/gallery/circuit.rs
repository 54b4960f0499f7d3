//! Boolean circuits of unbounded fan-in.
//!
//! Gates are `@g0, @g1, ...`. Input gate `k` is labelled `@x{k}`; the other
//! labels are `@neg`, `@or` and `@and`, held by the constants `NEG`, `OR`
//! and `AND`.

use rand::Rng;

use super::{blank_state, put, FixtureError};
use crate::machine::Machine;
use crate::state::State;
use crate::values::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Input(usize),
    Not,
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub labels: Vec<Label>,
    /// `(from, to)`: the output of `from` feeds `to`.
    pub wires: Vec<(usize, usize)>,
}

pub fn gate(i: usize) -> Value {
    Value::atom(&format!("g{i}"))
}

fn label_atom(l: Label) -> Value {
    match l {
        Label::Input(k) => Value::atom(&format!("x{k}")),
        Label::Not => Value::atom("neg"),
        Label::And => Value::atom("and"),
        Label::Or => Value::atom("or"),
    }
}

impl Circuit {
    pub fn inputs(&self) -> usize {
        self.labels.iter().filter_map(|l| if let Label::Input(k) = l { Some(k + 1) } else { None }).max().unwrap_or(0)
    }

    fn preds(&self, g: usize) -> Vec<usize> {
        self.wires.iter().filter(|w| w.1 == g).map(|w| w.0).collect()
    }

    /// Gates in a topological order, after checking fan-in constraints.
    pub fn topological_order(&self) -> Result<Vec<usize>, FixtureError> {
        let n = self.labels.len();
        for (g, l) in self.labels.iter().enumerate() {
            let fan_in = self.preds(g).len();
            match l {
                Label::Input(_) if fan_in != 0 => {
                    return Err(FixtureError::Invalid(format!("input gate {g} has incoming wires")))
                }
                Label::Not if fan_in != 1 => {
                    return Err(FixtureError::Invalid(format!("negation gate {g} needs exactly one input")))
                }
                _ => {}
            }
        }
        if let Some(&(a, b)) = self.wires.iter().find(|w| w.0 >= n || w.1 >= n) {
            return Err(FixtureError::Invalid(format!("wire ({a}, {b}) names a missing gate")));
        }
        let mut indeg: Vec<usize> = (0..n).map(|g| self.preds(g).len()).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&g| indeg[g] == 0).collect();
        let mut order = Vec::new();
        while let Some(g) = ready.pop() {
            order.push(g);
            for &(a, b) in &self.wires {
                if a == g {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        match (0..n).find(|&g| indeg[g] > 0) {
            Some(g) => Err(FixtureError::Cyclic(g)),
            None => Ok(order),
        }
    }
}

/// The initial state: input gates carry their values, all others `undef`.
pub fn circuit_state(m: &Machine, c: &Circuit, inputs: &[bool]) -> Result<State, FixtureError> {
    c.topological_order()?;
    let n = c.labels.len();
    let labels = ["neg", "or", "and"].map(Value::atom);
    let mut carrier: Vec<Value> = (0..n).map(gate).chain(labels.iter().cloned()).collect();
    carrier.extend((0..c.inputs()).map(|k| label_atom(Label::Input(k))));
    let mut s = blank_state(&m.vocab, carrier);
    put(&mut s, "NEG", &[], labels[0].clone());
    put(&mut s, "OR", &[], labels[1].clone());
    put(&mut s, "AND", &[], labels[2].clone());
    for (g, l) in c.labels.iter().enumerate() {
        put(&mut s, "f_V", &[gate(g)], Value::Bool(true));
        put(&mut s, "f_lambda", &[gate(g)], label_atom(*l));
        if let Label::Input(k) = l {
            let b = *inputs.get(*k).ok_or_else(|| FixtureError::Invalid(format!("no value for input {k}")))?;
            put(&mut s, "val", &[gate(g)], Value::Bool(b));
        }
    }
    for &(a, b) in &c.wires {
        put(&mut s, "f_E", &[gate(a), gate(b)], Value::Bool(true));
    }
    Ok(s)
}

/// Evaluates every gate in topological order.
pub fn oracle(c: &Circuit, inputs: &[bool]) -> Result<Vec<bool>, FixtureError> {
    let mut val = vec![false; c.labels.len()];
    for g in c.topological_order()? {
        let ins: Vec<bool> = c.preds(g).iter().map(|&p| val[p]).collect();
        val[g] = match c.labels[g] {
            Label::Input(k) => inputs[k],
            Label::Not => !ins[0],
            Label::And => ins.iter().all(|&b| b),
            Label::Or => ins.iter().any(|&b| b),
        };
    }
    Ok(val)
}

/// Gate values stored in a state.
pub fn values_of(s: &State, c: &Circuit) -> Vec<Value> {
    (0..c.labels.len()).map(|g| s.lookup_name("val", &[gate(g)]).expect("val is unary")).collect()
}

/// A random circuit with `inputs` input gates followed by `gates - inputs`
/// inner gates, each reading from earlier gates only.
pub fn random_circuit(rng: &mut impl Rng, gates: usize, inputs: usize) -> Circuit {
    let mut labels: Vec<Label> = (0..inputs).map(Label::Input).collect();
    let mut wires = Vec::new();
    for g in inputs..gates {
        let l = match rng.gen_range(0..3) {
            0 if g > 0 => Label::Not,
            1 => Label::And,
            _ => Label::Or,
        };
        if l == Label::Not {
            wires.push((rng.gen_range(0..g), g));
        } else {
            for p in 0..g {
                if rng.gen_bool(0.5) {
                    wires.push((p, g));
                }
            }
        }
        labels.push(l);
    }
    Circuit { labels, wires }
}

/// Every assignment to `k` inputs.
pub fn input_vectors(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << k).map(move |m| (0..k).map(|i| m >> i & 1 == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fixture;
    use crate::machine::Halt;
    use rand::SeedableRng;

    fn run(c: &Circuit, inputs: &[bool]) -> Vec<Value> {
        let m = fixture("circuit").unwrap().machine();
        let t = m.run(&circuit_state(&m, c, inputs).unwrap(), 20).unwrap();
        assert_eq!(t.halt, Halt::Fixpoint);
        values_of(t.last(), c)
    }

    #[test]
    fn negation_of_true() {
        let c = Circuit { labels: vec![Label::Input(0), Label::Not], wires: vec![(0, 1)] };
        assert_eq!(run(&c, &[true])[1], Value::Bool(false));
    }

    #[test]
    fn three_input_and_with_a_false_input() {
        let c = Circuit {
            labels: vec![Label::Input(0), Label::Input(1), Label::Input(2), Label::And],
            wires: vec![(0, 3), (1, 3), (2, 3)],
        };
        assert_eq!(run(&c, &[true, false, true])[3], Value::Bool(false));
        assert_eq!(run(&c, &[true, true, true])[3], Value::Bool(true));
    }

    #[test]
    fn cycles_and_bad_fan_in_are_rejected() {
        let cyc = Circuit { labels: vec![Label::Or, Label::Or], wires: vec![(0, 1), (1, 0)] };
        assert!(matches!(cyc.topological_order(), Err(FixtureError::Cyclic(_))));
        let bad = Circuit { labels: vec![Label::Input(0), Label::Input(1), Label::Not], wires: vec![(0, 2), (1, 2)] };
        assert!(matches!(bad.topological_order(), Err(FixtureError::Invalid(_))));
    }

    #[test]
    fn random_circuits_match_the_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let k = rng.gen_range(1..=3);
            let g = rng.gen_range(k..=6);
            let c = random_circuit(&mut rng, g, k);
            for inp in input_vectors(k) {
                let want: Vec<Value> = oracle(&c, &inp).unwrap().into_iter().map(Value::Bool).collect();
                assert_eq!(run(&c, &inp), want);
            }
        }
    }
}
