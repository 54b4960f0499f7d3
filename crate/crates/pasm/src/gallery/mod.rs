//! Shipped example machines with state builders and reference oracles.
//!
//! Every oracle computes its answer directly from the fixture parameters
//! (graphs, circuits, programs, formulas) and never calls the rule
//! evaluator.

use std::sync::Arc;

use thiserror::Error;

use rand::Rng;

use crate::machine::Machine;
use crate::sample::mutate;
use crate::state::{State, Vocabulary};
use crate::surface::{parse_machine, parse_state_with};
use crate::values::Value;

pub mod atm;
pub mod bfs;
pub mod circuit;
pub mod complement;
pub mod fo;
pub mod pram;
mod verify;

pub use verify::{verify_gallery, CaseReport, GalleryReport, StepObserver};

/// A machine file with one sample state file.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub machine: &'static str,
    pub state: &'static str,
    pub uses_import: bool,
}

pub const FIXTURES: [Fixture; 6] = [
    Fixture {
        name: "complement",
        machine: include_str!("../../examples/gallery/complement.pasm"),
        state: include_str!("../../examples/gallery/k3.state"),
        uses_import: false,
    },
    Fixture {
        name: "circuit",
        machine: include_str!("../../examples/gallery/circuit.pasm"),
        state: include_str!("../../examples/gallery/circuit.state"),
        uses_import: false,
    },
    Fixture {
        name: "pram",
        machine: include_str!("../../examples/gallery/pram.pasm"),
        state: include_str!("../../examples/gallery/pram.state"),
        uses_import: false,
    },
    Fixture {
        name: "atm",
        machine: include_str!("../../examples/gallery/atm.pasm"),
        state: include_str!("../../examples/gallery/atm.state"),
        uses_import: true,
    },
    Fixture {
        name: "fo",
        machine: include_str!("../../examples/gallery/fo.pasm"),
        state: include_str!("../../examples/gallery/fo.state"),
        uses_import: false,
    },
    Fixture {
        name: "bfs",
        machine: include_str!("../../examples/gallery/bfs.pasm"),
        state: include_str!("../../examples/gallery/bfs.state"),
        uses_import: false,
    },
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

impl Fixture {
    /// Parses the shipped machine; the fixtures are known to be valid.
    pub fn machine(&self) -> Machine {
        parse_machine(self.machine).unwrap_or_else(|d| panic!("gallery machine `{}`: {d}", self.name))
    }

    pub fn state(&self, m: &Machine) -> State {
        parse_state_with(self.state, Some(&m.vocab)).unwrap_or_else(|d| panic!("gallery state `{}`: {d}", self.name))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("the wiring has a cycle through gate {0}")]
    Cyclic(usize),
    #[error("the tree was cut off at the depth bound before a verdict")]
    Inconclusive,
    #[error("{0}")]
    Invalid(String),
}

/// Starts an empty state over the machine's vocabulary with the given carrier.
pub(crate) fn blank_state(vocab: &Arc<Vocabulary>, carrier: impl IntoIterator<Item = Value>) -> State {
    let mut s = State::new(vocab.clone());
    for v in carrier {
        s.add_element(v).expect("atoms and integers only");
    }
    s
}

pub(crate) fn put(s: &mut State, name: &str, args: &[Value], v: Value) {
    s.set_by_name(name, args.to_vec(), v).unwrap_or_else(|e| panic!("fixture symbol `{name}`: {e}"));
}

/// A random state of the fixture with at most 5 domain atoms (vertices,
/// gates, processors, tree or formula nodes), built from random fixture
/// parameters and then advanced by up to two engine steps.
pub fn random_instance(f: &Fixture, m: &Machine, rng: &mut impl Rng) -> State {
    let s = match f.name {
        "complement" => {
            let n = rng.gen_range(1..=5);
            let all = complement::all_pairs(n);
            let g = all.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            complement::graph_state(m, n, &g)
        }
        "circuit" => loop {
            let gates = rng.gen_range(1..=5);
            let inputs = rng.gen_range(1..=gates.min(3));
            let c = circuit::random_circuit(rng, gates, inputs);
            let v: Vec<bool> = (0..inputs).map(|_| rng.gen_bool(0.5)).collect();
            if let Ok(s) = circuit::circuit_state(m, &c, &v) {
                break s;
            }
        },
        "pram" => {
            let q = rng.gen_range(1..=2);
            let len = rng.gen_range(1..=3);
            pram::pram_state(m, &pram::random_pram(rng, q, len, 3))
        }
        "atm" => {
            let states = rng.gen_range(1..=4);
            let a = atm::random_atm(rng, states, 3, 2);
            let w: Vec<i64> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(1..3)).collect();
            atm::atm_state(m, &a, &w, rng.gen_range(1..=3))
        }
        "fo" => loop {
            let depth = rng.gen_range(0..=2);
            let f = fo::random_sentence(rng, depth, 1);
            let n = rng.gen_range(1..=2);
            let s = fo::fo_state(m, &fo::random_structure(rng, n), &f);
            if s.carrier().iter().filter(|v| is_node(v)).count() <= 5 {
                break s;
            }
        },
        "bfs" => {
            let n = rng.gen_range(1..=5);
            let g = bfs::random_graph(rng, n, 0.4);
            let src = rng.gen_range(0..n);
            bfs::bfs_state(m, n, &g, src)
        }
        other => panic!("unknown fixture `{other}`"),
    };
    let mut s = s;
    for _ in 0..rng.gen_range(0..=2) {
        match m.step(&s) {
            Ok((next, _)) if domain_atoms(&next) <= 5 => s = next,
            _ => break,
        }
    }
    s
}

fn is_node(v: &Value) -> bool {
    v.as_atom().and_then(|a| a.label()).is_some_and(|l| l.starts_with('n') && l[1..].parse::<u32>().is_ok())
}

/// Carrier atoms that are not vocabulary constants such as colours or
/// instruction names.
fn domain_atoms(s: &State) -> usize {
    let v = s.vocab();
    let constants: Vec<Value> =
        v.user_symbols().filter(|(_, sym)| sym.arity == 0).map(|(id, _)| s.apply(id, &[])).collect();
    s.carrier().iter().filter(|x| x.as_atom().is_some() && !constants.contains(x)).count()
}

/// `count` pairs `(s, s')` where `s` is a random instance and `s'` mutates
/// one to three of its locations.
pub fn sample_pairs(f: &Fixture, m: &Machine, rng: &mut impl Rng, count: usize) -> Vec<(State, State)> {
    (0..count)
        .map(|_| {
            let s = random_instance(f, m, rng);
            let t = mutate(&s, rng, 3);
            (s, t)
        })
        .collect()
}
