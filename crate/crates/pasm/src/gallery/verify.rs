//! Runs every fixture over its parameter envelope and compares the engine
//! with the fixture's oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{atm, bfs, circuit, complement, fixture, fo, pram, FixtureError};
use crate::machine::{Machine, Trace};
use crate::state::State;
use crate::values::Value;

/// Called once for every state from which the engine took a step, with the
/// fixture name.
pub type StepObserver<'a> = dyn FnMut(&str, &Machine, &State) + 'a;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseReport {
    pub fixture: String,
    pub cases: usize,
    pub steps: usize,
    /// Cases the oracle could not decide (ATM depth cut-offs); the engine
    /// must then report `undef` as well.
    pub inconclusive: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryReport {
    pub seed: u64,
    pub fixtures: Vec<CaseReport>,
}

impl GalleryReport {
    pub fn ok(&self) -> bool {
        self.fixtures.iter().all(|c| c.failures.is_empty())
    }

    pub fn render(&self) -> String {
        let mut out = format!("gallery verification, seed {}\n", self.seed);
        for c in &self.fixtures {
            let status = if c.failures.is_empty() { "ok" } else { "FAILED" };
            out += &format!(
                "{:<11} {status:<6} cases={} steps={} inconclusive={}\n",
                c.fixture, c.cases, c.steps, c.inconclusive
            );
            for f in &c.failures {
                out += &format!("  {f}\n");
            }
        }
        out
    }
}

struct Runner<'o, 'a> {
    report: CaseReport,
    machine: Machine,
    observe: &'o mut StepObserver<'a>,
}

impl Runner<'_, '_> {
    fn new<'o, 'a>(name: &str, observe: &'o mut StepObserver<'a>) -> Runner<'o, 'a> {
        let machine = fixture(name).expect("shipped fixture").machine();
        Runner { report: CaseReport { fixture: name.to_string(), ..Default::default() }, machine, observe }
    }

    fn run(&mut self, s: &State, max_steps: usize) -> Option<Trace> {
        self.report.cases += 1;
        match self.machine.run(s, max_steps) {
            Ok(t) => {
                for st in &t.states[..t.steps()] {
                    (self.observe)(&self.report.fixture, &self.machine, st);
                }
                self.report.steps += t.steps();
                Some(t)
            }
            Err(e) => {
                self.report.failures.push(format!("case {}: {e}", self.report.cases));
                None
            }
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.report.failures.push(what());
        }
    }
}

fn rng_for(seed: u64, fixture: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(fixture))
}

/// Checks every fixture against its oracle: complement on all graphs with at
/// most 3 vertices, circuits with at most 6 gates on every input vector, 30
/// FO sentences, 50 BFS graphs, the two-writer PRAM plus random programs,
/// and a seeded sample of alternating machines.
pub fn verify_gallery(seed: u64, observe: &mut StepObserver) -> GalleryReport {
    let fixtures = vec![
        verify_complement(observe),
        verify_circuits(seed, observe),
        verify_pram(seed, observe),
        verify_atm(seed, observe),
        verify_fo(seed, observe),
        verify_bfs(seed, observe),
    ];
    GalleryReport { seed, fixtures }
}

fn verify_complement(observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("complement", observe);
    for n in 1..=3 {
        for g in complement::all_graphs(n) {
            let s = complement::graph_state(&r.machine, n, &g);
            let Some(t) = r.run(&s, 1) else { continue };
            let got = complement::edges_of(t.last(), n);
            let want = complement::oracle(n, &g);
            r.check(got == want, || format!("{n} vertices {g:?}: engine {got:?}, oracle {want:?}"));
        }
    }
    r.report
}

fn verify_circuits(seed: u64, observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("circuit", observe);
    let mut rng = rng_for(seed, 1);
    for _ in 0..25 {
        let gates = rng.gen_range(1..=6);
        let inputs = rng.gen_range(1..=gates.min(3));
        let c = circuit::random_circuit(&mut rng, gates, inputs);
        for v in circuit::input_vectors(inputs) {
            let s = match circuit::circuit_state(&r.machine, &c, &v) {
                Ok(s) => s,
                Err(e) => {
                    r.report.failures.push(format!("{c:?}: {e}"));
                    continue;
                }
            };
            let Some(t) = r.run(&s, 4 * gates + 4) else { continue };
            let got = circuit::values_of(t.last(), &c);
            let want: Vec<Value> = circuit::oracle(&c, &v).unwrap_or_default().into_iter().map(Value::Bool).collect();
            r.check(got == want, || format!("{c:?} on {v:?}: engine {got:?}, oracle {want:?}"));
        }
    }
    r.report
}

fn verify_pram(seed: u64, observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("pram", observe);
    let mut rng = rng_for(seed, 2);
    let mut programs = vec![pram::two_writers()];
    for _ in 0..20 {
        let q = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=4);
        programs.push(pram::random_pram(&mut rng, q, len, 3));
    }
    for p in programs {
        let rounds = p.programs.iter().map(Vec::len).max().unwrap_or(0) + 1;
        let s = pram::pram_state(&r.machine, &p);
        let Some(t) = r.run(&s, 2 * rounds) else { continue };
        let (want_regs, want_pc) = pram::oracle(&p, rounds);
        let got_regs = pram::registers_of(t.last(), want_regs.keys().copied());
        let got_pc = pram::counters_of(t.last(), p.programs.len());
        r.check(got_regs == want_regs && got_pc == want_pc, || {
            format!("{p:?}: engine {got_regs:?} {got_pc:?}, oracle {want_regs:?} {want_pc:?}")
        });
    }
    r.report
}

fn verify_atm(seed: u64, observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("atm", observe);
    let mut rng = rng_for(seed, 3);
    for k in 0..24 {
        let states = rng.gen_range(1..=4);
        let mut machine = atm::random_atm(&mut rng, states, 3, 1 + k % 2);
        if k % 3 == 0 {
            // Purely existential machines are nondeterministic Turing machines.
            for kind in &mut machine.kinds {
                if *kind == atm::Kind::Forall {
                    *kind = atm::Kind::Exists;
                }
            }
        }
        let depth = rng.gen_range(1..=6);
        for w in atm::inputs(3, 3).into_iter().filter(|_| rng.gen_bool(0.5)) {
            let s = atm::atm_state(&r.machine, &machine, &w, depth);
            let Some(t) = r.run(&s, 4 * depth as usize + 8) else { continue };
            let got = atm::root_value(t.last());
            let want = match atm::oracle(&machine, &w, depth) {
                Ok(b) => Value::Bool(b),
                Err(FixtureError::Inconclusive) => {
                    r.report.inconclusive += 1;
                    Value::Undef
                }
                Err(e) => {
                    r.report.failures.push(e.to_string());
                    continue;
                }
            };
            r.check(got == want, || format!("{machine:?} on {w:?} depth {depth}: engine {got}, oracle {want}"));
        }
    }
    r.report
}

fn verify_fo(seed: u64, observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("fo", observe);
    let mut rng = rng_for(seed, 4);
    for _ in 0..30 {
        let f = fo::random_sentence(&mut rng, 3, 2);
        let n = rng.gen_range(1..=4);
        let st = fo::random_structure(&mut rng, n);
        let s = fo::fo_state(&r.machine, &st, &f);
        let Some(t) = r.run(&s, 64) else { continue };
        let got = fo::root_value(t.last());
        let want = Value::Bool(fo::oracle(&st, &f));
        r.check(got == want, || format!("{f} on {st:?}: engine {got}, oracle {want}"));
    }
    r.report
}

fn verify_bfs(seed: u64, observe: &mut StepObserver) -> CaseReport {
    let mut r = Runner::new("bfs", observe);
    let mut rng = rng_for(seed, 5);
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let g = bfs::random_graph(&mut rng, n, 0.3);
        let source = rng.gen_range(0..n);
        let s = bfs::bfs_state(&r.machine, n, &g, source);
        let Some(t) = r.run(&s, 3 * (n + 2)) else { continue };
        let dist = bfs::oracle(n, &g, source);
        for (i, d) in dist.iter().enumerate() {
            let got = bfs::colour_of(t.last(), i);
            let want = if d.is_some() { "black" } else { "white" };
            r.check(got == want, || format!("{g:?} from {source}, vertex {i}: engine {got}, oracle {want}"));
        }
    }
    r.report
}
