//! Parallel RAMs restricted to READ, STORE and HALT.
//!
//! Processors are the integers `1..=q`, lines are `1..=len`, and `0` is
//! the halted program counter. Registers hold integers or `undef`.

use std::collections::BTreeMap;

use rand::Rng;

use super::{blank_state, put};
use crate::machine::Machine;
use crate::state::State;
use crate::values::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    /// `j`: register `j` itself.
    Direct(i64),
    /// `↑j`: the register named by the contents of register `j`.
    Indirect(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    /// Load an input into the processor's accumulator.
    Read(Operand),
    /// Store the accumulator into a register.
    Store(Operand),
    Halt,
}

pub type Registers = BTreeMap<i64, Option<i64>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pram {
    pub programs: Vec<Vec<Instr>>,
    /// Input register contents.
    pub inputs: BTreeMap<i64, i64>,
    /// Registers initialised to 0.
    pub registers: Vec<i64>,
}

const NAMES: [(&str, &str); 5] =
    [("READ", "read"), ("STORE", "store"), ("HALT", "halt"), ("DIRECT", "direct"), ("INDIRECT", "indirect")];

pub fn pram_state(m: &Machine, p: &Pram) -> State {
    let lines = p.programs.iter().map(Vec::len).max().unwrap_or(0);
    let top = lines.max(p.programs.len()) as i64;
    let mut carrier: Vec<Value> = (0..=top).map(Value::Int).collect();
    carrier.extend(NAMES.iter().map(|(_, a)| Value::atom(a)));
    let mut s = blank_state(&m.vocab, carrier);
    for (c, a) in NAMES {
        put(&mut s, c, &[], Value::atom(a));
    }
    put(&mut s, "mode", &[], Value::Int(0));
    for (&j, &v) in &p.inputs {
        put(&mut s, "I", &[Value::Int(j)], Value::Int(v));
    }
    for &r in &p.registers {
        put(&mut s, "R", &[Value::Int(r)], Value::Int(0));
    }
    for (i, prog) in p.programs.iter().enumerate() {
        let pi = Value::Int(i as i64 + 1);
        put(&mut s, "P", std::slice::from_ref(&pi), Value::Bool(true));
        put(&mut s, "kappa", std::slice::from_ref(&pi), Value::Int(1));
        for (l, ins) in prog.iter().enumerate() {
            let at = [pi.clone(), Value::Int(l as i64 + 1)];
            let (name, op) = match ins {
                Instr::Read(o) => ("read", Some(o)),
                Instr::Store(o) => ("store", Some(o)),
                Instr::Halt => ("halt", None),
            };
            put(&mut s, "Inst", &at, Value::atom(name));
            if let Some(o) = op {
                let (kind, v) = match o {
                    Operand::Direct(v) => ("direct", v),
                    Operand::Indirect(v) => ("indirect", v),
                };
                put(&mut s, "OpType", &at, Value::atom(kind));
                put(&mut s, "OpVal", &at, Value::Int(*v));
            }
        }
    }
    s
}

/// Register contents of a state, for the registers the oracle knows about.
pub fn registers_of(s: &State, keys: impl IntoIterator<Item = i64>) -> Registers {
    keys.into_iter()
        .map(|j| (j, s.lookup_name("R", &[Value::Int(j)]).expect("R is unary").as_int()))
        .collect()
}

/// Program counters `kappa(1..=q)`.
pub fn counters_of(s: &State, q: usize) -> Vec<i64> {
    (1..=q as i64).map(|i| s.lookup_name("kappa", &[Value::Int(i)]).ok().and_then(|v| v.as_int()).unwrap_or(-1)).collect()
}

/// Runs `rounds` PRAM steps directly. Each round executes one instruction
/// per running processor against the old registers, then writes back the
/// requests, the smallest processor index winning each register.
pub fn oracle(p: &Pram, rounds: usize) -> (Registers, Vec<i64>) {
    let mut regs: Registers = p.registers.iter().map(|&r| (r, Some(0))).collect();
    let mut pc: Vec<i64> = vec![1; p.programs.len()];
    let get = |regs: &Registers, j: Option<i64>| j.and_then(|j| regs.get(&j).copied().flatten());
    let input = |j: Option<i64>| j.and_then(|j| p.inputs.get(&j).copied());
    for _ in 0..rounds {
        let mut requests: Vec<(Option<i64>, Option<i64>)> = Vec::new();
        for (i, prog) in p.programs.iter().enumerate() {
            let me = i as i64 + 1;
            if pc[i] == 0 {
                continue;
            }
            let Some(ins) = prog.get(pc[i] as usize - 1) else { continue };
            match *ins {
                Instr::Read(o) => {
                    pc[i] += 1;
                    let v = match o {
                        Operand::Direct(j) => input(Some(j)),
                        Operand::Indirect(j) => input(get(&regs, Some(j))),
                    };
                    requests.push((Some(me), v));
                }
                Instr::Store(o) => {
                    pc[i] += 1;
                    let target = match o {
                        Operand::Direct(j) => Some(j),
                        Operand::Indirect(j) => get(&regs, Some(j)),
                    };
                    requests.push((target, get(&regs, Some(me))));
                }
                Instr::Halt => pc[i] = 0,
            }
        }
        let mut claimed = std::collections::BTreeSet::new();
        for (target, v) in requests {
            if claimed.insert(target) {
                if let Some(t) = target {
                    regs.insert(t, v);
                }
            }
        }
    }
    (regs, pc)
}

/// A random program mix over `q` processors using only direct operands
/// and registers `1..=regs`.
pub fn random_pram(rng: &mut impl Rng, q: usize, len: usize, regs: i64) -> Pram {
    let programs = (0..q)
        .map(|_| {
            let mut prog: Vec<Instr> = (0..len - 1)
                .map(|_| match rng.gen_range(0..2) {
                    0 => Instr::Read(Operand::Direct(rng.gen_range(1..=regs))),
                    _ => Instr::Store(Operand::Direct(rng.gen_range(1..=regs))),
                })
                .collect();
            prog.push(Instr::Halt);
            prog
        })
        .collect();
    let inputs = (1..=regs).map(|j| (j, rng.gen_range(-9..=9))).collect();
    Pram { programs, inputs, registers: (1..=regs).collect() }
}

/// Two processors read inputs 1 and 2 and both store to register 5.
pub fn two_writers() -> Pram {
    let prog = |input| vec![Instr::Read(Operand::Direct(input)), Instr::Store(Operand::Direct(5)), Instr::Halt];
    Pram {
        programs: vec![prog(1), prog(2)],
        inputs: BTreeMap::from([(1, 10), (2, 20)]),
        registers: vec![1, 2, 5],
    }
}
