//! Parses a small machine from text and runs it to a fixpoint.
//!
//! `cargo run --example run_machine`

use pasm::surface::{parse_machine, parse_state_with, print_state};

const COUNTER: &str = "machine counter
vocab
  n/0 bridge dynamic
  limit/0 bridge static
  done/0 bridge dynamic relational
end
rule
  if n < limit then
    n := n + 1
  endif
  if n = limit then
    done := true
  endif
";

fn main() {
    let m = parse_machine(COUNTER).expect("the machine parses");
    let s0 = parse_state_with("fun n = 0\nfun limit = 4", Some(&m.vocab)).expect("the state parses");
    let trace = m.run(&s0, 20).expect("the state fits the machine");
    for (i, u) in trace.updates.iter().enumerate() {
        println!("step {}: {}", i + 1, u.render(&m.vocab).join(", "));
    }
    println!("halted with {} after {} steps", trace.halt.as_str(), trace.steps());
    println!("{}", print_state(trace.last()));
}
