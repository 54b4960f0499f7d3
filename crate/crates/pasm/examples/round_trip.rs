//! Prints every shipped machine and state and parses the printout again.
//!
//! `cargo run --example round_trip`

use pasm::gallery::FIXTURES;
use pasm::surface::{parse_machine, parse_state, print_machine, print_state};

fn main() {
    for f in &FIXTURES {
        let m = f.machine();
        let again = parse_machine(&print_machine(&m)).expect("printed machines parse");
        let s = f.state(&m);
        let s2 = parse_state(&print_state(&s)).expect("printed states parse");
        println!("{:<10} machine stable: {}, state stable: {}", f.name, again == m, s2 == s);
    }
}
