//! Treats the graph complement machine as a black box and rebuilds a rule
//! from its behaviour on one graph, then a guarded machine from one state
//! per similarity class.
//!
//! `cargo run --example synthesis`

use pasm::gallery::{complement, fixture};
use pasm::state::State;
use pasm::synthesis::{machine_oracle, synthesize_machine, synthesize_rule};
use pasm::witness::extract_witness;

fn main() {
    let m = fixture("complement").expect("shipped").machine();
    let w = extract_witness(&m.rule);
    let oracle = machine_oracle(&m);
    let k3 = complement::graph_state(&m, 3, &complement::oracle(3, &Default::default()));
    let rule = synthesize_rule(&oracle, &k3, &w).expect("the complement step is synthesisable");
    println!("rule from K3:\n{}", rule.render(&m.vocab));

    let states: Vec<State> = (0..=3)
        .flat_map(|n| complement::all_graphs(n).into_iter().map(move |g| (n, g)))
        .map(|(n, g)| complement::graph_state(&m, n, &g))
        .collect();
    let sm = synthesize_machine(&oracle, &states, &w).expect("the sample covers its own classes");
    let agree = states
        .iter()
        .filter(|s| sm.machine.updates(s).map(|o| o.updates) == m.updates(s).map(|o| o.updates))
        .count();
    println!(
        "{} similarity classes, guards exclusive: {}, agrees on {agree} of {} graphs",
        sm.representatives.len(),
        sm.guards_exclusive(),
        states.len()
    );
}
