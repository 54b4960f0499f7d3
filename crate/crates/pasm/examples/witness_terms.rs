//! Extracts bounded-exploration witness terms from the graph complement
//! machine and compares two graphs through them.
//!
//! `cargo run --example witness_terms`

use pasm::gallery::{complement, fixture};
use pasm::witness::{coincide, critical_values, extract_witness, w_similar};

fn main() {
    let m = fixture("complement").expect("shipped").machine();
    let w = extract_witness(&m.rule).simplified();
    for t in w.iter() {
        println!("{}", t.render(&m.vocab));
    }
    let path = complement::graph_state(&m, 3, &complement::undirected(&[(0, 1), (1, 2)]));
    let star = complement::graph_state(&m, 3, &complement::undirected(&[(1, 0), (1, 2)]));
    println!("path and star coincide: {}", coincide(&path, &star, &w));
    println!("path and star are similar: {}", w_similar(&path, &star, &w));
    let crit: Vec<String> = critical_values(&path, &w).iter().map(ToString::to_string).collect();
    println!("critical values of the path: {}", crit.join(" "));
}
