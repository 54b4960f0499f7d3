//! Equality-free types on a directed path `0 -> 1 -> 2`: the refinement
//! levels, the stabilised partition and a separating formula.
//!
//! `cargo run --example equality_free_types`

use std::collections::BTreeSet;

use pasm::synthesis::{fo_woeq_partition, isolating_formula, level_partition, RelStructure, Relation, Separator};

fn main() {
    let a = RelStructure {
        size: 3,
        relations: vec![Relation {
            name: "E".into(),
            arity: 2,
            tuples: BTreeSet::from([vec![0, 1], vec![1, 2]]),
        }],
    };
    for m in 0..=2 {
        let p = level_partition(&a, 1, m).expect("tiny");
        println!("level {m}: blocks {:?}", p.block);
    }
    let stable = fo_woeq_partition(&a, 1).expect("tiny");
    println!("types stabilise at level {} with {} blocks", stable.level, stable.blocks());
    let sep = Separator::new(&a).least(&[0], &[1], 3).expect("0 and 1 differ");
    println!("separates 0 from 1: {}", sep.render(&a));
    println!("isolates 2: {}", isolating_formula(&a, &[2]).expect("tiny").render(&a));
}
