//! Samples state pairs for every gallery machine and checks that states
//! agreeing on all witness terms take the same step, and that steps commute
//! with renaming atoms.
//!
//! `cargo run --example check_postulates`

use pasm::gallery::{sample_pairs, FIXTURES};
use pasm::machine::check_isomorphism_preservation;
use pasm::sample::random_permutation;
use pasm::witness::{check_bounded_exploration, extract_witness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for f in &FIXTURES {
        let m = f.machine();
        let w = extract_witness(&m.rule);
        let pairs = sample_pairs(f, &m, &mut rng, 100);
        let rep = check_bounded_exploration(&m, &w, &pairs);
        let iso = pairs
            .iter()
            .filter(|(s, _)| {
                let z = random_permutation(s, &mut rng);
                check_isomorphism_preservation(&m, s, &z) == Ok(false)
            })
            .count();
        println!(
            "{:<10} {} coinciding pairs, {} exploration violations, {} isomorphism violations",
            f.name,
            rep.coinciding,
            rep.violations.len(),
            iso
        );
    }
}
