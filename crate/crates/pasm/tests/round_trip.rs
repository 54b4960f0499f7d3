//! Printing and re-parsing is stable on the shipped fixtures and on
//! generated gallery states.

use pasm::gallery::{random_instance, FIXTURES};
use pasm::surface::{parse_machine, parse_state, parse_state_with, print_machine, print_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn shipped_machines_and_states_round_trip() {
    for f in &FIXTURES {
        let m = f.machine();
        let printed = print_machine(&m);
        let again = parse_machine(&printed).unwrap_or_else(|d| panic!("{}: {d}\n{printed}", f.name));
        assert_eq!(again, m, "{}", f.name);
        assert_eq!(print_machine(&again), printed, "{}: printing is not a fixpoint", f.name);

        let s = f.state(&m);
        let printed = print_state(&s);
        assert_eq!(parse_state(&printed).unwrap(), s, "{}", f.name);
        assert_eq!(parse_state_with(&printed, Some(&m.vocab)).unwrap(), s, "{}", f.name);
    }
}

#[test]
fn generated_states_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut count = 0;
    for f in &FIXTURES {
        let m = f.machine();
        for _ in 0..7 {
            let s = random_instance(f, &m, &mut rng);
            let printed = print_state(&s);
            let again = parse_state(&printed).unwrap_or_else(|d| panic!("{}: {d}\n{printed}", f.name));
            assert_eq!(again, s, "{}", f.name);
            assert_eq!(print_state(&again), printed);
            count += 1;
        }
    }
    // Together with the twelve shipped files this is a corpus of 54.
    assert_eq!(count, 42);
}
