mod common;

use common::fo_oracle::{check_partitions, Tiny};

#[test]
fn refinement_matches_formula_enumeration_up_to_three_elements() {
    let n = check_partitions(3).unwrap();
    assert_eq!(n, 2 * 2 + 4 * 16 + 8 * 512);
}

#[test]
fn oracle_separates_a_loop_from_a_plain_vertex() {
    // 0 has a self-loop, 1 does not: already distinguished by atoms.
    let t = Tiny { n: 2, p: vec![false, false], e: vec![vec![true, false], vec![false, false]] };
    assert_eq!(t.blocks(1, 0).len(), 2);
}

#[test]
fn quantifiers_are_needed_on_a_path() {
    // 0 -> 1 -> 2: the endpoints differ only through their neighbours.
    let t = Tiny {
        n: 3,
        p: vec![false; 3],
        e: vec![vec![false, true, false], vec![false, false, true], vec![false, false, false]],
    };
    assert_eq!(t.blocks(1, 0).len(), 1);
    assert_eq!(t.blocks(1, 1).len(), 3);
}
