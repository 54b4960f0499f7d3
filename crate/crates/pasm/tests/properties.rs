//! Property tests over arbitrary graphs for the complement machine and the
//! update-set algebra.

use std::collections::{BTreeMap, BTreeSet};

use pasm::gallery::{complement, fixture};
use pasm::machine::check_isomorphism_preservation;
use pasm::state::rename_updates;
use pasm::values::Atom;
use pasm::witness::{coincide, extract_witness, w_similar};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = (usize, BTreeSet<(usize, usize)>)> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges = (0..n * n).filter(|&i| bits[i] && i / n != i % n).map(|i| (i / n, i % n)).collect();
            (n, edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_step_is_the_complement((n, g) in graph()) {
        let m = fixture("complement").unwrap().machine();
        let s = complement::graph_state(&m, n, &g);
        let (next, _) = m.step(&s).unwrap();
        prop_assert_eq!(complement::edges_of(&next, n), complement::oracle(n, &g));
    }

    #[test]
    fn diff_of_a_step_is_its_nontrivial_part((n, g) in graph()) {
        let m = fixture("complement").unwrap().machine();
        let s = complement::graph_state(&m, n, &g);
        let (next, out) = m.step(&s).unwrap();
        prop_assert_eq!(next.diff(&s).unwrap(), out.updates.nontrivial(&s));
    }

    #[test]
    fn renaming_commutes_with_steps((n, g) in graph(), rot in 0usize..4) {
        let m = fixture("complement").unwrap().machine();
        let s = complement::graph_state(&m, n, &g);
        let atoms: Vec<Atom> = (0..n).map(|i| complement::vertex(i).as_atom().unwrap()).collect();
        let zeta: BTreeMap<Atom, Atom> = (0..n).map(|i| (atoms[i], atoms[(i + rot) % n])).collect();
        prop_assert!(check_isomorphism_preservation(&m, &s, &zeta).unwrap());
        let renamed = s.rename(&zeta).unwrap();
        let lhs = m.updates(&renamed).unwrap().updates;
        prop_assert_eq!(lhs, rename_updates(&m.updates(&s).unwrap().updates, &zeta));
    }

    #[test]
    fn coinciding_graphs_take_the_same_step((n, g) in graph(), (k, h) in graph()) {
        let m = fixture("complement").unwrap().machine();
        let w = extract_witness(&m.rule);
        let (s, t) = (complement::graph_state(&m, n, &g), complement::graph_state(&m, k, &h));
        if coincide(&s, &t, &w) {
            prop_assert_eq!(m.updates(&s).unwrap().updates, m.updates(&t).unwrap().updates);
        }
        prop_assert!(w_similar(&s, &s, &w));
        prop_assert_eq!(w_similar(&s, &t, &w), w_similar(&t, &s, &w));
    }
}
