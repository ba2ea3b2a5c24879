use std::collections::BTreeSet;

use repgame::catalog;
use repgame::order::Relation;
use repgame::repeated::{hasse, lift_preferences, Horizon, LiftOptions, LiftedPreference};

fn lifted_orders() -> Vec<(String, LiftedPreference)> {
    let mut out = Vec::new();
    for id in catalog::IDS {
        let spec = catalog::get(id).unwrap().spec(Horizon::Finite(2));
        for p in spec.constituent.core_players().into_iter().chain([0]) {
            for (tag, options) in [
                ("plain", LiftOptions::default()),
                ("dc", LiftOptions { dynamic_consistency: true, ..Default::default() }),
                ("swaps", LiftOptions { identify_swaps: true, ..Default::default() }),
            ] {
                if let Ok(rel) = lift_preferences(&spec, p, &options) {
                    out.push((format!("{id}/{p}/{tag}"), rel));
                }
            }
        }
    }
    out
}

#[test]
fn whole_histories_are_prefix_closed_and_connected() {
    for id in catalog::IDS {
        let spec = catalog::get(id).unwrap().spec(Horizon::Finite(3));
        let wholes = spec.whole_histories().unwrap();
        let prefixes: BTreeSet<Vec<usize>> = spec.connected_prefixes().unwrap().into_iter().collect();
        for w in &wholes {
            let (last, init) = w.split_last().unwrap();
            assert!(init.iter().all(|l| spec.is_connected(*l)), "{id}: {w:?} continues past a quit");
            assert!(w.len() == 3 || !spec.is_connected(*last), "{id}: {w:?} stops early");
            for k in 1..w.len() {
                assert!(prefixes.contains(&w[..k].to_vec()), "{id}: prefix of {w:?} missing");
            }
        }
    }
}

#[test]
fn lifted_orders_contain_their_generators_minimally() {
    for (name, rel) in lifted_orders() {
        assert!(rel.relation.is_transitive(), "{name}");
        for (a, b) in &rel.generators {
            assert!(rel.relation.weakly(*a, *b), "{name}: generator {a}>{b} missing");
        }
        // dropping any derived pair leaves a relation that is not transitive
        let gens: BTreeSet<(usize, usize)> = rel.generators.iter().copied().collect();
        let derived: Vec<(usize, usize)> =
            rel.relation.pairs().filter(|(a, b)| a != b && !gens.contains(&(*a, *b))).take(40).collect();
        for drop in derived {
            let mut without = Relation::identity(rel.relation.len());
            for (a, b) in rel.relation.pairs().filter(|p| *p != drop) {
                without.insert(a, b);
            }
            assert!(!without.is_transitive(), "{name}: {drop:?} is not forced by the generators");
        }
    }
}

#[test]
fn hasse_graphs_are_acyclic_and_stable() {
    for (name, rel) in lifted_orders() {
        let h = hasse(&rel).unwrap();
        let depths = h.depths();
        for (a, b) in &h.edges {
            assert!(depths[*b] > depths[*a], "{name}: edge against the layering");
        }
        // rebuilding from the cover graph's own order gives the same graph
        let n = rel.relation.len();
        let class_of: Vec<usize> = (0..n).map(|x| h.members.iter().position(|m| m.contains(&x)).unwrap()).collect();
        let again = LiftedPreference {
            relation: Relation::from_fn(n, |a, b| {
                let (ca, cb) = (class_of[a], class_of[b]);
                ca == cb || reaches(&h.edges, ca, cb)
            }),
            ..rel.clone()
        };
        assert_eq!(hasse(&again).unwrap(), h, "{name}");
    }
}

fn reaches(edges: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for (a, b) in edges {
            if *a == x && seen.insert(*b) {
                if *b == to {
                    return true;
                }
                stack.push(*b);
            }
        }
    }
    false
}

#[test]
fn chain_store_diagrams_are_three_by_three_grids() {
    let spec = catalog::get("chain-store").unwrap().spec(Horizon::Finite(2));
    for p in 0..2 {
        let h = hasse(&lift_preferences(&spec, p, &LiftOptions::default()).unwrap()).unwrap();
        assert_eq!((h.labels.len(), h.edges.len()), (9, 12));
        assert_eq!(h.depths().into_iter().max(), Some(4));
    }
}
