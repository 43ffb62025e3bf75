mod common;

use std::collections::BTreeSet;

use klab_core::abelian::Group;
use klab_core::lengths::{
    aamp_check, delta_of_monoid, factorizations, length_set, min_delta, AampWitness,
};
use klab_core::zerosum::{atoms, zero_sum_sequences, Sequence, Support};
use proptest::prelude::*;

fn groups_up_to_six() -> Vec<Group> {
    ["0", "C2", "C3", "C4", "C5", "C6", "C2 x C2"].iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn factorization_examples_match_brute_force() {
    let c3 = Group::cyclic(3).unwrap();
    let s = Support::parse(&c3, "[1,2]").unwrap();
    let set = atoms(&s, None).unwrap();
    let target = Sequence::parse(s.clone(), "[1^3,2^3]").unwrap();
    let atom_vecs: Vec<Vec<u32>> = set.atoms.iter().map(|a| a.multiplicities().to_vec()).collect();
    let brute = common::brute_factorizations(target.multiplicities(), &atom_vecs);
    assert_eq!(brute.len(), 2);
    assert_eq!(common::brute_lengths(target.multiplicities(), &atom_vecs), BTreeSet::from([2, 3]));
    assert_eq!(factorizations(&target, &set).unwrap().len(), brute.len());

    // (1·4)^5 over C5: lengths {2, 5}
    let c5 = Group::cyclic(5).unwrap();
    let s5 = Support::parse(&c5, "[1,4]").unwrap();
    let set5 = atoms(&s5, None).unwrap();
    let v: Vec<Vec<u32>> = set5.atoms.iter().map(|a| a.multiplicities().to_vec()).collect();
    assert_eq!(common::brute_lengths(&[5, 5], &v), BTreeSet::from([2, 5]));
}

#[test]
fn delta_examples_match_brute_force() {
    for (spec, sup, cap, expect) in [("C3", "[1,2]", 9u32, vec![1usize]), ("C4", "[1,3]", 12, vec![2])] {
        let g: Group = spec.parse().unwrap();
        let s = Support::parse(&g, sup).unwrap();
        let av: Vec<Vec<u32>> =
            common::brute_atoms(&g, s.elements(), g.order_u64().unwrap() as u32).into_iter().collect();
        let mut deltas = BTreeSet::new();
        for v in common::vectors_up_to(s.len(), cap) {
            if common::sum_of(&g, s.elements(), &v) != g.zero() {
                continue;
            }
            let l: Vec<usize> = common::brute_lengths(&v, &av).into_iter().collect();
            deltas.extend(l.windows(2).map(|w| w[1] - w[0]));
        }
        assert_eq!(deltas.iter().copied().collect::<Vec<_>>(), expect);
        assert_eq!(delta_of_monoid(&s, cap as u64).unwrap().deltas, expect);
    }
}

/// Duplicate-freeness and the two length conventions, exhaustively for
/// targets of length ≤ 8 over full supports of groups of order ≤ 6.
#[test]
fn enumerator_matches_unconstrained_dedup() {
    for g in groups_up_to_six() {
        let s = Support::full(&g).unwrap();
        let set = atoms(&s, None).unwrap();
        let av: Vec<Vec<u32>> = set.atoms.iter().map(|a| a.multiplicities().to_vec()).collect();
        for t in zero_sum_sequences(&s, 8) {
            let fast: BTreeSet<Vec<Vec<u32>>> = factorizations(&t, &set)
                .unwrap()
                .into_iter()
                .map(|f| {
                    let mut v: Vec<Vec<u32>> = f.atoms.iter().map(|&i| av[i].clone()).collect();
                    v.sort();
                    v
                })
                .collect();
            let listed = factorizations(&t, &set).unwrap().len();
            assert_eq!(listed, fast.len(), "duplicate factorization of {t}");
            assert_eq!(fast, common::brute_factorizations(t.multiplicities(), &av), "{t} over {g}");
            let r = length_set(&t, &set).unwrap();
            assert_eq!(r.factorization_counts.values().sum::<u64>() as usize, listed);
            let is_atom = set.atoms.contains(&t);
            assert_eq!(r.length_set.contains(&0), t.is_empty());
            assert_eq!(r.length_set.contains(&1), is_atom);
            assert_eq!(r.delta_set.is_empty(), r.length_set.len() == 1);
        }
    }
}

#[test]
fn min_delta_is_automorphism_invariant() {
    // automorphisms of C_n are x ↦ u·x for units u; C2 x C2 also gets a coordinate swap
    for n in 3..=6u64 {
        let g = Group::cyclic(n).unwrap();
        let elems = g.elements().unwrap();
        let units: Vec<i64> = (1..n as i64).filter(|&u| num_integer::gcd(u, n as i64) == 1).collect();
        for mask in 1u32..(1 << elems.len()) {
            let chosen: Vec<_> = (0..elems.len()).filter(|i| mask >> i & 1 == 1).map(|i| elems[i].clone()).collect();
            let base = min_delta(&Support::new(g.clone(), chosen.clone()).unwrap(), 2 * n).unwrap();
            for &u in &units {
                let image = chosen.iter().map(|x| g.scale(&u.into(), x).unwrap()).collect();
                let m = min_delta(&Support::new(g.clone(), image).unwrap(), 2 * n).unwrap();
                assert_eq!(base, m, "C{n}, mask {mask:b}, unit {u}");
            }
        }
    }
    let v4: Group = "C2 x C2".parse().unwrap();
    let elems = v4.elements().unwrap();
    for mask in 1u32..16 {
        let chosen: Vec<_> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| elems[i].clone()).collect();
        let swapped = chosen
            .iter()
            .map(|x| v4.element(vec![], vec![x.torsion_part()[1].clone(), x.torsion_part()[0].clone()]).unwrap())
            .collect();
        assert_eq!(
            min_delta(&Support::new(v4.clone(), chosen).unwrap(), 8).unwrap(),
            min_delta(&Support::new(v4.clone(), swapped).unwrap(), 8).unwrap()
        );
    }
}

#[test]
fn min_delta_of_g_and_minus_g() {
    for n in 4..=6u64 {
        let g = Group::cyclic(n).unwrap();
        let s = Support::parse(&g, &format!("[1,{}]", n - 1)).unwrap();
        assert_eq!(min_delta(&s, 3 * n).unwrap(), Some(n as usize - 2), "C{n}");
    }
}

#[test]
fn min_delta_monotone_in_cap() {
    let g = Group::cyclic(5).unwrap();
    let s = Support::parse(&g, "[1,2,4]").unwrap();
    let mut prev: Option<usize> = None;
    for cap in 2..=12 {
        let m = min_delta(&s, cap).unwrap();
        if let (Some(p), Some(c)) = (prev, m) {
            assert!(c <= p);
        }
        if prev.is_some() {
            assert!(m.is_some());
        }
        prev = m;
    }
}

#[test]
fn aamp_examples_against_definition() {
    let set = |v: &[i64]| v.iter().copied().collect::<BTreeSet<i64>>();
    assert!(common::brute_aamp(&set(&[2, 3]), 1, 0));
    assert!(common::brute_aamp(&set(&[2, 5]), 3, 0));
    assert!(!common::brute_aamp(&set(&[2, 5]), 1, 0));
    assert!(!common::brute_aamp(&set(&[2, 4, 6, 7]), 2, 1));
    assert!(aamp_check(&set(&[2, 4, 6, 7]), 2, 1).unwrap().is_none());
}

fn witness_ok(l: &BTreeSet<i64>, w: &Option<AampWitness>) -> bool {
    w.as_ref().is_none_or(|w| w.validate(l))
}

proptest! {
    #[test]
    fn aamp_decision_matches_definition(v in proptest::collection::btree_set(0i64..14, 1..7), d in 1u64..=4, bound in 0u64..=4) {
        let w = aamp_check(&v, d, bound).unwrap();
        prop_assert!(witness_ok(&v, &w));
        prop_assert_eq!(w.is_some(), common::brute_aamp(&v, d as i64, bound as i64));
    }

    #[test]
    fn aamp_monotone_in_bound(v in proptest::collection::btree_set(0i64..20, 1..8), d in 1u64..=5, bound in 0u64..=6) {
        if aamp_check(&v, d, bound).unwrap().is_some() {
            prop_assert!(aamp_check(&v, d, bound + 1).unwrap().is_some());
        }
    }

    #[test]
    fn singletons_are_aamps(x in -50i64..50, d in 1u64..=9) {
        let w = aamp_check(&BTreeSet::from([x]), d, 0).unwrap().unwrap();
        prop_assert_eq!(w.l_star, vec![0]);
    }
}
