mod common;

use klab_core::abelian::{direct_sum, smith_normal_form, Group, IntMatrix, Order};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix_strategy() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
            IntMatrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(), c)
        })
    })
}

#[test]
fn snf_examples_match_minor_oracle() {
    let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
    assert_eq!(common::invariants_by_minors(&m), vec![BigInt::from(1), BigInt::from(6)]);
    assert_eq!(smith_normal_form(&m).invariants(), common::invariants_by_minors(&m));

    let m = IntMatrix::from_i64(&[&[4, 0], &[0, 2]]);
    assert_eq!(common::invariants_by_minors(&m), vec![BigInt::from(2), BigInt::from(4)]);
    assert_eq!(Group::from_spec_u64(0, &[4, 2]).unwrap().invariant_factors(), &[BigInt::from(2), BigInt::from(4)]);
    assert_eq!(Group::from_spec_u64(0, &[2, 3]).unwrap().to_string(), "C6");
}

#[test]
fn quotient_of_z2_matches_oracle() {
    let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
    let d = common::invariants_by_minors(&m);
    let torsion: Vec<BigInt> = d.into_iter().filter(|x| x > &BigInt::from(1)).collect();
    let z2: Group = "Z^2".parse().unwrap();
    let rels = [z2.element_i64(&[2, 0], &[]).unwrap(), z2.element_i64(&[0, 3], &[]).unwrap()];
    assert_eq!(z2.quotient(&rels).unwrap().0.invariant_factors(), torsion.as_slice());
}

#[test]
fn rank_against_p_ranks() {
    // the p-rank of Z ⊕ C4 at p = 2 is 1 (free part) + 1 (C4)
    let g: Group = "Z x C4".parse().unwrap();
    let p_rank_2 = g.free_rank() + g.invariant_factors().iter().filter(|d| d.is_even()).count();
    assert_eq!(p_rank_2, 2);
    assert_eq!(g.rank(), 2);
    let h: Group = "C2 x C6".parse().unwrap();
    let p3 = h.invariant_factors().iter().filter(|d| (*d % 3u32).is_zero()).count();
    let p2 = h.invariant_factors().iter().filter(|d| d.is_even()).count();
    assert_eq!(h.rank(), p2.max(p3));
}

proptest! {
    #[test]
    fn snf_contract(m in matrix_strategy()) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.left * &m) * &s.right, s.diagonal.clone());
        prop_assert!(s.left.is_unimodular());
        prop_assert!(s.right.is_unimodular());
        prop_assert!(s.diagonal.is_diagonal());
        let d = s.invariants();
        for w in d.windows(2) {
            prop_assert!(!w[0].is_negative());
            let chained = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            prop_assert!(chained);
        }
        prop_assert_eq!(d, common::invariants_by_minors(&m));
        if m.rows() == m.cols() {
            prop_assert_eq!(common::cofactor_det(&m).abs(), s.invariants().iter().product::<BigInt>());
        }
    }

    #[test]
    fn canonical_form_is_order_independent(a in 2u64..=12, b in 2u64..=12) {
        prop_assert_eq!(Group::from_spec_u64(0, &[a, b]).unwrap(), Group::from_spec_u64(0, &[b, a]).unwrap());
        let g = Group::from_spec_u64(0, &[a, b]).unwrap();
        prop_assert_eq!(g.order_u64(), Some(a * b));
    }

    #[test]
    fn direct_sum_commutes(a in 2u64..=8, b in 2u64..=8, c in 2u64..=8) {
        let ga = Group::cyclic(a).unwrap();
        let gb = Group::cyclic(b).unwrap();
        let gc = Group::cyclic(c).unwrap();
        let left = direct_sum(&[direct_sum(&[ga.clone(), gb.clone()]), gc.clone()]);
        let right = direct_sum(&[gc, gb, ga]);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn quotient_by_generators_is_trivial(free in 0usize..=2, t in proptest::collection::vec(2u64..=9, 0..3)) {
        let g = Group::from_spec_u64(free, &t).unwrap();
        prop_assert!(g.quotient(&g.generators()).unwrap().0.is_trivial());
        prop_assert_eq!(g.quotient(&[]).unwrap().0, g);
    }

    #[test]
    fn group_axioms(t in proptest::collection::vec(2u64..=6, 1..3), seeds in proptest::collection::vec(0i64..100, 9)) {
        let g = Group::from_spec_u64(1, &t).unwrap();
        let k = g.invariant_factors().len();
        let mk = |s: &[i64]| g.element_i64(&[s[0] - 50], &s[1..=k]).unwrap();
        let (x, y, z) = (mk(&seeds[0..3]), mk(&seeds[3..6]), mk(&seeds[6..9]));
        prop_assert_eq!(g.add(&g.add(&x, &y).unwrap(), &z).unwrap(), g.add(&x, &g.add(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(g.add(&x, &y).unwrap(), g.add(&y, &x).unwrap());
        prop_assert_eq!(g.add(&x, &g.zero()).unwrap(), x.clone());
        prop_assert_eq!(g.add(&x, &g.neg(&x).unwrap()).unwrap(), g.zero());
        prop_assert_eq!(g.scale(&BigInt::from(2), &x).unwrap(), g.add(&x, &x).unwrap());
    }

    #[test]
    fn order_divides_exponent(t in proptest::collection::vec(2u64..=8, 1..3)) {
        let g = Group::from_spec_u64(0, &t).unwrap();
        let Order::Finite(e) = g.exponent() else { unreachable!() };
        for x in g.elements().unwrap() {
            let Order::Finite(n) = g.element_order(&x).unwrap() else { unreachable!() };
            prop_assert!(e.is_multiple_of(&n));
            prop_assert_eq!(g.scale(&n, &x).unwrap(), g.zero());
        }
    }
}
