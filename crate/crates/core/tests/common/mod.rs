//! Slow definitional oracles, independent of the library's search paths.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use klab_core::abelian::{Group, GroupElement, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Invariant factors from determinantal divisors: `d₁⋯d_k = gcd of k×k minors`.
pub fn invariants_by_minors(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.rows().min(m.cols());
    let mut divisors = vec![BigInt::from(1)];
    for k in 1..=n {
        let mut g = BigInt::zero();
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                let sub = IntMatrix::from_rows(
                    rows.iter().map(|&i| cols.iter().map(|&j| m[(i, j)].clone()).collect()).collect(),
                    k,
                );
                g = g.gcd(&cofactor_det(&sub));
            }
        }
        divisors.push(g);
    }
    (1..=n)
        .map(|k| if divisors[k].is_zero() { BigInt::zero() } else { &divisors[k] / &divisors[k - 1] })
        .collect()
}

/// Laplace expansion, kept separate from the library's elimination.
pub fn cofactor_det(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    if n == 0 {
        return BigInt::from(1);
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        let minor = IntMatrix::from_rows(
            (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect()).collect(),
            n - 1,
        );
        let term = &m[(0, j)] * cofactor_det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Elements as plain torsion tuples for finite groups.
pub fn sum_of(g: &Group, elems: &[GroupElement], mult: &[u32]) -> GroupElement {
    let mut s = g.zero();
    for (x, &k) in elems.iter().zip(mult) {
        for _ in 0..k {
            s = g.add(&s, x).unwrap();
        }
    }
    s
}

/// All vectors `v` with `0 ≤ v ≤ bound` componentwise.
pub fn sub_vectors(bound: &[u32]) -> Vec<Vec<u32>> {
    bound.iter().map(|&b| 0..=b).multi_cartesian_product().collect()
}

/// Every vector with nonnegative entries summing to at most `max_len`.
pub fn vectors_up_to(n: usize, max_len: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    (0..n)
        .map(|_| 0..=max_len)
        .multi_cartesian_product()
        .filter(|v| v.iter().sum::<u32>() <= max_len)
        .collect()
}

/// Minimal zero-sum sequences by definition: zero-sum, nonempty, and no
/// nonempty proper sub-vector sums to zero.
pub fn brute_atoms(g: &Group, elems: &[GroupElement], max_len: u32) -> BTreeSet<Vec<u32>> {
    let zero = g.zero();
    vectors_up_to(elems.len(), max_len)
        .into_iter()
        .filter(|v| v.iter().sum::<u32>() > 0 && sum_of(g, elems, v) == zero)
        .filter(|v| {
            !sub_vectors(v).into_iter().any(|w| {
                let n: u32 = w.iter().sum();
                n > 0 && &w != v && sum_of(g, elems, &w) == zero
            })
        })
        .collect()
}

/// All factorizations by ordered recursion (no canonical-order constraint),
/// deduplicated afterwards as sorted lists of atom vectors.
pub fn brute_factorizations(target: &[u32], atoms: &[Vec<u32>]) -> BTreeSet<Vec<Vec<u32>>> {
    fn go(rem: &[u32], atoms: &[Vec<u32>], chosen: &mut Vec<Vec<u32>>, out: &mut HashSet<Vec<Vec<u32>>>) {
        if rem.iter().all(|&x| x == 0) {
            let mut f = chosen.clone();
            f.sort();
            out.insert(f);
            return;
        }
        for a in atoms {
            if a.iter().zip(rem).all(|(x, y)| x <= y) {
                let next: Vec<u32> = rem.iter().zip(a).map(|(r, x)| r - x).collect();
                chosen.push(a.clone());
                go(&next, atoms, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut out = HashSet::new();
    go(target, atoms, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

pub fn brute_lengths(target: &[u32], atoms: &[Vec<u32>]) -> BTreeSet<usize> {
    brute_factorizations(target, atoms).iter().map(Vec::len).collect()
}

/// AAMP by the definition, searching `y`, every `𝒟` and every `max L*`.
pub fn brute_aamp(l: &BTreeSet<i64>, d: i64, bound: i64) -> bool {
    let (lo, hi) = (*l.first().unwrap(), *l.last().unwrap());
    let inner: Vec<i64> = (1..d).collect();
    for y in (lo - bound - d)..=(hi + d) {
        for mask in 0u32..(1 << inner.len()) {
            let mut dset: Vec<i64> = vec![0, d];
            dset.extend(inner.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x));
            let prog = |x: i64| dset.iter().any(|&r| (x - r).rem_euclid(d) == 0);
            if !l.iter().all(|&x| prog(x - y)) {
                continue;
            }
            for top in 0..=(hi - lo + bound + d) {
                let star: BTreeSet<i64> = (0..=top).filter(|&x| prog(x)).collect();
                if star.iter().next() != Some(&0) || star.iter().last() != Some(&top) {
                    continue;
                }
                let shifted: BTreeSet<i64> = l.iter().map(|&x| x - y).collect();
                let ok = shifted.iter().all(|&x| {
                    star.contains(&x) || (-bound..=-1).contains(&x) || (top + 1..=top + bound).contains(&x)
                }) && star.iter().all(|x| shifted.contains(x));
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

pub fn abs(x: &BigInt) -> BigInt {
    x.abs()
}
