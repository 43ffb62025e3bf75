//! Almost arithmetic multiprogressions.
//!
//! `L` is an AAMP with difference `d` and bound `M` when
//! `L = y + (L′ ∪ L* ∪ L″) ⊆ y + 𝒟 + dℤ` with `{0, d} ⊆ 𝒟 ⊆ [0, d]`,
//! `min L* = 0`, `L* = (𝒟 + dℤ) ∩ [0, max L*]`, `L′ ⊆ [−M, −1]` and
//! `L″ ⊆ max L* + [1, M]`. The code calls `M` the `bound`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AampWitness {
    pub d: u64,
    pub bound: u64,
    pub y: i64,
    pub d_set: Vec<i64>,
    pub l_prime: Vec<i64>,
    pub l_star: Vec<i64>,
    pub l_dprime: Vec<i64>,
}

impl AampWitness {
    /// Re-checks the defining conditions against `l`.
    pub fn validate(&self, l: &BTreeSet<i64>) -> bool {
        let d = self.d as i64;
        let m = self.bound as i64;
        if d <= 0 {
            return false;
        }
        let dset: BTreeSet<i64> = self.d_set.iter().copied().collect();
        if !dset.contains(&0) || !dset.contains(&d) || dset.iter().any(|&x| !(0..=d).contains(&x)) {
            return false;
        }
        let in_progression = |x: i64| dset.iter().any(|&r| (x - r).rem_euclid(d) == 0);
        let Some(&top) = self.l_star.iter().max() else {
            return false;
        };
        if self.l_star.iter().min() != Some(&0) {
            return false;
        }
        let expected: Vec<i64> = (0..=top).filter(|&x| in_progression(x)).collect();
        let mut star = self.l_star.clone();
        star.sort();
        star.dedup();
        if star != expected {
            return false;
        }
        if self.l_prime.iter().any(|&x| x < -m || x > -1) {
            return false;
        }
        if self.l_dprime.iter().any(|&x| x < top + 1 || x > top + m) {
            return false;
        }
        let rebuilt: BTreeSet<i64> = self
            .l_prime
            .iter()
            .chain(&self.l_star)
            .chain(&self.l_dprime)
            .map(|&x| x + self.y)
            .collect();
        &rebuilt == l && l.iter().all(|&x| in_progression(x - self.y))
    }
}

/// Decides whether `l` is an AAMP with difference `d` and the given bound,
/// returning a witness when it is.
///
/// `0 ∈ L*` forces `y ∈ L`, and `L′ ⊆ [−bound, −1]` forces
/// `y ≤ min L + bound`. For fixed `y` and `max L* = T`, the smallest
/// admissible residue set is the residues of `L − y`; any larger one only adds
/// points to `[0, T]`. So `(y, T)` succeeds iff that residue set reproduces
/// `(L − y) ∩ [0, T]` exactly and `L − y ⊆ [−bound, T + bound]`.
pub fn aamp_check(l: &BTreeSet<i64>, d: u64, bound: u64) -> Result<Option<AampWitness>> {
    if d == 0 {
        return Err(Error::InvalidInput("AAMP difference must be positive".into()));
    }
    let (Some(&lo), Some(&hi)) = (l.first(), l.last()) else {
        return Err(Error::InvalidInput("AAMP check needs a nonempty set".into()));
    };
    let di = d as i64;
    let b = bound as i64;
    for &y in l.range(lo..=lo.saturating_add(b)) {
        let shifted: Vec<i64> = l.iter().map(|&x| x - y).collect();
        let residues: BTreeSet<i64> = shifted.iter().map(|x| x.rem_euclid(di)).collect();
        for &t in shifted.iter().filter(|&&t| t >= 0) {
            if hi - y > t + b {
                continue;
            }
            let core_ok = (0..=t).all(|x| residues.contains(&x.rem_euclid(di)) == l.contains(&(x + y)));
            if !core_ok {
                continue;
            }
            let mut d_set: Vec<i64> = residues.iter().copied().filter(|&r| r != 0).collect();
            d_set.push(0);
            d_set.push(di);
            d_set.sort();
            let w = AampWitness {
                d,
                bound,
                y,
                d_set,
                l_prime: shifted.iter().copied().filter(|&x| x < 0).collect(),
                l_star: shifted.iter().copied().filter(|&x| (0..=t).contains(&x)).collect(),
                l_dprime: shifted.iter().copied().filter(|&x| x > t).collect(),
            };
            debug_assert!(w.validate(l));
            return Ok(Some(w));
        }
    }
    let _ = hi;
    Ok(None)
}

/// Smallest bound for which `l` is an AAMP with difference `d`.
///
/// Always exists: with `y = min L`, `L* = {0}` and `𝒟 ⊇` all residues, the
/// bound `max L − min L` suffices.
pub fn minimal_bound(l: &BTreeSet<i64>, d: u64) -> Result<(u64, AampWitness)> {
    let (Some(&lo), Some(&hi)) = (l.first(), l.last()) else {
        return Err(Error::InvalidInput("AAMP check needs a nonempty set".into()));
    };
    for b in 0..=(hi - lo) as u64 {
        if let Some(w) = aamp_check(l, d, b)? {
            return Ok((b, w));
        }
    }
    Err(Error::InvalidInput(format!("no AAMP bound found for {l:?} with d = {d}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> BTreeSet<i64> {
        v.iter().copied().collect()
    }

    #[test]
    fn full_progression() {
        let w = aamp_check(&set(&[2, 3]), 1, 0).unwrap().unwrap();
        assert_eq!(w.y, 2);
        assert_eq!(w.d_set, vec![0, 1]);
        assert_eq!(w.l_star, vec![0, 1]);
        assert!(w.validate(&set(&[2, 3])));
    }

    #[test]
    fn difference_matters() {
        assert!(aamp_check(&set(&[2, 5]), 3, 0).unwrap().is_some());
        assert!(aamp_check(&set(&[2, 5]), 1, 0).unwrap().is_none());
    }

    #[test]
    fn tail_outside_progression_class() {
        // 7 has the wrong parity for any witness with d = 2 and a core reaching 4
        assert!(aamp_check(&set(&[2, 4, 6, 7]), 2, 1).unwrap().is_none());
        // with every residue present the core shrinks to {0}; y = 4 then needs bound 3
        assert!(aamp_check(&set(&[2, 4, 6, 7]), 2, 2).unwrap().is_none());
        let w = aamp_check(&set(&[2, 4, 6, 7]), 2, 3).unwrap().unwrap();
        assert_eq!((w.y, w.l_star.clone()), (4, vec![0]));
        assert!(w.validate(&set(&[2, 4, 6, 7])));
        let w = aamp_check(&set(&[2, 4, 6, 8]), 2, 0).unwrap().unwrap();
        assert_eq!(w.l_star, vec![0, 2, 4, 6]);
    }

    #[test]
    fn initial_and_final_parts() {
        let l = set(&[1, 5, 7, 9, 11, 13, 17]);
        let w = aamp_check(&l, 2, 4).unwrap().unwrap();
        assert_eq!(w.y, 5);
        assert_eq!(w.l_prime, vec![-4]);
        assert_eq!(w.l_star, vec![0, 2, 4, 6, 8]);
        assert_eq!(w.l_dprime, vec![12]);
        assert!(w.validate(&l));
        assert!(aamp_check(&l, 2, 3).unwrap().is_none());
        assert_eq!(minimal_bound(&l, 2).unwrap().0, 4);
    }

    #[test]
    fn errors() {
        assert!(matches!(aamp_check(&set(&[1]), 0, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(aamp_check(&set(&[]), 1, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn singletons_are_aamps() {
        for d in 1..6 {
            assert!(aamp_check(&set(&[4]), d, 0).unwrap().is_some());
        }
    }
}
