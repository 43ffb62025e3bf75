//! Factorizations in `B(G₀)` and the invariants built on them: sets of
//! lengths, distance sets, minimal distances and half-factoriality.

pub mod aamp;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::Group;
use crate::error::{Error, Result};
use crate::zerosum::{atoms, zero_sum_sequences, AtomSet, Sequence, Support};

pub use aamp::{aamp_check, minimal_bound, AampWitness};

/// Default subset-sweep guard on `|G|` for [`delta_star`].
/// Largest group order any subset sweep accepts, whatever the guard.
pub const MAX_SWEEP_ORDER: u64 = 20;

pub const DEFAULT_SWEEP_GUARD: u64 = 8;

/// A factorization as a non-decreasing list of indices into an [`AtomSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Factorization {
    pub atoms: Vec<usize>,
}

impl Factorization {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Multiplicity vector of the product of the atoms.
    pub fn product(&self, set: &AtomSet) -> Vec<u32> {
        let mut v = vec![0u32; set.support.len()];
        for &i in &self.atoms {
            for (a, b) in v.iter_mut().zip(set.atoms[i].multiplicities()) {
                *a += b;
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthReport {
    pub target: Sequence,
    pub length_set: Vec<usize>,
    pub delta_set: Vec<usize>,
    /// Number of distinct unordered factorizations per length.
    pub factorization_counts: BTreeMap<usize, u64>,
    pub factorizations: Option<Vec<Factorization>>,
    /// False when the atom set may be missing atoms dividing the target.
    pub complete: bool,
}

/// Successive differences of a sorted set.
pub fn delta(lengths: &[usize]) -> Vec<usize> {
    let d: BTreeSet<usize> = lengths.windows(2).map(|w| w[1] - w[0]).collect();
    d.into_iter().collect()
}

fn check_target(s: &Sequence, set: &AtomSet) -> Result<()> {
    if s.support() != &set.support {
        return Err(Error::InvalidInput("sequence and atom set have different supports".into()));
    }
    if !s.is_zero_sum() {
        return Err(Error::InvalidInput(format!("{s} is not a zero-sum sequence")));
    }
    Ok(())
}

/// Atom set is exact for `s` when it is complete or its cap reaches `|s|`.
fn exact_for(s: &Sequence, set: &AtomSet) -> bool {
    set.complete || set.cap_used >= s.len() as u64
}

/// Indices of atoms dividing `target`.
fn dividing_atoms(target: &[u32], set: &AtomSet) -> Vec<usize> {
    (0..set.atoms.len())
        .filter(|&i| set.atoms[i].multiplicities().iter().zip(target).all(|(a, b)| a <= b))
        .collect()
}

/// All distinct unordered factorizations of `s`.
///
/// Atoms are chosen in non-decreasing index order so each multiset of atoms
/// is produced exactly once.
pub fn factorizations(s: &Sequence, set: &AtomSet) -> Result<Vec<Factorization>> {
    check_target(s, set)?;
    let cands = dividing_atoms(s.multiplicities(), set);
    let mut out = Vec::new();
    let mut rem = s.multiplicities().to_vec();
    let mut chosen = Vec::new();
    descend(set, &cands, 0, &mut rem, &mut chosen, &mut out);
    Ok(out)
}

fn descend(
    set: &AtomSet,
    cands: &[usize],
    from: usize,
    rem: &mut Vec<u32>,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Factorization>,
) {
    if rem.iter().all(|&x| x == 0) {
        out.push(Factorization { atoms: chosen.clone() });
        return;
    }
    for k in from..cands.len() {
        let a = set.atoms[cands[k]].multiplicities();
        if a.iter().zip(rem.iter()).any(|(x, y)| x > y) {
            continue;
        }
        for (r, x) in rem.iter_mut().zip(a) {
            *r -= x;
        }
        chosen.push(cands[k]);
        descend(set, cands, k, rem, chosen, out);
        chosen.pop();
        for (r, x) in rem.iter_mut().zip(a) {
            *r += x;
        }
    }
}

/// Set of lengths of `s` with per-length factorization counts.
pub fn length_set(s: &Sequence, set: &AtomSet) -> Result<LengthReport> {
    check_target(s, set)?;
    let cands = dividing_atoms(s.multiplicities(), set);
    let mut memo = HashMap::new();
    let counts = count_by_length(set, &cands, 0, s.multiplicities(), &mut memo);
    let counts: BTreeMap<usize, u64> = (*counts).clone();
    let length_set: Vec<usize> = counts.keys().copied().collect();
    Ok(LengthReport {
        target: s.clone(),
        delta_set: delta(&length_set),
        length_set,
        factorization_counts: counts,
        factorizations: None,
        complete: exact_for(s, set),
    })
}

/// [`length_set`] plus the full list of factorizations.
pub fn length_set_with_factorizations(s: &Sequence, set: &AtomSet) -> Result<LengthReport> {
    let mut report = length_set(s, set)?;
    report.factorizations = Some(factorizations(s, set)?);
    Ok(report)
}

type CountMemo = HashMap<(Vec<u32>, usize), Arc<BTreeMap<usize, u64>>>;

fn count_by_length(
    set: &AtomSet,
    cands: &[usize],
    from: usize,
    rem: &[u32],
    memo: &mut CountMemo,
) -> Arc<BTreeMap<usize, u64>> {
    if rem.iter().all(|&x| x == 0) {
        return Arc::new(BTreeMap::from([(0, 1)]));
    }
    let key = (rem.to_vec(), from);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
    for k in from..cands.len() {
        let a = set.atoms[cands[k]].multiplicities();
        if a.iter().zip(rem).any(|(x, y)| x > y) {
            continue;
        }
        let next: Vec<u32> = rem.iter().zip(a).map(|(r, x)| r - x).collect();
        let sub = count_by_length(set, cands, k, &next, memo);
        for (&len, &c) in sub.iter() {
            let e = acc.entry(len + 1).or_insert(0);
            *e = e.checked_add(c).expect("factorization count overflows u64");
        }
    }
    let acc = Arc::new(acc);
    memo.insert(key, acc.clone());
    acc
}

/// Memoized `L(S) = ⋃_{A | S} (1 + L(S·A⁻¹))` over one atom set, for sweeps
/// over many sequences.
pub struct LengthTable<'a> {
    set: &'a AtomSet,
    memo: HashMap<Vec<u32>, Arc<BTreeSet<usize>>>,
}

impl<'a> LengthTable<'a> {
    pub fn new(set: &'a AtomSet) -> Self {
        LengthTable { set, memo: HashMap::new() }
    }

    pub fn lengths(&mut self, mult: &[u32]) -> Arc<BTreeSet<usize>> {
        if mult.iter().all(|&x| x == 0) {
            return Arc::new(BTreeSet::from([0]));
        }
        if let Some(hit) = self.memo.get(mult) {
            return hit.clone();
        }
        let mut acc = BTreeSet::new();
        for atom in &self.set.atoms {
            let a = atom.multiplicities();
            if a.iter().zip(mult).any(|(x, y)| x > y) {
                continue;
            }
            let rest: Vec<u32> = mult.iter().zip(a).map(|(m, x)| m - x).collect();
            acc.extend(self.lengths(&rest).iter().map(|l| l + 1));
        }
        let acc = Arc::new(acc);
        self.memo.insert(mult.to_vec(), acc.clone());
        acc
    }
}

/// Atoms sufficient for every zero-sum sequence of length at most `cap`.
fn sweep_atoms(support: &Arc<Support>, cap: u64) -> Result<AtomSet> {
    if support.group().is_finite() {
        atoms(support, None)
    } else {
        atoms(support, Some(cap))
    }
}

/// `Δ(B(G₀))` restricted to elements of length at most `element_cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub deltas: Vec<usize>,
    pub element_cap: u64,
    pub sequences_checked: usize,
    /// Always false: `Δ(M)` is a union over infinitely many elements and the
    /// result is only a lower approximation at the cap.
    pub exhaustive: bool,
}

pub fn delta_of_monoid(support: &Arc<Support>, element_cap: u64) -> Result<DeltaReport> {
    let set = sweep_atoms(support, element_cap)?;
    let seqs = zero_sum_sequences(support, element_cap);
    let mut table = LengthTable::new(&set);
    let mut deltas = BTreeSet::new();
    for s in &seqs {
        let l: Vec<usize> = table.lengths(s.multiplicities()).iter().copied().collect();
        deltas.extend(delta(&l));
    }
    Ok(DeltaReport {
        deltas: deltas.into_iter().collect(),
        element_cap,
        sequences_checked: seqs.len(),
        exhaustive: false,
    })
}

/// `min Δ(B(G₀))` at the cap, absent when no distance was seen.
pub fn min_delta(support: &Arc<Support>, element_cap: u64) -> Result<Option<usize>> {
    Ok(delta_of_monoid(support, element_cap)?.deltas.first().copied())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetDelta {
    pub support: String,
    pub min_delta: Option<usize>,
    pub deltas: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaStarReport {
    pub group: String,
    pub element_cap: u64,
    pub values: Vec<usize>,
    pub subsets: Vec<SubsetDelta>,
}

impl DeltaStarReport {
    pub fn max(&self) -> Option<usize> {
        self.values.last().copied()
    }
}

/// `Δ*(G)` at the cap: `min Δ(B(G₀))` over all `G₀ ⊆ G` with nonempty `Δ`.
pub fn delta_star(group: &Group, element_cap: u64, guard: u64) -> Result<DeltaStarReport> {
    let order = sweep_order(group, guard)?;
    let elements = group.elements()?;
    let mut masks: Vec<u64> = (0..(1u64 << order)).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    let subsets: Vec<SubsetDelta> = masks
        .par_iter()
        .map(|&mask| {
            let chosen = (0..order as usize).filter(|i| mask >> i & 1 == 1).map(|i| elements[i].clone()).collect();
            let support = Support::new(group.clone(), chosen)?;
            let report = delta_of_monoid(&support, element_cap)?;
            Ok(SubsetDelta {
                support: support.to_string(),
                min_delta: report.deltas.first().copied(),
                deltas: report.deltas,
            })
        })
        .collect::<Result<_>>()?;
    let values: BTreeSet<usize> = subsets.iter().filter_map(|s| s.min_delta).collect();
    Ok(DeltaStarReport {
        group: group.to_string(),
        element_cap,
        values: values.into_iter().collect(),
        subsets,
    })
}

pub(crate) fn sweep_order(group: &Group, guard: u64) -> Result<u64> {
    let order = group
        .order_u64()
        .ok_or_else(|| Error::Unsupported(format!("subset sweep over infinite group {group}")))?;
    if order > guard.min(MAX_SWEEP_ORDER) {
        return Err(Error::GuardExceeded { order, guard: guard.min(MAX_SWEEP_ORDER) });
    }
    Ok(order)
}

/// `max{r(G) − 1, exp(G) − 2}`, stated for finite `G` with `|G| ≥ 3`.
pub fn max_delta_star_formula(group: &Group) -> Result<i64> {
    let order = group
        .order()
        .ok_or_else(|| Error::OutOfHypothesis(format!("{group} is infinite")))?;
    if order < 3.into() {
        return Err(Error::OutOfHypothesis(format!("|{group}| = {order} < 3")));
    }
    let exp = group.exponent().finite().and_then(|e| e.to_i64()).expect("finite exponent");
    Ok((group.rank() as i64 - 1).max(exp - 2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfFactorialReport {
    /// True only at the cap; a false verdict is a definitive refutation.
    pub verdict: bool,
    pub element_cap: u64,
    pub sequences_checked: usize,
    pub counterexample: Option<(Sequence, Vec<usize>)>,
}

/// Checks `|L(S)| = 1` for every zero-sum `S` over `support` with `|S| ≤ element_cap`;
/// the first failure in canonical order is returned as a counterexample.
pub fn half_factorial_check(support: &Arc<Support>, element_cap: u64) -> Result<HalfFactorialReport> {
    let set = sweep_atoms(support, element_cap)?;
    let seqs = zero_sum_sequences(support, element_cap);
    let mut table = LengthTable::new(&set);
    for (n, s) in seqs.iter().enumerate() {
        let l = table.lengths(s.multiplicities());
        if l.len() > 1 {
            return Ok(HalfFactorialReport {
                verdict: false,
                element_cap,
                sequences_checked: n + 1,
                counterexample: Some((s.clone(), l.iter().copied().collect())),
            });
        }
    }
    Ok(HalfFactorialReport { verdict: true, element_cap, sequences_checked: seqs.len(), counterexample: None })
}
