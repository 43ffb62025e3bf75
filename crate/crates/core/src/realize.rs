//! Bounded searches that exhibit the structure of sets of lengths: elements
//! with a prescribed set of lengths and factorization counts, and a survey
//! checking that every set of lengths up to a cap is an AAMP.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use log::debug;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::Group;
use crate::error::{Error, Result};
use crate::lengths::{self, delta_star, factorizations, length_set, minimal_bound, LengthReport, LengthTable};
use crate::zerosum::{atoms, sort_canonical, zero_sum_sequences, Sequence, Support};

/// `C₂, …, C₈, C₂², C₂³, C₃², C₂ ⊕ C₄, C₂ ⊕ C₆`.
pub fn default_family() -> Vec<Group> {
    let mut v: Vec<Group> = (2..=8).map(|n| Group::cyclic(n).expect("n ≥ 2")).collect();
    for spec in ["C2 x C2", "C2 x C2 x C2", "C3 x C3", "C2 x C4", "C2 x C6"] {
        v.push(spec.parse().expect("valid spec"));
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationTask {
    /// `m₁ < … < m_k`, all at least 2.
    pub target_lengths: Vec<usize>,
    /// `n₁, …, n_k`, all at least 1.
    pub multiplicities: Vec<u64>,
    pub group_family: Vec<Group>,
    pub max_support_size: Option<usize>,
    pub max_element_length: Option<usize>,
}

impl RealizationTask {
    pub fn new(target_lengths: Vec<usize>, multiplicities: Vec<u64>) -> Self {
        RealizationTask {
            target_lengths,
            multiplicities,
            group_family: default_family(),
            max_support_size: None,
            max_element_length: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.target_lengths.is_empty() {
            return Err(Error::InvalidInput("target set of lengths is empty".into()));
        }
        if self.target_lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("target lengths must be strictly increasing".into()));
        }
        if self.target_lengths[0] < 2 {
            return Err(Error::OutOfHypothesis("lengths must be ≥ 2".into()));
        }
        if self.multiplicities.len() != self.target_lengths.len() {
            return Err(Error::InvalidInput("one multiplicity per target length is required".into()));
        }
        if self.multiplicities.contains(&0) {
            return Err(Error::InvalidInput("multiplicities must be ≥ 1".into()));
        }
        Ok(())
    }

    fn accepts(&self, report: &LengthReport) -> bool {
        report.length_set == self.target_lengths
            && self
                .target_lengths
                .iter()
                .zip(&self.multiplicities)
                .all(|(m, n)| report.factorization_counts.get(m).copied().unwrap_or(0) >= *n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationWitness {
    pub group: Group,
    pub support: Arc<Support>,
    pub sequence: Sequence,
    pub report: LengthReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationOutcome {
    pub witness: Option<RealizationWitness>,
    pub groups_searched: Vec<Group>,
    pub candidates_checked: usize,
}

/// Searches the family in order; within a group, supports (nonzero classes)
/// by size then lexicographically, and within a support the products of
/// `m₁` atoms that use every support element, by length then
/// lexicographically. The first hit is re-validated by a full enumeration of
/// its factorizations before it is returned.
///
/// Only products of `m₁` atoms are tried: a sequence with `min L = m₁` is one.
pub fn witness_search(task: &RealizationTask) -> Result<RealizationOutcome> {
    task.validate()?;
    let m1 = task.target_lengths[0];
    let mut checked = 0usize;
    let mut searched = Vec::new();
    for group in &task.group_family {
        searched.push(group.clone());
        let nonzero: Vec<_> = group.elements()?.into_iter().filter(|x| x != &group.zero()).collect();
        let max_size = task.max_support_size.unwrap_or(nonzero.len()).min(nonzero.len());
        for size in 1..=max_size {
            let subsets: Vec<Vec<usize>> = (0..nonzero.len()).combinations(size).collect();
            let results: Vec<(usize, Option<(Sequence, LengthReport)>)> = subsets
                .par_iter()
                .map(|idx| {
                    let chosen = idx.iter().map(|&i| nonzero[i].clone()).collect();
                    let support = Support::new(group.clone(), chosen)?;
                    search_support(task, &support, m1)
                })
                .collect::<Result<_>>()?;
            checked += results.iter().map(|r| r.0).sum::<usize>();
            if let Some((seq, report)) = results.into_iter().find_map(|r| r.1) {
                debug!("witness {seq} over {group} after {checked} candidates");
                let witness = RealizationWitness {
                    group: group.clone(),
                    support: seq.support().clone(),
                    sequence: seq,
                    report,
                };
                revalidate(task, &witness)?;
                return Ok(RealizationOutcome { witness: Some(witness), groups_searched: searched, candidates_checked: checked });
            }
        }
    }
    Ok(RealizationOutcome { witness: None, groups_searched: searched, candidates_checked: checked })
}

fn search_support(
    task: &RealizationTask,
    support: &Arc<Support>,
    m1: usize,
) -> Result<(usize, Option<(Sequence, LengthReport)>)> {
    let set = atoms(support, None)?;
    let mut cands: Vec<Sequence> = set
        .atoms
        .iter()
        .combinations_with_replacement(m1)
        .map(|combo| {
            let mut mult = vec![0u32; support.len()];
            for a in combo {
                for (m, x) in mult.iter_mut().zip(a.multiplicities()) {
                    *m += x;
                }
            }
            mult
        })
        .filter(|m| m.iter().all(|&x| x > 0))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|m| Sequence::new(support.clone(), m).expect("aligned"))
        .filter(|s| task.max_element_length.is_none_or(|cap| s.len() <= cap))
        .collect();
    sort_canonical(&mut cands);
    let mut n = 0;
    for s in cands {
        n += 1;
        let report = length_set(&s, &set)?;
        if task.accepts(&report) {
            return Ok((n, Some((s, report))));
        }
    }
    Ok((n, None))
}

/// Independent recount by listing every factorization.
fn revalidate(task: &RealizationTask, w: &RealizationWitness) -> Result<()> {
    let set = atoms(&w.support, None)?;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for f in factorizations(&w.sequence, &set)? {
        if f.product(&set) != w.sequence.multiplicities() {
            return Err(Error::InvalidInput(format!("factorization {f:?} does not multiply out to {}", w.sequence)));
        }
        *counts.entry(f.len()).or_default() += 1;
    }
    if counts != w.report.factorization_counts || !task.accepts(&w.report) {
        return Err(Error::InvalidInput(format!("witness {} failed re-validation", w.sequence)));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyReport {
    pub group: String,
    pub element_cap: u64,
    pub delta_star: Vec<usize>,
    /// Differences tried: `Δ*(G)`, or `{1}` when it is empty.
    pub differences: Vec<usize>,
    pub sequences: usize,
    pub distinct_length_sets: usize,
    /// Largest minimal bound over the corpus.
    pub empirical_bound: u64,
    /// A sequence attaining the empirical bound, with its set of lengths.
    pub extremal: Option<(String, Vec<usize>)>,
    pub failures: usize,
}

/// For every zero-sum sequence over `G` of length at most the cap, finds the
/// least bound at which its set of lengths is an AAMP with some difference in
/// `Δ*(G)`, and reports the maximum.
pub fn aamp_survey(group: &Group, element_cap: u64, guard: u64) -> Result<SurveyReport> {
    let ds = delta_star(group, element_cap, guard)?;
    let differences = if ds.values.is_empty() { vec![1] } else { ds.values.clone() };
    let support = Support::full(group)?;
    let set = atoms(&support, None)?;
    let seqs = zero_sum_sequences(&support, element_cap);
    let mut table = LengthTable::new(&set);
    let mut seen: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut empirical = 0u64;
    let mut extremal = None;
    for s in &seqs {
        let l: Vec<usize> = table.lengths(s.multiplicities()).iter().copied().collect();
        let b = match seen.get(&l) {
            Some(&b) => b,
            None => {
                let b = least_bound(&l, &differences).ok_or_else(|| Error::SurveyFailure {
                    sequence: s.to_string(),
                    lengths: l.clone(),
                })?;
                seen.insert(l.clone(), b);
                b
            }
        };
        if b > empirical || extremal.is_none() {
            empirical = empirical.max(b);
            extremal = Some((s.to_string(), l));
        }
    }
    Ok(SurveyReport {
        group: group.to_string(),
        element_cap,
        delta_star: ds.values,
        differences,
        sequences: seqs.len(),
        distinct_length_sets: seen.len(),
        empirical_bound: empirical,
        extremal,
        failures: 0,
    })
}

/// Least bound over the given differences, each witness re-validated.
fn least_bound(l: &[usize], differences: &[usize]) -> Option<u64> {
    let set: BTreeSet<i64> = l.iter().map(|&x| x as i64).collect();
    differences
        .iter()
        .filter_map(|&d| {
            let (b, w) = minimal_bound(&set, d as u64).ok()?;
            w.validate(&set).then_some(b)
        })
        .min()
}

/// Convenience: length report of a sequence over its own support.
pub fn report_for(seq: &Sequence) -> Result<LengthReport> {
    let set = atoms(seq.support(), None)?;
    lengths::length_set(seq, &set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(l: &[usize], n: &[u64], family: &[&str]) -> RealizationTask {
        let mut t = RealizationTask::new(l.to_vec(), n.to_vec());
        t.group_family = family.iter().map(|s| s.parse().unwrap()).collect();
        t
    }

    #[test]
    fn realize_two_three_in_c3() {
        let out = witness_search(&task(&[2, 3], &[1, 1], &["C3"])).unwrap();
        let w = out.witness.unwrap();
        assert_eq!(w.sequence.to_string(), "[1^3,2^3]");
        assert_eq!(w.report.factorization_counts, BTreeMap::from([(2, 1), (3, 1)]));
    }

    #[test]
    fn realize_two_in_c2() {
        let w = witness_search(&task(&[2], &[1], &["C2"])).unwrap().witness.unwrap();
        assert_eq!(w.sequence.to_string(), "[1^4]");
        assert_eq!(w.report.factorization_counts, BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn rejects_lengths_below_two() {
        let e = witness_search(&task(&[1, 3], &[1, 1], &["C3"])).unwrap_err();
        assert!(matches!(e, Error::OutOfHypothesis(_)));
        assert!(witness_search(&task(&[3, 2], &[1, 1], &["C3"])).is_err());
        assert!(witness_search(&task(&[2, 3], &[1], &["C3"])).is_err());
        assert!(witness_search(&task(&[2, 3], &[1, 0], &["C3"])).is_err());
    }

    #[test]
    fn absent_within_caps() {
        let out = witness_search(&task(&[2, 3], &[1, 1], &["C2"])).unwrap();
        assert!(out.witness.is_none());
        assert_eq!(out.groups_searched.len(), 1);
    }

    #[test]
    fn survey_c3() {
        let r = aamp_survey(&Group::cyclic(3).unwrap(), 9, 8).unwrap();
        assert_eq!(r.delta_star, vec![1]);
        assert_eq!(r.empirical_bound, 0);
        assert_eq!(r.failures, 0);
        let t = aamp_survey(&Group::trivial(), 5, 8).unwrap();
        assert_eq!(t.empirical_bound, 0);
        assert_eq!(t.differences, vec![1]);
    }
}
