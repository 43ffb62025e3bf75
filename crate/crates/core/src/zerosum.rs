//! Sequences over a subset `G₀` of a group, the monoid of zero-sum sequences
//! `B(G₀)`, and enumeration of its atoms (minimal zero-sum sequences).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{split_top_level, Group, GroupElement};
use crate::error::{Error, Result};

/// A subset `G₀` of a group, stored sorted under the canonical element order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    group: Group,
    elements: Vec<GroupElement>,
}

impl Support {
    pub fn new(group: Group, mut elements: Vec<GroupElement>) -> Result<Arc<Self>> {
        for x in &elements {
            if !group.contains(x) {
                return Err(Error::InvalidElement(format!("{x} is not an element of {group}")));
            }
        }
        elements.sort();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("support elements must be distinct".into()));
        }
        Ok(Arc::new(Support { group, elements }))
    }

    /// `G₀ = G` for a finite group.
    pub fn full(group: &Group) -> Result<Arc<Self>> {
        Self::new(group.clone(), group.elements()?)
    }

    /// Parses a bracketed element list such as `[1,2]` or `[([],[1,0]),([],[0,1])]`.
    pub fn parse(group: &Group, s: &str) -> Result<Arc<Self>> {
        let items = bracket_items(s)?;
        let elements = items.iter().map(|t| group.parse_element(t)).collect::<Result<_>>()?;
        Self::new(group.clone(), elements)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }

    /// The sub-support on the given (increasing) indices.
    pub fn restrict(&self, indices: &[usize]) -> Arc<Support> {
        Arc::new(Support {
            group: self.group.clone(),
            elements: indices.iter().map(|&i| self.elements[i].clone()).collect(),
        })
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(|x| self.group.format_element(x)).collect();
        write!(f, "[{}]", items.join(","))
    }
}

/// An element of the free abelian monoid `F(G₀)`: a multiplicity per support element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    support: Arc<Support>,
    multiplicities: Vec<u32>,
}

impl Sequence {
    pub fn new(support: Arc<Support>, multiplicities: Vec<u32>) -> Result<Self> {
        if multiplicities.len() != support.len() {
            return Err(Error::InvalidInput(format!(
                "{} multiplicities for a support of size {}",
                multiplicities.len(),
                support.len()
            )));
        }
        Ok(Sequence { support, multiplicities })
    }

    pub fn empty(support: Arc<Support>) -> Self {
        let n = support.len();
        Sequence { support, multiplicities: vec![0; n] }
    }

    /// Builds a sequence from `(element, multiplicity)` pairs; repeated elements accumulate.
    pub fn from_elements(support: Arc<Support>, items: &[(GroupElement, u32)]) -> Result<Self> {
        let mut mult = vec![0u32; support.len()];
        for (x, m) in items {
            let i = support
                .index_of(x)
                .ok_or_else(|| Error::InvalidElement(format!("{x} is not in the support {support}")))?;
            mult[i] += m;
        }
        Ok(Sequence { support, multiplicities: mult })
    }

    /// Parses `[g1^m1, g2^m2, …]`; a bare `g` means multiplicity one.
    pub fn parse(support: Arc<Support>, s: &str) -> Result<Self> {
        let group = support.group().clone();
        let mut items = Vec::new();
        for tok in bracket_items(s)? {
            let (elt, m) = match tok.rsplit_once('^') {
                Some((e, m)) => (e, m.parse::<u32>().map_err(|_| Error::Parse(format!("bad multiplicity in `{tok}`")))?),
                None => (tok, 1),
            };
            items.push((group.parse_element(elt)?, m));
        }
        Self::from_elements(support, &items)
    }

    pub fn support(&self) -> &Arc<Support> {
        &self.support
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// `|S|`
    pub fn len(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 0)
    }

    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        self.same_support(other)?;
        Ok(Sequence {
            support: self.support.clone(),
            multiplicities: self.multiplicities.iter().zip(&other.multiplicities).map(|(a, b)| a + b).collect(),
        })
    }

    /// True when `self` divides `other` in `F(G₀)`.
    pub fn divides(&self, other: &Sequence) -> bool {
        self.support == other.support
            && self.multiplicities.iter().zip(&other.multiplicities).all(|(a, b)| a <= b)
    }

    fn same_support(&self, other: &Sequence) -> Result<()> {
        if self.support != other.support {
            return Err(Error::InvalidInput("sequences live over different supports".into()));
        }
        Ok(())
    }

    /// Indices of support elements that occur in the sequence.
    pub fn occurring(&self) -> Vec<usize> {
        (0..self.multiplicities.len()).filter(|&i| self.multiplicities[i] > 0).collect()
    }

    /// The same multiset viewed over the support of the elements it contains.
    pub fn shrink_support(&self) -> Sequence {
        let idx = self.occurring();
        Sequence {
            support: self.support.restrict(&idx),
            multiplicities: idx.iter().map(|&i| self.multiplicities[i]).collect(),
        }
    }

    /// The same multiset over a larger support containing this one's elements.
    pub fn lift_to(&self, support: &Arc<Support>) -> Result<Sequence> {
        let mut mult = vec![0u32; support.len()];
        for (x, &m) in self.support.elements().iter().zip(&self.multiplicities) {
            if m == 0 {
                continue;
            }
            let i = support
                .index_of(x)
                .ok_or_else(|| Error::InvalidElement(format!("{x} is not in the support {support}")))?;
            mult[i] = m;
        }
        Ok(Sequence { support: support.clone(), multiplicities: mult })
    }

    /// `σ(S)`, the sum of all terms.
    pub fn sigma(&self) -> GroupElement {
        let g = self.support.group();
        self.support
            .elements()
            .iter()
            .zip(&self.multiplicities)
            .filter(|(_, &m)| m > 0)
            .fold(g.zero(), |acc, (x, &m)| g.add_unchecked(&acc, &g.scale_unchecked(&BigInt::from(m), x)))
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sigma() == self.support.group().zero()
    }

    /// Whether some nonempty proper subsequence sums to zero.
    ///
    /// Requires a nonempty zero-sum sequence. Walks the support keeping the
    /// set of reachable `(partial sum, nonempty, all taken so far)` states.
    pub fn has_proper_zero_subsequence(&self) -> Result<bool> {
        if self.is_empty() || !self.is_zero_sum() {
            return Err(Error::InvalidInput(format!("{self} is not a nonempty zero-sum sequence")));
        }
        let g = self.support.group();
        let mut states: HashSet<(GroupElement, bool, bool)> = HashSet::new();
        states.insert((g.zero(), false, true));
        for (x, &m) in self.support.elements().iter().zip(&self.multiplicities) {
            if m == 0 {
                continue;
            }
            let mut next = HashSet::new();
            for (sum, nonempty, full) in &states {
                let mut s = sum.clone();
                for k in 0..=m {
                    next.insert((s.clone(), *nonempty || k > 0, *full && k == m));
                    s = g.add_unchecked(&s, x);
                }
            }
            states = next;
        }
        let zero = g.zero();
        Ok(states.iter().any(|(s, nonempty, full)| *nonempty && !*full && *s == zero))
    }

    pub fn to_literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.support.group();
        let items: Vec<String> = self
            .support
            .elements()
            .iter()
            .zip(&self.multiplicities)
            .filter(|(_, &m)| m > 0)
            .map(|(x, &m)| {
                let e = g.format_element(x);
                if m == 1 {
                    e
                } else {
                    format!("{e}^{m}")
                }
            })
            .collect();
        write!(f, "[{}]", items.join(","))
    }
}

/// The atoms of `B(G₀)` up to a length bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSet {
    pub support: Arc<Support>,
    pub atoms: Vec<Sequence>,
    /// True only when the bound provably covers every atom.
    pub complete: bool,
    pub cap_used: u64,
}

impl AtomSet {
    pub fn max_len(&self) -> usize {
        self.atoms.iter().map(Sequence::len).max().unwrap_or(0)
    }

    pub fn to_record(&self) -> AtomSetRecord {
        AtomSetRecord {
            group: self.support.group().to_string(),
            support: self.support.elements().iter().map(|x| self.support.group().format_element(x)).collect(),
            atoms: self.atoms.iter().map(Sequence::to_literal).collect(),
            complete: self.complete,
            cap_used: self.cap_used,
        }
    }

    pub fn from_record(rec: &AtomSetRecord) -> Result<Self> {
        let group: Group = rec.group.parse()?;
        let elements = rec.support.iter().map(|s| group.parse_element(s)).collect::<Result<_>>()?;
        let support = Support::new(group, elements)?;
        let atoms = rec.atoms.iter().map(|a| Sequence::parse(support.clone(), a)).collect::<Result<_>>()?;
        Ok(AtomSet { support, atoms, complete: rec.complete, cap_used: rec.cap_used })
    }
}

/// Serialized form of an [`AtomSet`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSetRecord {
    pub group: String,
    pub support: Vec<String>,
    pub atoms: Vec<String>,
    pub complete: bool,
    pub cap_used: u64,
}

/// Enumerates the minimal zero-sum sequences over `support` of length at most
/// the bound.
///
/// For a finite group the bound defaults to `|G|`, which covers every atom:
/// among the prefix sums of a zero-sum sequence longer than `|G|` two agree,
/// giving a proper zero-sum subsequence. Infinite groups require `cap`.
///
/// Every atom `A` is `M·g` where `g` is its last term in support order and
/// `M` is zero-sum free; so the search walks zero-sum free multisets in
/// non-decreasing index order, tracking the set of their nonempty subsums,
/// and closes each one with `-σ(M)` when that element is in the support and
/// not earlier than the last placed term.
pub fn atoms(support: &Arc<Support>, cap: Option<u64>) -> Result<AtomSet> {
    let group = support.group();
    let order = group.order().map(|n| n.to_u64().unwrap_or(u64::MAX));
    let (bound, complete) = match (order, cap) {
        (Some(n), Some(c)) => (c.min(n), c >= n),
        (Some(n), None) => (n, true),
        (None, Some(c)) => (c, false),
        (None, None) => return Err(Error::NeedsCap),
    };
    let index: HashMap<&GroupElement, usize> =
        support.elements().iter().enumerate().map(|(i, x)| (x, i)).collect();
    let ctx = AtomSearch { group, elements: support.elements(), index: &index, bound };

    let mut found: Vec<Vec<u32>> = Vec::new();
    if bound >= 1 {
        // the empty prefix closes with the zero element
        if let Some(&i) = index.get(&group.zero()) {
            let mut v = vec![0; support.len()];
            v[i] = 1;
            found.push(v);
        }
        let per_first: Vec<Vec<Vec<u32>>> = (0..support.len())
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                let x = &support.elements()[first];
                if x == &group.zero() || bound < 2 {
                    return out;
                }
                let mut mult = vec![0u32; support.len()];
                mult[first] = 1;
                let mut sums = HashSet::new();
                sums.insert(x.clone());
                ctx.extend(&mut mult, 1, first, x.clone(), &sums, &mut out);
                out
            })
            .collect();
        found.extend(per_first.into_iter().flatten());
    }
    let mut atoms: Vec<Sequence> = found
        .into_iter()
        .map(|m| Sequence { support: support.clone(), multiplicities: m })
        .collect();
    sort_canonical(&mut atoms);
    Ok(AtomSet { support: support.clone(), atoms, complete, cap_used: bound })
}

struct AtomSearch<'a> {
    group: &'a Group,
    elements: &'a [GroupElement],
    index: &'a HashMap<&'a GroupElement, usize>,
    bound: u64,
}

impl AtomSearch<'_> {
    /// `mult` is zero-sum free of length `len`, last index `last`, sum `sum`,
    /// and `sums` holds all of its nonempty subsums.
    fn extend(
        &self,
        mult: &mut Vec<u32>,
        len: u64,
        last: usize,
        sum: GroupElement,
        sums: &HashSet<GroupElement>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let closing = self.group.neg_unchecked(&sum);
        if let Some(&j) = self.index.get(&closing) {
            if j >= last && len < self.bound {
                let mut atom = mult.clone();
                atom[j] += 1;
                out.push(atom);
            }
        }
        // a zero-sum free extension must leave room for the closing term
        if len + 1 >= self.bound {
            return;
        }
        let zero = self.group.zero();
        for j in last..self.elements.len() {
            let x = &self.elements[j];
            if x == &zero || sums.contains(&self.group.neg_unchecked(x)) {
                continue;
            }
            let mut next: HashSet<GroupElement> = sums.iter().map(|s| self.group.add_unchecked(s, x)).collect();
            next.extend(sums.iter().cloned());
            next.insert(x.clone());
            mult[j] += 1;
            self.extend(mult, len + 1, j, self.group.add_unchecked(&sum, x), &next, out);
            mult[j] -= 1;
        }
    }
}

/// Sorts by length, then by multiplicity vector.
pub fn sort_canonical(seqs: &mut [Sequence]) {
    seqs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.multiplicities.cmp(&b.multiplicities)));
}

/// `D(G)`: the maximal length of an atom of `B(G)`.
pub fn davenport(group: &Group) -> Result<u64> {
    if !group.is_finite() {
        return Err(Error::Unsupported(format!("Davenport constant of infinite group {group}")));
    }
    let set = atoms(&Support::full(group)?, None)?;
    Ok(set.max_len() as u64)
}

/// All zero-sum sequences over `support` with `|S| ≤ max_len`, in canonical order.
pub fn zero_sum_sequences(support: &Arc<Support>, max_len: u64) -> Vec<Sequence> {
    let group = support.group();
    let mut out = Vec::new();
    let mut mult = vec![0u32; support.len()];
    fn walk(
        group: &Group,
        elems: &[GroupElement],
        i: usize,
        left: u64,
        sum: GroupElement,
        mult: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if i == elems.len() {
            if sum == group.zero() {
                out.push(mult.clone());
            }
            return;
        }
        let mut s = sum;
        for k in 0..=left {
            mult[i] = k as u32;
            walk(group, elems, i + 1, left - k, s.clone(), mult, out);
            s = group.add_unchecked(&s, &elems[i]);
        }
        mult[i] = 0;
    }
    let mut raw = Vec::new();
    walk(group, support.elements(), 0, max_len, group.zero(), &mut mult, &mut raw);
    out.extend(raw.into_iter().map(|m| Sequence { support: support.clone(), multiplicities: m }));
    sort_canonical(&mut out);
    out
}

fn bracket_items(s: &str) -> Result<Vec<&str>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected `[...]`, got `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(split_top_level(inner, ',').into_iter().map(str::trim).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: u64) -> Group {
        Group::cyclic(n).unwrap()
    }

    fn literals(set: &AtomSet) -> Vec<String> {
        let mut v: Vec<String> = set.atoms.iter().map(|a| a.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn sigma_examples() {
        let s = Support::parse(&c(3), "[1]").unwrap();
        assert!(Sequence::parse(s.clone(), "[1^3]").unwrap().sigma() == c(3).zero());
        assert_eq!(Sequence::empty(s).sigma(), c(3).zero());
        let z = "Z".parse::<Group>().unwrap();
        let sz = Support::parse(&z, "[2,3,-5]").unwrap();
        assert!(Sequence::parse(sz, "[2,3,-5]").unwrap().is_zero_sum());
    }

    #[test]
    fn zero_sum_examples() {
        let s = Support::parse(&c(3), "[1,2]").unwrap();
        assert!(Sequence::parse(s.clone(), "[1,2]").unwrap().is_zero_sum());
        assert!(!Sequence::parse(s.clone(), "[1^2]").unwrap().is_zero_sum());
        assert!(Sequence::empty(s).is_zero_sum());
    }

    #[test]
    fn proper_zero_subsequence_examples() {
        let s = Support::parse(&c(3), "[1,2]").unwrap();
        assert!(!Sequence::parse(s.clone(), "[1^3]").unwrap().has_proper_zero_subsequence().unwrap());
        assert!(Sequence::parse(s.clone(), "[1^3,2^3]").unwrap().has_proper_zero_subsequence().unwrap());
        assert!(Sequence::parse(s.clone(), "[1,2]").unwrap().has_proper_zero_subsequence().is_ok());
        assert!(matches!(Sequence::parse(s.clone(), "[1]").unwrap().has_proper_zero_subsequence(), Err(Error::InvalidInput(_))));
        assert!(Sequence::empty(s).has_proper_zero_subsequence().is_err());
        let s2 = Support::parse(&c(2), "[1]").unwrap();
        assert!(!Sequence::parse(s2, "[1^2]").unwrap().has_proper_zero_subsequence().unwrap());
    }

    #[test]
    fn atoms_of_c3() {
        let s = Support::parse(&c(3), "[1,2]").unwrap();
        let set = atoms(&s, None).unwrap();
        assert!(set.complete);
        assert_eq!(literals(&set), vec!["[1,2]", "[1^3]", "[2^3]"]);
    }

    #[test]
    fn atoms_of_trivial_and_klein() {
        let t = Group::trivial();
        let set = atoms(&Support::full(&t).unwrap(), None).unwrap();
        assert_eq!(set.atoms.len(), 1);
        assert_eq!(set.atoms[0].len(), 1);

        let v4: Group = "C2 x C2".parse().unwrap();
        let s = Support::parse(&v4, "[([],[1,0]),([],[0,1]),([],[1,1])]").unwrap();
        let set = atoms(&s, None).unwrap();
        assert!(set.complete);
        let mut lens: Vec<usize> = set.atoms.iter().map(Sequence::len).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 2, 2, 3]);
    }

    #[test]
    fn empty_support_has_no_atoms() {
        let s = Support::new(c(5), vec![]).unwrap();
        let set = atoms(&s, None).unwrap();
        assert!(set.atoms.is_empty() && set.complete);
    }

    #[test]
    fn infinite_group_needs_cap() {
        let z: Group = "Z".parse().unwrap();
        let s = Support::parse(&z, "[1,-1,2]").unwrap();
        assert_eq!(atoms(&s, None), Err(Error::NeedsCap));
        let set = atoms(&s, Some(3)).unwrap();
        assert!(!set.complete);
        assert_eq!(set.cap_used, 3);
        let mut lit = literals(&set);
        lit.sort();
        assert_eq!(lit, vec!["[-1,1]", "[-1^2,2]"]);
    }

    #[test]
    fn davenport_examples() {
        assert_eq!(davenport(&c(3)).unwrap(), 3);
        assert_eq!(davenport(&Group::trivial()).unwrap(), 1);
        assert_eq!(davenport(&"C2 x C2".parse().unwrap()).unwrap(), 3);
        assert!(matches!(davenport(&"Z".parse().unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn record_round_trip() {
        let s = Support::parse(&c(4), "[1,2,3]").unwrap();
        let set = atoms(&s, None).unwrap();
        assert_eq!(AtomSet::from_record(&set.to_record()).unwrap(), set);
    }

    #[test]
    fn cap_below_group_order_is_incomplete() {
        let s = Support::parse(&c(5), "[1,4]").unwrap();
        let set = atoms(&s, Some(2)).unwrap();
        assert!(!set.complete);
        assert_eq!(literals(&set), vec!["[1,4]"]);
    }
}
