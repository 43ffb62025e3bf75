use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// A finitely generated abelian group `ℤ^r ⊕ C_{d₁} ⊕ … ⊕ C_{d_k}` in
/// canonical form: `d₁ | d₂ | … | d_k` and every `dⱼ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Group {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

/// An element of a [`Group`]: free coordinates plus torsion coordinates, the
/// latter always reduced into `[0, dⱼ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    free_part: Vec<BigInt>,
    torsion_part: Vec<BigInt>,
}

/// Order of an element, or exponent of a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl Order {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

impl GroupElement {
    pub fn new(free_part: Vec<BigInt>, torsion_part: Vec<BigInt>) -> Self {
        GroupElement { free_part, torsion_part }
    }

    pub fn free_part(&self) -> &[BigInt] {
        &self.free_part
    }

    pub fn torsion_part(&self) -> &[BigInt] {
        &self.torsion_part
    }

    /// Concatenated coordinates, free part first.
    pub fn coordinates(&self) -> Vec<BigInt> {
        self.free_part.iter().chain(&self.torsion_part).cloned().collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "([{}],[{}])", join(&self.free_part), join(&self.torsion_part))
    }
}

impl Group {
    pub fn trivial() -> Self {
        Group { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::from_spec(0, &[BigInt::from(n)])
    }

    /// Canonical form of `ℤ^free_rank ⊕ C_{n₁} ⊕ …` for arbitrary `nᵢ ≥ 2`.
    pub fn from_spec(free_rank: usize, torsion: &[BigInt]) -> Result<Self> {
        if let Some(bad) = torsion.iter().find(|n| *n < &BigInt::from(2)) {
            return Err(Error::InvalidSpec(format!("cyclic factor C{bad} must have order at least 2")));
        }
        let n = free_rank + torsion.len();
        let relations = torsion
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let mut row = vec![BigInt::zero(); n];
                row[free_rank + j] = d.clone();
                row
            })
            .collect();
        Ok(Presentation::new(n, relations).canonicalize().0)
    }

    pub fn from_spec_u64(free_rank: usize, torsion: &[u64]) -> Result<Self> {
        let t: Vec<BigInt> = torsion.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_spec(free_rank, &t)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Number of coordinates of an element (free plus torsion).
    pub fn dimension(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    /// `|G|` for finite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    /// `|G|` as a machine integer, if finite and small enough.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|n| n.to_u64())
    }

    /// `exp(G)`: the last invariant factor, 1 for the trivial group.
    pub fn exponent(&self) -> Order {
        if !self.is_finite() {
            return Order::Infinite;
        }
        Order::Finite(self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one))
    }

    /// `r(G)`: the maximum over primes `p` of the `p`-rank, with the free
    /// part contributing `free_rank` at every prime.
    pub fn rank(&self) -> usize {
        let Some(top) = self.invariant_factors.last() else {
            return self.free_rank;
        };
        prime_divisors(top)
            .iter()
            .map(|p| self.invariant_factors.iter().filter(|d| d.is_multiple_of(p)).count())
            .max()
            .unwrap_or(0)
            + self.free_rank
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            free_part: vec![BigInt::zero(); self.free_rank],
            torsion_part: vec![BigInt::zero(); self.invariant_factors.len()],
        }
    }

    /// Builds an element, reducing the torsion coordinates.
    pub fn element(&self, free_part: Vec<BigInt>, torsion_part: Vec<BigInt>) -> Result<GroupElement> {
        if free_part.len() != self.free_rank || torsion_part.len() != self.invariant_factors.len() {
            return Err(Error::InvalidElement(format!(
                "element has shape ({}, {}) but {} expects ({}, {})",
                free_part.len(),
                torsion_part.len(),
                self,
                self.free_rank,
                self.invariant_factors.len()
            )));
        }
        let torsion_part = torsion_part
            .into_iter()
            .zip(&self.invariant_factors)
            .map(|(t, d)| t.mod_floor(d))
            .collect();
        Ok(GroupElement { free_part, torsion_part })
    }

    pub fn element_i64(&self, free_part: &[i64], torsion_part: &[i64]) -> Result<GroupElement> {
        self.element(
            free_part.iter().map(|&x| x.into()).collect(),
            torsion_part.iter().map(|&x| x.into()).collect(),
        )
    }

    /// Element from concatenated coordinates (free part first).
    pub fn element_from_coordinates(&self, coords: &[BigInt]) -> Result<GroupElement> {
        if coords.len() != self.dimension() {
            return Err(Error::InvalidElement(format!(
                "{} coordinates given, {} expects {}",
                coords.len(),
                self,
                self.dimension()
            )));
        }
        let (f, t) = coords.split_at(self.free_rank);
        self.element(f.to_vec(), t.to_vec())
    }

    /// True when `x` has the right shape and reduced torsion coordinates.
    pub fn contains(&self, x: &GroupElement) -> bool {
        x.free_part.len() == self.free_rank
            && x.torsion_part.len() == self.invariant_factors.len()
            && x.torsion_part
                .iter()
                .zip(&self.invariant_factors)
                .all(|(t, d)| !t.is_negative() && t < d)
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{x} is not an element of {self}")))
        }
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_unchecked(x, y))
    }

    pub(crate) fn add_unchecked(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement {
            free_part: x.free_part.iter().zip(&y.free_part).map(|(a, b)| a + b).collect(),
            torsion_part: x
                .torsion_part
                .iter()
                .zip(&y.torsion_part)
                .zip(&self.invariant_factors)
                .map(|((a, b), d)| {
                    let s = a + b;
                    if &s >= d {
                        s - d
                    } else {
                        s
                    }
                })
                .collect(),
        }
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(self.neg_unchecked(x))
    }

    pub(crate) fn neg_unchecked(&self, x: &GroupElement) -> GroupElement {
        GroupElement {
            free_part: x.free_part.iter().map(|a| -a).collect(),
            torsion_part: x
                .torsion_part
                .iter()
                .zip(&self.invariant_factors)
                .map(|(a, d)| if a.is_zero() { BigInt::zero() } else { d - a })
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(self.scale_unchecked(k, x))
    }

    pub(crate) fn scale_unchecked(&self, k: &BigInt, x: &GroupElement) -> GroupElement {
        GroupElement {
            free_part: x.free_part.iter().map(|a| a * k).collect(),
            torsion_part: x
                .torsion_part
                .iter()
                .zip(&self.invariant_factors)
                .map(|(a, d)| (a * k).mod_floor(d))
                .collect(),
        }
    }

    pub fn element_order(&self, x: &GroupElement) -> Result<Order> {
        self.check(x)?;
        if x.free_part.iter().any(|a| !a.is_zero()) {
            return Ok(Order::Infinite);
        }
        let n = x
            .torsion_part
            .iter()
            .zip(&self.invariant_factors)
            .fold(BigInt::one(), |acc, (a, d)| acc.lcm(&(d / a.gcd(d))));
        Ok(Order::Finite(n))
    }

    /// All elements of a finite group in canonical (lexicographic) order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        if !self.is_finite() {
            return Err(Error::Unsupported(format!("cannot list the elements of infinite group {self}")));
        }
        self.elements_in_box(0)
    }

    /// Elements whose free coordinates lie in `[-radius, radius]`, with all
    /// torsion coordinates, in canonical order.
    pub fn elements_in_box(&self, radius: u64) -> Result<Vec<GroupElement>> {
        let r = BigInt::from(radius);
        let mut ranges: Vec<(BigInt, BigInt)> = vec![(-&r, r.clone()); self.free_rank];
        ranges.extend(self.invariant_factors.iter().map(|d| (BigInt::zero(), d - 1)));
        let count = ranges
            .iter()
            .map(|(lo, hi)| hi - lo + 1)
            .product::<BigInt>();
        if count > BigInt::from(1u64 << 24) {
            return Err(Error::Unsupported(format!("{count} elements is too many to list")));
        }
        let mut out = Vec::new();
        let mut cur: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
        loop {
            out.push(GroupElement {
                free_part: cur[..self.free_rank].to_vec(),
                torsion_part: cur[self.free_rank..].to_vec(),
            });
            let mut j = cur.len();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                if cur[j] < ranges[j].1 {
                    cur[j] += 1;
                    break;
                }
                cur[j] = ranges[j].0.clone();
            }
        }
    }

    /// Standard generators: unit vectors of each coordinate.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.dimension())
            .map(|i| {
                let mut c = vec![BigInt::zero(); self.dimension()];
                c[i] = BigInt::one();
                self.element_from_coordinates(&c).expect("unit vector has the right shape")
            })
            .collect()
    }

    /// `self / ⟨relations⟩` in canonical form, with the projection onto it.
    pub fn quotient(&self, relations: &[GroupElement]) -> Result<(Group, Projection)> {
        for x in relations {
            self.check(x)?;
        }
        let n = self.dimension();
        let mut rows: Vec<Vec<BigInt>> = self
            .invariant_factors
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let mut row = vec![BigInt::zero(); n];
                row[self.free_rank + j] = d.clone();
                row
            })
            .collect();
        rows.extend(relations.iter().map(GroupElement::coordinates));
        let (target, mut proj) = Presentation::new(n, rows).canonicalize();
        proj.source = Some(self.clone());
        Ok((target, proj))
    }

    /// Renders an element; single-coordinate groups use the bare integer.
    pub fn format_element(&self, x: &GroupElement) -> String {
        if self.dimension() == 1 {
            x.coordinates()[0].to_string()
        } else {
            x.to_string()
        }
    }

    /// Parses `([f1,…],[t1,…])`, or a bare integer for single-coordinate groups.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(inner, ',');
            if parts.len() != 2 {
                return Err(Error::Parse(format!("element `{s}` needs exactly a free and a torsion list")));
            }
            let free = parse_int_list(parts[0])?;
            let tors = parse_int_list(parts[1])?;
            return self.element(free, tors);
        }
        if self.dimension() == 1 {
            let v: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad integer `{s}`")))?;
            return self.element_from_coordinates(&[v]);
        }
        if self.is_trivial() && s == "0" {
            return Ok(self.zero());
        }
        Err(Error::Parse(format!("cannot read `{s}` as an element of {self}")))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("C{d}")));
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Grammar: `Z^r x C2 x C6`, with `Z^r` optional and each factor `C<n>`,
    /// `n ≥ 2`; `0` or `trivial` denotes the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "0" || compact.eq_ignore_ascii_case("trivial") {
            return Ok(Group::trivial());
        }
        let mut free = 0usize;
        let mut torsion = Vec::new();
        for tok in compact.split(['x', '+']) {
            if let Some(rest) = tok.strip_prefix('Z') {
                let r = match rest.strip_prefix('^') {
                    Some(e) => e.parse::<usize>().map_err(|_| Error::InvalidSpec(format!("bad exponent in `{tok}`")))?,
                    None if rest.is_empty() => 1,
                    None => return Err(Error::InvalidSpec(format!("bad factor `{tok}`"))),
                };
                free += r;
            } else if let Some(n) = tok.strip_prefix('C') {
                let n: BigInt = n.parse().map_err(|_| Error::InvalidSpec(format!("bad factor `{tok}`")))?;
                torsion.push(n);
            } else {
                return Err(Error::InvalidSpec(format!("bad factor `{tok}` in `{s}`")));
            }
        }
        Group::from_spec(free, &torsion)
    }
}

impl From<Group> for String {
    fn from(g: Group) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for Group {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Canonical form of the direct sum of `groups`.
pub fn direct_sum(groups: &[Group]) -> Group {
    DirectSum::new(groups).group
}

/// A direct sum together with the embeddings of its summands.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: Group,
    pub components: Vec<Group>,
    offsets: Vec<usize>,
    projection: Projection,
}

impl DirectSum {
    pub fn new(groups: &[Group]) -> Self {
        let mut offsets = Vec::with_capacity(groups.len());
        let mut n = 0;
        for g in groups {
            offsets.push(n);
            n += g.dimension();
        }
        let mut rows = Vec::new();
        for (g, &off) in groups.iter().zip(&offsets) {
            for (j, d) in g.invariant_factors.iter().enumerate() {
                let mut row = vec![BigInt::zero(); n];
                row[off + g.free_rank + j] = d.clone();
                rows.push(row);
            }
        }
        let (group, projection) = Presentation::new(n, rows).canonicalize();
        DirectSum { group, components: groups.to_vec(), offsets, projection }
    }

    /// Image of `x ∈ components[i]` in the canonical direct sum.
    pub fn embed(&self, i: usize, x: &GroupElement) -> Result<GroupElement> {
        let g = self
            .components
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no summand {i}")))?;
        g.check(x)?;
        let mut coords = vec![BigInt::zero(); self.projection.matrix.rows()];
        for (k, c) in x.coordinates().into_iter().enumerate() {
            coords[self.offsets[i] + k] = c;
        }
        Ok(self.projection.apply_coordinates(&coords))
    }

    /// Images of the standard generators of summand `i`.
    pub fn component_generators(&self, i: usize) -> Result<Vec<GroupElement>> {
        let g = self
            .components
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no summand {i}")))?;
        g.generators().iter().map(|x| self.embed(i, x)).collect()
    }
}

/// Map from a presented group onto its canonical form: `v ↦ v·V`, then each
/// coordinate is dropped (unit factor), reduced (torsion) or kept (free).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    matrix: IntMatrix,
    slots: Vec<Slot>,
    source: Option<Group>,
    target: Group,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Slot {
    Drop,
    Torsion(BigInt),
    Free,
}

impl Projection {
    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn source(&self) -> Option<&Group> {
        self.source.as_ref()
    }

    /// The change-of-basis matrix `V`.
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Image of an element of the source group.
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if let Some(src) = &self.source {
            src.check(x)?;
        }
        if x.coordinates().len() != self.matrix.rows() {
            return Err(Error::InvalidElement(format!("{x} does not match the projection's source")));
        }
        Ok(self.apply_coordinates(&x.coordinates()))
    }

    fn apply_coordinates(&self, coords: &[BigInt]) -> GroupElement {
        let w = self.matrix.left_apply(coords);
        let mut free_part = Vec::new();
        let mut torsion_part = Vec::new();
        for (x, slot) in w.into_iter().zip(&self.slots) {
            match slot {
                Slot::Drop => {}
                Slot::Torsion(d) => torsion_part.push(x.mod_floor(d)),
                Slot::Free => free_part.push(x),
            }
        }
        GroupElement { free_part, torsion_part }
    }
}

/// `ℤ^generators / ⟨rows⟩`.
struct Presentation {
    generators: usize,
    relations: Vec<Vec<BigInt>>,
}

impl Presentation {
    fn new(generators: usize, relations: Vec<Vec<BigInt>>) -> Self {
        Presentation { generators, relations }
    }

    fn canonicalize(self) -> (Group, Projection) {
        let n = self.generators;
        let m = IntMatrix::from_rows(self.relations, n);
        let snf = smith_normal_form(&m);
        let diag = snf.invariants();
        let slots: Vec<Slot> = (0..n)
            .map(|j| match diag.get(j) {
                Some(d) if d.is_one() => Slot::Drop,
                Some(d) if !d.is_zero() => Slot::Torsion(d.clone()),
                _ => Slot::Free,
            })
            .collect();
        let free_rank = slots.iter().filter(|s| matches!(s, Slot::Free)).count();
        let invariant_factors = slots
            .iter()
            .filter_map(|s| match s {
                Slot::Torsion(d) => Some(d.clone()),
                _ => None,
            })
            .collect();
        let target = Group { free_rank, invariant_factors };
        let proj = Projection { matrix: snf.right, slots, source: None, target: target.clone() };
        (target, proj)
    }
}

fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Splits on `sep` at bracket depth zero.
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_int_list(s: &str) -> Result<Vec<BigInt>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a bracketed list, got `{s}`")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{t}`"))))
        .collect()
}
