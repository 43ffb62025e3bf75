//! Class-group model of a Krull monoid: a class group together with the
//! number of primes in each class (possibly infinitely many), localization by
//! inverting primes, and the transfer to the monoid of zero-sum sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::{DirectSum, Group, GroupElement};
use crate::error::{Error, Result};
use crate::zerosum::{Sequence, Support};

/// Number of primes in a class: finite, or `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimeCount {
    Finite(u64),
    Omega,
}

impl PrimeCount {
    fn merge(self, other: PrimeCount) -> PrimeCount {
        match (self, other) {
            (PrimeCount::Finite(a), PrimeCount::Finite(b)) => PrimeCount::Finite(a + b),
            _ => PrimeCount::Omega,
        }
    }

    pub fn admits(self, instance: u64) -> bool {
        match self {
            PrimeCount::Finite(n) => instance < n,
            PrimeCount::Omega => true,
        }
    }
}

impl fmt::Display for PrimeCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeCount::Finite(n) => write!(f, "{n}"),
            PrimeCount::Omega => write!(f, "omega"),
        }
    }
}

impl Serialize for PrimeCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PrimeCount::Finite(n) => s.serialize_u64(*n),
            PrimeCount::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for PrimeCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(PrimeCount::Finite(n)),
            Raw::S(s) if s == "omega" || s == "ω" => Ok(PrimeCount::Omega),
            Raw::S(s) => Err(serde::de::Error::custom(format!("count must be an integer or \"omega\", got {s:?}"))),
        }
    }
}

/// Primes lying in one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeClass {
    pub class: GroupElement,
    pub count: PrimeCount,
    /// One stable name per prime; empty for `ω` classes.
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrullPresentation {
    class_group: Group,
    classes: Vec<PrimeClass>,
}

impl KrullPresentation {
    /// Validates and canonicalizes a presentation. Classes must be distinct
    /// elements of the group, have at least one prime, and generate the group.
    /// Finite classes without labels get `<class>#<k>` names.
    pub fn new(class_group: Group, mut classes: Vec<PrimeClass>) -> Result<Self> {
        for pc in &mut classes {
            if !class_group.contains(&pc.class) {
                return Err(Error::InvalidElement(format!("{} is not a class of {class_group}", pc.class)));
            }
            match pc.count {
                PrimeCount::Finite(0) => {
                    return Err(Error::InvalidInput(format!(
                        "class {} lists zero primes",
                        class_group.format_element(&pc.class)
                    )))
                }
                PrimeCount::Finite(n) => {
                    if pc.labels.is_empty() {
                        let name = class_group.format_element(&pc.class);
                        pc.labels = (0..n).map(|k| format!("{name}#{k}")).collect();
                    } else if pc.labels.len() as u64 != n {
                        return Err(Error::InvalidInput(format!("class {} has {n} primes but {} labels", pc.class, pc.labels.len())));
                    }
                }
                PrimeCount::Omega => {
                    if !pc.labels.is_empty() {
                        return Err(Error::InvalidInput("labels are only allowed on finite classes".into()));
                    }
                }
            }
        }
        classes.sort_by(|a, b| a.class.cmp(&b.class));
        if classes.windows(2).any(|w| w[0].class == w[1].class) {
            return Err(Error::InvalidInput("prime classes must be distinct".into()));
        }
        let mut seen = BTreeSet::new();
        for l in classes.iter().flat_map(|c| &c.labels) {
            if !seen.insert(l) {
                return Err(Error::InvalidInput(format!("duplicate prime label {l}")));
            }
        }
        let reps: Vec<GroupElement> = classes.iter().map(|c| c.class.clone()).collect();
        if !class_group.quotient(&reps)?.0.is_trivial() {
            return Err(Error::InvalidInput(format!("the listed classes do not generate {class_group}")));
        }
        Ok(KrullPresentation { class_group, classes })
    }

    pub fn class_group(&self) -> &Group {
        &self.class_group
    }

    pub fn classes(&self) -> &[PrimeClass] {
        &self.classes
    }

    pub fn class_index(&self, x: &GroupElement) -> Option<usize> {
        self.classes.binary_search_by(|c| c.class.cmp(x)).ok()
    }

    /// `G₀`: the classes containing primes.
    pub fn populated_support(&self) -> Arc<Support> {
        Support::new(self.class_group.clone(), self.classes.iter().map(|c| c.class.clone()).collect())
            .expect("classes are distinct elements of the class group")
    }

    /// Number of classes without primes, for finite class groups.
    pub fn unpopulated_classes(&self) -> Option<u64> {
        self.class_group.order_u64().map(|n| n - self.classes.len() as u64)
    }

    pub fn all_counts_omega(&self) -> bool {
        self.classes.iter().all(|c| c.count == PrimeCount::Omega)
    }

    pub fn to_record(&self) -> PresentationRecord {
        PresentationRecord {
            class_group: self.class_group.to_string(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassRecord {
                    element: self.class_group.format_element(&c.class),
                    count: c.count,
                    labels: (!c.labels.is_empty()).then(|| c.labels.clone()),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &PresentationRecord) -> Result<Self> {
        let g: Group = rec.class_group.parse()?;
        let classes = rec
            .classes
            .iter()
            .map(|c| {
                Ok(PrimeClass {
                    class: g.parse_element(&c.element)?,
                    count: c.count,
                    labels: c.labels.clone().unwrap_or_default(),
                })
            })
            .collect::<Result<_>>()?;
        Self::new(g, classes)
    }
}

/// JSON form: `{ "class_group": "<spec>", "classes": [ {"element": …, "count": n | "omega"} ] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationRecord {
    pub class_group: String,
    pub classes: Vec<ClassRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub element: String,
    pub count: PrimeCount,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Finite truncation `⊕ Gᵢ` with every class holding infinitely many primes.
#[derive(Clone, Debug)]
pub struct DirectSumModel {
    pub presentation: KrullPresentation,
    pub sum: DirectSum,
}

impl DirectSumModel {
    /// Classes of the standard generators of summand `i`.
    pub fn component_generator_classes(&self, i: usize) -> Result<Vec<GroupElement>> {
        self.sum.component_generators(i)
    }

    /// Inverts every prime in the generator classes of all other summands.
    pub fn localize_to_component(&self, i: usize) -> Result<KrullPresentation> {
        if i >= self.sum.components.len() {
            return Err(Error::InvalidInput(format!("no summand {i}")));
        }
        let mut inverted = BTreeSet::new();
        for j in (0..self.sum.components.len()).filter(|&j| j != i) {
            inverted.extend(self.component_generator_classes(j)?);
        }
        let inv: Vec<Inversion> = inverted.into_iter().map(Inversion::Class).collect();
        localize(&self.presentation, &inv)
    }
}

/// Builds the model over `direct_sum(groups)`. With free rank, classes are
/// listed only inside the coordinate box `[-radius, radius]`.
pub fn direct_sum_model(groups: &[Group], coordinate_box: Option<u64>) -> Result<DirectSumModel> {
    if groups.is_empty() {
        return Err(Error::InvalidInput("need at least one group".into()));
    }
    let sum = DirectSum::new(groups);
    let g = &sum.group;
    let elements = match (g.is_finite(), coordinate_box) {
        (true, _) => g.elements()?,
        (false, Some(r)) if r >= 1 => g.elements_in_box(r)?,
        (false, _) => return Err(Error::NeedsBox(g.free_rank())),
    };
    let classes = elements
        .into_iter()
        .map(|class| PrimeClass { class, count: PrimeCount::Omega, labels: Vec::new() })
        .collect();
    let presentation = KrullPresentation::new(g.clone(), classes)?;
    Ok(DirectSumModel { presentation, sum })
}

/// What to invert when localizing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Inversion {
    /// Every prime in the class.
    Class(GroupElement),
    /// A single labeled prime of a finite class.
    Prime(String),
}

/// Localization: the class group becomes the quotient by the classes of the
/// inverted primes, and surviving primes move to their image classes, with
/// counts added (`ω` absorbs).
pub fn localize(p: &KrullPresentation, inverted: &[Inversion]) -> Result<KrullPresentation> {
    let g = p.class_group();
    let mut classes = p.classes.clone();
    let mut relations = Vec::new();
    for inv in inverted {
        match inv {
            Inversion::Class(x) => {
                let i = p
                    .class_index(x)
                    .ok_or_else(|| Error::InvalidLocalization(format!("no primes in class {}", g.format_element(x))))?;
                classes[i].count = PrimeCount::Finite(0);
                classes[i].labels.clear();
                relations.push(x.clone());
            }
            Inversion::Prime(label) => {
                let pc = classes
                    .iter_mut()
                    .find(|c| c.labels.contains(label))
                    .ok_or_else(|| Error::InvalidLocalization(format!("no prime labeled {label}")))?;
                pc.labels.retain(|l| l != label);
                pc.count = PrimeCount::Finite(pc.labels.len() as u64);
                relations.push(pc.class.clone());
            }
        }
    }
    let (target, proj) = g.quotient(&relations)?;
    let mut merged: BTreeMap<GroupElement, (PrimeCount, Vec<String>)> = BTreeMap::new();
    for pc in classes {
        if pc.count == PrimeCount::Finite(0) {
            continue;
        }
        let image = proj.apply(&pc.class)?;
        let entry = merged.entry(image).or_insert((PrimeCount::Finite(0), Vec::new()));
        entry.0 = entry.0.merge(pc.count);
        entry.1.extend(pc.labels);
    }
    let classes = merged
        .into_iter()
        .map(|(class, (count, labels))| PrimeClass {
            class,
            labels: if count == PrimeCount::Omega { Vec::new() } else { labels },
            count,
        })
        .collect();
    KrullPresentation::new(target, classes)
}

/// A prime of the model: class index plus instance number within the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeRef {
    pub class: usize,
    pub instance: u64,
}

/// An element of the reduced Krull monoid: a finite multiset of primes whose
/// classes sum to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidElement {
    presentation: KrullPresentation,
    primes: Vec<PrimeRef>,
}

impl MonoidElement {
    pub fn new(presentation: &KrullPresentation, mut primes: Vec<PrimeRef>) -> Result<Self> {
        let g = presentation.class_group();
        let mut sum = g.zero();
        for pr in &primes {
            let pc = presentation
                .classes
                .get(pr.class)
                .ok_or_else(|| Error::InvalidInput(format!("no class with index {}", pr.class)))?;
            if !pc.count.admits(pr.instance) {
                return Err(Error::InvalidInput(format!(
                    "class {} has only {} primes",
                    g.format_element(&pc.class),
                    pc.count
                )));
            }
            sum = g.add_unchecked(&sum, &pc.class);
        }
        if sum != g.zero() {
            return Err(Error::InvalidInput("the classes of the primes do not sum to zero".into()));
        }
        primes.sort();
        Ok(MonoidElement { presentation: presentation.clone(), primes })
    }

    /// `mᵢ` pairwise distinct primes from class `i`, numbered consecutively from 0.
    pub fn with_distinct_primes(presentation: &KrullPresentation, per_class: &[(usize, u64)]) -> Result<Self> {
        let primes = per_class
            .iter()
            .flat_map(|&(class, m)| (0..m).map(move |instance| PrimeRef { class, instance }))
            .collect();
        Self::new(presentation, primes)
    }

    pub fn primes(&self) -> &[PrimeRef] {
        &self.primes
    }

    pub fn presentation(&self) -> &KrullPresentation {
        &self.presentation
    }

    /// Display name of a prime: its label for finite classes, `<class>#<k>` for `ω`.
    pub fn prime_name(&self, pr: PrimeRef) -> String {
        let pc = &self.presentation.classes[pr.class];
        match pc.count {
            PrimeCount::Finite(_) => pc.labels[pr.instance as usize].clone(),
            PrimeCount::Omega => format!("{}#{}", self.presentation.class_group.format_element(&pc.class), pr.instance),
        }
    }
}

/// The transfer: each prime is replaced by its class, giving a zero-sum
/// sequence over the populated classes.
pub fn transfer(a: &MonoidElement) -> Sequence {
    let support = a.presentation.populated_support();
    let mut mult = vec![0u32; support.len()];
    for pr in &a.primes {
        mult[pr.class] += 1;
    }
    Sequence::new(support, mult).expect("class indices align with the populated support")
}

/// Set of lengths of `a`, computed in the monoid itself.
///
/// Distinct primes are distinct generators here, even within one class. The
/// atoms dividing `a` are the minimal nonempty sub-multisets of its primes
/// whose classes sum to zero; lengths follow by recursion over them.
pub fn monoid_length_set(a: &MonoidElement) -> BTreeSet<usize> {
    let g = a.presentation.class_group();
    let mut distinct: Vec<PrimeRef> = a.primes.clone();
    distinct.dedup();
    let mult: Vec<u32> = distinct.iter().map(|p| a.primes.iter().filter(|q| *q == p).count() as u32).collect();
    let classes: Vec<&GroupElement> = distinct.iter().map(|p| &a.presentation.classes[p.class].class).collect();

    // every sub-multiset with zero class sum
    let mut zero_sums: Vec<Vec<u32>> = Vec::new();
    let mut cur = vec![0u32; mult.len()];
    loop {
        let mut carry = true;
        for i in 0..cur.len() {
            if !carry {
                break;
            }
            if cur[i] < mult[i] {
                cur[i] += 1;
                carry = false;
            } else {
                cur[i] = 0;
            }
        }
        if carry {
            break;
        }
        let sum = cur.iter().zip(&classes).fold(g.zero(), |acc, (&k, x)| {
            g.add_unchecked(&acc, &g.scale_unchecked(&k.into(), x))
        });
        if sum == g.zero() {
            zero_sums.push(cur.clone());
        }
    }
    let below = |a: &[u32], b: &[u32]| a != b && a.iter().zip(b).all(|(x, y)| x <= y);
    let atoms: Vec<Vec<u32>> = zero_sums
        .iter()
        .filter(|z| !zero_sums.iter().any(|w| below(w, z)))
        .cloned()
        .collect();

    fn lengths(rem: &[u32], atoms: &[Vec<u32>], memo: &mut HashMap<Vec<u32>, BTreeSet<usize>>) -> BTreeSet<usize> {
        if rem.iter().all(|&x| x == 0) {
            return BTreeSet::from([0]);
        }
        if let Some(hit) = memo.get(rem) {
            return hit.clone();
        }
        let mut out = BTreeSet::new();
        for at in atoms {
            if at.iter().zip(rem).all(|(x, y)| x <= y) {
                let next: Vec<u32> = rem.iter().zip(at).map(|(r, x)| r - x).collect();
                out.extend(lengths(&next, atoms, memo).into_iter().map(|l| l + 1));
            }
        }
        memo.insert(rem.to_vec(), out.clone());
        out
    }
    lengths(&mult, &atoms, &mut HashMap::new())
}
