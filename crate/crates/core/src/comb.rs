//! Combs: validation, the comb inequality, intersection patterns between
//! teeth and the two hand classes, and hypothesis classification.

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::constraints::{InequalityKind, LinearInequality, Provenance};
use crate::error::{Error, Result};
use crate::graph::{int, rat, BipartiteInstance, Class, Rational, VertexId, VertexSet};

/// A hand and an ordered list of teeth.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comb {
    pub hand: VertexSet,
    pub teeth: Vec<VertexSet>,
}

impl Comb {
    pub fn new(hand: VertexSet, teeth: Vec<VertexSet>) -> Self {
        Comb { hand, teeth }
    }

    pub fn t(&self) -> usize {
        self.teeth.len()
    }

    pub fn teeth_total(&self) -> usize {
        self.teeth.iter().map(|t| t.len()).sum()
    }

    pub fn vertices(&self) -> VertexSet {
        self.teeth.iter().flatten().chain(&self.hand).copied().collect()
    }

    /// `|H| + sum |T_i| - (3t+1)/2`.
    pub fn rhs(&self) -> Rational {
        int((self.hand.len() + self.teeth_total()) as i64) - rat(3 * self.t() as i64 + 1, 2)
    }

    /// Same comb with `v` taken out of the hand and every tooth.
    pub fn without(&self, v: VertexId) -> Comb {
        let mut c = self.clone();
        c.hand.remove(&v);
        for t in &mut c.teeth {
            t.remove(&v);
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombViolation {
    UnknownVertex(VertexId),
    /// `t` must be odd and at least 3.
    TeethCount(usize),
    EmptyHandIntersection { tooth: usize },
    TeethNotDisjoint { first: usize, second: usize, shared: VertexId },
    /// The tooth has no vertex outside the hand.
    ToothInsideHand { tooth: usize },
}

impl fmt::Display for CombViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombViolation::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            CombViolation::TeethCount(t) => write!(f, "t must be odd and >= 3 (got t = {t})"),
            CombViolation::EmptyHandIntersection { tooth } => {
                write!(f, "tooth {tooth} does not meet the hand")
            }
            CombViolation::TeethNotDisjoint { first, second, shared } => {
                write!(f, "teeth not disjoint: teeth {first} and {second} share {shared}")
            }
            CombViolation::ToothInsideHand { tooth } => {
                write!(f, "tooth {tooth} has no vertex outside the hand")
            }
        }
    }
}

/// Reports every structural rule the comb breaks; `Ok` when there are none.
pub fn validate_comb(instance: &BipartiteInstance, comb: &Comb) -> Result<(), Vec<CombViolation>> {
    let mut out = Vec::new();
    for v in comb.vertices() {
        if !instance.contains(v) {
            out.push(CombViolation::UnknownVertex(v));
        }
    }
    let t = comb.t();
    if t < 3 || t.is_multiple_of(2) {
        out.push(CombViolation::TeethCount(t));
    }
    for (i, tooth) in comb.teeth.iter().enumerate() {
        if tooth.is_disjoint(&comb.hand) {
            out.push(CombViolation::EmptyHandIntersection { tooth: i });
        }
        if tooth.is_subset(&comb.hand) {
            out.push(CombViolation::ToothInsideHand { tooth: i });
        }
    }
    for i in 0..t {
        for j in i + 1..t {
            if let Some(v) = comb.teeth[i].intersection(&comb.teeth[j]).next() {
                out.push(CombViolation::TeethNotDisjoint { first: i, second: j, shared: *v });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn require_valid(instance: &BipartiteInstance, comb: &Comb) -> Result<()> {
    validate_comb(instance, comb).map_err(Error::InvalidComb)
}

/// `x(H) + sum x(T_i) <= |H| + sum |T_i| - (3t+1)/2`.
pub fn comb_inequality(instance: &BipartiteInstance, comb: &Comb) -> Result<LinearInequality> {
    require_valid(instance, comb)?;
    let mut coeffs = std::collections::BTreeMap::new();
    for set in std::iter::once(&comb.hand).chain(&comb.teeth) {
        for e in instance.edges_within(set) {
            *coeffs.entry(e).or_insert_with(|| int(0)) += Rational::one();
        }
    }
    Ok(LinearInequality {
        coeffs,
        rhs: comb.rhs(),
        kind: InequalityKind::Comb,
        provenance: Provenance::Comb,
    })
}

/// Which vertex class plays the role of "class 1" in the pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    AsGiven,
    Swapped,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::AsGiven, Orientation::Swapped];

    pub fn primary(self) -> Class {
        match self {
            Orientation::AsGiven => Class::Class1,
            Orientation::Swapped => Class::Class2,
        }
    }

    pub fn flip(self) -> Orientation {
        match self {
            Orientation::AsGiven => Orientation::Swapped,
            Orientation::Swapped => Orientation::AsGiven,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::AsGiven => "as-given",
            Orientation::Swapped => "swapped",
        })
    }
}

/// How the teeth meet the two hand classes under one orientation.
///
/// Teeth are reordered so that `order[..p]` are the teeth meeting the primary
/// hand class and `order[p..]` the rest; the relative order inside each group
/// is the input order. With `H1`/`H2` the hand restricted to the primary and
/// secondary class:
///
/// | tooth     | `|H1 ∩ T|` | `|H2 ∩ T|` |
/// |-----------|------------|------------|
/// | `i < p`   | `1 + s[i]` | `r[i]`     |
/// | `i >= p`  | `0`        | `1 + r[i]` |
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPattern {
    pub orientation: Orientation,
    pub order: Vec<usize>,
    pub p: usize,
    pub q: usize,
    pub s: Vec<usize>,
    pub r: Vec<usize>,
    pub w: usize,
    pub y: usize,
    /// Primary-class hand vertices lying in some tooth.
    pub toothed1: VertexSet,
    pub toothed2: VertexSet,
    pub toothless1: VertexSet,
    pub toothless2: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Condition {
    pub orientation: Orientation,
    pub w: usize,
    /// `y + (q - (p+1))/2 + sum_{i>=p} r[i]`.
    pub rhs: Rational,
    pub holds: bool,
}

impl IntersectionPattern {
    pub fn t(&self) -> usize {
        self.p + self.q
    }

    pub fn sum_s(&self) -> usize {
        self.s.iter().sum()
    }

    /// `sum r[i]` over teeth meeting the primary class.
    pub fn sum_r_meeting(&self) -> usize {
        self.r[..self.p].iter().sum()
    }

    /// `sum r[i]` over the other teeth.
    pub fn sum_r_rest(&self) -> usize {
        self.r[self.p..].iter().sum()
    }

    /// `|H|` rebuilt from the pattern counts.
    pub fn hand_size(&self) -> usize {
        self.w + self.y + self.p + self.sum_s() + self.sum_r_meeting() + self.q + self.sum_r_rest()
    }

    /// Each tooth meets the hand in a single class.
    pub fn single_class(&self) -> bool {
        self.r[..self.p].iter().all(|&r| r == 0)
    }

    pub fn theorem1_condition(&self) -> Theorem1Condition {
        let rhs = int(self.y as i64)
            + rat(self.q as i64 - self.p as i64 - 1, 2)
            + int(self.sum_r_rest() as i64);
        Theorem1Condition {
            orientation: self.orientation,
            w: self.w,
            holds: int(self.w as i64) <= rhs,
            rhs,
        }
    }
}

/// Pattern with the classes as given.
pub fn extract_pattern(instance: &BipartiteInstance, comb: &Comb) -> Result<IntersectionPattern> {
    pattern_for(instance, comb, Orientation::AsGiven)
}

pub fn pattern_for(
    instance: &BipartiteInstance,
    comb: &Comb,
    orientation: Orientation,
) -> Result<IntersectionPattern> {
    require_valid(instance, comb)?;
    let primary = orientation.primary();
    let in_class = |set: &VertexSet, c: Class| set.iter().filter(|v| v.class == c).count();
    let hand_teeth: Vec<VertexSet> =
        comb.teeth.iter().map(|t| t.intersection(&comb.hand).copied().collect()).collect();

    let (meeting, rest): (Vec<usize>, Vec<usize>) =
        (0..comb.t()).partition(|&i| in_class(&hand_teeth[i], primary) > 0);
    let p = meeting.len();
    let mut s = Vec::with_capacity(p);
    let mut r = Vec::with_capacity(comb.t());
    for &i in &meeting {
        s.push(in_class(&hand_teeth[i], primary) - 1);
        r.push(in_class(&hand_teeth[i], primary.other()));
    }
    for &i in &rest {
        r.push(in_class(&hand_teeth[i], primary.other()) - 1);
    }

    let toothed: VertexSet = hand_teeth.iter().flatten().copied().collect();
    let split = |set: &VertexSet, c: Class| -> VertexSet { set.iter().filter(|v| v.class == c).copied().collect() };
    let toothless: VertexSet = comb.hand.difference(&toothed).copied().collect();
    let toothless1 = split(&toothless, primary);
    let toothless2 = split(&toothless, primary.other());
    let order = meeting.into_iter().chain(rest).collect();
    Ok(IntersectionPattern {
        orientation,
        order,
        p,
        q: comb.t() - p,
        s,
        r,
        w: toothless1.len(),
        y: toothless2.len(),
        toothed1: split(&toothed, primary),
        toothed2: split(&toothed, primary.other()),
        toothless1,
        toothless2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    Lemma1,
    Lemma2,
    Lemma3,
    Theorem1,
    Theorem2,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 5] =
        [Hypothesis::Lemma1, Hypothesis::Lemma2, Hypothesis::Lemma3, Hypothesis::Theorem1, Hypothesis::Theorem2];
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which implication results cover a comb.
///
/// * `lemma1`: every tooth meets the hand in one vertex and every hand vertex
///   has a tooth.
/// * `lemma2`: every tooth meets the hand in one vertex.
/// * `lemma3`: some orientation has no toothless hand vertex and `p < q`.
/// * `theorem1`: the `w <= y + (q-(p+1))/2 + sum r` side condition holds in
///   some orientation.
/// * `theorem2`: every tooth meets the hand inside one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombClass {
    pub lemma1: bool,
    pub lemma2: bool,
    pub lemma3: bool,
    pub theorem1: bool,
    pub theorem2: bool,
    pub theorem1_condition: Vec<Theorem1Condition>,
    pub lemma3_orientations: Vec<Orientation>,
    pub notes: Vec<String>,
}

impl CombClass {
    pub fn holds(&self, h: Hypothesis) -> bool {
        match h {
            Hypothesis::Lemma1 => self.lemma1,
            Hypothesis::Lemma2 => self.lemma2,
            Hypothesis::Lemma3 => self.lemma3,
            Hypothesis::Theorem1 => self.theorem1,
            Hypothesis::Theorem2 => self.theorem2,
        }
    }

    pub fn matched(&self) -> Vec<Hypothesis> {
        Hypothesis::ALL.into_iter().filter(|h| self.holds(*h)).collect()
    }

    pub fn any(&self) -> bool {
        !self.matched().is_empty()
    }
}

pub fn classify(instance: &BipartiteInstance, comb: &Comb) -> Result<CombClass> {
    let patterns = [
        pattern_for(instance, comb, Orientation::AsGiven)?,
        pattern_for(instance, comb, Orientation::Swapped)?,
    ];
    let single = comb.teeth.iter().all(|t| t.intersection(&comb.hand).count() == 1);
    let covered = patterns[0].w + patterns[0].y == 0;
    let lemma3_orientations: Vec<Orientation> = patterns
        .iter()
        .filter(|pt| pt.w + pt.y == 0 && pt.p < pt.q)
        .map(|pt| pt.orientation)
        .collect();
    let theorem1_condition: Vec<Theorem1Condition> =
        patterns.iter().map(|pt| pt.theorem1_condition()).collect();
    let theorem2 = comb.teeth.iter().all(|t| {
        let mut classes = t.intersection(&comb.hand).map(|v| v.class);
        let first = classes.next();
        classes.all(|c| Some(c) == first)
    });

    let mut notes = Vec::new();
    for c in &theorem1_condition {
        notes.push(format!(
            "{}: w = {} {} {} (side condition {})",
            c.orientation,
            c.w,
            if c.holds { "<=" } else { ">" },
            c.rhs,
            if c.holds { "holds" } else { "fails" }
        ));
    }
    if !covered {
        notes.push(format!(
            "{} toothless hand vertices ({} in class 1, {} in class 2)",
            patterns[0].w + patterns[0].y,
            patterns[0].w,
            patterns[0].y
        ));
    }

    Ok(CombClass {
        lemma1: single && covered,
        lemma2: single,
        lemma3: !lemma3_orientations.is_empty(),
        theorem1: theorem1_condition.iter().any(|c| c.holds),
        theorem2,
        theorem1_condition,
        lemma3_orientations,
        notes,
    })
}
