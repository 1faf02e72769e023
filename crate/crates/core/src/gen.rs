//! Random combs with a prescribed intersection shape.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::comb::{classify, validate_comb, Comb, CombClass};
use crate::graph::{BipartiteInstance, Class, VertexId, VertexSet};

/// Which comb family a sample should fall into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombTarget {
    Lemma1,
    Lemma2,
    Lemma3,
    Theorem1,
    Theorem2,
    /// Outside every covered family.
    Uncovered,
    /// Three teeth, both classes meeting at least two teeth, uncovered.
    Table1Like,
    Any,
}

impl CombTarget {
    pub const ALL: [CombTarget; 8] = [
        CombTarget::Lemma1,
        CombTarget::Lemma2,
        CombTarget::Lemma3,
        CombTarget::Theorem1,
        CombTarget::Theorem2,
        CombTarget::Uncovered,
        CombTarget::Table1Like,
        CombTarget::Any,
    ];

    fn name(self) -> &'static str {
        match self {
            CombTarget::Lemma1 => "lemma1",
            CombTarget::Lemma2 => "lemma2",
            CombTarget::Lemma3 => "lemma3",
            CombTarget::Theorem1 => "theorem1",
            CombTarget::Theorem2 => "theorem2",
            CombTarget::Uncovered => "uncovered",
            CombTarget::Table1Like => "table1-like",
            CombTarget::Any => "any",
        }
    }

    pub fn accepts(self, comb: &Comb, class: &CombClass) -> bool {
        match self {
            CombTarget::Lemma1 => class.lemma1,
            CombTarget::Lemma2 => class.lemma2,
            CombTarget::Lemma3 => class.lemma3,
            CombTarget::Theorem1 => class.theorem1,
            CombTarget::Theorem2 => class.theorem2,
            CombTarget::Uncovered => !class.any(),
            CombTarget::Table1Like => {
                let meets = |c: Class| {
                    comb.teeth.iter().filter(|t| t.intersection(&comb.hand).any(|v| v.class == c)).count()
                };
                comb.t() == 3 && meets(Class::Class1) >= 2 && meets(Class::Class2) >= 2 && !class.any()
            }
            CombTarget::Any => true,
        }
    }
}

impl fmt::Display for CombTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CombTarget::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown comb target `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    /// Inclusive range of tooth sizes; the lower end is raised to 2.
    pub tooth_size: (usize, usize),
    pub max_teeth: usize,
    /// Per class.
    pub max_toothless: usize,
    /// Whether the "primary" class of a shape is drawn at random or fixed to
    /// class 1.
    pub random_orientation: bool,
    pub attempts: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { tooth_size: (2, 4), max_teeth: 5, max_toothless: 2, random_orientation: true, attempts: 2000 }
    }
}

/// Vertex counts of one tooth, indexed by class (0 = class 1).
#[derive(Clone, Copy, Debug, Default)]
struct ToothShape {
    hand: [usize; 2],
    out: [usize; 2],
}

#[derive(Clone, Debug, Default)]
struct CombShape {
    teeth: Vec<ToothShape>,
    toothless: [usize; 2],
}

impl CombShape {
    fn demand(&self) -> [usize; 2] {
        let mut d = self.toothless;
        for t in &self.teeth {
            for c in 0..2 {
                d[c] += t.hand[c] + t.out[c];
            }
        }
        d
    }
}

fn random_class<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(0..2)
}

fn sample_shape<R: Rng>(target: CombTarget, params: &GenParams, vertices: usize, rng: &mut R) -> Option<CombShape> {
    let lo = params.tooth_size.0.max(2);
    let hi = params.tooth_size.1.max(lo);
    let max_t = params.max_teeth.min(vertices / lo);
    if max_t < 3 {
        return None;
    }
    let t = if target == CombTarget::Table1Like { 3 } else { 3 + 2 * rng.gen_range(0..=(max_t - 3) / 2) };
    let primary = if params.random_orientation { random_class(rng) } else { 0 };
    let secondary = 1 - primary;
    let mut shape = CombShape::default();
    let fill_out = |tooth: &mut ToothShape, k: usize, rng: &mut R| {
        let used = tooth.hand[0] + tooth.hand[1];
        for _ in used..k {
            tooth.out[random_class(rng)] += 1;
        }
    };
    let lemma3_p = rng.gen_range(0..=(t - 1) / 2);
    for i in 0..t {
        let k = rng.gen_range(lo..=hi);
        let mut tooth = ToothShape::default();
        match target {
            CombTarget::Lemma1 | CombTarget::Lemma2 => tooth.hand[random_class(rng)] = 1,
            CombTarget::Lemma3 => {
                let h = rng.gen_range(1..k);
                if i < lemma3_p {
                    let extra1 = rng.gen_range(0..h);
                    tooth.hand[primary] = 1 + extra1;
                    tooth.hand[secondary] = h - 1 - extra1;
                } else {
                    tooth.hand[secondary] = h;
                }
            }
            CombTarget::Theorem2 => tooth.hand[random_class(rng)] = rng.gen_range(1..k),
            _ => {
                for _ in 0..rng.gen_range(1..k) {
                    tooth.hand[random_class(rng)] += 1;
                }
            }
        }
        fill_out(&mut tooth, k, rng);
        shape.teeth.push(tooth);
    }
    match target {
        CombTarget::Lemma1 | CombTarget::Lemma3 | CombTarget::Table1Like => {}
        _ => {
            for c in 0..2 {
                shape.toothless[c] = rng.gen_range(0..=params.max_toothless);
            }
        }
    }
    Some(shape)
}

fn realize<R: Rng>(instance: &BipartiteInstance, shape: &CombShape, rng: &mut R) -> Comb {
    let mut pools: [Vec<VertexId>; 2] = [
        instance.class_vertices(Class::Class1).collect(),
        instance.class_vertices(Class::Class2).collect(),
    ];
    pools[0].shuffle(rng);
    pools[1].shuffle(rng);
    let mut hand = VertexSet::new();
    let mut teeth = Vec::with_capacity(shape.teeth.len());
    for tooth in &shape.teeth {
        let mut set = VertexSet::new();
        for c in 0..2 {
            for _ in 0..tooth.hand[c] {
                let v = pools[c].pop().expect("demand checked");
                hand.insert(v);
                set.insert(v);
            }
            for _ in 0..tooth.out[c] {
                set.insert(pools[c].pop().expect("demand checked"));
            }
        }
        teeth.push(set);
    }
    for c in 0..2 {
        for _ in 0..shape.toothless[c] {
            hand.insert(pools[c].pop().expect("demand checked"));
        }
    }
    Comb::new(hand, teeth)
}

/// A valid comb on `instance` accepted by `target`, or `None` when
/// `params.attempts` draws all miss.
pub fn random_comb<R: Rng>(
    instance: &BipartiteInstance,
    target: CombTarget,
    params: &GenParams,
    rng: &mut R,
) -> Option<(Comb, CombClass)> {
    let sizes = [instance.class_size(Class::Class1), instance.class_size(Class::Class2)];
    for _ in 0..params.attempts {
        let shape = sample_shape(target, params, instance.vertex_count(), rng)?;
        let d = shape.demand();
        if d[0] > sizes[0] || d[1] > sizes[1] {
            continue;
        }
        let comb = realize(instance, &shape, rng);
        if validate_comb(instance, &comb).is_err() {
            continue;
        }
        let class = classify(instance, &comb).expect("validated comb");
        if target.accepts(&comb, &class) {
            return Some((comb, class));
        }
    }
    None
}
