//! Bipartite instances, vertex and edge identities, and exact-rational
//! fractional points over the edge set.
//!
//! Vertices are addressed by `(class, index)`; the instance keeps a label
//! table so that external files can use short names such as `a` or `g`.
//! Every edge joins the two classes and is stored with its class-1 endpoint
//! first, so `Edge::new(u, v) == Edge::new(v, u)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or an integer string. Surrounding whitespace is rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let parse = |t: &str| -> Option<BigInt> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() || d.is_negative() {
                return None;
            }
            Some(Rational::new(parse(n)?, d))
        }
        None => parse(s).map(Rational::from_integer),
    }
}

/// Canonical `"p/q"` (or `"p"`) rendering; inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Lossy conversion for human-readable output only.
pub fn approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Class {
    Class1,
    Class2,
}

impl Class {
    pub fn other(self) -> Class {
        match self {
            Class::Class1 => Class::Class2,
            Class::Class2 => Class::Class1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub class: Class,
    pub index: usize,
}

impl VertexId {
    pub const fn new(class: Class, index: usize) -> Self {
        VertexId { class, index }
    }

    pub const fn class1(index: usize) -> Self {
        VertexId::new(Class::Class1, index)
    }

    pub const fn class2(index: usize) -> Self {
        VertexId::new(Class::Class2, index)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.class {
            Class::Class1 => 1,
            Class::Class2 => 2,
        };
        write!(f, "C{c}:{}", self.index)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// An undirected edge between a class-1 and a class-2 vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    c1: usize,
    c2: usize,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Result<Edge> {
        match (a.class, b.class) {
            (Class::Class1, Class::Class2) => Ok(Edge { c1: a.index, c2: b.index }),
            (Class::Class2, Class::Class1) => Ok(Edge { c1: b.index, c2: a.index }),
            _ => Err(Error::SameClassEdge(format!("{a}-{b}"))),
        }
    }

    /// Edge from class-1 index `i` to class-2 index `j`.
    pub const fn between(i: usize, j: usize) -> Edge {
        Edge { c1: i, c2: j }
    }

    pub fn class1_end(&self) -> VertexId {
        VertexId::class1(self.c1)
    }

    pub fn class2_end(&self) -> VertexId {
        VertexId::class2(self.c2)
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.class1_end(), self.class2_end())
    }

    pub fn is_incident(&self, v: VertexId) -> bool {
        match v.class {
            Class::Class1 => v.index == self.c1,
            Class::Class2 => v.index == self.c2,
        }
    }

    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if !self.is_incident(v) {
            return None;
        }
        Some(match v.class {
            Class::Class1 => self.class2_end(),
            Class::Class2 => self.class1_end(),
        })
    }

    /// Both endpoints lie in `set`.
    pub fn inside(&self, set: &VertexSet) -> bool {
        set.contains(&self.class1_end()) && set.contains(&self.class2_end())
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.class1_end(), self.class2_end())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteInstance {
    labels: [Vec<String>; 2],
    by_label: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    edge_pos: HashMap<Edge, usize>,
    complete: bool,
}

impl BipartiteInstance {
    /// `K_{n1,n2}` with labels `u0, u1, ...` and `v0, v1, ...`.
    pub fn complete(n1: usize, n2: usize) -> Self {
        let l1 = (0..n1).map(|i| format!("u{i}")).collect();
        let l2 = (0..n2).map(|j| format!("v{j}")).collect();
        Self::with_labels(l1, l2, None).expect("generated labels are unique")
    }

    /// Builds an instance from label tables. `edges = None` means the
    /// complete bipartite graph between the classes.
    pub fn with_labels(
        class1: Vec<String>,
        class2: Vec<String>,
        edges: Option<Vec<Edge>>,
    ) -> Result<Self> {
        let mut by_label = HashMap::new();
        for (class, labels) in [(Class::Class1, &class1), (Class::Class2, &class2)] {
            for (i, l) in labels.iter().enumerate() {
                if l.is_empty() || l.contains('-') || l.trim() != l {
                    return Err(Error::InvalidLabel(l.clone()));
                }
                if by_label.insert(l.clone(), VertexId::new(class, i)).is_some() {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        let complete = edges.is_none();
        let edges = match edges {
            None => {
                let mut all = Vec::with_capacity(class1.len() * class2.len());
                for i in 0..class1.len() {
                    for j in 0..class2.len() {
                        all.push(Edge::between(i, j));
                    }
                }
                all
            }
            Some(list) => {
                let set: BTreeSet<Edge> = list.into_iter().collect();
                for e in &set {
                    if e.c1 >= class1.len() || e.c2 >= class2.len() {
                        return Err(Error::MissingEdge(e.to_string()));
                    }
                }
                set.into_iter().collect()
            }
        };
        let edge_pos = edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        Ok(BipartiteInstance { labels: [class1, class2], by_label, edges, edge_pos, complete })
    }

    pub fn n1(&self) -> usize {
        self.labels[0].len()
    }

    pub fn n2(&self) -> usize {
        self.labels[1].len()
    }

    pub fn class_size(&self, class: Class) -> usize {
        match class {
            Class::Class1 => self.n1(),
            Class::Class2 => self.n2(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n1() + self.n2()
    }

    /// True when the class sizes agree, the necessary condition for a tour.
    pub fn admits_tour(&self) -> bool {
        self.n1() == self.n2() && self.n1() >= 2
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n1()).map(VertexId::class1).chain((0..self.n2()).map(VertexId::class2))
    }

    pub fn class_vertices(&self, class: Class) -> impl Iterator<Item = VertexId> {
        (0..self.class_size(class)).map(move |i| VertexId::new(class, i))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index < self.class_size(v.class)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    /// Dense index over all vertices: class 1 first, then class 2.
    pub fn global_index(&self, v: VertexId) -> usize {
        match v.class {
            Class::Class1 => v.index,
            Class::Class2 => self.n1() + v.index,
        }
    }

    pub fn vertex_at(&self, global: usize) -> VertexId {
        if global < self.n1() {
            VertexId::class1(global)
        } else {
            VertexId::class2(global - self.n1())
        }
    }

    pub fn label(&self, v: VertexId) -> &str {
        let table = match v.class {
            Class::Class1 => &self.labels[0],
            Class::Class2 => &self.labels[1],
        };
        &table[v.index]
    }

    pub fn labels(&self, class: Class) -> &[String] {
        match class {
            Class::Class1 => &self.labels[0],
            Class::Class2 => &self.labels[1],
        }
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId> {
        self.by_label.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn vertex_set<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Result<VertexSet> {
        labels.into_iter().map(|l| self.vertex(l)).collect()
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edge_pos.contains_key(&e)
    }

    pub fn edge_position(&self, e: Edge) -> Option<usize> {
        self.edge_pos.get(&e).copied()
    }

    pub fn edge_label(&self, e: Edge) -> String {
        format!("{}-{}", self.label(e.class1_end()), self.label(e.class2_end()))
    }

    /// Parses `"a-e"` in either endpoint order.
    pub fn parse_edge(&self, s: &str) -> Result<Edge> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| Error::field(format!("edge \"{s}\""), "expected \"<label>-<label>\""))?;
        let e = Edge::new(self.vertex(a)?, self.vertex(b)?)?;
        if !self.has_edge(e) {
            return Err(Error::MissingEdge(s.to_string()));
        }
        Ok(e)
    }

    pub fn set_label(&self, set: &VertexSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.label(*v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied().filter(move |e| e.is_incident(v))
    }

    pub fn edges_within<'a>(&'a self, set: &'a VertexSet) -> impl Iterator<Item = Edge> + 'a {
        self.edges.iter().copied().filter(move |e| e.inside(set))
    }
}

/// Sparse edge weights; edges not stored carry weight zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractionalPoint {
    weights: BTreeMap<Edge, Rational>,
}

impl FractionalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weights must sit on instance edges. Values outside `[0, 1]` are kept
    /// so that feasibility checks can report them.
    pub fn from_weights(
        instance: &BipartiteInstance,
        weights: impl IntoIterator<Item = (Edge, Rational)>,
    ) -> Result<Self> {
        let mut p = FractionalPoint::new();
        for (e, w) in weights {
            if !instance.has_edge(e) {
                return Err(Error::MissingEdge(e.to_string()));
            }
            p.set(e, w);
        }
        Ok(p)
    }

    pub fn set(&mut self, e: Edge, w: Rational) {
        if w.is_zero() {
            self.weights.remove(&e);
        } else {
            self.weights.insert(e, w);
        }
    }

    pub fn weight(&self, e: Edge) -> Rational {
        self.weights.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &Rational)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn in_unit_box(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative() && *w <= Rational::one())
    }

    /// Sum of the weights of the edges at `v`.
    pub fn degree(&self, instance: &BipartiteInstance, v: VertexId) -> Result<Rational> {
        instance.check_vertex(v)?;
        Ok(self
            .weights
            .iter()
            .filter(|(e, _)| e.is_incident(v))
            .fold(Rational::zero(), |acc, (_, w)| acc + w))
    }

    /// `x(S)`: total weight of edges with both endpoints in `set`.
    pub fn set_weight(&self, instance: &BipartiteInstance, set: &VertexSet) -> Result<Rational> {
        for v in set {
            instance.check_vertex(*v)?;
        }
        Ok(self
            .weights
            .iter()
            .filter(|(e, _)| e.inside(set))
            .fold(Rational::zero(), |acc, (_, w)| acc + w))
    }
}
