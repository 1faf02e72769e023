//! Relaxation constraint families: degree constraints, subtour elimination
//! constraints (SECs) and the unit-box bounds, plus exact feasibility checks.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{int, BipartiteInstance, Edge, FractionalPoint, Rational, VertexId, VertexSet};

/// Default limit on the number of vertices for exhaustive subset enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Subset masks are `u64`, so no cap can go beyond this.
pub const MAX_ENUMERATION_CAP: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InequalityKind {
    DegreeLe2,
    DegreeEq2,
    SubtourElim,
    UpperBound,
    LowerBound,
    Comb,
    Aggregate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// `sum x <= 2`, the only form any certificate uses.
    #[default]
    Le,
    /// `sum x = 2`.
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Vertex(VertexId),
    Set(Vec<VertexId>),
    Edge(Edge),
    Comb,
    Derived(String),
}

impl Provenance {
    pub fn describe(&self, instance: &BipartiteInstance) -> String {
        match self {
            Provenance::Vertex(v) => instance.label(*v).to_string(),
            Provenance::Set(s) => instance.set_label(&s.iter().copied().collect()),
            Provenance::Edge(e) => instance.edge_label(*e),
            Provenance::Comb => "comb".to_string(),
            Provenance::Derived(s) => s.clone(),
        }
    }
}

/// `sum coeffs[e] * x_e  (<= | =)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearInequality {
    pub coeffs: BTreeMap<Edge, Rational>,
    pub rhs: Rational,
    pub kind: InequalityKind,
    pub provenance: Provenance,
}

impl LinearInequality {
    pub fn relation(&self) -> Relation {
        match self.kind {
            InequalityKind::DegreeEq2 => Relation::Eq,
            _ => Relation::Le,
        }
    }

    pub fn lhs(&self, point: &FractionalPoint) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (e, c)| acc + c * point.weight(*e))
    }

    pub fn coeff(&self, e: Edge) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn describe(&self, instance: &BipartiteInstance) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                if c.is_one() {
                    format!("x[{}]", instance.edge_label(*e))
                } else {
                    format!("{c}*x[{}]", instance.edge_label(*e))
                }
            })
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let rel = match self.relation() {
            Relation::Le => "<=",
            Relation::Eq => "=",
        };
        format!("{:?}({}): {lhs} {rel} {}", self.kind, self.provenance.describe(instance), self.rhs)
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Value of the left-hand side at `point` and whether the relation holds.
pub fn eval(ineq: &LinearInequality, point: &FractionalPoint) -> (Rational, bool) {
    let value = ineq.lhs(point);
    let ok = match ineq.relation() {
        Relation::Le => value <= ineq.rhs,
        Relation::Eq => value == ineq.rhs,
    };
    (value, ok)
}

pub fn degree_inequality(instance: &BipartiteInstance, v: VertexId, mode: DegreeMode) -> LinearInequality {
    LinearInequality {
        coeffs: instance.incident(v).map(|e| (e, Rational::one())).collect(),
        rhs: int(2),
        kind: match mode {
            DegreeMode::Le => InequalityKind::DegreeLe2,
            DegreeMode::Eq => InequalityKind::DegreeEq2,
        },
        provenance: Provenance::Vertex(v),
    }
}

/// One degree constraint per vertex.
pub fn gen_degree(instance: &BipartiteInstance, mode: DegreeMode) -> Vec<LinearInequality> {
    instance.vertices().map(|v| degree_inequality(instance, v, mode)).collect()
}

/// `x(S) <= |S| - 1`. Size limits are the caller's business; for `|S| = 1`
/// this is the trivial `0 <= 0`.
pub fn sec_inequality(instance: &BipartiteInstance, set: &VertexSet) -> LinearInequality {
    LinearInequality {
        coeffs: instance.edges_within(set).map(|e| (e, Rational::one())).collect(),
        rhs: int(set.len() as i64 - 1),
        kind: InequalityKind::SubtourElim,
        provenance: Provenance::Set(set.iter().copied().collect()),
    }
}

pub fn upper_bound(e: Edge) -> LinearInequality {
    LinearInequality {
        coeffs: [(e, Rational::one())].into(),
        rhs: Rational::one(),
        kind: InequalityKind::UpperBound,
        provenance: Provenance::Edge(e),
    }
}

/// `x_e >= 0`, stored as `-x_e <= 0`.
pub fn lower_bound(e: Edge) -> LinearInequality {
    LinearInequality {
        coeffs: [(e, -Rational::one())].into(),
        rhs: Rational::zero(),
        kind: InequalityKind::LowerBound,
        provenance: Provenance::Edge(e),
    }
}

/// Which SECs to enumerate. `max_size = None` means `N - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecOptions {
    pub min_size: usize,
    pub max_size: Option<usize>,
    pub cap: usize,
}

impl Default for SecOptions {
    fn default() -> Self {
        SecOptions { min_size: 3, max_size: None, cap: DEFAULT_ENUMERATION_CAP }
    }
}

impl SecOptions {
    pub fn with_cap(cap: usize) -> Self {
        SecOptions { cap, ..Default::default() }
    }

    /// Inclusive size range for an instance with `n` vertices.
    pub fn range(&self, n: usize) -> (usize, usize) {
        let max = self.max_size.unwrap_or(n.saturating_sub(1)).min(n);
        (self.min_size, max)
    }

    pub(crate) fn check_cap(&self, instance: &BipartiteInstance) -> Result<()> {
        let n = instance.vertex_count();
        let cap = self.cap.min(MAX_ENUMERATION_CAP);
        if n > cap {
            return Err(Error::EnumerationCap { vertices: n, cap });
        }
        Ok(())
    }
}

/// All `n`-bit masks with popcount in `[min, max]`, by size and then in
/// increasing numeric order within a size.
#[derive(Clone, Debug)]
pub(crate) struct SubsetMasks {
    n: usize,
    k: usize,
    max: usize,
    next: Option<u64>,
}

impl SubsetMasks {
    pub(crate) fn new(n: usize, min: usize, max: usize) -> Self {
        let k = min.max(1);
        let mut it = SubsetMasks { n, k, max: max.min(n), next: None };
        it.next = it.first_of_size(k);
        it
    }

    fn first_of_size(&self, k: usize) -> Option<u64> {
        if k > self.max || k > self.n {
            None
        } else {
            Some((1u64 << k) - 1)
        }
    }
}

impl Iterator for SubsetMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        // Gosper's hack: next mask with the same popcount.
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        let nxt = (((r ^ cur) >> 2) / c) | r;
        self.next = if nxt >> self.n == 0 {
            Some(nxt)
        } else {
            self.k += 1;
            self.first_of_size(self.k)
        };
        Some(cur)
    }
}

pub(crate) fn mask_to_set(instance: &BipartiteInstance, mask: u64) -> VertexSet {
    (0..instance.vertex_count())
        .filter(|g| mask >> g & 1 == 1)
        .map(|g| instance.vertex_at(g))
        .collect()
}

pub(crate) fn edge_mask(instance: &BipartiteInstance, e: Edge) -> u64 {
    let (a, b) = e.endpoints();
    1u64 << instance.global_index(a) | 1u64 << instance.global_index(b)
}

/// Number of subsets of an `n`-set with size in `[min, max]`.
pub fn sec_count(n: usize, min: usize, max: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128; // C(n, 0)
    for k in 0..=n.min(max) {
        if k >= min {
            total += binom;
        }
        binom = binom * (n - k) as u128 / (k + 1) as u128;
    }
    total
}

/// Lazily generated SECs, one per vertex subset in the configured size range.
pub struct SecStream<'a> {
    instance: &'a BipartiteInstance,
    masks: SubsetMasks,
}

impl Iterator for SecStream<'_> {
    type Item = LinearInequality;

    fn next(&mut self) -> Option<LinearInequality> {
        let mask = self.masks.next()?;
        Some(sec_inequality(self.instance, &mask_to_set(self.instance, mask)))
    }
}

pub fn gen_secs<'a>(instance: &'a BipartiteInstance, opts: &SecOptions) -> Result<SecStream<'a>> {
    opts.check_cap(instance)?;
    let (min, max) = opts.range(instance.vertex_count());
    Ok(SecStream { instance, masks: SubsetMasks::new(instance.vertex_count(), min, max) })
}

/// Subset masks whose SEC is violated by `point`, with `x(S)`, in mask order.
pub(crate) fn violated_sec_masks(
    instance: &BipartiteInstance,
    point: &FractionalPoint,
    opts: &SecOptions,
) -> Result<Vec<(u64, Rational)>> {
    opts.check_cap(instance)?;
    let n = instance.vertex_count();
    let (min, max) = opts.range(n);
    if min > max || n == 0 {
        return Ok(Vec::new());
    }
    let support: Vec<(u64, Rational)> =
        point.iter().map(|(e, w)| (edge_mask(instance, *e), w.clone())).collect();
    let mut hits: Vec<(u64, Rational)> = (0u64..1u64 << n)
        .into_par_iter()
        .filter_map(|mask| {
            let k = mask.count_ones() as usize;
            if k < min.max(1) || k > max {
                return None;
            }
            let mut x = Rational::zero();
            for (m, w) in &support {
                if mask & m == *m {
                    x += w;
                }
            }
            (x > int(k as i64 - 1)).then_some((mask, x))
        })
        .collect();
    hits.sort_by(|a, b| a.0.count_ones().cmp(&b.0.count_ones()).then(a.0.cmp(&b.0)));
    Ok(hits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub inequality: LinearInequality,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Number of constraints evaluated.
    pub checked: u128,
}

/// Evaluates every degree constraint, every SEC in range and both bounds on
/// every instance edge.
pub fn check_point(
    instance: &BipartiteInstance,
    point: &FractionalPoint,
    mode: DegreeMode,
    opts: &SecOptions,
) -> Result<FeasibilityReport> {
    for (e, _) in point.iter() {
        if !instance.has_edge(*e) {
            return Err(Error::MissingEdge(e.to_string()));
        }
    }
    let mut violations = Vec::new();
    let mut checked = 0u128;
    let mut consider = |ineq: LinearInequality| {
        checked += 1;
        let (value, ok) = eval(&ineq, point);
        if !ok {
            violations.push(Violation { inequality: ineq, value });
        }
    };
    for ineq in gen_degree(instance, mode) {
        consider(ineq);
    }
    for e in instance.edges() {
        consider(upper_bound(*e));
        consider(lower_bound(*e));
    }
    let n = instance.vertex_count();
    let (min, max) = opts.range(n);
    for (mask, value) in violated_sec_masks(instance, point, opts)? {
        violations.push(Violation { inequality: sec_inequality(instance, &mask_to_set(instance, mask)), value });
    }
    checked += if min <= max { sec_count(n, min.max(1), max) } else { 0 };
    violations.sort_by(|a, b| {
        a.inequality
            .provenance
            .cmp(&b.inequality.provenance)
            .then(a.inequality.kind.cmp(&b.inequality.kind))
    });
    Ok(FeasibilityReport { feasible: violations.is_empty(), violations, checked })
}
