//! Hamiltonian tours of bipartite instances, the dimension of their convex
//! hull, and facet tests for inequalities against it.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::constraints::{LinearInequality, Relation};
use crate::error::{Error, Result};
use crate::graph::{BipartiteInstance, Edge, FractionalPoint, Rational, VertexId};
use crate::linalg;

/// Largest class size accepted for exhaustive enumeration
/// (`6! * 5! / 2 = 43200` tours of `K_{6,6}`).
pub const MAX_TOUR_CLASS_SIZE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tour {
    /// Starts at class-1 vertex 0, alternates classes; the second vertex has
    /// a smaller index than the last one.
    pub sequence: Vec<VertexId>,
    pub edges: BTreeSet<Edge>,
}

impl Tour {
    /// 0/1 vector over `instance.edges()`.
    pub fn incidence(&self, instance: &BipartiteInstance) -> Vec<i64> {
        instance.edges().iter().map(|e| i64::from(self.edges.contains(e))).collect()
    }

    pub fn as_point(&self) -> FractionalPoint {
        let mut p = FractionalPoint::new();
        for e in &self.edges {
            p.set(*e, Rational::from_integer(1.into()));
        }
        p
    }
}

/// Depth-first enumeration of canonical tours.
pub struct TourStream<'a> {
    instance: &'a BipartiteInstance,
    n: usize,
    path: Vec<usize>,
    cursor: Vec<usize>,
    used: [Vec<bool>; 2],
    done: bool,
    diagnostic: Option<String>,
}

impl TourStream<'_> {
    /// Why the stream is empty, when it is empty for structural reasons.
    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    fn vertex(&self, depth: usize, idx: usize) -> VertexId {
        if depth.is_multiple_of(2) {
            VertexId::class1(idx)
        } else {
            VertexId::class2(idx)
        }
    }

    fn adjacent(&self, depth_a: usize, a: usize, depth_b: usize, b: usize) -> bool {
        Edge::new(self.vertex(depth_a, a), self.vertex(depth_b, b))
            .map(|e| self.instance.has_edge(e))
            .unwrap_or(false)
    }

    fn emit(&self) -> Tour {
        let sequence: Vec<VertexId> =
            self.path.iter().enumerate().map(|(d, &i)| self.vertex(d, i)).collect();
        let len = sequence.len();
        let edges = (0..len)
            .map(|k| Edge::new(sequence[k], sequence[(k + 1) % len]).expect("alternating classes"))
            .collect();
        Tour { sequence, edges }
    }
}

impl Iterator for TourStream<'_> {
    type Item = Tour;

    fn next(&mut self) -> Option<Tour> {
        let total = 2 * self.n;
        while !self.done {
            let depth = self.path.len();
            if depth == total {
                let last = self.path[total - 1];
                let closes = self.adjacent(total - 1, last, 0, self.path[0]);
                let tour = closes.then(|| self.emit());
                self.path.pop();
                self.used[(total - 1) % 2][last] = false;
                if tour.is_some() {
                    return tour;
                }
                continue;
            }
            let side = depth % 2;
            let prev = self.path[depth - 1];
            let mut found = None;
            for c in self.cursor[depth]..self.n {
                if self.used[side][c] || !self.adjacent(depth - 1, prev, depth, c) {
                    continue;
                }
                // Canonical direction: second vertex below the last one.
                if depth == total - 1 && c <= self.path[1] {
                    continue;
                }
                found = Some(c);
                break;
            }
            match found {
                Some(c) => {
                    self.cursor[depth] = c + 1;
                    self.used[side][c] = true;
                    self.path.push(c);
                    if depth + 1 < total {
                        self.cursor[depth + 1] = 0;
                    }
                }
                None => {
                    if depth == 1 {
                        self.done = true;
                    } else {
                        let v = self.path.pop().expect("depth > 1");
                        self.used[(depth - 1) % 2][v] = false;
                    }
                }
            }
        }
        None
    }
}

/// Every undirected Hamiltonian tour exactly once.
pub fn enumerate_tours(instance: &BipartiteInstance) -> Result<TourStream<'_>> {
    let (n1, n2) = (instance.n1(), instance.n2());
    let n = n1.max(n2);
    if n > MAX_TOUR_CLASS_SIZE {
        return Err(Error::TourCap { n, cap: MAX_TOUR_CLASS_SIZE });
    }
    let mut s = TourStream {
        instance,
        n: n1,
        path: vec![0],
        cursor: vec![0; 2 * n1 + 1],
        used: [vec![false; n1], vec![false; n2]],
        done: false,
        diagnostic: None,
    };
    if n1 != n2 {
        s.done = true;
        s.diagnostic = Some(format!("class sizes differ ({n1} vs {n2}); no Hamiltonian tour exists"));
    } else if n1 < 2 {
        s.done = true;
        s.diagnostic = Some("each class needs at least 2 vertices for a tour".into());
    } else {
        s.used[0][0] = true;
    }
    Ok(s)
}

fn affine_rank(vectors: &[Vec<i64>]) -> usize {
    let Some(base) = vectors.first() else { return 0 };
    let diffs: Vec<Vec<BigInt>> = vectors[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| BigInt::from(a - b)).collect())
        .collect();
    linalg::rank(diffs)
}

/// Dimension of the convex hull of the tour incidence vectors.
pub fn polytope_dimension(instance: &BipartiteInstance) -> Result<usize> {
    let vectors: Vec<Vec<i64>> = enumerate_tours(instance)?.map(|t| t.incidence(instance)).collect();
    if vectors.is_empty() {
        return Err(Error::NoTours);
    }
    Ok(affine_rank(&vectors))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetVerdict {
    Facet,
    SupportingNonFacet,
    NotSupporting,
    NotValid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetReport {
    pub polytope_dim: usize,
    pub tour_count: usize,
    pub tight_tour_count: usize,
    /// `None` when no tour is tight.
    pub tight_face_dim: Option<usize>,
    pub violating_tours: usize,
    pub verdict: FacetVerdict,
}

pub fn facet_test(instance: &BipartiteInstance, ineq: &LinearInequality) -> Result<FacetReport> {
    let tours: Vec<Tour> = enumerate_tours(instance)?.collect();
    if tours.is_empty() {
        return Err(Error::NoTours);
    }
    let vectors: Vec<Vec<i64>> = tours.iter().map(|t| t.incidence(instance)).collect();
    let mut tight = Vec::new();
    let mut violating = 0;
    for (t, v) in tours.iter().zip(&vectors) {
        let value = ineq.coeffs.iter().fold(Rational::zero(), |acc, (e, c)| {
            if t.edges.contains(e) {
                acc + c
            } else {
                acc
            }
        });
        let ok = match ineq.relation() {
            Relation::Le => value <= ineq.rhs,
            Relation::Eq => value == ineq.rhs,
        };
        if !ok {
            violating += 1;
        } else if value == ineq.rhs {
            tight.push(v.clone());
        }
    }
    let polytope_dim = affine_rank(&vectors);
    let tight_face_dim = (!tight.is_empty()).then(|| affine_rank(&tight));
    let verdict = if violating > 0 {
        FacetVerdict::NotValid
    } else {
        match tight_face_dim {
            None => FacetVerdict::NotSupporting,
            Some(d) if d + 1 == polytope_dim => FacetVerdict::Facet,
            Some(_) => FacetVerdict::SupportingNonFacet,
        }
    };
    Ok(FacetReport {
        polytope_dim,
        tour_count: tours.len(),
        tight_tour_count: tight.len(),
        tight_face_dim,
        violating_tours: violating,
        verdict,
    })
}
