//! Aggregation certificates: lists of degree constraints (possibly restricted
//! to part of a vertex's edges) and SECs whose sum dominates a comb
//! inequality, so that every point of the relaxation satisfies the comb.
//!
//! All five builders share one construction, parameterised by which vertex
//! class plays the primary role (see [`IntersectionPattern`]). With `H1`/`H2`
//! the primary and secondary hand classes:
//!
//! * each `a ∈ H1 ∩ T_i` on a primary tooth: degree of `a` over its edges into
//!   `T_i` and into `H2 \ T_i`;
//! * each `b ∈ H2 ∩ T_i` on a primary tooth: degree of `b` over its edges into
//!   `T_i` (hand edges to other teeth are already covered by `H1` members);
//! * each primary tooth: SEC on `T_i \ H`;
//! * each remaining tooth: SEC on `T_i`;
//! * each toothless `a ∈ H1`: degree of `a` over its edges into `H2`.
//!
//! Every comb edge is then covered exactly as often as its comb coefficient,
//! and the summed right-hand side is
//! `|H| + sum |T_i| - p - 2q + w - y - sum_{i>p} r_i`.
//! The builders differ only in which hypothesis they require and how they
//! pick the orientation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::comb::{classify, comb_inequality, pattern_for, Comb, CombClass, IntersectionPattern, Orientation};
use crate::constraints::{InequalityKind, LinearInequality, Provenance};
use crate::error::{Error, Result};
use crate::graph::{int, BipartiteInstance, Edge, Rational, VertexId, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Builder {
    L1,
    L2,
    L3,
    T1,
    T2,
}

impl Builder {
    pub const ALL: [Builder; 5] = [Builder::L1, Builder::L2, Builder::L3, Builder::T1, Builder::T2];

    pub fn parse(s: &str) -> Option<Builder> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Some(Builder::L1),
            "L2" => Some(Builder::L2),
            "L3" => Some(Builder::L3),
            "T1" => Some(Builder::T1),
            "T2" => Some(Builder::T2),
            _ => None,
        }
    }
}

impl fmt::Display for Builder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BuilderChoice {
    /// First builder in `L1, L2, L3, T1, T2` whose hypothesis holds.
    #[default]
    Auto,
    Only(Builder),
}

/// A primitive relaxation inequality with implicit multiplier 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Member {
    /// `sum_{e in support} x_e <= 2` with every support edge at `vertex`.
    Degree { vertex: VertexId, support: Vec<Edge> },
    /// `x(S) <= |S| - 1`.
    Sec { set: VertexSet },
}

impl Member {
    pub fn rhs(&self) -> Rational {
        match self {
            Member::Degree { .. } => int(2),
            Member::Sec { set } => int(set.len() as i64 - 1),
        }
    }

    pub fn inequality(&self, instance: &BipartiteInstance) -> LinearInequality {
        match self {
            Member::Degree { vertex, support } => LinearInequality {
                coeffs: support.iter().map(|e| (*e, Rational::one())).collect(),
                rhs: int(2),
                kind: InequalityKind::DegreeLe2,
                provenance: Provenance::Vertex(*vertex),
            },
            Member::Sec { set } => crate::constraints::sec_inequality(instance, set),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateMember {
    pub member: Member,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub builder: Builder,
    pub orientation: Orientation,
    pub comb: Comb,
    pub members: Vec<CertificateMember>,
}

impl Certificate {
    pub fn target(&self, instance: &BipartiteInstance) -> Result<LinearInequality> {
        comb_inequality(instance, &self.comb)
    }

    /// Sum of the member right-hand sides.
    pub fn aggregate_rhs(&self) -> Rational {
        self.members.iter().fold(Rational::zero(), |acc, m| acc + m.member.rhs())
    }
}

fn restricted_degree(
    instance: &BipartiteInstance,
    v: VertexId,
    towards: impl Iterator<Item = VertexId>,
) -> Member {
    let mut support: Vec<Edge> = towards
        .filter_map(|u| Edge::new(v, u).ok())
        .filter(|e| instance.has_edge(*e))
        .collect();
    support.sort();
    support.dedup();
    Member::Degree { vertex: v, support }
}

fn members_for(instance: &BipartiteInstance, comb: &Comb, pattern: &IntersectionPattern) -> Vec<CertificateMember> {
    let primary = pattern.orientation.primary();
    let secondary = primary.other();
    let hand2: VertexSet = comb.hand.iter().filter(|v| v.class == secondary).copied().collect();
    let label = |v: VertexId| instance.label(v).to_string();
    let mut out = Vec::new();

    for (k, &i) in pattern.order.iter().enumerate() {
        let tooth = &comb.teeth[i];
        if k < pattern.p {
            for &a in tooth.intersection(&comb.hand).filter(|v| v.class == primary) {
                let towards = tooth.iter().chain(hand2.difference(tooth)).copied();
                out.push(CertificateMember {
                    member: restricted_degree(instance, a, towards),
                    note: format!("degree of {} into tooth {i} and the other-class hand", label(a)),
                });
            }
            for &b in tooth.intersection(&comb.hand).filter(|v| v.class == secondary) {
                out.push(CertificateMember {
                    member: restricted_degree(instance, b, tooth.iter().copied()),
                    note: format!("degree of {} into tooth {i}", label(b)),
                });
            }
            let outside: VertexSet = tooth.difference(&comb.hand).copied().collect();
            out.push(CertificateMember {
                member: Member::Sec { set: outside },
                note: format!("SEC on tooth {i} minus the hand"),
            });
        } else {
            out.push(CertificateMember {
                member: Member::Sec { set: tooth.clone() },
                note: format!("SEC on tooth {i}"),
            });
        }
    }
    for &a in &pattern.toothless1 {
        out.push(CertificateMember {
            member: restricted_degree(instance, a, hand2.iter().copied()),
            note: format!("degree of toothless {} into the other-class hand", label(a)),
        });
    }
    out
}

/// The shared construction in a fixed orientation, without any hypothesis
/// check. Useful for auditing both orientations of a comb.
pub fn build_oriented(
    instance: &BipartiteInstance,
    comb: &Comb,
    orientation: Orientation,
    builder: Builder,
) -> Result<Certificate> {
    let pattern = pattern_for(instance, comb, orientation)?;
    Ok(Certificate { builder, orientation, comb: comb.clone(), members: members_for(instance, comb, &pattern) })
}

fn refuse(builder: Builder, reason: impl Into<String>) -> Error {
    Error::HypothesisNotMet { builder: builder.to_string(), reason: reason.into() }
}

/// Among `candidates`, the certificate with the lowest aggregate rhs; ties go
/// to the earlier orientation (as given first).
fn cheapest(
    instance: &BipartiteInstance,
    comb: &Comb,
    builder: Builder,
    candidates: impl IntoIterator<Item = Orientation>,
) -> Result<Option<Certificate>> {
    let mut best: Option<Certificate> = None;
    for o in candidates {
        let c = build_oriented(instance, comb, o, builder)?;
        if best.as_ref().is_none_or(|b| c.aggregate_rhs() < b.aggregate_rhs()) {
            best = Some(c);
        }
    }
    Ok(best)
}

pub fn build_l1(instance: &BipartiteInstance, comb: &Comb) -> Result<Certificate> {
    let class = classify(instance, comb)?;
    if !class.lemma1 {
        return Err(refuse(Builder::L1, "needs one hand vertex per tooth and no toothless hand vertex"));
    }
    // The primary class is the minority class of the hand.
    for o in Orientation::BOTH {
        let pt = pattern_for(instance, comb, o)?;
        if pt.p < pt.q {
            return build_oriented(instance, comb, o, Builder::L1);
        }
    }
    Err(Error::Internal("t is odd, so one hand class is a strict minority".into()))
}

pub fn build_l2(instance: &BipartiteInstance, comb: &Comb) -> Result<Certificate> {
    let class = classify(instance, comb)?;
    if !class.lemma2 {
        return Err(refuse(Builder::L2, "needs one hand vertex per tooth"));
    }
    let target = comb.rhs();
    for o in Orientation::BOTH {
        let c = build_oriented(instance, comb, o, Builder::L2)?;
        if c.aggregate_rhs() <= target {
            return Ok(c);
        }
    }
    Err(Error::Internal("both orientations exceed the comb rhs for a single-intersection comb".into()))
}

pub fn build_l3(instance: &BipartiteInstance, comb: &Comb) -> Result<Certificate> {
    let class = classify(instance, comb)?;
    if !class.lemma3 {
        return Err(refuse(Builder::L3, "needs every hand vertex in a tooth and p < q in some orientation"));
    }
    cheapest(instance, comb, Builder::L3, class.lemma3_orientations.iter().copied())?
        .ok_or_else(|| Error::Internal("lemma3 flagged without an orientation".into()))
}

pub fn build_t1(instance: &BipartiteInstance, comb: &Comb) -> Result<Certificate> {
    let class = classify(instance, comb)?;
    if !class.theorem1 {
        return Err(refuse(Builder::T1, "w <= y + (q-(p+1))/2 + sum r fails in both orientations"));
    }
    let ok = class.theorem1_condition.iter().filter(|c| c.holds).map(|c| c.orientation);
    cheapest(instance, comb, Builder::T1, ok)?
        .ok_or_else(|| Error::Internal("theorem1 flagged without an orientation".into()))
}

pub fn build_t2(instance: &BipartiteInstance, comb: &Comb) -> Result<Certificate> {
    let class = classify(instance, comb)?;
    if !class.theorem2 {
        return Err(refuse(Builder::T2, "some tooth meets the hand in both classes"));
    }
    let target = comb.rhs();
    let mut dominating = Vec::new();
    for o in Orientation::BOTH {
        if build_oriented(instance, comb, o, Builder::T2)?.aggregate_rhs() <= target {
            dominating.push(o);
        }
    }
    cheapest(instance, comb, Builder::T2, dominating)?
        .ok_or_else(|| Error::Internal("both orientations exceed the comb rhs for a single-class comb".into()))
}

pub fn build_with(instance: &BipartiteInstance, comb: &Comb, builder: Builder) -> Result<Certificate> {
    match builder {
        Builder::L1 => build_l1(instance, comb),
        Builder::L2 => build_l2(instance, comb),
        Builder::L3 => build_l3(instance, comb),
        Builder::T1 => build_t1(instance, comb),
        Builder::T2 => build_t2(instance, comb),
    }
}

pub fn applicable_builders(class: &CombClass) -> Vec<Builder> {
    let flags = [class.lemma1, class.lemma2, class.lemma3, class.theorem1, class.theorem2];
    Builder::ALL.into_iter().zip(flags).filter(|(_, f)| *f).map(|(b, _)| b).collect()
}

pub fn build(instance: &BipartiteInstance, comb: &Comb, choice: BuilderChoice) -> Result<Certificate> {
    match choice {
        BuilderChoice::Only(b) => build_with(instance, comb, b),
        BuilderChoice::Auto => {
            let class = classify(instance, comb)?;
            match applicable_builders(&class).first() {
                Some(b) => build_with(instance, comb, *b),
                None => Err(Error::HypothesisNotMet {
                    builder: "auto".into(),
                    reason: "no implication result covers this comb".into(),
                }),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Members cover `edge` fewer times than the comb coefficient.
    Edge { edge: Edge, required: Rational, covered: Rational },
    /// Summed member rhs exceeds the comb rhs.
    Rhs { aggregate: Rational, target: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub dominates: bool,
    /// Comb rhs minus summed member rhs.
    pub slack: Rational,
    pub aggregate_rhs: Rational,
    pub target_rhs: Rational,
    /// Aggregate coefficient minus comb coefficient, on every edge where
    /// either is nonzero.
    pub surplus: BTreeMap<Edge, Rational>,
    pub witness: Option<Witness>,
}

/// Re-derives every member inequality from its description, checks that it
/// is valid for the relaxation, and checks coefficient-wise domination of the
/// comb inequality. Nothing computed by the builders is reused.
pub fn verify(instance: &BipartiteInstance, cert: &Certificate) -> Result<CertificateReport> {
    let target = comb_inequality(instance, &cert.comb)?;
    let n = instance.vertex_count();
    let mut agg: BTreeMap<Edge, Rational> = BTreeMap::new();
    let mut agg_rhs = Rational::zero();

    for (index, m) in cert.members.iter().enumerate() {
        let bad = |reason: String| Error::InvalidMember { index, reason };
        match &m.member {
            Member::Degree { vertex, support } => {
                if !instance.contains(*vertex) {
                    return Err(bad(format!("unknown vertex {vertex}")));
                }
                let mut seen = std::collections::BTreeSet::new();
                for e in support {
                    if !instance.has_edge(*e) {
                        return Err(bad(format!("edge {e} is not in the instance")));
                    }
                    if !e.is_incident(*vertex) {
                        return Err(bad(format!("edge {e} is not incident with {vertex}")));
                    }
                    if !seen.insert(*e) {
                        return Err(bad(format!("edge {e} repeated")));
                    }
                    *agg.entry(*e).or_insert_with(Rational::zero) += Rational::one();
                }
                agg_rhs += int(2);
            }
            Member::Sec { set } => {
                if set.is_empty() {
                    return Err(bad("empty set".into()));
                }
                if set.len() >= n {
                    return Err(bad(format!("set of size {} is not proper", set.len())));
                }
                if let Some(v) = set.iter().find(|v| !instance.contains(**v)) {
                    return Err(bad(format!("unknown vertex {v}")));
                }
                for e in instance.edges() {
                    if set.contains(&e.class1_end()) && set.contains(&e.class2_end()) {
                        *agg.entry(*e).or_insert_with(Rational::zero) += Rational::one();
                    }
                }
                agg_rhs += int(set.len() as i64 - 1);
            }
        }
    }

    let mut surplus = BTreeMap::new();
    let mut witness = None;
    let edges: std::collections::BTreeSet<Edge> = agg.keys().chain(target.coeffs.keys()).copied().collect();
    for e in edges {
        let covered = agg.get(&e).cloned().unwrap_or_else(Rational::zero);
        let required = target.coeff(e);
        let d = &covered - &required;
        if d.is_negative() && witness.is_none() {
            witness = Some(Witness::Edge { edge: e, required, covered });
        }
        surplus.insert(e, d);
    }
    let slack = &target.rhs - &agg_rhs;
    if witness.is_none() && slack.is_negative() {
        witness = Some(Witness::Rhs { aggregate: agg_rhs.clone(), target: target.rhs.clone() });
    }
    Ok(CertificateReport {
        dominates: witness.is_none(),
        slack,
        aggregate_rhs: agg_rhs,
        target_rhs: target.rhs,
        surplus,
        witness,
    })
}

/// Aggregate rhs of the shared construction in both orientations, the
/// quantities behind the parity argument for single-class combs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAudit {
    pub as_given: Rational,
    pub swapped: Rational,
    pub target: Rational,
}

impl ParityAudit {
    /// `2 (R - target)` is an even integer in both orientations.
    pub fn doubled_gaps_even(&self) -> bool {
        [&self.as_given, &self.swapped].into_iter().all(|r| {
            let g = (r - &self.target) * int(2);
            g.is_integer() && g.numer() % 2 == 0.into()
        })
    }

    /// `R_A + R_B <= 2 target + 1`; with integral gaps this forces
    /// `min(R_A, R_B) <= target`.
    pub fn sum_bound(&self) -> bool {
        &self.as_given + &self.swapped <= &self.target * int(2) + int(1)
    }

    pub fn some_orientation_dominates(&self) -> bool {
        self.as_given <= self.target || self.swapped <= self.target
    }
}

pub fn parity_audit(instance: &BipartiteInstance, comb: &Comb) -> Result<ParityAudit> {
    let a = build_oriented(instance, comb, Orientation::AsGiven, Builder::T2)?;
    let b = build_oriented(instance, comb, Orientation::Swapped, Builder::T2)?;
    Ok(ParityAudit { as_given: a.aggregate_rhs(), swapped: b.aggregate_rhs(), target: comb.rhs() })
}
