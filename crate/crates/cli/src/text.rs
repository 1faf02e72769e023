//! Plain-text renderings of command reports.

use std::fmt::Write;

use bptsp_core::comb::IntersectionPattern;
use bptsp_core::experiments::{Outcome, PaperTables, SearchReport};
use bptsp_core::graph::approx;
use bptsp_core::{
    format_rational, BipartiteInstance, Certificate, CertificateReport, CombClass, FacetReport, FeasibilityReport,
    ImpliedReport, Implication, LinearInequality, Rational, Witness,
};

fn r(x: &Rational) -> String {
    let exact = format_rational(x);
    if x.is_integer() {
        exact
    } else {
        format!("{exact} (~{:.4})", approx(x))
    }
}

pub fn verify_point(rep: &FeasibilityReport, inst: &BipartiteInstance) -> String {
    let mut s = String::new();
    let verdict = if rep.feasible { "feasible" } else { "infeasible" };
    writeln!(s, "{verdict}: {} constraints checked, {} violated", rep.checked, rep.violations.len()).unwrap();
    for v in &rep.violations {
        writeln!(s, "  {}  (lhs = {})", v.inequality.describe(inst), r(&v.value)).unwrap();
    }
    s
}

pub fn classify(class: &CombClass, patterns: &[IntersectionPattern]) -> String {
    let mut s = String::new();
    let matched: Vec<String> = class.matched().iter().map(|h| h.to_string()).collect();
    if matched.is_empty() {
        writeln!(s, "covered by: none").unwrap();
    } else {
        writeln!(s, "covered by: {}", matched.join(", ")).unwrap();
    }
    for p in patterns {
        writeln!(s, "{}: p = {}, q = {}, s = {:?}, r = {:?}, w = {}, y = {}", p.orientation, p.p, p.q, p.s, p.r, p.w, p.y)
            .unwrap();
    }
    for n in &class.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

pub fn certificate(inst: &BipartiteInstance, cert: &Certificate, rep: &CertificateReport) -> String {
    let mut s = String::new();
    writeln!(s, "builder {} ({}), {} members", cert.builder, cert.orientation, cert.members.len()).unwrap();
    for m in &cert.members {
        writeln!(s, "  {}", m.member.inequality(inst).describe(inst)).unwrap();
    }
    writeln!(s, "aggregate rhs {} vs comb rhs {}, slack {}", r(&rep.aggregate_rhs), r(&rep.target_rhs), r(&rep.slack))
        .unwrap();
    match &rep.witness {
        None => writeln!(s, "dominates: yes").unwrap(),
        Some(Witness::Edge { edge, required, covered }) => writeln!(
            s,
            "dominates: no, edge {} covered {} times, needs {}",
            inst.edge_label(*edge),
            r(covered),
            r(required)
        )
        .unwrap(),
        Some(Witness::Rhs { aggregate, target }) => {
            writeln!(s, "dominates: no, aggregate rhs {} exceeds {}", r(aggregate), r(target)).unwrap()
        }
    }
    s
}

pub fn implied(inst: &BipartiteInstance, target: &LinearInequality, rep: &ImpliedReport) -> String {
    let mut s = String::new();
    match &rep.outcome {
        Implication::Implied { optimum, dual } => {
            writeln!(s, "implied: max lhs = {} <= {}", r(optimum), r(&target.rhs)).unwrap();
            writeln!(s, "dual certificate ({} terms):", dual.terms.len()).unwrap();
            for (ineq, y) in &dual.terms {
                writeln!(s, "  {} * [{}]", r(y), ineq.describe(inst)).unwrap();
            }
        }
        Implication::Violated { optimum, witness } => {
            writeln!(s, "violated: max lhs = {} > {}", r(optimum), r(&target.rhs)).unwrap();
            writeln!(s, "witness point:").unwrap();
            for (e, w) in witness.iter() {
                writeln!(s, "  {} = {}", inst.edge_label(*e), format_rational(w)).unwrap();
            }
        }
        Implication::RelaxationInfeasible => writeln!(s, "relaxation is empty; holds vacuously").unwrap(),
    }
    writeln!(s, "{} LP solve(s), {} constraint rows", rep.rounds, rep.constraints).unwrap();
    s
}

pub fn facet(rep: &FacetReport, certified: bool) -> String {
    let mut s = String::new();
    writeln!(s, "verdict: {:?}", rep.verdict).unwrap();
    writeln!(s, "tours: {} ({} tight, {} violating)", rep.tour_count, rep.tight_tour_count, rep.violating_tours)
        .unwrap();
    let face = rep.tight_face_dim.map_or("none".to_string(), |d| d.to_string());
    writeln!(s, "polytope dimension {}, tight face dimension {face}", rep.polytope_dim).unwrap();
    writeln!(s, "certified by a builder: {}", if certified { "yes" } else { "no" }).unwrap();
    s
}

pub fn paper_tables(rep: &PaperTables) -> String {
    let mut s = String::new();
    for t in &rep.tables {
        let status = if t.reproduced() { "reproduced" } else { "MISMATCH" };
        writeln!(s, "{}: {status}", t.name).unwrap();
        writeln!(
            s,
            "  point {} ({} constraints checked)",
            if t.feasible { "feasible" } else { "infeasible" },
            t.constraints_checked
        )
        .unwrap();
        let teeth: Vec<String> = t.teeth_weights.iter().map(format_rational).collect();
        writeln!(s, "  x(H) = {}, x(T) = [{}]", r(&t.hand_weight), teeth.join(", ")).unwrap();
        writeln!(s, "  lhs {} vs rhs {}, violation {}", r(&t.lhs), r(&t.rhs), r(&t.excess())).unwrap();
        let holds: Vec<String> = t
            .class
            .theorem1_condition
            .iter()
            .map(|c| format!("{} {}", c.orientation, if c.holds { "holds" } else { "fails" }))
            .collect();
        writeln!(s, "  side condition: {}", holds.join(", ")).unwrap();
        for m in &t.mismatches {
            writeln!(s, "  mismatch: {m}").unwrap();
        }
    }
    for n in &rep.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

pub fn search(rep: &SearchReport) -> String {
    let mut s = String::new();
    let c = &rep.config;
    writeln!(s, "K_{{{},{}}}, target {}, seed {}, {} samples", c.n1, c.n2, c.target, c.seed, c.samples).unwrap();
    let m = &rep.summary;
    writeln!(
        s,
        "certified {}, certificate failures {}, implied {}, violated {}, no comb {}",
        m.certified, m.certificate_failed, m.implied, m.violated, m.no_comb
    )
    .unwrap();
    for f in &rep.findings {
        if let Outcome::Violated { optimum, rhs, .. } = &f.outcome {
            let comb = f.comb.as_ref().expect("violations come with a comb");
            writeln!(s, "  #{}: hand {:?}, teeth {:?}: max lhs {optimum} > {rhs}", f.index, comb.hand, comb.teeth)
                .unwrap();
        }
    }
    for f in rep.contradictions() {
        writeln!(s, "  CONTRADICTION at #{}: {:?}", f.index, f.outcome).unwrap();
    }
    s
}
