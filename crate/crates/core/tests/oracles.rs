//! Tour enumeration, polytope dimension and the LP checked against
//! independent brute-force computations.

use std::collections::{BTreeMap, BTreeSet};

use bptsp_core::constraints::{degree_inequality, sec_inequality, upper_bound};
use bptsp_core::experiments::{run_search, Outcome, SearchConfig};
use bptsp_core::gen::CombTarget;
use bptsp_core::graph::{int, rat};
use bptsp_core::lp::maximize_over_relaxation;
use bptsp_core::{
    check_point, comb_inequality, enumerate_tours, facet_test, golden, is_implied, polytope_dimension,
    BipartiteInstance, DegreeMode, Edge, FacetVerdict, Implication, ImpliedOptions, InequalityKind,
    LinearInequality, Provenance, Rational, Relation, SecOptions, VertexId,
};

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Every alternating Hamiltonian cycle of `K_{n,n}` as an edge set, found by
/// interleaving all orderings of both classes.
fn brute_force_tours(n: usize) -> BTreeSet<BTreeSet<Edge>> {
    let idx: Vec<usize> = (0..n).collect();
    let mut out = BTreeSet::new();
    for a in permutations(&idx) {
        for b in permutations(&idx) {
            let mut edges = BTreeSet::new();
            for k in 0..n {
                edges.insert(Edge::between(a[k], b[k]));
                edges.insert(Edge::between(a[(k + 1) % n], b[k]));
            }
            out.insert(edges);
        }
    }
    out
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

#[test]
fn tour_sets_match_brute_force() {
    for n in 2..=4 {
        let inst = BipartiteInstance::complete(n, n);
        let listed: Vec<BTreeSet<Edge>> = enumerate_tours(&inst).unwrap().map(|t| t.edges).collect();
        let unique: BTreeSet<_> = listed.iter().cloned().collect();
        assert_eq!(unique.len(), listed.len(), "duplicate tour at n = {n}");
        assert_eq!(unique, brute_force_tours(n), "n = {n}");
    }
}

#[test]
fn tour_counts_follow_the_closed_form() {
    for n in 2..=5u64 {
        let inst = BipartiteInstance::complete(n as usize, n as usize);
        let expected = factorial(n) * factorial(n - 1) / 2;
        assert_eq!(enumerate_tours(&inst).unwrap().count() as u64, expected, "n = {n}");
    }
}

#[test]
fn tours_are_hamiltonian_cycles() {
    for n in 2..=4 {
        let inst = BipartiteInstance::complete(n, n);
        for t in enumerate_tours(&inst).unwrap() {
            assert_eq!(t.edges.len(), 2 * n);
            assert_eq!(t.sequence.len(), 2 * n);
            assert_eq!(t.sequence[0], VertexId::class1(0));
            let distinct: BTreeSet<_> = t.sequence.iter().collect();
            assert_eq!(distinct.len(), 2 * n);
            for k in 0..2 * n {
                let e = Edge::new(t.sequence[k], t.sequence[(k + 1) % (2 * n)]).unwrap();
                assert!(t.edges.contains(&e));
            }
            for v in inst.vertices() {
                assert_eq!(t.edges.iter().filter(|e| e.is_incident(v)).count(), 2);
            }
        }
    }
}

#[test]
fn tours_satisfy_the_relaxation() {
    for n in 2..=4 {
        let inst = BipartiteInstance::complete(n, n);
        for t in enumerate_tours(&inst).unwrap() {
            for mode in [DegreeMode::Le, DegreeMode::Eq] {
                let rep = check_point(&inst, &t.as_point(), mode, &SecOptions::default()).unwrap();
                assert!(rep.feasible, "{:?} in {mode:?}", t.sequence);
            }
        }
    }
}

#[test]
fn tours_respect_missing_edges() {
    let labels = |p: &str| (0..3).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let kept: Vec<Edge> = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)].map(|(i, j)| Edge::between(i, j)).to_vec();
    let inst = BipartiteInstance::with_labels(labels("a"), labels("b"), Some(kept)).unwrap();
    let tours: Vec<_> = enumerate_tours(&inst).unwrap().collect();
    assert_eq!(tours.len(), 1);
    assert!(tours[0].edges.iter().all(|e| inst.has_edge(*e)));
}

#[test]
fn polytope_dimensions() {
    assert_eq!(polytope_dimension(&BipartiteInstance::complete(2, 2)).unwrap(), 0);
    // Beyond n = 2 the hull spans the degree-equation subspace: n^2 - (2n - 1).
    for n in 3..=5 {
        let dim = polytope_dimension(&BipartiteInstance::complete(n, n)).unwrap();
        assert_eq!(dim, (n - 1) * (n - 1), "n = {n}");
    }
}

fn check_report_invariants(inst: &BipartiteInstance, ineq: &LinearInequality) -> FacetVerdict {
    let rep = facet_test(inst, ineq).unwrap();
    assert!(rep.tight_tour_count + rep.violating_tours <= rep.tour_count);
    if let Some(d) = rep.tight_face_dim {
        assert!(d <= rep.polytope_dim);
        assert!(rep.tight_tour_count > 0);
    }
    match rep.verdict {
        FacetVerdict::NotValid => assert!(rep.violating_tours > 0),
        FacetVerdict::NotSupporting => assert_eq!(rep.tight_tour_count, 0),
        FacetVerdict::Facet => assert_eq!(rep.tight_face_dim, Some(rep.polytope_dim - 1)),
        FacetVerdict::SupportingNonFacet => assert!(rep.tight_face_dim.unwrap() + 1 != rep.polytope_dim),
    }
    rep.verdict
}

#[test]
fn facet_verdicts() {
    let inst = BipartiteInstance::complete(4, 4);
    let trivial = LinearInequality {
        kind: InequalityKind::Aggregate,
        coeffs: BTreeMap::new(),
        rhs: int(1),
        provenance: Provenance::Derived("0 <= 1".into()),
    };
    assert_eq!(check_report_invariants(&inst, &trivial), FacetVerdict::NotSupporting);

    // Every tour uses two edges at each vertex, so the degree face is the whole polytope.
    let deg = degree_inequality(&inst, VertexId::class1(0), DegreeMode::Le);
    let rep = facet_test(&inst, &deg).unwrap();
    assert_eq!(rep.tight_tour_count, rep.tour_count);
    assert_eq!(rep.tight_face_dim, Some(rep.polytope_dim));

    let mut cut = upper_bound(Edge::between(0, 0));
    cut.rhs = int(0);
    assert_eq!(check_report_invariants(&inst, &cut), FacetVerdict::NotValid);

    let sec = sec_inequality(&inst, &[VertexId::class1(0), VertexId::class2(0), VertexId::class1(1)].into());
    assert_ne!(check_report_invariants(&inst, &sec), FacetVerdict::NotValid);
    assert_eq!(sec.relation(), Relation::Le);
}

#[test]
fn k22_lp_optimum_is_four() {
    let inst = BipartiteInstance::complete(2, 2);
    let all: BTreeMap<Edge, Rational> = inst.edges().iter().map(|e| (*e, int(1))).collect();
    for lazy in [false, true] {
        let opts = ImpliedOptions { lazy, ..ImpliedOptions::default() };
        let (sol, _, _) = maximize_over_relaxation(&inst, &all, &opts).unwrap();
        assert_eq!(sol.objective_value, Some(int(4)));
    }
}

#[test]
fn table1_comb_is_not_implied() {
    let ex = golden::table1();
    let target = comb_inequality(&ex.instance, &ex.comb).unwrap();
    for lazy in [false, true] {
        let opts = ImpliedOptions { lazy, ..ImpliedOptions::default() };
        let rep = is_implied(&ex.instance, &target, &opts).unwrap();
        let Implication::Violated { optimum, witness } = rep.outcome else { panic!("{:?}", rep.outcome) };
        assert!(optimum >= rat(15, 2));
        assert_eq!(target.lhs(&witness), optimum);
        let feas = check_point(&ex.instance, &witness, DegreeMode::Le, &SecOptions::default()).unwrap();
        assert!(feas.feasible);
    }
}

#[test]
fn lemma1_search_is_fully_certified() {
    let cfg = SearchConfig { seed: 3, n1: 4, n2: 4, samples: 100, target: CombTarget::Lemma1, ..SearchConfig::default() };
    let rep = run_search(&cfg).unwrap();
    assert_eq!(rep.summary.certified, 100);
    assert!(rep.contradictions().is_empty());
}

#[test]
fn table1_like_search_finds_violated_combs() {
    let cfg =
        SearchConfig { seed: 1, n1: 4, n2: 4, samples: 40, target: CombTarget::Table1Like, ..SearchConfig::default() };
    let rep = run_search(&cfg).unwrap();
    assert!(rep.summary.violated > 0, "{:?}", rep.summary);
    assert!(rep.findings.iter().all(|f| !matches!(f.outcome, Outcome::Certified { .. })));
    assert!(rep.contradictions().is_empty());
}

#[test]
fn search_is_deterministic() {
    let cfg = SearchConfig { seed: 42, n1: 4, n2: 5, samples: 30, target: CombTarget::Any, ..SearchConfig::default() };
    assert_eq!(run_search(&cfg).unwrap(), run_search(&cfg).unwrap());
    let other = SearchConfig { seed: 43, ..cfg.clone() };
    assert_ne!(run_search(&cfg).unwrap().findings, run_search(&other).unwrap().findings);
}
