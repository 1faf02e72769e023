//! Exact tools for comb inequalities on the bipartite traveling salesman
//! polytope: relaxation membership, comb classification, dominance
//! certificates, an exact rational LP, and tour enumeration.

pub mod certificate;
pub mod comb;
pub mod constraints;
pub mod error;
pub mod experiments;
pub mod gen;
pub mod golden;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod tours;

pub use certificate::{
    build, build_with, parity_audit, verify, Builder, BuilderChoice, Certificate, CertificateMember,
    CertificateReport, Member, Witness,
};
pub use comb::{
    classify, comb_inequality, extract_pattern, pattern_for, validate_comb, Comb, CombClass, CombViolation,
    Hypothesis, IntersectionPattern, Orientation,
};
pub use constraints::{
    check_point, gen_degree, gen_secs, DegreeMode, FeasibilityReport, InequalityKind, LinearInequality, Provenance,
    Relation, SecOptions, Violation,
};
pub use error::{Error, Result};
pub use graph::{
    format_rational, parse_rational, BipartiteInstance, Class, Edge, FractionalPoint, Rational, VertexId, VertexSet,
};
pub use lp::{is_implied, solve, Implication, ImpliedOptions, ImpliedReport, LpProblem, LpSolution, LpStatus};
pub use tours::{enumerate_tours, facet_test, polytope_dimension, FacetReport, FacetVerdict, Tour};
