//! Fixtures shared by the benchmarks.

use bptsp_core::graph::rat;
use bptsp_core::{BipartiteInstance, Comb, Edge, FractionalPoint, VertexId};

/// Half-integral point on `K_{n,n}`: every vertex `i` carries weight 1/2
/// on its edges to `i` and `i+1 (mod n)` on the other side.
pub fn ring_point(n: usize) -> (BipartiteInstance, FractionalPoint) {
    let inst = BipartiteInstance::complete(n, n);
    let mut p = FractionalPoint::new();
    for i in 0..n {
        p.set(Edge::between(i, i), rat(1, 2));
        p.set(Edge::between(i, (i + 1) % n), rat(1, 2));
    }
    (inst, p)
}

/// A three-tooth comb with one class-1 hand vertex per tooth.
pub fn simple_comb() -> Comb {
    let v1 = VertexId::class1;
    let v2 = VertexId::class2;
    Comb::new(
        [v1(0), v1(1), v1(2)].into(),
        vec![[v1(0), v2(0)].into(), [v1(1), v2(1)].into(), [v1(2), v2(2)].into()],
    )
}
