//! Small graphs of groups used throughout the tests, the acceptance suite and
//! the CLI examples. Each comes with its default decomposition.

use std::sync::Arc;

use crate::backends::{Elem, FiniteGroup, FreeAbelianGroup, Oracle};
use crate::error::Result;
use crate::gog::{Decomposition, EdgeImages, EdgeSpec, GraphOfGroups, VertexGroup};

pub type Fixture = (Arc<GraphOfGroups>, Decomposition);

fn finish(g: GraphOfGroups) -> Result<Fixture> {
    let dec = Decomposition::default_for(&g.graph)?;
    Ok((Arc::new(g), dec))
}

fn cyclic(n: usize) -> Oracle {
    Arc::new(FiniteGroup::cyclic(n))
}

fn integers() -> Oracle {
    Arc::new(FreeAbelianGroup::new(1).expect("rank 1"))
}

fn edge(name: &str, from: usize, to: usize, group: Oracle, domain: Vec<Elem>, minus: Vec<Elem>, plus: Vec<Elem>) -> EdgeSpec {
    EdgeSpec {
        name: name.into(),
        from,
        to,
        group: Some(group),
        domain,
        minus: EdgeImages::Elems(minus),
        plus: EdgeImages::Elems(plus),
    }
}

/// `⟨x⟩ *_{x² = y³} ⟨y⟩`.
pub fn trefoil() -> Result<Fixture> {
    let l = |k| Elem::Lattice(vec![k]);
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("A", integers()), VertexGroup::concrete("B", integers())],
        vec![edge("c", 0, 1, integers(), vec![l(1)], vec![l(2)], vec![l(3)])],
    )?)
}

/// One loop on `ℤ = ⟨a⟩` with `t⁻¹ a t = a⁻¹`.
pub fn klein() -> Result<Fixture> {
    let l = |k| Elem::Lattice(vec![k]);
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("A", integers())],
        vec![edge("t", 0, 0, integers(), vec![l(1)], vec![l(1)], vec![l(-1)])],
    )?)
}

/// One loop on `ℤ/6 = ⟨a⟩` with `C = ⟨a²⟩` and `φ(a²) = a⁴`.
pub fn z6() -> Result<Fixture> {
    let t = Elem::Table;
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("A", cyclic(6))],
        vec![edge("t", 0, 0, cyclic(3), vec![t(1)], vec![t(2)], vec![t(4)])],
    )?)
}

/// `ℤ/4 *_{ℤ/2} ℤ/6`.
pub fn sl2() -> Result<Fixture> {
    let t = Elem::Table;
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("A", cyclic(4)), VertexGroup::concrete("B", cyclic(6))],
        vec![edge("c", 0, 1, cyclic(2), vec![t(1)], vec![t(2)], vec![t(3)])],
    )?)
}

/// Index of the transposition `(12)` in [`FiniteGroup::symmetric`]`(3)`.
pub const S3_TRANSPOSITION_12: usize = 2;

/// Two copies of `S₃` glued along `⟨(12)⟩`.
pub fn s3dbl() -> Result<Fixture> {
    let s3: Oracle = Arc::new(FiniteGroup::symmetric(3));
    let h = Elem::Table(S3_TRANSPOSITION_12);
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("s", s3.clone()), VertexGroup::concrete("sp", s3)],
        vec![edge("a1", 0, 1, cyclic(2), vec![Elem::Table(1)], vec![h.clone()], vec![h])],
    )?)
}

/// Two copies of `ℤ/4` glued along `⟨2⟩`.
pub fn z4dbl() -> Result<Fixture> {
    let t = Elem::Table;
    let z4 = cyclic(4);
    finish(GraphOfGroups::new(
        vec![VertexGroup::concrete("s", z4.clone()), VertexGroup::concrete("sp", z4)],
        vec![edge("a1", 0, 1, cyclic(2), vec![t(1)], vec![t(2)], vec![t(2)])],
    )?)
}
