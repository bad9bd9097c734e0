//! Group oracles: one capability-tagged interface over concrete backends.
//!
//! Elements are canonical values, so `==` on [`Elem`] is equality in the group
//! that produced them. Elements of different oracles must not be mixed.

mod abelian;
mod finite;
mod free;
pub mod lattice;
mod mono;

use std::fmt;
use std::sync::Arc;

use bitflags::bitflags;

use crate::error::{Error, Result};
use crate::words::{GeneratorId, Scope, Word};

pub use abelian::FreeAbelianGroup;
pub use finite::FiniteGroup;
pub use free::FreeGroup;
pub use mono::Monomorphism;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Index into a multiplication table.
    Table(usize),
    /// Integer coordinate vector.
    Lattice(Vec<i64>),
    /// Freely reduced word, letters `±(i+1)`.
    Free(Vec<i32>),
    /// Closed reduced path `g0 a1 g1 ... an gn` in a graph of groups.
    Path(Box<Elem>, Vec<(usize, Elem)>),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Table(i) => write!(f, "#{i}"),
            Elem::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Elem::Free(w) => {
                if w.is_empty() {
                    return write!(f, "eps");
                }
                let parts: Vec<String> = w
                    .iter()
                    .map(|&l| if l > 0 { format!("x{}", l - 1) } else { format!("x{}^-1", -l - 1) })
                    .collect();
                write!(f, "{}", parts.join(" "))
            }
            Elem::Path(g0, steps) => {
                write!(f, "[{g0}")?;
                for (a, g) in steps {
                    write!(f, " >{a} {g}")?;
                }
                write!(f, "]")
            }
        }
    }
}

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub struct Capability: u16 {
        const ENUMERATE = 1;
        const SUBGROUP_MEMBERSHIP = 1 << 1;
        const TRANSVERSAL = 1 << 2;
        const CONJUGACY = 1 << 3;
        const CONJUGATORS_INTO_SUBGROUP = 1 << 4;
        const CENTRALIZER_GENS = 1 << 5;
        const CENTER_GENS = 1 << 6;
        const OUTER_ORDER = 1 << 7;
    }
}

impl Capability {
    /// Enumeration decides everything else by exhaustion.
    pub fn normalized(self) -> Capability {
        if self.contains(Capability::ENUMERATE) {
            Capability::all()
        } else {
            self
        }
    }
}

/// Expression `Π gens[i]^k` over the generators of a subgroup.
pub type Witness = Vec<(usize, i64)>;

#[derive(Debug, Clone)]
pub struct Subgroup {
    /// Generators in the order given at construction; witnesses index into it.
    pub gens: Vec<Elem>,
    pub(crate) kind: SubKind,
}

#[derive(Debug, Clone)]
pub(crate) enum SubKind {
    /// Sorted members with a witness each.
    Finite(Vec<(Elem, Witness)>),
    Lattice(lattice::Echelon),
    /// `⟨w⟩` with `w = u r u⁻¹`, `r` cyclically reduced.
    Cyclic { u: Vec<i32>, r: Vec<i32> },
    /// Subgroup of the vertex group at `vertex`, seen inside a fundamental group.
    Vertex { vertex: usize, inner: Box<Subgroup> },
}

impl Subgroup {
    /// Members when the subgroup is known to be finite.
    pub fn finite_elements(&self) -> Option<Vec<Elem>> {
        match &self.kind {
            SubKind::Finite(m) => Some(m.iter().map(|(e, _)| e.clone()).collect()),
            SubKind::Lattice(e) if e.rank() == 0 => Some(vec![Elem::Lattice(vec![0; e.dim])]),
            SubKind::Cyclic { r, .. } if r.is_empty() => Some(vec![Elem::Free(Vec::new())]),
            SubKind::Vertex { .. } => None,
            _ => None,
        }
    }

    pub fn vertex(&self) -> Option<usize> {
        match &self.kind {
            SubKind::Vertex { vertex, .. } => Some(*vertex),
            _ => None,
        }
    }
}

/// All solutions of `g = h c h⁻¹` with `c` in a subgroup `H`.
#[derive(Debug, Clone, Default)]
pub struct ConjugatorSet {
    /// One `(h, c)` per reachable `c`; every other conjugator for that `c` lies in `Z(g)·h`.
    pub pairs: Vec<(Elem, Elem)>,
    pub centralizer: Vec<Elem>,
    /// Whether `pairs` lists every reachable `c`.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OuterOrder {
    /// `φⁿ(g) = a0 g a0⁻¹` for every `g`, with `n` minimal.
    Finite { n: usize, a0: Elem },
    Infinite,
    Unknown(String),
}

pub trait GroupOracle: Send + Sync + fmt::Debug {
    fn describe(&self) -> String;
    fn capabilities(&self) -> Capability;
    fn identity(&self) -> Elem;
    /// A generating set; letters with index `i` need not refer to it.
    fn generators(&self) -> Vec<Elem>;
    fn is_member(&self, g: &Elem) -> bool;
    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem>;
    fn inv(&self, a: &Elem) -> Result<Elem>;
    /// Element named by a single positive letter.
    fn letter(&self, gen: &GeneratorId) -> Result<Elem>;
    fn to_word(&self, g: &Elem, scope: Scope) -> Result<Word>;
    fn subgroup(&self, gens: &[Elem]) -> Result<Subgroup>;
    fn subgroup_contains(&self, h: &Subgroup, g: &Elem) -> Result<Option<Witness>>;
    /// `g = rep·h` with `h ∈ H` and `rep` the canonical representative of `gH`.
    fn decompose(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)>;

    fn is_abelian(&self) -> bool {
        false
    }

    fn is_trivial_group(&self) -> bool {
        self.generators().iter().all(|g| *g == self.identity())
    }

    fn eval_word(&self, w: &Word) -> Result<Elem> {
        let mut acc = self.identity();
        for l in &w.letters {
            let g = self.letter(&l.gen)?;
            let g = if l.exp < 0 { self.inv(&g)? } else { g };
            acc = self.mul(&acc, &g)?;
        }
        Ok(acc)
    }

    fn conjugators_into(&self, _g: &Elem, _h: &Subgroup) -> Result<ConjugatorSet> {
        Err(Error::capability(self.describe(), "CONJUGATORS_INTO_SUBGROUP"))
    }

    /// Some `h` with `u = h v h⁻¹`.
    fn conjugacy_search(&self, _u: &Elem, _v: &Elem) -> Result<Option<Elem>> {
        Err(Error::capability(self.describe(), "CONJUGACY"))
    }

    fn centralizer_gens(&self, _g: &Elem) -> Result<Vec<Elem>> {
        Err(Error::capability(self.describe(), "CENTRALIZER_GENS"))
    }

    fn center_gens(&self) -> Result<Vec<Elem>> {
        Err(Error::capability(self.describe(), "CENTER_GENS"))
    }

    fn elements(&self) -> Option<Vec<Elem>> {
        None
    }

    /// Order in `Out` of the automorphism sending `generators()[i]` to `images[i]`.
    fn outer_order(&self, _images: &[Elem], _bound: usize) -> Result<OuterOrder> {
        Err(Error::capability(self.describe(), "OUTER_ORDER"))
    }

    fn intersect(&self, _a: &Subgroup, _b: &Subgroup) -> Result<Subgroup> {
        Err(Error::capability(self.describe(), "SUBGROUP_INTERSECTION"))
    }
}

pub type Oracle = Arc<dyn GroupOracle>;

/// Derived operations available on every oracle.
pub trait GroupExt {
    fn pow(&self, g: &Elem, k: i64) -> Result<Elem>;
    fn conj(&self, h: &Elem, g: &Elem) -> Result<Elem>;
    fn commutes(&self, a: &Elem, b: &Elem) -> Result<bool>;
    fn product(&self, items: &[Elem]) -> Result<Elem>;
    fn eval_witness(&self, gens: &[Elem], w: &Witness) -> Result<Elem>;
    fn is_central(&self, g: &Elem) -> Result<bool>;
    /// Canonical representative of the right coset `H g`, with `g = c·rep`.
    fn decompose_right(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)>;
    fn check_member(&self, g: &Elem) -> Result<()>;
}

impl<T: GroupOracle + ?Sized> GroupExt for T {
    fn pow(&self, g: &Elem, k: i64) -> Result<Elem> {
        let mut base = if k < 0 { self.inv(g)? } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    fn conj(&self, h: &Elem, g: &Elem) -> Result<Elem> {
        let hg = self.mul(h, g)?;
        self.mul(&hg, &self.inv(h)?)
    }

    fn commutes(&self, a: &Elem, b: &Elem) -> Result<bool> {
        Ok(self.mul(a, b)? == self.mul(b, a)?)
    }

    fn product(&self, items: &[Elem]) -> Result<Elem> {
        let mut acc = self.identity();
        for x in items {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    fn eval_witness(&self, gens: &[Elem], w: &Witness) -> Result<Elem> {
        let mut acc = self.identity();
        for &(i, k) in w {
            let g = gens
                .get(i)
                .ok_or_else(|| Error::Verification(format!("witness index {i} out of range")))?;
            acc = self.mul(&acc, &self.pow(g, k)?)?;
        }
        Ok(acc)
    }

    fn is_central(&self, g: &Elem) -> Result<bool> {
        for x in self.generators() {
            if !self.commutes(g, &x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn decompose_right(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)> {
        let (rep, c) = self.decompose(h, &self.inv(g)?)?;
        Ok((self.inv(&c)?, self.inv(&rep)?))
    }

    fn check_member(&self, g: &Elem) -> Result<()> {
        if self.is_member(g) {
            Ok(())
        } else {
            Err(Error::Foreign { elem: g.to_string(), group: self.describe() })
        }
    }
}

/// Elements of word length at most `radius`, in BFS order, capped at `cap`.
/// The flag is true when the list is the whole group.
pub fn ball(oracle: &dyn GroupOracle, radius: usize, cap: usize) -> Result<(Vec<Elem>, bool)> {
    if let Some(all) = oracle.elements() {
        return Ok((all, true));
    }
    let mut steps = Vec::new();
    for g in oracle.generators() {
        steps.push(oracle.inv(&g)?);
        steps.push(g);
    }
    let mut seen: std::collections::BTreeSet<Elem> = std::iter::once(oracle.identity()).collect();
    let mut out = vec![oracle.identity()];
    let mut frontier = out.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &steps {
                let y = oracle.mul(x, s)?;
                if seen.insert(y.clone()) {
                    if out.len() >= cap {
                        return Ok((out, false));
                    }
                    out.push(y.clone());
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return Ok((out, true));
        }
        frontier = next;
    }
    Ok((out, false))
}

/// Greedy generating set of a finite set of elements closed under products.
pub(crate) fn greedy_generators(
    oracle: &dyn GroupOracle,
    members: &[Elem],
) -> Result<Vec<Elem>> {
    let id = oracle.identity();
    let mut gens: Vec<Elem> = Vec::new();
    let mut span: std::collections::BTreeSet<Elem> = std::iter::once(id.clone()).collect();
    for m in members {
        if span.contains(m) {
            continue;
        }
        gens.push(m.clone());
        span = closure(oracle, &gens)?;
    }
    Ok(gens)
}

/// Subgroup generated by `gens`, assumed finite.
pub(crate) fn closure(
    oracle: &dyn GroupOracle,
    gens: &[Elem],
) -> Result<std::collections::BTreeSet<Elem>> {
    let mut seen: std::collections::BTreeSet<Elem> = std::iter::once(oracle.identity()).collect();
    let mut queue = vec![oracle.identity()];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = oracle.mul(&x, g)?;
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    Ok(seen)
}
