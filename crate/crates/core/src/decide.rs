//! Graph-level deciders: successive cyclic reduction, conjugacy, commuting
//! pairs, centers, centralizers and roots in graphs without circuits, and the
//! double of a group along subgroups.
//!
//! Words are over the canonical presentation: vertex letters and one stable
//! letter per non-tree edge. The fundamental group of any connected subgraph
//! sits inside the whole one by `g ↦ γ_b g γ_b⁻¹`, so a word means the same
//! element at every level of the recursion.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::amalgam::{self, AmalgamCommute, AmalgamPresentation, Side};
use crate::backends::{ball, Elem, FiniteGroup, FreeAbelianGroup, GroupExt, GroupOracle, Oracle};
use crate::error::{Error, Result, Verdict};
use crate::gog::{
    edge_of, make_minimal, Decomposition, EdgeImages, EdgeSpec, GraphOfGroups, Pi1Oracle, Split, VertexGroup,
};
use crate::hnn::{self, HnnCommute, HnnPresentation};
use crate::trajets::{self, find_trajet, is_sans_circuit, soften, tree_trajet, SansCircuit, Trajet};
use crate::words::{Scope, Word};

pub use crate::trajets::DEFAULT_DEPTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// Conjugate into the vertex group of this vertex.
    Vertex(usize),
    /// Cyclically reduced of this length (> 1) at the occurring level.
    Long(usize),
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub input: Word,
    /// `input = conjugator · u1 · conjugator⁻¹`.
    pub conjugator: Word,
    pub u1: Word,
    /// Fundamental group of the occurring subgraph.
    pub level: Pi1Oracle,
    /// Edge split at the last level; `None` for a vertex terminal.
    pub split_edge: Option<usize>,
    pub kind: Terminal,
    /// `u1` as a vertex-group element, for a vertex terminal.
    pub vertex_elem: Option<Elem>,
}

impl ReductionTrace {
    pub fn vertices(&self) -> &BTreeSet<usize> {
        self.level.vertex_set()
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        self.level.edge_set()
    }

    fn same_level(&self, other: &ReductionTrace) -> bool {
        self.vertices() == other.vertices() && self.edges() == other.edges() && self.split_edge == other.split_edge
    }
}

/// Splits along the first edge of the order present at the current level,
/// cyclically reduces there, and descends until the element is long or the
/// level is a single vertex.
pub fn successive_cyclic_reduction(full: &Pi1Oracle, dec: &Decomposition, w: &Word) -> Result<ReductionTrace> {
    let target = full.eval_word(w)?;
    let mut cur = full.clone();
    let mut x = w.clone();
    let mut conj = Word::empty();
    let (kind, split_edge) = loop {
        let Some(&e) = dec.order.iter().find(|e| cur.edge_set().contains(e)) else {
            break (Terminal::Vertex(cur.base()), None);
        };
        match cur.decompose_edge(e)? {
            Split::Amalgam(ts) => {
                let (a, b) = (ts.a.clone(), ts.b.clone());
                let am = AmalgamPresentation::new(ts);
                let (x1, h) = am.cyclically_reduce_nf(&am.normal_form(&x)?)?;
                conj = conj.concat(&am.to_word(&h)?).free_reduce();
                if x1.len() > 1 {
                    x = am.to_word(&x1)?;
                    break (Terminal::Long(x1.len()), Some(e));
                }
                let (side, elem) = x1.syllables[0].clone();
                let next = if side == Side::A { a } else { b };
                x = next.to_word(&elem, Scope::Vertex(next.base()))?;
                cur = next;
            }
            Split::Hnn(ls) => {
                let base = ls.base.clone();
                let hp = HnnPresentation::new(ls);
                let (x1, h) = hp.cyclically_reduce_nf(&hp.britton_reduce(&x)?)?;
                conj = conj.concat(&hp.to_word(&h)?).free_reduce();
                if x1.t_length() > 0 {
                    x = hp.to_word(&x1)?;
                    break (Terminal::Long(x1.t_length() + 1), Some(e));
                }
                x = base.to_word(&x1.head, Scope::Vertex(base.base()))?;
                cur = base;
            }
        }
    };
    let vertex_elem = match kind {
        Terminal::Vertex(s) => Some(
            cur.vertex_part(s, &cur.eval_word(&x)?)?
                .ok_or_else(|| Error::Verification("vertex terminal outside its vertex group".into()))?,
        ),
        Terminal::Long(_) => None,
    };
    let back = conj.concat(&x).concat(&conj.invert());
    if full.eval_word(&back)? != target {
        return Err(Error::Verification("reduction trace does not conjugate back to the input".into()));
    }
    Ok(ReductionTrace { input: w.clone(), conjugator: conj, u1: x, level: cur, split_edge, kind, vertex_elem })
}

fn check_conjugator(full: &Pi1Oracle, u: &Word, v: &Word, h: &Word) -> Result<()> {
    let (u, v, h) = (full.eval_word(u)?, full.eval_word(v)?, full.eval_word(h)?);
    if full.conj(&h, &v)? != u {
        return Err(Error::Verification("conjugator does not conjugate v to u".into()));
    }
    Ok(())
}

/// `YES(h)` with `u = h v h⁻¹`. Vertex terminals are compared by trajet
/// search; long terminals at the same level and length by the amalgam or
/// HNN procedure there; anything else is NO.
pub fn is_conjugate_graph(full: &Pi1Oracle, dec: &Decomposition, u: &Word, v: &Word, depth: usize) -> Result<Verdict<Word>> {
    soften(conjugate_inner(full, dec, u, v, depth))
}

fn conjugate_inner(full: &Pi1Oracle, dec: &Decomposition, u: &Word, v: &Word, depth: usize) -> Result<Verdict<Word>> {
    let tu = successive_cyclic_reduction(full, dec, u)?;
    let tv = successive_cyclic_reduction(full, dec, v)?;
    let inner = match (tu.kind, tv.kind) {
        (Terminal::Vertex(s1), Terminal::Vertex(s2)) => {
            let (x, y) = (tu.vertex_elem.as_ref().expect("vertex"), tv.vertex_elem.as_ref().expect("vertex"));
            match find_trajet(full, x, s1, y, s2, depth)? {
                Verdict::Yes(t) => Verdict::Yes(t.label(full.gog(), full.tree())?),
                Verdict::No => Verdict::No,
                Verdict::Unknown(r) => Verdict::Unknown(r),
            }
        }
        (Terminal::Long(l1), Terminal::Long(l2)) if l1 == l2 && tu.same_level(&tv) => {
            let e = tu.split_edge.expect("long terminal has a split edge");
            if tu.level.tree().contains(&e) {
                AmalgamPresentation::along(&tu.level, e)?.is_conjugate(&tu.u1, &tv.u1, amalgam::DEFAULT_DEPTH)
            } else {
                HnnPresentation::along(&tu.level, e)?.is_conjugate(&tu.u1, &tv.u1, hnn::DEFAULT_DEPTH)
            }
        }
        _ => Verdict::No,
    };
    Ok(match inner {
        Verdict::Yes(h) => {
            let w = tu.conjugator.concat(&h).concat(&tv.conjugator.invert()).free_reduce();
            check_conjugator(full, u, v, &w)?;
            Verdict::Yes(w)
        }
        other => other,
    })
}

#[derive(Debug, Clone)]
pub enum CommuteReport {
    /// Both `x` and `y` lie in `conj·G_vertex·conj⁻¹`.
    VertexCoset { conj: Word, vertex: usize, swapped: bool },
    /// `x = conj·x₁·conj⁻¹` with `x₁` in a vertex group, and `y = conj·label·conj⁻¹`
    /// for a circuit at `x₁` (roles exchanged when `swapped`).
    CircuitLabel { conj: Word, trajet: Trajet, swapped: bool },
    /// `x = g h g⁻¹·W^j`, `y = g h' g⁻¹·W^k`, the three factors pairwise commuting.
    CyclicStructure { g: Word, h: Word, h_prime: Word, w: Word, j: i64, k: i64 },
    Unknown(String),
}

/// Classifies a commuting pair following the recursion of the reduction.
pub fn commute_classify_graph(full: &Pi1Oracle, dec: &Decomposition, x: &Word, y: &Word) -> Result<CommuteReport> {
    let (xe, ye) = (full.eval_word(x)?, full.eval_word(y)?);
    if !full.commutes(&xe, &ye)? {
        return Err(Error::NotCommuting);
    }
    let run = || -> Result<CommuteReport> {
        let tx = successive_cyclic_reduction(full, dec, x)?;
        if let Terminal::Vertex(_) = tx.kind {
            return elliptic_report(full, &tx, &ye, false);
        }
        let ty = successive_cyclic_reduction(full, dec, y)?;
        if let Terminal::Vertex(_) = ty.kind {
            return elliptic_report(full, &ty, &xe, true);
        }
        cyclic_report(full, &tx, x, y)
    };
    match run() {
        Err(e @ (Error::Verification(_) | Error::NotCommuting)) => Err(e),
        Err(e) => Ok(CommuteReport::Unknown(e.to_string())),
        ok => ok,
    }
}

/// `tx` ends at a vertex; `other` commutes with its input.
fn elliptic_report(full: &Pi1Oracle, tx: &ReductionTrace, other: &Elem, swapped: bool) -> Result<CommuteReport> {
    let Terminal::Vertex(s) = tx.kind else { unreachable!() };
    let c = full.eval_word(&tx.conjugator)?;
    let y1 = full.conj(&full.inv(&c)?, other)?;
    if full.vertex_part(s, &y1)?.is_some() {
        return Ok(CommuteReport::VertexCoset { conj: tx.conjugator.clone(), vertex: s, swapped });
    }
    let trajet = circuit_from_path(full, s, tx.vertex_elem.as_ref().expect("vertex"), &y1)?;
    let label = full.eval_word(&trajet.label(full.gog(), full.tree())?)?;
    if full.conj(&c, &label)? != *other {
        return Err(Error::Verification("circuit label does not give back the commuting element".into()));
    }
    Ok(CommuteReport::CircuitLabel { conj: tx.conjugator.clone(), trajet, swapped })
}

/// Reads the circuit at `x ∈ G_s` carried by the reduced path of `y`, which
/// commutes with `γ_s x γ_s⁻¹`.
fn circuit_from_path(full: &Pi1Oracle, s: usize, x: &Elem, y: &Elem) -> Result<Trajet> {
    let gog = full.gog();
    let at_s = Pi1Oracle::new(gog.clone(), full.vertex_set().clone(), full.edge_set().clone(), full.tree().clone(), s)?;
    let yp = at_s.eval_word(&full.to_word(y, Scope::Vertex(0))?)?;
    let (g0, steps) = at_s.parts(&yp)?;
    let vo = |v: usize| gog.vertex_oracle(v);
    let mut t = Trajet::trivial(x.clone(), s, g0.clone(), x.clone());
    let mut cur = vo(s)?.conj(&vo(s)?.inv(&g0)?, x)?;
    for (a, g) in &steps {
        let y = gog
            .cross(*a, &cur)?
            .ok_or_else(|| Error::Verification("commuting path leaves an edge group".into()))?;
        let o = vo(gog.terminus(*a))?;
        t.arrows.push(*a);
        t.c_minus.push(cur);
        t.c_plus.push(y.clone());
        t.h.push(g.clone());
        cur = o.conj(&o.inv(g)?, &y)?;
    }
    if cur != *x {
        return Err(Error::Verification("commuting path does not close into a circuit".into()));
    }
    t.verify(gog).map_err(Error::Verification)?;
    Ok(t)
}

fn cyclic_report(full: &Pi1Oracle, tx: &ReductionTrace, x: &Word, y: &Word) -> Result<CommuteReport> {
    let level = &tx.level;
    let c = full.eval_word(&tx.conjugator)?;
    let y1 = full.conj(&full.inv(&c)?, &full.eval_word(y)?)?;
    let y1w = into_level(full, level, &y1)?;
    let e = tx.split_edge.expect("long terminal");
    let (g, h, hp, w, j, k) = if level.tree().contains(&e) {
        let am = AmalgamPresentation::along(level, e)?;
        match am.cyclic_structure(&am.normal_form(&tx.u1)?, &am.normal_form(&y1w)?)? {
            AmalgamCommute::Cyclic { g, h, h_prime, w, j, k } => {
                (am.to_word(&g)?, am.to_word(&h)?, am.to_word(&h_prime)?, am.to_word(&w)?, j, k)
            }
            AmalgamCommute::Unknown(r) => return Ok(CommuteReport::Unknown(r)),
            other => return Ok(CommuteReport::Unknown(format!("unexpected classification {other:?}"))),
        }
    } else {
        let hp = HnnPresentation::along(level, e)?;
        match hp.cyclic_structure(&hp.britton_reduce(&tx.u1)?, &hp.britton_reduce(&y1w)?)? {
            HnnCommute::Cyclic { g, c, c_prime, w, j, k } => {
                (hp.to_word(&g)?, hp.to_word(&c)?, hp.to_word(&c_prime)?, hp.to_word(&w)?, j, k)
            }
            HnnCommute::Unknown(r) => return Ok(CommuteReport::Unknown(r)),
            other => return Ok(CommuteReport::Unknown(format!("unexpected classification {other:?}"))),
        }
    };
    let cw = &tx.conjugator;
    let g = cw.concat(&g).free_reduce();
    let w = cw.concat(&w).concat(&cw.invert()).free_reduce();
    let report = CommuteReport::CyclicStructure { g, h, h_prime: hp, w, j, k };
    check_cyclic(full, &report, x, y)?;
    Ok(report)
}

fn check_cyclic(full: &Pi1Oracle, r: &CommuteReport, x: &Word, y: &Word) -> Result<()> {
    let CommuteReport::CyclicStructure { g, h, h_prime, w, j, k } = r else { return Ok(()) };
    let ev = |w: &Word| full.eval_word(w);
    let (g, w) = (ev(g)?, ev(w)?);
    let a = full.conj(&g, &ev(h)?)?;
    let b = full.conj(&g, &ev(h_prime)?)?;
    let ok = full.mul(&a, &full.pow(&w, *j)?)? == ev(x)?
        && full.mul(&b, &full.pow(&w, *k)?)? == ev(y)?
        && full.commutes(&a, &b)?
        && full.commutes(&a, &w)?
        && full.commutes(&b, &w)?;
    if !ok {
        return Err(Error::Verification("cyclic structure fails its identities".into()));
    }
    Ok(())
}

/// A word for `g` over the letters of `level`, when `g` lies in its image.
fn into_level(full: &Pi1Oracle, level: &Pi1Oracle, g: &Elem) -> Result<Word> {
    let here = Pi1Oracle::new(full.gog().clone(), full.vertex_set().clone(), full.edge_set().clone(), full.tree().clone(), level.base())?;
    let (g0, steps) = here.parts(&here.eval_word(&full.to_word(g, Scope::Vertex(0))?)?)?;
    if steps.iter().any(|(a, _)| !level.edge_set().contains(&edge_of(*a))) {
        return Err(Error::Unsupported("element leaves the occurring subgraph".into()));
    }
    let inside = level.from_parts(&g0, &steps)?;
    level.to_word(&inside, Scope::Vertex(level.base()))
}

/// Generators of the center, as words over the original presentation.
/// The decomposition is made minimal first.
pub fn center_graph(gog: &Arc<GraphOfGroups>, dec: &Decomposition) -> Result<Verdict<Vec<Word>>> {
    let full = Pi1Oracle::full(gog.clone(), dec)?;
    let m = make_minimal(gog, dec)?;
    let mg = Arc::new(m.gog.clone());
    let pm = Pi1Oracle::full(mg.clone(), &m.dec)?;
    let found = match center_minimal(&mg, &pm) {
        Ok(v) => v,
        Err(e @ Error::Verification(_)) => return Err(e),
        Err(e) => Verdict::Unknown(e.to_string()),
    };
    let Verdict::Yes(words) = found else { return Ok(found) };
    let words = words.iter().map(|w| m.untranslate(w)).collect::<Result<Vec<_>>>()?;
    let gens = full.generators();
    for w in &words {
        let z = full.eval_word(w)?;
        for g in &gens {
            if !full.commutes(&z, g)? {
                return Err(Error::Verification(format!("center generator {w} is not central")));
            }
        }
    }
    Ok(Verdict::Yes(words))
}

fn center_minimal(g: &GraphOfGroups, pm: &Pi1Oracle) -> Result<Verdict<Vec<Word>>> {
    let n = g.graph.n_vertices;
    let ne = g.graph.n_edges();
    let word = |x: &Elem| pm.to_word(x, Scope::Vertex(0));
    if n == 1 && ne == 0 {
        let gens = g.vertex_oracle(0)?.center_gens()?;
        return Ok(Verdict::Yes(gens.iter().map(|z| word(&pm.embed(0, z)?)).collect::<Result<_>>()?));
    }
    if n == 1 && ne == 1 {
        let hp = HnnPresentation::along(pm, 0)?;
        return Ok(Verdict::Yes(hp.center()?.iter().map(|z| hp.to_word(z)).collect::<Result<_>>()?));
    }
    if let Some(s0) = (0..n).find(|&v| g.vertices[v].oracle.as_ref().is_some_and(|o| o.elements().is_some())) {
        let o = g.vertex_oracle(s0)?;
        let mut survivors = Vec::new();
        'z: for z in o.elements().expect("finite") {
            if z == o.identity() || !o.is_central(&z)? {
                continue;
            }
            let mut at = vec![None; n];
            for (v, slot) in at.iter_mut().enumerate() {
                let Some(t) = tree_trajet(pm, &z, s0, v)? else { continue 'z };
                if !g.vertex_oracle(v)?.is_central(&t.v)? {
                    continue 'z;
                }
                *slot = Some(t.v);
            }
            for e in 0..ne {
                if pm.tree().contains(&e) {
                    continue;
                }
                let (a, b) = g.graph.edges[e];
                if g.cross(2 * e, at[a].as_ref().expect("set"))? != at[b] {
                    continue 'z;
                }
            }
            survivors.push(z);
        }
        let mut gens: Vec<Elem> = Vec::new();
        let mut span = BTreeSet::from([o.identity()]);
        for z in survivors {
            if !span.contains(&z) {
                gens.push(z);
                span = o.subgroup(&gens)?.finite_elements().map(|v| v.into_iter().collect()).unwrap_or_default();
            }
        }
        return Ok(Verdict::Yes(gens.iter().map(|z| word(&pm.embed(s0, z)?)).collect::<Result<_>>()?));
    }
    if n == 2 && ne == 1 {
        let am = AmalgamPresentation::along(pm, 0)?;
        return Ok(Verdict::Yes(am.center()?.iter().map(|z| am.to_word(z)).collect::<Result<_>>()?));
    }
    Ok(Verdict::Unknown("no finite vertex group to enumerate central candidates from".into()))
}

#[derive(Debug, Clone)]
pub enum CentralizerReport {
    /// `Z(u) = conj·Z_{G_vertex}(u₁)·conj⁻¹`, generated by `gens`.
    Vertex { conj: Word, vertex: usize, gens: Vec<Word> },
    /// `Z(u) = ⟨w⟩`, infinite cyclic, with `u = w^j`.
    Cyclic { w: Word, j: i64 },
    Unknown(String),
}

fn require_sans_circuit(full: &Pi1Oracle) -> Result<Option<String>> {
    match is_sans_circuit(full)? {
        SansCircuit::Yes => Ok(None),
        SansCircuit::No(_) => Err(Error::NotSansCircuit),
        SansCircuit::Unknown(r) => Ok(Some(r)),
    }
}

/// Centralizer of `u` in a graph of groups without circuits.
pub fn centralizer_structure(full: &Pi1Oracle, dec: &Decomposition, u: &Word) -> Result<CentralizerReport> {
    if let Some(r) = require_sans_circuit(full)? {
        return Ok(CentralizerReport::Unknown(r));
    }
    centralizer_certified(full, dec, u)
}

fn centralizer_certified(full: &Pi1Oracle, dec: &Decomposition, u: &Word) -> Result<CentralizerReport> {
    let t = successive_cyclic_reduction(full, dec, u)?;
    let ue = full.eval_word(u)?;
    match t.kind {
        Terminal::Vertex(s) => {
            let o = full.gog().vertex_oracle(s)?;
            let mut gens = Vec::new();
            for z in o.centralizer_gens(t.vertex_elem.as_ref().expect("vertex"))? {
                let zw = full.to_word(&full.embed(s, &z)?, Scope::Vertex(0))?;
                let w = t.conjugator.concat(&zw).concat(&t.conjugator.invert()).free_reduce();
                if !full.commutes(&full.eval_word(&w)?, &ue)? {
                    return Err(Error::Verification("vertex centralizer generator does not commute".into()));
                }
                gens.push(w);
            }
            Ok(CentralizerReport::Vertex { conj: t.conjugator.clone(), vertex: s, gens })
        }
        Terminal::Long(_) => match cyclic_report(full, &t, u, u)? {
            CommuteReport::CyclicStructure { g, h, w, j, .. } => {
                let we = full.eval_word(&w)?;
                let hg = full.conj(&full.eval_word(&g)?, &full.eval_word(&h)?)?;
                if hg != full.identity() || full.pow(&we, j)? != ue {
                    return Ok(CentralizerReport::Unknown("root carries a nontrivial edge factor".into()));
                }
                Ok(CentralizerReport::Cyclic { w, j })
            }
            CommuteReport::Unknown(r) => Ok(CentralizerReport::Unknown(r)),
            other => Err(Error::Verification(format!("long element classified as {other:?}"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootBranch {
    /// `x` and `g` lie in one conjugate of a vertex group.
    SameVertexConjugate,
    /// `x` lies in the infinite cyclic centralizer of `g`.
    CyclicCentralizer,
}

#[derive(Debug, Clone)]
pub struct Root {
    pub x: Word,
    pub n: u32,
    pub branch: RootBranch,
}

#[derive(Debug, Clone, Default)]
pub struct RootsReport {
    pub roots: Vec<Root>,
    pub violations: Vec<String>,
}

/// Roots `x^n = g`, `n ≤ k_max`, among a ball of `radius` and the powers
/// of the cyclic centralizer generator, each checked against the dichotomy.
pub fn roots_report(full: &Pi1Oracle, dec: &Decomposition, g: &Word, k_max: u32, radius: usize) -> Result<RootsReport> {
    if let Some(r) = require_sans_circuit(full)? {
        return Err(Error::Unsupported(format!("circuit search undecided: {r}")));
    }
    let ge = full.eval_word(g)?;
    let cz = centralizer_certified(full, dec, g)?;
    let (mut cands, _) = ball(full, radius, trajets::STATE_CAP)?;
    let mut cyc = None;
    if let CentralizerReport::Cyclic { w, j } = &cz {
        let we = full.eval_word(w)?;
        for m in 1..=j.unsigned_abs() as i64 {
            cands.push(full.pow(&we, m)?);
            cands.push(full.pow(&we, -m)?);
        }
        cyc = Some((we, *j));
    }
    let mut seen = BTreeSet::new();
    let mut out = RootsReport::default();
    for x in cands {
        if !seen.insert(x.clone()) {
            continue;
        }
        for n in 1..=k_max {
            if full.pow(&x, i64::from(n))? != ge {
                continue;
            }
            let xw = full.to_word(&x, Scope::Vertex(0))?;
            let tx = successive_cyclic_reduction(full, dec, &xw)?;
            let branch = match (&tx.kind, &cyc) {
                (Terminal::Vertex(_), None) => Some(RootBranch::SameVertexConjugate),
                (Terminal::Long(_), Some((we, j))) => {
                    let n = i64::from(n);
                    (j % n == 0 && full.pow(we, j / n)? == x).then_some(RootBranch::CyclicCentralizer)
                }
                _ => None,
            };
            match branch {
                Some(branch) => out.roots.push(Root { x: xw, n, branch }),
                None => out.violations.push(format!("root {xw} of order {n} fits neither branch")),
            }
        }
    }
    Ok(out)
}

/// Two copies of `base` glued along `subgroups`; the first edge is the tree.
#[derive(Debug, Clone)]
pub struct DoubleSpec {
    pub base: Oracle,
    pub subgroups: Vec<Vec<Elem>>,
    pub gog: Arc<GraphOfGroups>,
    pub dec: Decomposition,
}

/// Builds the double. Finite bases get finite edge groups cut from the
/// table; infinite ones need free abelian subgroups given by a basis, or
/// cyclic subgroups.
pub fn build_double(name: &str, base: Oracle, subgroups: Vec<Vec<Elem>>) -> Result<DoubleSpec> {
    if subgroups.is_empty() {
        return Err(Error::Invalid(vec!["a double needs at least one subgroup".into()]));
    }
    let mut edges = Vec::new();
    for (i, gens) in subgroups.iter().enumerate() {
        for g in gens {
            base.check_member(g)?;
        }
        let (group, domain, images): (Oracle, Vec<Elem>, Vec<Elem>) = match base.elements() {
            Some(_) => {
                let members = base
                    .subgroup(gens)?
                    .finite_elements()
                    .ok_or_else(|| Error::InvalidSubgroup("finite group with an infinite subgroup".into()))?;
                let index = |x: &Elem| members.iter().position(|m| m == x).expect("closed under products");
                let rows = members
                    .iter()
                    .map(|a| members.iter().map(|b| Ok(index(&base.mul(a, b)?))).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let h = FiniteGroup::from_table(format!("H{}", i + 1), rows)?;
                let domain = h.generators();
                let images = domain
                    .iter()
                    .map(|d| match d {
                        Elem::Table(k) => members[*k].clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                (Arc::new(h), domain, images)
            }
            None => {
                let z = FreeAbelianGroup::new(gens.len())?;
                (Arc::new(z.clone()) as Oracle, z.generators(), gens.clone())
            }
        };
        edges.push(EdgeSpec {
            name: format!("a{}", i + 1),
            from: 0,
            to: 1,
            group: Some(group),
            domain,
            minus: EdgeImages::Elems(images.clone()),
            plus: EdgeImages::Elems(images),
        });
    }
    let g = GraphOfGroups::new(
        vec![VertexGroup::concrete(name, base.clone()), VertexGroup::concrete(format!("{name}p"), base.clone())],
        edges,
    )?;
    let dec = Decomposition::with_tree(&g.graph, BTreeSet::from([0]));
    Ok(DoubleSpec { base, subgroups, gog: Arc::new(g), dec })
}

#[derive(Debug, Clone)]
pub struct DoubleReport {
    pub in_base: Verdict<Elem>,
    pub in_double: Verdict<Word>,
    pub agree: bool,
}

/// Conjugacy of `u, v ∈ G` decided in `G` and in the double; both must agree.
pub fn conjugacy_via_double(spec: &DoubleSpec, u: &Elem, v: &Elem, depth: usize) -> Result<DoubleReport> {
    let in_base = match spec.base.conjugacy_search(u, v) {
        Ok(Some(h)) => Verdict::Yes(h),
        Ok(None) => Verdict::No,
        Err(e) => Verdict::Unknown(e.to_string()),
    };
    let full = Pi1Oracle::full(spec.gog.clone(), &spec.dec)?;
    let uw = spec.base.to_word(u, Scope::Vertex(0))?;
    let vw = spec.base.to_word(v, Scope::Vertex(0))?;
    let in_double = is_conjugate_graph(&full, &spec.dec, &uw, &vw, depth)?;
    let agree = matches!((&in_base, &in_double), (Verdict::Yes(_), Verdict::Yes(_)) | (Verdict::No, Verdict::No));
    Ok(DoubleReport { in_base, in_double, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn full(f: &fixtures::Fixture) -> Pi1Oracle {
        Pi1Oracle::full(f.0.clone(), &f.1).unwrap()
    }

    #[test]
    fn klein_reduction_terminals() {
        let f = fixtures::klein().unwrap();
        let p = full(&f);
        let t = successive_cyclic_reduction(&p, &f.1, &w("g0 t0 g0^-1")).unwrap();
        assert_eq!(t.kind, Terminal::Long(2));
        let t = successive_cyclic_reduction(&p, &f.1, &w("t0 g0^3 t0^-1")).unwrap();
        assert_eq!(t.kind, Terminal::Vertex(0));
        assert_eq!(t.vertex_elem, Some(Elem::Lattice(vec![-3])));
    }

    #[test]
    fn klein_conjugacy() {
        let f = fixtures::klein().unwrap();
        let p = full(&f);
        let yes = is_conjugate_graph(&p, &f.1, &w("g0"), &w("g0^-1"), DEFAULT_DEPTH).unwrap();
        assert!(yes.is_yes());
        let yes = is_conjugate_graph(&p, &f.1, &w("g0^2 t0 g0^-2"), &w("t0"), DEFAULT_DEPTH).unwrap();
        assert!(yes.is_yes());
        assert!(is_conjugate_graph(&p, &f.1, &w("g0"), &w("g0^2"), DEFAULT_DEPTH).unwrap().is_no());
        assert!(is_conjugate_graph(&p, &f.1, &w("t0"), &w("t0^2"), DEFAULT_DEPTH).unwrap().is_no());
    }

    #[test]
    fn klein_center_and_cyclic_pairs() {
        let f = fixtures::klein().unwrap();
        let p = full(&f);
        let c = center_graph(&f.0, &f.1).unwrap().witness().cloned().unwrap();
        assert_eq!(c.len(), 1);
        let z = p.eval_word(&c[0]).unwrap();
        let t2 = p.eval_word(&w("t0^2")).unwrap();
        assert!(z == t2 || z == p.inv(&t2).unwrap());
        match commute_classify_graph(&p, &f.1, &w("t0^2"), &w("t0^4")).unwrap() {
            CommuteReport::CyclicStructure { j, k, .. } => assert_eq!(2 * j, k),
            other => panic!("{other:?}"),
        }
        match commute_classify_graph(&p, &f.1, &w("g0"), &w("t0^2")).unwrap() {
            CommuteReport::CircuitLabel { swapped: false, trajet, .. } => assert_eq!(trajet.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(commute_classify_graph(&p, &f.1, &w("g0"), &w("t0")), Err(Error::NotCommuting)));
    }

    #[test]
    fn trefoil_center_is_the_edge() {
        let f = fixtures::trefoil().unwrap();
        let p = full(&f);
        let c = center_graph(&f.0, &f.1).unwrap().witness().cloned().unwrap();
        assert_eq!(c.len(), 1);
        let z = p.eval_word(&c[0]).unwrap();
        let x2 = p.eval_word(&w("g0^2")).unwrap();
        assert!(z == x2 || z == p.inv(&x2).unwrap());
    }

    #[test]
    fn s3_double_center_centralizers_and_roots() {
        let f = fixtures::s3dbl().unwrap();
        let p = full(&f);
        assert_eq!(center_graph(&f.0, &f.1).unwrap().witness().map(Vec::len), Some(0));
        match centralizer_structure(&p, &f.1, &w("g3 v1.g3")).unwrap() {
            CentralizerReport::Cyclic { w: root, j } => {
                let u = p.eval_word(&w("g3 v1.g3")).unwrap();
                assert_eq!(p.pow(&p.eval_word(&root).unwrap(), j).unwrap(), u);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(centralizer_structure(&p, &f.1, &w("g2")).unwrap(), CentralizerReport::Vertex { .. }));
        let r = roots_report(&p, &f.1, &w("g3 v1.g3 g3 v1.g3"), 4, 2).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.roots.iter().any(|x| x.n == 2 && x.branch == RootBranch::CyclicCentralizer));
    }

    #[test]
    fn sl2_has_a_circuit() {
        let f = fixtures::sl2().unwrap();
        let p = full(&f);
        assert!(matches!(centralizer_structure(&p, &f.1, &w("g1")), Err(Error::NotSansCircuit)));
    }

    #[test]
    fn double_agrees_with_the_base() {
        let s3: Oracle = Arc::new(FiniteGroup::symmetric(3));
        let spec = build_double("s", s3.clone(), vec![vec![Elem::Table(fixtures::S3_TRANSPOSITION_12)]]).unwrap();
        for u in s3.elements().unwrap() {
            for v in s3.elements().unwrap() {
                let r = conjugacy_via_double(&spec, &u, &v, DEFAULT_DEPTH).unwrap();
                assert!(r.agree, "{u:?} {v:?} {r:?}");
            }
        }
    }
}
