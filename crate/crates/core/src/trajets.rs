//! Trajets and circuits: chains of edge-group elements linked by vertex-group
//! conjugations, their labels, search, reduction, and circuit centralizers.
//!
//! A trajet from `u ∈ G_{s_o}` to `v ∈ G_{s_e}` along arrows `a_1..a_n` carries
//! `c_i⁻ ∈ G_{a_i}⁻` at `o(a_i)`, its image `c_i⁺` across `a_i`, and
//! `h_0..h_n` with `u = h_0 c_1⁻ h_0⁻¹`, `c_i⁺ = h_i c_{i+1}⁻ h_i⁻¹` and
//! `c_n⁺ = h_n v h_n⁻¹`. Then `u = L v L⁻¹` for the label `L = h_0 t_{a_1} h_1 ⋯ t_{a_n} h_n`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::backends::{Elem, GroupExt, GroupOracle, Oracle};
use crate::error::{Error, Result, Verdict};
use crate::gog::{edge_of, is_positive, rev, GraphOfGroups, Pi1Oracle};
use crate::words::{format_word, GeneratorId, Scope, Word};

/// Default cap on explored states.
pub const STATE_CAP: usize = 10_000;
/// Default bound on the number of arrows in a searched trajet.
pub const DEFAULT_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajet {
    pub u: Elem,
    pub s_o: usize,
    pub v: Elem,
    pub s_e: usize,
    pub arrows: Vec<usize>,
    pub c_minus: Vec<Elem>,
    pub c_plus: Vec<Elem>,
    /// `arrows.len() + 1` entries; `h[i]` lives at the vertex reached after `i` arrows.
    pub h: Vec<Elem>,
}

fn vo(gog: &GraphOfGroups, v: usize) -> Result<&Oracle> {
    gog.vertex_oracle(v)
}

impl Trajet {
    /// `u ↺_{h0} v` at a single vertex.
    pub fn trivial(u: Elem, s: usize, h0: Elem, v: Elem) -> Trajet {
        Trajet { u, s_o: s, v, s_e: s, arrows: Vec::new(), c_minus: Vec::new(), c_plus: Vec::new(), h: vec![h0] }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_circuit(&self) -> bool {
        self.u == self.v && self.s_o == self.s_e
    }

    /// Vertex carrying `h[i]`.
    pub fn vertex_at(&self, gog: &GraphOfGroups, i: usize) -> usize {
        if i == 0 { self.s_o } else { gog.terminus(self.arrows[i - 1]) }
    }

    /// `h_0 t_{a_1} h_1 ⋯ t_{a_n} h_n`, with `t_a` erased on tree edges.
    pub fn label(&self, gog: &GraphOfGroups, tree: &BTreeSet<usize>) -> Result<Word> {
        let mut w = vo(gog, self.s_o)?.to_word(&self.h[0], Scope::Vertex(self.s_o))?;
        for (i, &a) in self.arrows.iter().enumerate() {
            let e = edge_of(a);
            if !tree.contains(&e) {
                w = w.concat(&Word::letter(GeneratorId::stable(e), if is_positive(a) { 1 } else { -1 }));
            }
            let s = gog.terminus(a);
            w = w.concat(&vo(gog, s)?.to_word(&self.h[i + 1], Scope::Vertex(s))?);
        }
        Ok(w)
    }

    /// The label as an element of `p`.
    pub fn label_elem(&self, p: &Pi1Oracle) -> Result<Elem> {
        p.eval_word(&self.label(p.gog(), p.tree())?)
    }

    /// Checks every defining equation in its vertex group.
    pub fn verify(&self, gog: &GraphOfGroups) -> std::result::Result<(), String> {
        let n = self.arrows.len();
        if self.c_minus.len() != n || self.c_plus.len() != n || self.h.len() != n + 1 {
            return Err("field lengths do not match the path".into());
        }
        let mut s = self.s_o;
        for (i, &a) in self.arrows.iter().enumerate() {
            if a >= 2 * gog.graph.n_edges() {
                return Err(format!("arrow {a} does not exist"));
            }
            if gog.origin(a) != s {
                return Err(format!("arrow {} does not start where the path stands", i + 1));
            }
            s = gog.terminus(a);
        }
        if s != self.s_e {
            return Err("path does not end at the declared vertex".into());
        }
        let err = |e: Error| e.to_string();
        let check = |v: usize, lhs: &Elem, h: &Elem, rhs: &Elem, what: String| -> std::result::Result<(), String> {
            let o = vo(gog, v).map_err(err)?;
            if !o.is_member(lhs) || !o.is_member(h) || !o.is_member(rhs) {
                return Err(format!("{what}: element outside the vertex group"));
            }
            if o.conj(h, rhs).map_err(err)? != *lhs {
                return Err(format!("{what} fails"));
            }
            Ok(())
        };
        if n == 0 {
            return check(self.s_o, &self.u, &self.h[0], &self.v, "u = h0 v h0^-1".into());
        }
        check(self.s_o, &self.u, &self.h[0], &self.c_minus[0], "u = h0 c1- h0^-1".into())?;
        for (i, &a) in self.arrows.iter().enumerate() {
            match gog.cross(a, &self.c_minus[i]).map_err(err)? {
                Some(y) if y == self.c_plus[i] => {}
                Some(_) => return Err(format!("c{}+ is not the image of c{}-", i + 1, i + 1)),
                None => return Err(format!("c{}- is outside the edge group of its arrow", i + 1)),
            }
            let w = gog.terminus(a);
            if i + 1 < n {
                check(w, &self.c_plus[i], &self.h[i + 1], &self.c_minus[i + 1], format!("c{}+ = h{} c{}- h{}^-1", i + 1, i + 1, i + 2, i + 1))?;
            } else {
                check(w, &self.c_plus[i], &self.h[n], &self.v, format!("c{n}+ = h{n} v h{n}^-1"))?;
            }
        }
        Ok(())
    }

    /// Checks `u = L v L⁻¹` in `p`, with `u`, `v` moved to the base by tree paths.
    pub fn verify_label(&self, p: &Pi1Oracle) -> Result<()> {
        let l = self.label_elem(p)?;
        let u = p.embed(self.s_o, &self.u)?;
        let v = p.embed(self.s_e, &self.v)?;
        if p.conj(&l, &v)? != u {
            return Err(Error::Verification("trajet label does not conjugate v to u".into()));
        }
        Ok(())
    }

    /// Trajet from `v` to `u` whose label is the inverse label.
    pub fn inverse(&self, gog: &GraphOfGroups) -> Result<Trajet> {
        let n = self.arrows.len();
        let mut h = Vec::with_capacity(n + 1);
        for i in (0..=n).rev() {
            h.push(vo(gog, self.vertex_at(gog, i))?.inv(&self.h[i])?);
        }
        Ok(Trajet {
            u: self.v.clone(),
            s_o: self.s_e,
            v: self.u.clone(),
            s_e: self.s_o,
            arrows: self.arrows.iter().rev().map(|&a| rev(a)).collect(),
            c_minus: self.c_plus.iter().rev().cloned().collect(),
            c_plus: self.c_minus.iter().rev().cloned().collect(),
            h,
        })
    }

    /// Concatenation; `self` must end where `other` starts.
    pub fn then(&self, other: &Trajet, gog: &GraphOfGroups) -> Result<Trajet> {
        if self.s_e != other.s_o || self.v != other.u {
            return Err(Error::Invalid(vec!["trajets do not compose".into()]));
        }
        let o = vo(gog, self.s_e)?;
        let n = self.arrows.len();
        let mut h = self.h[..n].to_vec();
        h.push(o.mul(&self.h[n], &other.h[0])?);
        h.extend(other.h[1..].iter().cloned());
        let cat = |a: &[Elem], b: &[Elem]| a.iter().chain(b).cloned().collect::<Vec<_>>();
        Ok(Trajet {
            u: self.u.clone(),
            s_o: self.s_o,
            v: other.v.clone(),
            s_e: other.s_e,
            arrows: self.arrows.iter().chain(&other.arrows).copied().collect(),
            c_minus: cat(&self.c_minus, &other.c_minus),
            c_plus: cat(&self.c_plus, &other.c_plus),
            h,
        })
    }

    /// Indices `i` (1-based, between arrows `i` and `i+1`) of windows
    /// `a, h ∈ G_a⁺, -a`.
    pub fn reducible_windows(&self, gog: &GraphOfGroups) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 1..self.arrows.len() {
            let a = self.arrows[i - 1];
            if self.arrows[i] != rev(a) {
                continue;
            }
            if gog.arrow_mono(rev(a))?.contains(&self.h[i])? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Removes the window at `i`: `h_{i-1} ← h_{i-1}·φ_{-a}(h_i)·h_{i+1}`.
    pub fn reduce_at(&self, gog: &GraphOfGroups, i: usize) -> Result<Trajet> {
        if !self.reducible_windows(gog)?.contains(&i) {
            return Err(Error::Invalid(vec![format!("no reducible window at {i}")]));
        }
        let a = self.arrows[i - 1];
        let carried = gog
            .cross(rev(a), &self.h[i])?
            .ok_or_else(|| Error::Verification("window element left the edge group".into()))?;
        let o = vo(gog, gog.origin(a))?;
        let merged = o.product(&[self.h[i - 1].clone(), carried, self.h[i + 1].clone()])?;
        let mut t = self.clone();
        t.arrows.drain(i - 1..=i);
        t.c_minus.drain(i - 1..=i);
        t.c_plus.drain(i - 1..=i);
        t.h.splice(i - 1..=i + 1, std::iter::once(merged));
        Ok(t)
    }

    /// Slides edge-group parts rightward: every `h_{i-1}` before an arrow
    /// becomes its canonical left-coset representative modulo that arrow's
    /// edge image, the remainder crossing to the next `h`. Endpoints and
    /// label are unchanged; two trajets differing only by such slides
    /// normalize to the same one.
    pub fn normalize(&self, gog: &GraphOfGroups) -> Result<Trajet> {
        let mut t = self.clone();
        for i in 0..t.arrows.len() {
            let a = t.arrows[i];
            let o = vo(gog, gog.origin(a))?;
            let (rep, k) = o.decompose(gog.out_subgroup(a)?, &t.h[i])?;
            if k == o.identity() {
                continue;
            }
            let across = gog
                .cross(a, &k)?
                .ok_or_else(|| Error::Verification("coset remainder left the edge group".into()))?;
            let e = vo(gog, gog.terminus(a))?;
            t.h[i] = rep;
            t.c_minus[i] = o.conj(&k, &t.c_minus[i])?;
            t.c_plus[i] = e.conj(&across, &t.c_plus[i])?;
            t.h[i + 1] = e.mul(&across, &t.h[i + 1])?;
        }
        t.verify(gog).map_err(Error::Verification)?;
        Ok(t)
    }

    /// Indented arrow-notation display.
    pub fn render(&self, gog: &GraphOfGroups, tree: &BTreeSet<usize>) -> Result<String> {
        let name = |g: &GeneratorId| gog.vertex_gen_name(g);
        let show = |v: usize, x: &Elem| -> Result<String> {
            Ok(format_word(&vo(gog, v)?.to_word(x, Scope::Vertex(v))?, &name))
        };
        let mut out = String::new();
        let vn = |v: usize| gog.vertices[v].name.clone();
        let _ = writeln!(out, "trajet {} @ {} -> {} @ {}", show(self.s_o, &self.u)?, vn(self.s_o), show(self.s_e, &self.v)?, vn(self.s_e));
        let _ = writeln!(out, "  h0 = {}", show(self.s_o, &self.h[0])?);
        for (i, &a) in self.arrows.iter().enumerate() {
            let e = edge_of(a);
            let dir = if is_positive(a) { "+" } else { "-" };
            let _ = writeln!(
                out,
                "  --{}{}--> {}   c- = {}   c+ = {}",
                dir,
                gog.edges[e].name,
                vn(gog.terminus(a)),
                show(gog.origin(a), &self.c_minus[i])?,
                show(gog.terminus(a), &self.c_plus[i])?
            );
            let _ = writeln!(out, "  h{} = {}", i + 1, show(gog.terminus(a), &self.h[i + 1])?);
        }
        let _ = write!(out, "  label = {}", format_word(&self.label(gog, tree)?, &name));
        Ok(out)
    }
}

/// Applies reductions, leftmost window first, until none remains; the result
/// is normalized so that reduction orders can be compared.
pub fn reduce_trajet(gog: &GraphOfGroups, t: &Trajet) -> Result<Trajet> {
    let mut cur = t.clone();
    while let Some(&i) = cur.reducible_windows(gog)?.first() {
        cur = cur.reduce_at(gog, i)?;
    }
    cur.normalize(gog)
}

/// The all-identity trajet along the tree path from `s1` to `s2`, when `u`
/// crosses every edge of it.
pub fn tree_trajet(p: &Pi1Oracle, u: &Elem, s1: usize, s2: usize) -> Result<Option<Trajet>> {
    let gog = p.gog();
    vo(gog, s1)?.check_member(u)?;
    let paths = gog.graph.tree_paths(s1, p.tree());
    let path = paths
        .get(&s2)
        .ok_or_else(|| Error::Invalid(vec![format!("vertex {s2} is not reachable in the tree")]))?;
    let mut x = u.clone();
    let mut t = Trajet::trivial(u.clone(), s1, vo(gog, s1)?.identity(), u.clone());
    for &a in path {
        let Some(y) = gog.cross(a, &x)? else { return Ok(None) };
        t.arrows.push(a);
        t.c_minus.push(x);
        t.c_plus.push(y.clone());
        t.h.push(vo(gog, gog.terminus(a))?.identity());
        x = y;
    }
    t.v = x;
    t.s_e = s2;
    Ok(Some(t))
}

/// One search state: an element at a vertex, reached from its parent by a step.
struct Node {
    vertex: usize,
    x: Elem,
    depth: usize,
    /// `(parent, arrow, h, c⁻)` with `parent.x = h c⁻ h⁻¹`.
    from: Option<(usize, usize, Elem, Elem)>,
}

fn rebuild(nodes: &[Node], end: usize, gog: &GraphOfGroups, last_h: Elem, v: Elem) -> Result<Trajet> {
    let mut chain = Vec::new();
    let mut i = end;
    while let Some((parent, a, h, c)) = &nodes[i].from {
        chain.push((*a, h.clone(), c.clone(), nodes[i].x.clone()));
        i = *parent;
    }
    chain.reverse();
    let root = &nodes[0];
    let mut t = Trajet::trivial(root.x.clone(), root.vertex, last_h.clone(), v.clone());
    if chain.is_empty() {
        return Ok(t);
    }
    t.h.clear();
    for (a, h, c, y) in chain {
        t.h.push(h);
        t.arrows.push(a);
        t.c_minus.push(c);
        t.c_plus.push(y);
    }
    t.h.push(last_h);
    t.s_e = gog.terminus(*t.arrows.last().expect("nonempty"));
    Ok(t)
}

/// Searches for a trajet from `u ∈ G_{s1}` to `v ∈ G_{s2}` using the edges of `p`.
///
/// The search is over states `(vertex, element)`; NO is returned only when
/// the reachable state space was exhausted with complete conjugator sets.
/// Failed self-checks are errors; missing capabilities become UNKNOWN.
pub fn find_trajet(p: &Pi1Oracle, u: &Elem, s1: usize, v: &Elem, s2: usize, depth: usize) -> Result<Verdict<Trajet>> {
    soften(find_trajet_inner(p, u, s1, v, s2, depth))
}

/// Turns every error except a failed self-check into UNKNOWN.
pub(crate) fn soften<T>(r: Result<Verdict<T>>) -> Result<Verdict<T>> {
    match r {
        Err(e @ Error::Verification(_)) => Err(e),
        Err(e @ (Error::Foreign { .. } | Error::WordSyntax { .. } | Error::Invalid(_))) => Err(e),
        Err(e) => Ok(Verdict::Unknown(e.to_string())),
        ok => ok,
    }
}

fn find_trajet_inner(p: &Pi1Oracle, u: &Elem, s1: usize, v: &Elem, s2: usize, depth: usize) -> Result<Verdict<Trajet>> {
    let gog = p.gog();
    vo(gog, s1)?.check_member(u)?;
    vo(gog, s2)?.check_member(v)?;
    let mut nodes = vec![Node { vertex: s1, x: u.clone(), depth: 0, from: None }];
    let mut seen: BTreeSet<(usize, Elem)> = BTreeSet::from([(s1, u.clone())]);
    let mut queue = VecDeque::from([0usize]);
    let mut exact = true;
    let mut truncated = false;
    while let Some(i) = queue.pop_front() {
        let (w, x, d) = (nodes[i].vertex, nodes[i].x.clone(), nodes[i].depth);
        let o = vo(gog, w)?;
        if w == s2 {
            if let Some(h) = o.conjugacy_search(&x, v)? {
                let t = rebuild(&nodes, i, gog, h, v.clone())?;
                t.verify(gog).map_err(Error::Verification)?;
                t.verify_label(p)?;
                return Ok(Verdict::Yes(t));
            }
        }
        if d >= depth {
            truncated = true;
            continue;
        }
        for a in gog.graph.arrows_from(w, p.edge_set()) {
            let set = o.conjugators_into(&x, gog.out_subgroup(a)?)?;
            exact &= set.complete;
            for (h, c) in set.pairs {
                let y = gog
                    .cross(a, &c)?
                    .ok_or_else(|| Error::Verification("conjugator landed outside the edge group".into()))?;
                let key = (gog.terminus(a), y.clone());
                if seen.contains(&key) {
                    continue;
                }
                if nodes.len() >= STATE_CAP {
                    truncated = true;
                    continue;
                }
                seen.insert(key);
                nodes.push(Node { vertex: gog.terminus(a), x: y, depth: d + 1, from: Some((i, a, h, c)) });
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(if exact && !truncated {
        Verdict::No
    } else if truncated {
        Verdict::Unknown(format!("state space exceeds the search bound ({} states)", nodes.len()))
    } else {
        Verdict::Unknown("a vertex group returned an incomplete conjugator set".into())
    })
}

/// Generating circuits of `C(u)` and whether the orbit graph was explored completely.
#[derive(Debug, Clone)]
pub struct CircuitGenerators {
    pub circuits: Vec<Trajet>,
    /// Distinct nontrivial labels, in discovery order.
    pub labels: Vec<Word>,
    pub complete: bool,
}

/// Orbit graph of `u`: nodes are vertex-group conjugacy classes reachable by
/// trajets, each with a tree trajet from `u`; generators are conjugated
/// vertex centralizers and one circuit per step of the graph.
pub fn centralizer_circuits(p: &Pi1Oracle, u: &Elem, s: usize) -> Result<CircuitGenerators> {
    let gog = p.gog();
    vo(gog, s)?.check_member(u)?;
    struct Class {
        vertex: usize,
        rep: Elem,
        path: Trajet,
    }
    let root = Trajet::trivial(u.clone(), s, vo(gog, s)?.identity(), u.clone());
    let mut classes = vec![Class { vertex: s, rep: u.clone(), path: root }];
    let mut circuits: Vec<Trajet> = Vec::new();
    let mut complete = true;
    let mut i = 0;
    while i < classes.len() {
        let (w, rep, path) = (classes[i].vertex, classes[i].rep.clone(), classes[i].path.clone());
        let o = vo(gog, w)?.clone();
        let back = path.inverse(gog)?;
        for z in o.centralizer_gens(&rep)? {
            let c = path.then(&Trajet::trivial(rep.clone(), w, z, rep.clone()), gog)?.then(&back, gog)?;
            circuits.push(c);
        }
        for a in gog.graph.arrows_from(w, p.edge_set()) {
            let set = o.conjugators_into(&rep, gog.out_subgroup(a)?)?;
            complete &= set.complete;
            for (h, c) in set.pairs {
                let y = gog
                    .cross(a, &c)?
                    .ok_or_else(|| Error::Verification("conjugator landed outside the edge group".into()))?;
                let w2 = gog.terminus(a);
                let o2 = vo(gog, w2)?;
                let mut hit = None;
                for (j, cl) in classes.iter().enumerate() {
                    if cl.vertex == w2 {
                        if let Some(k) = o2.conjugacy_search(&y, &cl.rep)? {
                            hit = Some((j, k));
                            break;
                        }
                    }
                }
                let (j, k) = match hit {
                    Some(found) => found,
                    None if classes.len() >= STATE_CAP => {
                        complete = false;
                        continue;
                    }
                    None => {
                        let step = Trajet {
                            u: rep.clone(),
                            s_o: w,
                            v: y.clone(),
                            s_e: w2,
                            arrows: vec![a],
                            c_minus: vec![c],
                            c_plus: vec![y.clone()],
                            h: vec![h, o2.identity()],
                        };
                        classes.push(Class { vertex: w2, rep: y, path: path.then(&step, gog)? });
                        continue;
                    }
                };
                let step = path.then(
                    &Trajet {
                        u: rep.clone(),
                        s_o: w,
                        v: classes[j].rep.clone(),
                        s_e: w2,
                        arrows: vec![a],
                        c_minus: vec![c],
                        c_plus: vec![y],
                        h: vec![h, k],
                    },
                    gog,
                )?;
                circuits.push(step.then(&classes[j].path.inverse(gog)?, gog)?);
            }
        }
        i += 1;
    }
    let mut labels = Vec::new();
    let uu = p.embed(s, u)?;
    let id = p.identity();
    let mut seen = BTreeSet::new();
    for c in &circuits {
        c.verify(gog).map_err(Error::Verification)?;
        let l = c.label(gog, p.tree())?;
        let g = p.eval_word(&l)?;
        if !p.commutes(&g, &uu)? {
            return Err(Error::Verification("circuit label does not commute with u".into()));
        }
        if g != id && seen.insert(g) {
            labels.push(l);
        }
    }
    Ok(CircuitGenerators { circuits, labels, complete })
}

#[derive(Debug, Clone)]
pub enum SansCircuit {
    Yes,
    /// A reduced circuit of positive length at a nontrivial element.
    No(Trajet),
    Unknown(String),
}

/// Searches every nontrivial edge-group element for a reduced nontrivial
/// circuit among the generating circuits of its orbit graph. Any circuit is
/// a product of these up to reductions, so with unique reduced forms the
/// generators decide the question.
pub fn is_sans_circuit(p: &Pi1Oracle) -> Result<SansCircuit> {
    match sans_circuit_inner(p) {
        Err(e @ (Error::Verification(_) | Error::Foreign { .. } | Error::Invalid(_))) => Err(e),
        Err(e) => Ok(SansCircuit::Unknown(e.to_string())),
        ok => ok,
    }
}

fn sans_circuit_inner(p: &Pi1Oracle) -> Result<SansCircuit> {
    let gog = p.gog();
    let mut starts: BTreeMap<(usize, Elem), ()> = BTreeMap::new();
    for &e in p.edge_set() {
        let Some(all) = gog.edge_oracle(e)?.elements() else {
            return Ok(SansCircuit::Unknown(format!("edge group {} is not finite", gog.edges[e].name)));
        };
        for a in [2 * e, 2 * e + 1] {
            let m = gog.arrow_mono(a)?;
            for k in &all {
                let x = m.apply(k)?;
                if x != m.target.identity() {
                    starts.insert((gog.origin(a), x), ());
                }
            }
        }
    }
    let mut complete = true;
    for (s, u) in starts.into_keys() {
        let gens = centralizer_circuits(p, &u, s)?;
        complete &= gens.complete;
        for c in &gens.circuits {
            let r = reduce_trajet(gog, c)?;
            if !r.is_empty() {
                r.verify(gog).map_err(Error::Verification)?;
                return Ok(SansCircuit::No(r));
            }
        }
    }
    Ok(if complete { SansCircuit::Yes } else { SansCircuit::Unknown("orbit graph exploration was truncated".into()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gog::Decomposition;
    use std::sync::Arc;

    fn full(f: (Arc<GraphOfGroups>, Decomposition)) -> Pi1Oracle {
        Pi1Oracle::full(f.0, &f.1).unwrap()
    }

    const T12: Elem = Elem::Table(fixtures::S3_TRANSPOSITION_12);
    const C123: Elem = Elem::Table(3);

    #[test]
    fn one_edge_trajet_in_the_double() {
        let p = full(fixtures::s3dbl().unwrap());
        let t = find_trajet(&p, &T12, 0, &T12, 1, DEFAULT_DEPTH).unwrap();
        let t = t.witness().unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.label(p.gog(), p.tree()).unwrap().is_empty());
        assert!(find_trajet(&p, &C123, 0, &T12, 1, DEFAULT_DEPTH).unwrap().is_no());
        // (13) at s reaches (13) at s' through (12).
        let t13 = Elem::Table(5);
        let t = find_trajet(&p, &t13, 0, &t13, 1, DEFAULT_DEPTH).unwrap();
        t.witness().unwrap().verify_label(&p).unwrap();
    }

    #[test]
    fn verify_catches_corruption() {
        let p = full(fixtures::s3dbl().unwrap());
        let gog = p.gog();
        let t = tree_trajet(&p, &T12, 0, 1).unwrap().unwrap();
        assert!(t.verify(gog).is_ok());
        let mut bad = t.clone();
        bad.h[0] = C123;
        assert!(bad.verify(gog).is_err());
        let mut bad = t.clone();
        bad.c_plus[0] = Elem::Table(0);
        assert!(bad.verify(gog).is_err());
        assert!(tree_trajet(&p, &C123, 0, 1).unwrap().is_none());
        let same = tree_trajet(&p, &C123, 0, 0).unwrap().unwrap();
        assert!(same.is_empty() && same.is_circuit());
    }

    #[test]
    fn labels_multiply() {
        let p = full(fixtures::s3dbl().unwrap());
        let gog = p.gog();
        let mut t = tree_trajet(&p, &T12, 0, 1).unwrap().unwrap();
        t.h[1] = C123;
        t.v = gog.vertex_oracle(1).unwrap().conj(&gog.vertex_oracle(1).unwrap().inv(&C123).unwrap(), &T12).unwrap();
        t.verify(gog).unwrap();
        let ti = t.inverse(gog).unwrap();
        ti.verify(gog).unwrap();
        let l = t.label_elem(&p).unwrap();
        assert_eq!(ti.label_elem(&p).unwrap(), p.inv(&l).unwrap());
        let c = t.then(&ti, gog).unwrap();
        c.verify(gog).unwrap();
        assert_eq!(c.label_elem(&p).unwrap(), p.identity());
        assert_eq!(c.reducible_windows(gog).unwrap(), vec![1]);
        let r = reduce_trajet(gog, &c).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.label_elem(&p).unwrap(), p.identity());
    }

    #[test]
    fn klein_circuits_generate_a_and_t_squared() {
        let p = full(fixtures::klein().unwrap());
        let a = Elem::Lattice(vec![1]);
        let gens = centralizer_circuits(&p, &a, 0).unwrap();
        assert!(gens.complete);
        let t_sum = |w: &Word| -> i64 {
            w.letters.iter().filter(|l| l.gen.scope == Scope::Stable(0)).map(|l| i64::from(l.exp)).sum()
        };
        assert!(gens.labels.iter().all(|w| t_sum(w) % 2 == 0));
        let t2 = Word::parse("t0^2").unwrap();
        let elems: Vec<Elem> = gens.labels.iter().map(|w| p.eval_word(w).unwrap()).collect();
        let t2e = p.eval_word(&t2).unwrap();
        assert!(elems.contains(&t2e) || elems.contains(&p.inv(&t2e).unwrap()));
        assert!(elems.contains(&p.embed(0, &a).unwrap()));
    }

    #[test]
    fn sans_circuit_verdicts() {
        let p = full(fixtures::s3dbl().unwrap());
        assert!(matches!(is_sans_circuit(&p).unwrap(), SansCircuit::Yes));
        // The amalgamated element of ℤ/4 *_{ℤ/2} ℤ/6 is central on both sides.
        let q = full(fixtures::sl2().unwrap());
        match is_sans_circuit(&q).unwrap() {
            SansCircuit::No(c) => {
                assert!(c.is_circuit() && !c.is_empty());
                assert!(c.reducible_windows(q.gog()).unwrap().is_empty());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(is_sans_circuit(&full(fixtures::klein().unwrap())).unwrap(), SansCircuit::Unknown(_)));
    }

    #[test]
    fn reduction_order_is_irrelevant_on_two_windows() {
        let p = full(fixtures::s3dbl().unwrap());
        let gog = p.gog();
        let t = tree_trajet(&p, &T12, 0, 1).unwrap().unwrap();
        let ti = t.inverse(gog).unwrap();
        let back = t.then(&ti, gog).unwrap();
        let c = back.then(&back, gog).unwrap();
        let w = c.reducible_windows(gog).unwrap();
        assert_eq!(w, vec![1, 2, 3]);
        let results: Vec<Trajet> = w.iter().map(|&i| reduce_trajet(gog, &c.reduce_at(gog, i).unwrap()).unwrap()).collect();
        assert!(results.windows(2).all(|r| r[0] == r[1]));
        assert!(results[0].is_empty());
    }
}
