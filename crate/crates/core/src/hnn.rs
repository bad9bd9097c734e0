//! HNN extensions `A*_φ` with `t⁻¹ c t = φ(c)` for `c ∈ C₋₁`: Britton normal
//! forms, cyclic reduction, conjugacy, commutation and center.
//!
//! The edge group `E` maps into `A` twice; `C₋₁` and `C₊₁` are the two images
//! and `φ` sends `minus(k)` to `plus(k)`.

use std::collections::{BTreeSet, VecDeque};

use crate::backends::lattice::Echelon;
use crate::backends::{ball, greedy_generators, Elem, GroupExt, Monomorphism, Oracle, OuterOrder};
use crate::error::{Error, Result, Verdict};
use crate::gog::{LoopSplit, Pi1Oracle, Split};
use crate::words::{GeneratorId, Scope, Word};

pub const DEFAULT_DEPTH: usize = 6;

const STATE_CAP: usize = 10_000;

/// Bound passed to `outer_order`.
const OUTER_BOUND: usize = 64;

/// `g0 t^{ε1} g1 ... t^{εn} gn`. After `t^ε` the element is the canonical
/// representative of its right coset modulo `C_ε`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HnnNormalForm {
    pub head: Elem,
    pub tail: Vec<(i8, Elem)>,
}

impl HnnNormalForm {
    /// Number of stable letters.
    pub fn t_length(&self) -> usize {
        self.tail.len()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.tail.iter().map(|(e, _)| *e).collect()
    }
}

#[derive(Debug, Clone)]
enum Item {
    Base(Elem),
    T(i8),
}

#[derive(Debug, Clone)]
pub struct HnnPresentation {
    pub base: Oracle,
    base_pi: Pi1Oracle,
    pub edge: Oracle,
    pub minus: Monomorphism,
    pub plus: Monomorphism,
    pub stable: GeneratorId,
}

#[derive(Debug, Clone)]
pub enum HnnCommute {
    /// `x` (or `y` when `swapped`) lies in `C₋₁ ∪ C₊₁`; `chain[i+1]` is
    /// `chain[i]` conjugated by the i-th letter block of the other element.
    CSequence { swapped: bool, chain: Vec<HnnNormalForm> },
    EdgeConjugate { swapped: bool, g: HnnNormalForm, c: HnnNormalForm },
    /// Both lie in `g A g⁻¹`.
    SameConjugateOfA { g: HnnNormalForm },
    /// `x = g c g⁻¹ W^j`, `y = g c' g⁻¹ W^k`, with `c, c'` in the same `C_ε`.
    Cyclic { g: HnnNormalForm, c: HnnNormalForm, c_prime: HnnNormalForm, w: HnnNormalForm, j: i64, k: i64 },
    Unknown(String),
}

impl HnnPresentation {
    pub fn new(split: LoopSplit) -> HnnPresentation {
        HnnPresentation {
            base: split.into_minus.target.clone(),
            base_pi: split.base,
            edge: split.into_minus.source.clone(),
            minus: split.into_minus,
            plus: split.into_plus,
            stable: GeneratorId::stable(split.edge),
        }
    }

    /// Splits a fundamental group along one of its non-tree edges.
    pub fn along(p: &Pi1Oracle, e: usize) -> Result<HnnPresentation> {
        match p.decompose_edge(e)? {
            Split::Hnn(s) => Ok(HnnPresentation::new(s)),
            Split::Amalgam(_) => Err(Error::Invalid(vec![format!("edge {e} is a tree edge")])),
        }
    }

    fn mono(&self, eps: i8) -> &Monomorphism {
        if eps < 0 {
            &self.minus
        } else {
            &self.plus
        }
    }

    /// `t^ε c t^{-ε}` for `c ∈ C_ε`, which lies in `C_{-ε}`.
    fn across(&self, eps: i8, c: &Elem) -> Result<Option<Elem>> {
        match self.mono(eps).preimage(c)? {
            Some(k) => Ok(Some(self.mono(-eps).apply(&k)?)),
            None => Ok(None),
        }
    }

    /// `φ(c)` for `c ∈ C₋₁`.
    pub fn phi(&self, c: &Elem) -> Result<Elem> {
        self.across(-1, c)?
            .ok_or_else(|| Error::Foreign { elem: c.to_string(), group: "C_-1".into() })
    }

    pub fn identity(&self) -> HnnNormalForm {
        HnnNormalForm { head: self.base.identity(), tail: Vec::new() }
    }

    pub fn from_base(&self, a: &Elem) -> HnnNormalForm {
        HnnNormalForm { head: a.clone(), tail: Vec::new() }
    }

    pub fn t(&self, eps: i8) -> Result<HnnNormalForm> {
        self.reduce(vec![Item::T(eps)])
    }

    fn reduce(&self, items: Vec<Item>) -> Result<HnnNormalForm> {
        let mut head = self.base.identity();
        let mut tail: Vec<(i8, Elem)> = Vec::new();
        for item in items {
            match item {
                Item::Base(x) => {
                    let last = tail.last_mut().map_or(&mut head, |(_, g)| g);
                    *last = self.base.mul(last, &x)?;
                }
                Item::T(eps) => {
                    if let Some((prev, g)) = tail.last() {
                        if *prev == -eps {
                            if let Some(c) = self.across(*prev, g)? {
                                tail.pop();
                                let last = tail.last_mut().map_or(&mut head, |(_, g)| g);
                                *last = self.base.mul(last, &c)?;
                                continue;
                            }
                        }
                    }
                    tail.push((eps, self.base.identity()));
                }
            }
        }
        // Right-to-left: g_i = c·r with c ∈ C_{ε_i}, then t^{ε_i} c = c' t^{ε_i}.
        for i in (0..tail.len()).rev() {
            let eps = tail[i].0;
            let (c, r) = self.base.decompose_right(&self.mono(eps).image, &tail[i].1)?;
            tail[i].1 = r;
            let moved = self
                .across(eps, &c)?
                .ok_or_else(|| Error::Verification("coset decomposition left the edge subgroup".into()))?;
            let prev = if i == 0 { &mut head } else { &mut tail[i - 1].1 };
            *prev = self.base.mul(prev, &moved)?;
        }
        Ok(HnnNormalForm { head, tail })
    }

    fn items(&self, x: &HnnNormalForm) -> Vec<Item> {
        let mut out = vec![Item::Base(x.head.clone())];
        for (e, g) in &x.tail {
            out.push(Item::T(*e));
            out.push(Item::Base(g.clone()));
        }
        out
    }

    fn inv_items(&self, x: &HnnNormalForm) -> Result<Vec<Item>> {
        let mut out = Vec::new();
        for (e, g) in x.tail.iter().rev() {
            out.push(Item::Base(self.base.inv(g)?));
            out.push(Item::T(-e));
        }
        out.push(Item::Base(self.base.inv(&x.head)?));
        Ok(out)
    }

    pub fn mul(&self, x: &HnnNormalForm, y: &HnnNormalForm) -> Result<HnnNormalForm> {
        let mut items = self.items(x);
        items.extend(self.items(y));
        self.reduce(items)
    }

    pub fn inv(&self, x: &HnnNormalForm) -> Result<HnnNormalForm> {
        self.reduce(self.inv_items(x)?)
    }

    pub fn product(&self, xs: &[&HnnNormalForm]) -> Result<HnnNormalForm> {
        let mut items = Vec::new();
        for x in xs {
            items.extend(self.items(x));
        }
        self.reduce(items)
    }

    pub fn pow(&self, x: &HnnNormalForm, k: i64) -> Result<HnnNormalForm> {
        let block = if k < 0 { self.inv_items(x)? } else { self.items(x) };
        let mut items = Vec::new();
        for _ in 0..k.unsigned_abs() {
            items.extend(block.iter().cloned());
        }
        self.reduce(items)
    }

    /// `h x h⁻¹`.
    pub fn conj(&self, h: &HnnNormalForm, x: &HnnNormalForm) -> Result<HnnNormalForm> {
        let mut items = self.items(h);
        items.extend(self.items(x));
        items.extend(self.inv_items(h)?);
        self.reduce(items)
    }

    pub fn commutes(&self, x: &HnnNormalForm, y: &HnnNormalForm) -> Result<bool> {
        Ok(self.mul(x, y)? == self.mul(y, x)?)
    }

    pub fn britton_reduce(&self, w: &Word) -> Result<HnnNormalForm> {
        let mut items = Vec::new();
        for (is_t, run) in w.runs_by(|l| l.gen == self.stable) {
            if is_t {
                items.extend(run.letters.iter().map(|l| Item::T(l.exp)));
            } else {
                items.push(Item::Base(self.base.eval_word(&run)?));
            }
        }
        self.reduce(items)
    }

    pub fn to_word(&self, x: &HnnNormalForm) -> Result<Word> {
        let mut w = self.base.to_word(&x.head, Scope::Vertex(0))?;
        for (e, g) in &x.tail {
            w = w.concat(&Word::letter(self.stable, *e));
            w = w.concat(&self.base.to_word(g, Scope::Vertex(0))?);
        }
        Ok(w)
    }

    /// Whether the base element lies in `C_ε`.
    fn in_c(&self, eps: i8, g: &Elem) -> Result<bool> {
        self.mono(eps).contains(g)
    }

    /// Some `t^ε ... g_n` block exists and is pinch-free around the ends.
    pub fn is_cyclically_reduced(&self, x: &HnnNormalForm) -> Result<bool> {
        let n = x.tail.len();
        if n == 0 {
            return Ok(true);
        }
        let (en, gn) = &x.tail[n - 1];
        if !self.in_c(*en, gn)? {
            return Ok(false);
        }
        if n == 1 {
            return Ok(true);
        }
        let e1 = x.tail[0].0;
        Ok(!(e1 == -en && self.in_c(*en, &x.head)?))
    }

    /// `(x', h)` with `x = h x' h⁻¹`, `x'` cyclically reduced.
    pub fn cyclically_reduce_nf(&self, x: &HnnNormalForm) -> Result<(HnnNormalForm, HnnNormalForm)> {
        let mut g = x.clone();
        let mut conj = self.identity();
        while !self.is_cyclically_reduced(&g)? {
            let (en, gn) = g.tail.last().cloned().expect("hyperbolic element");
            let h = if self.in_c(en, &gn)? { self.t(en)? } else { self.from_base(&gn) };
            let before = g.tail.len();
            g = self.conj(&h, &g)?;
            conj = self.mul(&conj, &self.inv(&h)?)?;
            debug_assert!(g.tail.len() <= before);
        }
        Ok((g, conj))
    }

    pub fn cyclically_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        let (g, h) = self.cyclically_reduce_nf(&self.britton_reduce(w)?)?;
        Ok((self.to_word(&g)?, self.to_word(&h)?))
    }

    pub fn is_conjugate(&self, u: &Word, v: &Word, depth: usize) -> Verdict<Word> {
        let run = || -> Result<Verdict<Word>> {
            let r = self.is_conjugate_nf(&self.britton_reduce(u)?, &self.britton_reduce(v)?, depth)?;
            Ok(match r {
                Verdict::Yes(h) => Verdict::Yes(self.to_word(&h)?),
                Verdict::No => Verdict::No,
                Verdict::Unknown(s) => Verdict::Unknown(s),
            })
        };
        run().unwrap_or_else(|e| Verdict::Unknown(e.to_string()))
    }

    pub fn is_conjugate_nf(&self, u: &HnnNormalForm, v: &HnnNormalForm, depth: usize) -> Result<Verdict<HnnNormalForm>> {
        let (u1, hu) = self.cyclically_reduce_nf(u)?;
        let (v1, hv) = self.cyclically_reduce_nf(v)?;
        if u1.t_length() != v1.t_length() {
            return Ok(Verdict::No);
        }
        // Collins: the sign sequences of conjugate cyclically reduced forms are rotations.
        let (su, sv) = (u1.signs(), v1.signs());
        if !su.is_empty() && !(0..sv.len()).any(|r| sv[r..].iter().chain(&sv[..r]).eq(su.iter())) {
            return Ok(Verdict::No);
        }
        let inner = if u1.t_length() == 0 {
            self.conjugate_elliptic(&u1.head, &v1.head)?
        } else {
            self.conjugate_cyclic(&u1, &v1, depth)?
        };
        match inner {
            Verdict::Yes(k) => {
                let h = self.product(&[&hu, &k, &self.inv(&hv)?])?;
                if self.conj(&h, v)? != *u {
                    return Err(Error::Verification("HNN conjugator does not conjugate".into()));
                }
                Ok(Verdict::Yes(h))
            }
            other => Ok(other),
        }
    }

    /// Base elements `u`, `v`: conjugate in `A`, or linked through edge subgroups.
    fn conjugate_elliptic(&self, u: &Elem, v: &Elem) -> Result<Verdict<HnnNormalForm>> {
        if let Some(z) = self.base.conjugacy_search(u, v)? {
            return Ok(Verdict::Yes(self.from_base(&z)));
        }
        // State (k, ε) stands for mono(ε)(k), with u = P·state·P⁻¹.
        let mut exact = true;
        let mut seen: BTreeSet<(Elem, i8)> = BTreeSet::new();
        let mut queue: VecDeque<(Elem, i8, HnnNormalForm)> = VecDeque::new();
        let enqueue = |x: &Elem,
                       p: &HnnNormalForm,
                       seen: &mut BTreeSet<(Elem, i8)>,
                       queue: &mut VecDeque<(Elem, i8, HnnNormalForm)>,
                       exact: &mut bool|
         -> Result<()> {
            for eps in [-1i8, 1] {
                let set = self.base.conjugators_into(x, &self.mono(eps).image)?;
                *exact &= set.complete;
                for (h, c) in set.pairs {
                    let k = self.mono(eps).preimage(&c)?.ok_or_else(|| Error::Verification("conjugate left C".into()))?;
                    if seen.insert((k.clone(), eps)) {
                        queue.push_back((k, eps, self.mul(p, &self.from_base(&h))?));
                    }
                }
            }
            Ok(())
        };
        enqueue(u, &self.identity(), &mut seen, &mut queue, &mut exact)?;
        while let Some((k, eps, p)) = queue.pop_front() {
            if seen.len() > STATE_CAP {
                return Ok(Verdict::Unknown("orbit search exceeded its state budget".into()));
            }
            let x = self.mono(eps).apply(&k)?;
            if let Some(z) = self.base.conjugacy_search(&x, v)? {
                return Ok(Verdict::Yes(self.mul(&p, &self.from_base(&z))?));
            }
            // mono(ε)(k) = t^{-ε} mono(-ε)(k) t^{ε}.
            let p2 = self.mul(&p, &self.t(-eps)?)?;
            if seen.insert((k.clone(), -eps)) {
                queue.push_back((k.clone(), -eps, p2));
            }
            enqueue(&x, &p, &mut seen, &mut queue, &mut exact)?;
        }
        if exact {
            Ok(Verdict::No)
        } else {
            Ok(Verdict::Unknown("conjugator sets into the edge subgroups are incomplete".into()))
        }
    }

    /// Edge elements to try, mapped to both sides, and whether that is all of `C₋₁ ∪ C₊₁`.
    fn edge_candidates(&self, depth: usize) -> Result<(Vec<Elem>, bool)> {
        let (ks, complete) = ball(self.edge.as_ref(), depth, STATE_CAP)?;
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for k in &ks {
            for eps in [-1i8, 1] {
                let c = self.mono(eps).apply(k)?;
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
        Ok((out, complete))
    }

    /// `g0 t^{ε1} ... g_{k-1} t^{εk}`.
    fn prefix(&self, x: &HnnNormalForm, k: usize) -> Result<HnnNormalForm> {
        if k == 0 {
            return Ok(self.identity());
        }
        let mut items = vec![Item::Base(x.head.clone())];
        for i in 0..k {
            if i > 0 {
                items.push(Item::Base(x.tail[i - 1].1.clone()));
            }
            items.push(Item::T(x.tail[i].0));
        }
        self.reduce(items)
    }

    /// Long elements: `u = α (P_k⁻¹ v P_k) α⁻¹` with `α` in an edge subgroup.
    fn conjugate_cyclic(&self, u: &HnnNormalForm, v: &HnnNormalForm, depth: usize) -> Result<Verdict<HnnNormalForm>> {
        let (cands, complete) = self.edge_candidates(depth)?;
        for k in 0..v.t_length() {
            let pk = self.prefix(v, k)?;
            let pki = self.inv(&pk)?;
            let rotated = self.conj(&pki, v)?;
            for c in &cands {
                let alpha = self.from_base(c);
                if self.conj(&alpha, &rotated)? == *u {
                    return Ok(Verdict::Yes(self.mul(&alpha, &pki)?));
                }
            }
        }
        if complete {
            Ok(Verdict::No)
        } else {
            Ok(Verdict::Unknown(format!("no edge-subgroup conjugator of word length at most {depth}")))
        }
    }

    fn edge_part(&self, x: &HnnNormalForm) -> Result<Option<i8>> {
        if !x.tail.is_empty() {
            return Ok(None);
        }
        for eps in [-1i8, 1] {
            if self.in_c(eps, &x.head)? {
                return Ok(Some(eps));
            }
        }
        Ok(None)
    }

    fn edge_conjugate(&self, x: &HnnNormalForm) -> Result<Verdict<(HnnNormalForm, HnnNormalForm)>> {
        let (x1, h) = self.cyclically_reduce_nf(x)?;
        if x1.t_length() != 0 {
            return Ok(Verdict::No);
        }
        let mut exact = true;
        for eps in [-1i8, 1] {
            let set = self.base.conjugators_into(&x1.head, &self.mono(eps).image)?;
            exact &= set.complete;
            if let Some((z, c)) = set.pairs.into_iter().next() {
                return Ok(Verdict::Yes((self.mul(&h, &self.from_base(&z))?, self.from_base(&c))));
            }
        }
        Ok(if exact { Verdict::No } else { Verdict::Unknown("incomplete conjugator set".into()) })
    }

    pub fn commute_classify(&self, x: &Word, y: &Word) -> Result<HnnCommute> {
        self.commute_classify_nf(&self.britton_reduce(x)?, &self.britton_reduce(y)?)
    }

    pub fn commute_classify_nf(&self, x: &HnnNormalForm, y: &HnnNormalForm) -> Result<HnnCommute> {
        if !self.commutes(x, y)? {
            return Err(Error::NotCommuting);
        }
        for (swapped, p, q) in [(false, x, y), (true, y, x)] {
            if self.edge_part(p)?.is_some() {
                return Ok(HnnCommute::CSequence { swapped, chain: self.c_sequence(p, q)? });
            }
        }
        let mut unknown = None;
        for (swapped, p) in [(false, x), (true, y)] {
            match self.edge_conjugate(p)? {
                Verdict::Yes((g, c)) => return Ok(HnnCommute::EdgeConjugate { swapped, g, c }),
                Verdict::Unknown(r) => unknown = Some(r),
                Verdict::No => {}
            }
        }
        if let Some(r) = unknown {
            return Ok(HnnCommute::Unknown(r));
        }
        for (p, other) in [(x, y), (y, x)] {
            let (p1, g) = self.cyclically_reduce_nf(p)?;
            if p1.t_length() == 0 {
                let q1 = self.conj(&self.inv(&g)?, other)?;
                if q1.t_length() != 0 {
                    return Err(Error::Verification("commuting element left the conjugate of A".into()));
                }
                return Ok(HnnCommute::SameConjugateOfA { g });
            }
        }
        self.cyclic_structure(x, y)
    }

    /// Conjugates of `x ∈ C` along the letters of `y`: `c_{i+1} = s_i⁻¹ c_i s_i`.
    fn c_sequence(&self, x: &HnnNormalForm, y: &HnnNormalForm) -> Result<Vec<HnnNormalForm>> {
        let mut steps = vec![self.from_base(&y.head)];
        for (e, g) in &y.tail {
            steps.push(self.t(*e)?);
            steps.push(self.from_base(g));
        }
        let mut chain = vec![x.clone()];
        for s in steps {
            let next = self.conj(&self.inv(&s)?, chain.last().expect("nonempty"))?;
            if next.t_length() != 0 {
                return Err(Error::Verification("C-sequence left the base group".into()));
            }
            chain.push(next);
        }
        if chain.last() != Some(x) {
            return Err(Error::Verification("C-sequence does not close up".into()));
        }
        Ok(chain)
    }

    pub fn cyclic_structure(&self, x: &HnnNormalForm, y: &HnnNormalForm) -> Result<HnnCommute> {
        let (x1, g) = self.cyclically_reduce_nf(x)?;
        let gi = self.inv(&g)?;
        let y1 = self.conj(&gi, y)?;
        let (cands, complete) = self.edge_candidates(DEFAULT_DEPTH)?;
        let n = x1.t_length();
        let ny = y1.t_length();
        for step in (1..=n).filter(|s| n % s == 0) {
            let prefix = self.prefix(&x1, step)?;
            for a in &cands {
                let w1 = self.mul(&prefix, &self.from_base(a))?;
                let j = (n / step) as i64;
                let c = self.mul(&x1, &self.pow(&w1, -j)?)?;
                let Some(side) = self.edge_part(&c)? else { continue };
                if ny % step != 0 {
                    continue;
                }
                let kk = (ny / step) as i64;
                for k in [kk, -kk] {
                    let cp = self.mul(&y1, &self.pow(&w1, -k)?)?;
                    if cp.t_length() != 0 || !self.in_c(side, &cp.head)? {
                        continue;
                    }
                    if !(self.commutes(&c, &w1)? && self.commutes(&cp, &w1)? && self.commutes(&c, &cp)?) {
                        continue;
                    }
                    let w = self.conj(&g, &w1)?;
                    let gc = self.conj(&g, &c)?;
                    let gcp = self.conj(&g, &cp)?;
                    if self.mul(&gc, &self.pow(&w, j)?)? != *x || self.mul(&gcp, &self.pow(&w, k)?)? != *y {
                        return Err(Error::Verification("cyclic decomposition does not multiply back".into()));
                    }
                    return Ok(HnnCommute::Cyclic { g, c, c_prime: cp, w, j, k });
                }
            }
        }
        Ok(HnnCommute::Unknown(if complete {
            "no common root found".into()
        } else {
            "common root search over an infinite edge group was truncated".into()
        }))
    }

    /// Generators, as edge-group elements, of `{k : minus(k) = plus(k)}`.
    pub fn fix_phi_edge(&self) -> Result<Vec<Elem>> {
        if let Some(all) = self.edge.elements() {
            let mut keep = Vec::new();
            for k in all {
                if self.minus.apply(&k)? == self.plus.apply(&k)? {
                    keep.push(k);
                }
            }
            return greedy_generators(self.edge.as_ref(), &keep);
        }
        let basis = self.edge.generators();
        if !self.edge.is_abelian() || basis.iter().any(|g| !matches!(g, Elem::Lattice(_))) {
            return Err(Error::capability(self.edge.describe(), "fixed points of φ"));
        }
        let vm = self.minus.image.vertex();
        if vm.is_none() || vm != self.plus.image.vertex() {
            return Err(Error::capability(self.base.describe(), "fixed points of φ across vertices"));
        }
        let v = vm.expect("checked");
        let mut cols = Vec::new();
        for k in &basis {
            let a = self.base_pi.vertex_part(v, &self.minus.apply(k)?)?;
            let b = self.base_pi.vertex_part(v, &self.plus.apply(k)?)?;
            match (a, b) {
                (Some(Elem::Lattice(a)), Some(Elem::Lattice(b))) => {
                    cols.push(b.iter().zip(&a).map(|(x, y)| x - y).collect::<Vec<i64>>())
                }
                _ => return Err(Error::capability(self.base.describe(), "fixed points of φ in a non-lattice group")),
            }
        }
        let dim = cols.first().map_or(0, |c| c.len());
        let kernel = Echelon::new(dim, &cols).kernel;
        let lattice = Echelon::new(basis.len(), &kernel);
        Ok(lattice.cols.into_iter().map(Elem::Lattice).collect())
    }

    /// Generators of `Fix φ` as base elements.
    pub fn fix_phi(&self) -> Result<Vec<Elem>> {
        self.fix_phi_edge()?.iter().map(|k| self.minus.apply(k)).collect()
    }

    fn fills_base(&self, eps: i8) -> Result<bool> {
        for g in self.base.generators() {
            if !self.in_c(eps, &g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Z(A) ∩ Fix φ` as base elements.
    fn central_fixed(&self) -> Result<Vec<Elem>> {
        if let Some(all) = self.edge.elements() {
            let mut keep = Vec::new();
            for k in all {
                let c = self.minus.apply(&k)?;
                if c == self.plus.apply(&k)? && self.base.is_central(&c)? {
                    keep.push(k);
                }
            }
            return greedy_generators(self.edge.as_ref(), &keep)?.iter().map(|k| self.minus.apply(k)).collect();
        }
        if self.base.is_abelian() {
            return self.fix_phi();
        }
        if self.base.center_gens()?.is_empty() {
            return Ok(Vec::new());
        }
        Err(Error::capability(self.base.describe(), "Z(A) ∩ Fix φ"))
    }

    /// Generators of the center; at most one has nonzero `t`-exponent.
    pub fn center(&self) -> Result<Vec<HnnNormalForm>> {
        let mut gens: Vec<HnnNormalForm> = self.central_fixed()?.iter().map(|c| self.from_base(c)).collect();
        if self.fills_base(-1)? && self.fills_base(1)? {
            let a_gens = self.base.generators();
            let images = a_gens.iter().map(|g| self.phi(g)).collect::<Result<Vec<_>>>()?;
            match self.base.outer_order(&images, OUTER_BOUND)? {
                OuterOrder::Infinite => {}
                OuterOrder::Unknown(r) => return Err(Error::Unsupported(format!("order of φ in Out(A): {r}"))),
                OuterOrder::Finite { n, .. } => {
                    if let Some(z) = self.translation_generator(n)? {
                        gens.push(z);
                    }
                }
            }
        }
        let t = self.t(1)?;
        for z in &gens {
            for g in self.base.generators() {
                if !self.commutes(z, &self.from_base(&g))? {
                    return Err(Error::Verification("center generator fails to commute with A".into()));
                }
            }
            if !self.commutes(z, &t)? {
                return Err(Error::Verification("center generator fails to commute with t".into()));
            }
        }
        Ok(gens)
    }

    /// `t^{pn}·a` central with `p ≥ 1` minimal, searched over `a ∈ A`.
    fn translation_generator(&self, n: usize) -> Result<Option<HnnNormalForm>> {
        let (cands, complete) = ball(self.base.as_ref(), DEFAULT_DEPTH, STATE_CAP)?;
        // Past |A| steps the conditions on `a` repeat.
        let p_max = if complete { cands.len().max(1) } else { 1 };
        for p in 1..=p_max {
            let tp = self.pow(&self.t(1)?, (p * n) as i64)?;
            for a in &cands {
                let z = self.mul(&tp, &self.from_base(a))?;
                if self.is_central(&z)? {
                    return Ok(Some(z));
                }
            }
        }
        if complete || self.base.is_abelian() {
            Ok(None)
        } else {
            Err(Error::Unsupported("no central t-translate found within the search bound".into()))
        }
    }

    fn is_central(&self, z: &HnnNormalForm) -> Result<bool> {
        if !self.commutes(z, &self.t(1)?)? {
            return Ok(false);
        }
        for g in self.base.generators() {
            if !self.commutes(z, &self.from_base(&g))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
