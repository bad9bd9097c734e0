//! Amalgamated free products `A *_C B`: normal forms, cyclic reduction,
//! conjugacy, commutation and center.
//!
//! The edge group `E` embeds in both factors; `C_A` and `C_B` are its images.
//! Normal forms list left-coset representatives and push the `C` part to the
//! right into `trailing`, kept in `A`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::backends::{ball, Elem, GroupExt, Monomorphism, Oracle};
use crate::error::{Error, Result, Verdict};
use crate::gog::{Pi1Oracle, TreeSplit};
use crate::words::{Scope, Word};

/// Candidate conjugators searched per factor syllable.
pub const DEFAULT_DEPTH: usize = 6;

/// BFS cap on orbit states.
const STATE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmalgamNormalForm {
    /// Alternating sides when there are two or more syllables.
    pub syllables: Vec<(Side, Elem)>,
    /// Element of `C_A`; the identity for single-syllable forms.
    pub trailing: Elem,
}

impl AmalgamNormalForm {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone)]
pub struct AmalgamPresentation {
    pub a: Oracle,
    pub b: Oracle,
    pub edge: Oracle,
    pub into_a: Monomorphism,
    pub into_b: Monomorphism,
    sides: BTreeMap<Scope, Side>,
}

/// Classification of a commuting pair.
#[derive(Debug, Clone)]
pub enum AmalgamCommute {
    /// `x ∈ C`; `chain[0] = chain[n] = x` and syllable `y_i` conjugates
    /// `chain[i-1]` to `chain[i]` inside a factor.
    CSequence { swapped: bool, chain: Vec<AmalgamNormalForm> },
    /// `x = g c g⁻¹` (or `y`, when `swapped`) with `c ∈ C`.
    EdgeConjugate { swapped: bool, g: AmalgamNormalForm, c: AmalgamNormalForm },
    /// Both lie in `g·factor·g⁻¹`.
    SameFactor { g: AmalgamNormalForm, side: Side },
    /// `x = g h g⁻¹·W^j`, `y = g h' g⁻¹·W^k` with `h, h' ∈ C`.
    Cyclic {
        g: AmalgamNormalForm,
        h: AmalgamNormalForm,
        h_prime: AmalgamNormalForm,
        w: AmalgamNormalForm,
        j: i64,
        k: i64,
    },
    Unknown(String),
}

impl AmalgamPresentation {
    pub fn new(split: TreeSplit) -> AmalgamPresentation {
        let mut sides = BTreeMap::new();
        for (side, p) in [(Side::A, &split.a), (Side::B, &split.b)] {
            for &v in p.vertex_set() {
                sides.insert(Scope::Vertex(v), side);
            }
            for &e in p.edge_set() {
                sides.insert(Scope::Stable(e), side);
            }
        }
        let edge = split.into_a.source.clone();
        AmalgamPresentation {
            a: split.into_a.target.clone(),
            b: split.into_b.target.clone(),
            edge,
            into_a: split.into_a,
            into_b: split.into_b,
            sides,
        }
    }

    /// Splits a fundamental group along one of its tree edges.
    pub fn along(p: &Pi1Oracle, e: usize) -> Result<AmalgamPresentation> {
        match p.decompose_edge(e)? {
            crate::gog::Split::Amalgam(s) => Ok(AmalgamPresentation::new(s)),
            crate::gog::Split::Hnn(_) => Err(Error::Invalid(vec![format!("edge {e} is not a tree edge")])),
        }
    }

    pub fn factor(&self, s: Side) -> &Oracle {
        match s {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn iota(&self, s: Side) -> &Monomorphism {
        match s {
            Side::A => &self.into_a,
            Side::B => &self.into_b,
        }
    }

    /// Edge-group preimage of `x` when `x ∈ C_s`.
    pub fn in_c(&self, s: Side, x: &Elem) -> Result<Option<Elem>> {
        self.iota(s).preimage(x)
    }

    pub fn side_of(&self, scope: Scope) -> Result<Side> {
        self.sides
            .get(&scope)
            .copied()
            .ok_or_else(|| Error::Foreign { elem: format!("{scope:?}"), group: "amalgam".into() })
    }

    pub fn identity(&self) -> AmalgamNormalForm {
        AmalgamNormalForm { syllables: vec![(Side::A, self.a.identity())], trailing: self.a.identity() }
    }

    pub fn from_factor(&self, s: Side, x: &Elem) -> Result<AmalgamNormalForm> {
        self.reduce(vec![(s, x.clone())])
    }

    pub fn from_edge(&self, e: &Elem) -> Result<AmalgamNormalForm> {
        self.from_factor(Side::A, &self.into_a.apply(e)?)
    }

    /// Normal form of an arbitrary product of factor elements.
    pub fn reduce(&self, items: Vec<(Side, Elem)>) -> Result<AmalgamNormalForm> {
        let mut st: Vec<(Side, Elem)> = Vec::new();
        for (s, x) in items {
            self.push(&mut st, s, x)?;
        }
        if st.is_empty() {
            return Ok(self.identity());
        }
        if st.len() == 1 {
            return Ok(AmalgamNormalForm { syllables: st, trailing: self.a.identity() });
        }
        let mut carry = self.edge.identity();
        let mut syllables = Vec::with_capacity(st.len());
        for (s, x) in st {
            let f = self.factor(s);
            let x = f.mul(&self.iota(s).apply(&carry)?, &x)?;
            let (r, c) = f.decompose(&self.iota(s).image, &x)?;
            carry = self
                .in_c(s, &c)?
                .ok_or_else(|| Error::Verification("coset decomposition left C".into()))?;
            syllables.push((s, r));
        }
        Ok(AmalgamNormalForm { syllables, trailing: self.into_a.apply(&carry)? })
    }

    fn push(&self, st: &mut Vec<(Side, Elem)>, s: Side, x: Elem) -> Result<()> {
        if let Some(k) = self.in_c(s, &x)? {
            match st.last_mut() {
                None => st.push((Side::A, self.into_a.apply(&k)?)),
                Some((ts, top)) => {
                    let c = self.iota(*ts).apply(&k)?;
                    *top = self.factor(*ts).mul(top, &c)?;
                }
            }
            return Ok(());
        }
        let single_c = match st.as_slice() {
            [(ts, top)] => self.in_c(*ts, top)?,
            _ => None,
        };
        match st.last_mut() {
            None => st.push((s, x)),
            Some((ts, top)) if *ts == s => {
                *top = self.factor(s).mul(top, &x)?;
                if let Some(k) = self.in_c(s, top)? {
                    st.pop();
                    let c = self.into_a.apply(&k)?;
                    self.push(st, Side::A, c)?;
                }
            }
            Some(_) => match single_c {
                Some(k) => {
                    let c = self.iota(s).apply(&k)?;
                    st[0] = (s, self.factor(s).mul(&c, &x)?);
                }
                None => st.push((s, x)),
            },
        }
        Ok(())
    }

    fn expand(&self, g: &AmalgamNormalForm) -> Vec<(Side, Elem)> {
        let mut out = g.syllables.clone();
        if g.trailing != self.a.identity() {
            out.push((Side::A, g.trailing.clone()));
        }
        out
    }

    pub fn mul(&self, x: &AmalgamNormalForm, y: &AmalgamNormalForm) -> Result<AmalgamNormalForm> {
        let mut items = self.expand(x);
        items.extend(self.expand(y));
        self.reduce(items)
    }

    pub fn inv(&self, x: &AmalgamNormalForm) -> Result<AmalgamNormalForm> {
        let items = self
            .expand(x)
            .into_iter()
            .rev()
            .map(|(s, e)| Ok((s, self.factor(s).inv(&e)?)))
            .collect::<Result<Vec<_>>>()?;
        self.reduce(items)
    }

    pub fn product(&self, items: &[&AmalgamNormalForm]) -> Result<AmalgamNormalForm> {
        let mut all = Vec::new();
        for x in items {
            all.extend(self.expand(x));
        }
        self.reduce(all)
    }

    pub fn pow(&self, x: &AmalgamNormalForm, k: i64) -> Result<AmalgamNormalForm> {
        let base = if k < 0 { self.inv(x)? } else { x.clone() };
        let mut items = Vec::new();
        for _ in 0..k.unsigned_abs() {
            items.extend(self.expand(&base));
        }
        self.reduce(items)
    }

    /// `h x h⁻¹`.
    pub fn conj(&self, h: &AmalgamNormalForm, x: &AmalgamNormalForm) -> Result<AmalgamNormalForm> {
        self.product(&[h, x, &self.inv(h)?])
    }

    pub fn commutes(&self, x: &AmalgamNormalForm, y: &AmalgamNormalForm) -> Result<bool> {
        Ok(self.mul(x, y)? == self.mul(y, x)?)
    }

    pub fn is_identity(&self, x: &AmalgamNormalForm) -> bool {
        *x == self.identity()
    }

    /// Edge-group element when `x ∈ C`.
    pub fn edge_part(&self, x: &AmalgamNormalForm) -> Result<Option<Elem>> {
        match x.syllables.as_slice() {
            [(s, e)] => self.in_c(*s, e),
            _ => Ok(None),
        }
    }

    pub fn normal_form(&self, w: &Word) -> Result<AmalgamNormalForm> {
        let mut items = Vec::new();
        for (side, run) in self.word_runs(w)? {
            items.push((side, self.factor(side).eval_word(&run)?));
        }
        self.reduce(items)
    }

    fn word_runs(&self, w: &Word) -> Result<Vec<(Side, Word)>> {
        for l in &w.letters {
            self.side_of(l.gen.scope)?;
        }
        Ok(w.runs_by(|l| self.sides[&l.gen.scope]))
    }

    pub fn to_word(&self, x: &AmalgamNormalForm) -> Result<Word> {
        let mut w = Word::empty();
        for (s, e) in self.expand(x) {
            w = w.concat(&self.factor(s).to_word(&e, Scope::Vertex(0))?);
        }
        Ok(w)
    }

    pub fn is_cyclically_reduced(&self, x: &AmalgamNormalForm) -> bool {
        let l = x.len();
        l <= 1 || x.syllables[0].0 != x.syllables[l - 1].0
    }

    /// `(x', h)` with `x = h x' h⁻¹` and `x'` cyclically reduced.
    pub fn cyclically_reduce_nf(
        &self,
        x: &AmalgamNormalForm,
    ) -> Result<(AmalgamNormalForm, AmalgamNormalForm)> {
        let mut g = x.clone();
        let mut conj = self.identity();
        while !self.is_cyclically_reduced(&g) {
            let (s, last) = g.syllables.last().cloned().expect("nonempty");
            let h = self.reduce(vec![(s, last), (Side::A, g.trailing.clone())])?;
            g = self.conj(&h, &g)?;
            conj = self.mul(&conj, &self.inv(&h)?)?;
        }
        Ok((g, conj))
    }

    pub fn cyclically_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        let (g, h) = self.cyclically_reduce_nf(&self.normal_form(w)?)?;
        Ok((self.to_word(&g)?, self.to_word(&h)?))
    }

    /// Edge-group elements to try as `C`-conjugators, and whether that is all of them.
    fn edge_candidates(&self, depth: usize) -> Result<(Vec<Elem>, bool)> {
        ball(self.edge.as_ref(), depth, STATE_CAP)
    }

    pub fn is_conjugate(&self, u: &Word, v: &Word, depth: usize) -> Verdict<Word> {
        let run = || -> Result<Verdict<Word>> {
            let verdict = self.is_conjugate_nf(&self.normal_form(u)?, &self.normal_form(v)?, depth)?;
            Ok(match verdict {
                Verdict::Yes(h) => Verdict::Yes(self.to_word(&h)?),
                Verdict::No => Verdict::No,
                Verdict::Unknown(r) => Verdict::Unknown(r),
            })
        };
        run().unwrap_or_else(|e| Verdict::Unknown(e.to_string()))
    }

    /// Decides whether `u = h v h⁻¹` for some `h`, returning a verified `h`.
    pub fn is_conjugate_nf(
        &self,
        u: &AmalgamNormalForm,
        v: &AmalgamNormalForm,
        depth: usize,
    ) -> Result<Verdict<AmalgamNormalForm>> {
        let (u1, hu) = self.cyclically_reduce_nf(u)?;
        let (v1, hv) = self.cyclically_reduce_nf(v)?;
        if u1.len() != v1.len() {
            return Ok(Verdict::No);
        }
        let inner = if u1.len() == 1 { self.conjugate_elliptic(&u1, &v1)? } else { self.conjugate_cyclic(&u1, &v1, depth)? };
        match inner {
            Verdict::Yes(k) => {
                // u = hu u1 hu⁻¹, u1 = k v1 k⁻¹, v1 = hv⁻¹ v hv
                let h = self.product(&[&hu, &k, &self.inv(&hv)?])?;
                if self.conj(&h, v)? != *u {
                    return Err(Error::Verification("amalgam conjugator does not conjugate".into()));
                }
                Ok(Verdict::Yes(h))
            }
            other => Ok(other),
        }
    }

    fn single(&self, x: &AmalgamNormalForm) -> (Side, Elem) {
        x.syllables[0].clone()
    }

    /// Sides on which a length-one element can be conjugated.
    fn sides_of(&self, x: &AmalgamNormalForm) -> Result<Vec<(Side, Elem)>> {
        let (s, e) = self.single(x);
        match self.in_c(s, &e)? {
            Some(k) => Ok(vec![(Side::A, self.into_a.apply(&k)?), (Side::B, self.into_b.apply(&k)?)]),
            None => Ok(vec![(s, e)]),
        }
    }

    /// Both elements lie in factors.
    fn conjugate_elliptic(
        &self,
        u: &AmalgamNormalForm,
        v: &AmalgamNormalForm,
    ) -> Result<Verdict<AmalgamNormalForm>> {
        let targets = self.sides_of(v)?;
        let reach = |side: Side, x: &Elem| -> Result<Option<AmalgamNormalForm>> {
            for (ts, tv) in &targets {
                if *ts == side {
                    if let Some(z) = self.factor(side).conjugacy_search(x, tv)? {
                        return Ok(Some(self.from_factor(side, &z)?));
                    }
                }
            }
            Ok(None)
        };
        for (s, x) in self.sides_of(u)? {
            if let Some(z) = reach(s, &x)? {
                return Ok(Verdict::Yes(z));
            }
        }
        // Orbit search over C: state k means ι(k), reached as P ι(k) P⁻¹ = u.
        let mut exact = true;
        let mut seen: BTreeSet<Elem> = BTreeSet::new();
        let mut queue: VecDeque<(Elem, AmalgamNormalForm)> = VecDeque::new();
        for (s, x) in self.sides_of(u)? {
            let set = self.factor(s).conjugators_into(&x, &self.iota(s).image)?;
            exact &= set.complete;
            for (h, c) in set.pairs {
                let k = self.in_c(s, &c)?.ok_or_else(|| Error::Verification("conjugate left C".into()))?;
                if seen.insert(k.clone()) {
                    queue.push_back((k, self.from_factor(s, &h)?));
                }
            }
        }
        while let Some((k, p)) = queue.pop_front() {
            for s in [Side::A, Side::B] {
                let x = self.iota(s).apply(&k)?;
                if let Some(z) = reach(s, &x)? {
                    return Ok(Verdict::Yes(self.mul(&p, &z)?));
                }
                let set = self.factor(s).conjugators_into(&x, &self.iota(s).image)?;
                exact &= set.complete;
                for (h, c) in set.pairs {
                    let k2 = self.in_c(s, &c)?.ok_or_else(|| Error::Verification("conjugate left C".into()))?;
                    if seen.insert(k2.clone()) {
                        if seen.len() > STATE_CAP {
                            return Ok(Verdict::Unknown("orbit search exceeded its state budget".into()));
                        }
                        queue.push_back((k2, self.mul(&p, &self.from_factor(s, &h)?)?));
                    }
                }
            }
        }
        if exact {
            Ok(Verdict::No)
        } else {
            Ok(Verdict::Unknown("conjugator sets into C are incomplete".into()))
        }
    }

    /// Long elements: `u` is a `C`-conjugate of a cyclic permutation of `v`.
    fn conjugate_cyclic(
        &self,
        u: &AmalgamNormalForm,
        v: &AmalgamNormalForm,
        depth: usize,
    ) -> Result<Verdict<AmalgamNormalForm>> {
        let (cands, complete) = self.edge_candidates(depth)?;
        for k in 0..v.len() {
            let prefix = self.reduce(v.syllables[..k].to_vec())?;
            let rotated = self.conj(&self.inv(&prefix)?, v)?;
            for c in &cands {
                let alpha = self.from_edge(c)?;
                if self.conj(&alpha, &rotated)? == *u {
                    return Ok(Verdict::Yes(self.mul(&alpha, &self.inv(&prefix)?)?));
                }
            }
        }
        if complete {
            Ok(Verdict::No)
        } else {
            Ok(Verdict::Unknown(format!("no C-conjugator of word length at most {depth}")))
        }
    }

    /// `x ∈ g C g⁻¹`: returns `(g, c)`.
    fn edge_conjugate(&self, x: &AmalgamNormalForm) -> Result<Verdict<(AmalgamNormalForm, AmalgamNormalForm)>> {
        let (x1, h) = self.cyclically_reduce_nf(x)?;
        if x1.len() != 1 {
            return Ok(Verdict::No);
        }
        let mut exact = true;
        for (s, e) in self.sides_of(&x1)? {
            let set = self.factor(s).conjugators_into(&e, &self.iota(s).image)?;
            exact &= set.complete;
            if let Some((z, c)) = set.pairs.into_iter().next() {
                let g = self.mul(&h, &self.from_factor(s, &z)?)?;
                return Ok(Verdict::Yes((g, self.from_factor(s, &c)?)));
            }
        }
        Ok(if exact { Verdict::No } else { Verdict::Unknown("incomplete conjugator set".into()) })
    }

    pub fn commute_classify(&self, x: &Word, y: &Word) -> Result<AmalgamCommute> {
        self.commute_classify_nf(&self.normal_form(x)?, &self.normal_form(y)?)
    }

    pub fn commute_classify_nf(&self, x: &AmalgamNormalForm, y: &AmalgamNormalForm) -> Result<AmalgamCommute> {
        if !self.commutes(x, y)? {
            return Err(Error::NotCommuting);
        }
        for (swapped, p, q) in [(false, x, y), (true, y, x)] {
            if self.edge_part(p)?.is_some() {
                let chain = self.c_sequence(p, q)?;
                return Ok(AmalgamCommute::CSequence { swapped, chain });
            }
        }
        let mut unknown = None;
        for (swapped, p) in [(false, x), (true, y)] {
            match self.edge_conjugate(p)? {
                Verdict::Yes((g, c)) => return Ok(AmalgamCommute::EdgeConjugate { swapped, g, c }),
                Verdict::Unknown(r) => unknown = Some(r),
                Verdict::No => {}
            }
        }
        if let Some(r) = unknown {
            return Ok(AmalgamCommute::Unknown(r));
        }
        for (p, other) in [(x, y), (y, x)] {
            let (p1, g) = self.cyclically_reduce_nf(p)?;
            if p1.len() == 1 {
                let side = p1.syllables[0].0;
                let q1 = self.conj(&self.inv(&g)?, other)?;
                if q1.len() != 1 || (q1.syllables[0].0 != side && self.edge_part(&q1)?.is_none()) {
                    return Err(Error::Verification("commuting element left the factor conjugate".into()));
                }
                return Ok(AmalgamCommute::SameFactor { g, side });
            }
        }
        self.cyclic_structure(x, y)
    }

    /// Conjugates of `x ∈ C` along the syllables of `y`.
    fn c_sequence(&self, x: &AmalgamNormalForm, y: &AmalgamNormalForm) -> Result<Vec<AmalgamNormalForm>> {
        let mut syl: Vec<(Side, Elem)> = y.syllables.clone();
        if let Some((s, last)) = syl.last_mut() {
            let t = self.iota(*s).apply(&self.in_c(Side::A, &y.trailing)?.expect("trailing lies in C"))?;
            *last = self.factor(*s).mul(last, &t)?;
        }
        let mut chain = vec![x.clone()];
        for (s, yi) in syl {
            let yi = self.from_factor(s, &yi)?;
            let next = self.conj(&self.inv(&yi)?, chain.last().expect("nonempty"))?;
            if self.edge_part(&next)?.is_none() {
                return Err(Error::Verification("C-sequence left C".into()));
            }
            chain.push(next);
        }
        if chain.last() != Some(x) {
            return Err(Error::Verification("C-sequence does not close up".into()));
        }
        Ok(chain)
    }

    /// Long elements: common root `W` along the shared axis.
    pub fn cyclic_structure(&self, x: &AmalgamNormalForm, y: &AmalgamNormalForm) -> Result<AmalgamCommute> {
        let (x1, g) = self.cyclically_reduce_nf(x)?;
        let gi = self.inv(&g)?;
        let y1 = self.conj(&gi, y)?;
        let (cands, complete) = self.edge_candidates(DEFAULT_DEPTH)?;
        let l = x1.len();
        let ly = y1.len();
        for step in 1..=l {
            if l % step != 0 {
                continue;
            }
            let prefix = self.reduce(x1.syllables[..step].to_vec())?;
            for c in &cands {
                let w1 = self.mul(&prefix, &self.from_edge(c)?)?;
                let j = (l / step) as i64;
                let h = self.mul(&x1, &self.pow(&w1, -j)?)?;
                if self.edge_part(&h)?.is_none() || !self.commutes(&h, &w1)? {
                    continue;
                }
                for k in candidate_exponents(ly, step) {
                    let hp = self.mul(&y1, &self.pow(&w1, -k)?)?;
                    if self.edge_part(&hp)?.is_some() && self.commutes(&hp, &w1)? && self.commutes(&hp, &h)? {
                        let w = self.conj(&g, &w1)?;
                        let gh = self.conj(&g, &h)?;
                        let ghp = self.conj(&g, &hp)?;
                        if self.mul(&gh, &self.pow(&w, j)?)? != *x || self.mul(&ghp, &self.pow(&w, k)?)? != *y {
                            return Err(Error::Verification("cyclic decomposition does not multiply back".into()));
                        }
                        return Ok(AmalgamCommute::Cyclic { g, h, h_prime: hp, w, j, k });
                    }
                }
            }
        }
        Ok(AmalgamCommute::Unknown(if complete {
            "no common root found".into()
        } else {
            "common root search over an infinite edge group was truncated".into()
        }))
    }

    /// `Z(A) ∩ Z(B)`, as edge-group elements mapped into the amalgam.
    pub fn center(&self) -> Result<Vec<AmalgamNormalForm>> {
        for s in [Side::A, Side::B] {
            let f = self.factor(s);
            let mut proper = false;
            for g in f.generators() {
                if self.in_c(s, &g)?.is_none() {
                    proper = true;
                    break;
                }
            }
            if !proper {
                return Err(Error::Nontriviality(format!("factor {s} equals the amalgamated subgroup")));
            }
        }
        let gens = central_edge_elements(self.edge.as_ref(), &[(&self.a, &self.into_a), (&self.b, &self.into_b)])?;
        gens.iter().map(|e| self.from_edge(e)).collect()
    }
}

/// Exponents `k` with `|W^k| = ly` for `|W| = step`, positive first.
fn candidate_exponents(ly: usize, step: usize) -> Vec<i64> {
    if !ly.is_multiple_of(step) {
        return Vec::new();
    }
    let k = (ly / step) as i64;
    if k == 0 { vec![0] } else { vec![k, -k] }
}

/// Generators of `{e ∈ E : m(e) is central in its group for every (group, m)}`.
pub(crate) fn central_edge_elements(edge: &dyn crate::backends::GroupOracle, maps: &[(&Oracle, &Monomorphism)]) -> Result<Vec<Elem>> {
    if let Some(all) = edge.elements() {
        let mut keep = Vec::new();
        'e: for e in all {
            for (f, m) in maps {
                if !f.is_central(&m.apply(&e)?)? {
                    continue 'e;
                }
            }
            keep.push(e);
        }
        return crate::backends::greedy_generators(edge, &keep);
    }
    // Infinite edge group: every factor must be abelian or have trivial center.
    let mut sub: Option<crate::backends::Subgroup> = None;
    for (f, m) in maps {
        let part = if f.is_abelian() {
            edge.subgroup(&edge.generators())?
        } else {
            let z = f.center_gens()?;
            if z.is_empty() {
                edge.subgroup(&[])?
            } else {
                let zs = f.subgroup(&z)?;
                let inside = f.intersect(&m.image, &zs)?;
                let pre = inside
                    .gens
                    .iter()
                    .map(|c| m.preimage(c)?.ok_or_else(|| Error::Verification("center left C".into())))
                    .collect::<Result<Vec<_>>>()?;
                edge.subgroup(&pre)?
            }
        };
        sub = Some(match sub {
            None => part,
            Some(prev) => edge.intersect(&prev, &part)?,
        });
    }
    Ok(sub.map(|s| s.gens).unwrap_or_default().into_iter().filter(|g| *g != edge.identity()).collect())
}
