use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{
    closure, greedy_generators, Capability, ConjugatorSet, Elem, GroupOracle,
    OuterOrder, SubKind, Subgroup, Witness,
};
use crate::error::{Error, Result};
use crate::words::{GeneratorId, Letter, Scope, Word};

/// Finite group given by a validated multiplication table.
///
/// Letter `g<i>` names element `i`; the identity need not be element 0.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    n: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    gens: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(name: impl Into<String>, rows: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = rows.len();
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if n == 0 {
            return bad("empty table".into());
        }
        if rows.iter().any(|r| r.len() != n) {
            return bad(format!("table is not {n}x{n}"));
        }
        for (i, r) in rows.iter().enumerate() {
            let mut seen = vec![false; n];
            for &x in r {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return bad(format!("row {i} is not a permutation of 0..{n}"));
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for r in &rows {
                if std::mem::replace(&mut seen[r[j]], true) {
                    return bad(format!("column {j} is not a permutation of 0..{n}"));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = rows[a][b];
                for c in 0..n {
                    if rows[ab][c] != rows[a][rows[b][c]] {
                        return bad(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        let inverse: Vec<usize> =
            (0..n).map(|a| (0..n).find(|&b| rows[a][b] == identity).unwrap()).collect();
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        let mut g = FiniteGroup { name: name.into(), n, table, identity, inverse, gens: Vec::new() };
        let all: Vec<Elem> = (0..n).map(Elem::Table).collect();
        g.gens = greedy_generators(&g, &all)?
            .into_iter()
            .map(|e| match e {
                Elem::Table(i) => i,
                _ => unreachable!(),
            })
            .collect();
        Ok(g)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(format!("Z/{n}"), rows).expect("cyclic table is valid")
    }

    /// Symmetric group on `0..k`, elements in lexicographic order of their
    /// images; the product `p·q` applies `q` first.
    pub fn symmetric(k: usize) -> FiniteGroup {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..k).collect();
        loop {
            perms.push(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let index: BTreeMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let rows = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index[&(0..k).map(|i| p[q[i]]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(format!("S{k}"), rows).expect("permutation table is valid")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn idx(&self, g: &Elem) -> Result<usize> {
        match g {
            Elem::Table(i) if *i < self.n => Ok(*i),
            _ => Err(Error::Foreign { elem: g.to_string(), group: self.name.clone() }),
        }
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    fn members<'a>(&self, h: &'a Subgroup) -> Result<&'a [(Elem, Witness)]> {
        match &h.kind {
            SubKind::Finite(m) => Ok(m),
            _ => Err(Error::InvalidSubgroup(format!("not a subgroup of {}", self.name))),
        }
    }

    /// Extends `gens[i] ↦ images[i]` to a map on the whole group, checking
    /// that it is a well-defined homomorphism.
    fn extend_hom(&self, images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.n];
        map[self.identity] = self.identity;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (j, &g) in self.gens.iter().enumerate() {
                let y = self.m(x, g);
                let img = self.m(map[x], images[j]);
                if map[y] == usize::MAX {
                    map[y] = img;
                    queue.push_back(y);
                } else if map[y] != img {
                    return None;
                }
            }
        }
        Some(map)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

impl GroupOracle for FiniteGroup {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn capabilities(&self) -> Capability {
        Capability::ENUMERATE.normalized()
    }

    fn identity(&self) -> Elem {
        Elem::Table(self.identity)
    }

    fn generators(&self) -> Vec<Elem> {
        self.gens.iter().map(|&i| Elem::Table(i)).collect()
    }

    fn is_member(&self, g: &Elem) -> bool {
        matches!(g, Elem::Table(i) if *i < self.n)
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(Elem::Table(self.m(self.idx(a)?, self.idx(b)?)))
    }

    fn inv(&self, a: &Elem) -> Result<Elem> {
        Ok(Elem::Table(self.inverse[self.idx(a)?]))
    }

    fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.m(a, b) == self.m(b, a)))
    }

    fn letter(&self, gen: &GeneratorId) -> Result<Elem> {
        if gen.index < self.n {
            Ok(Elem::Table(gen.index))
        } else {
            Err(Error::Foreign { elem: gen.to_string(), group: self.name.clone() })
        }
    }

    fn to_word(&self, g: &Elem, scope: Scope) -> Result<Word> {
        let i = self.idx(g)?;
        if i == self.identity {
            return Ok(Word::empty());
        }
        Ok(Word::from_letters(vec![Letter::new(GeneratorId { scope, index: i }, 1)]))
    }

    fn subgroup(&self, gens: &[Elem]) -> Result<Subgroup> {
        let ids: Vec<usize> = gens.iter().map(|g| self.idx(g)).collect::<Result<_>>()?;
        let mut wit: BTreeMap<usize, Witness> = BTreeMap::from([(self.identity, Vec::new())]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (j, &g) in ids.iter().enumerate() {
                for (step, k) in [(g, 1i64), (self.inverse[g], -1)] {
                    let y = self.m(x, step);
                    if !wit.contains_key(&y) {
                        let mut w = wit[&x].clone();
                        match w.last_mut() {
                            Some((i, e)) if *i == j => *e += k,
                            _ => w.push((j, k)),
                        }
                        wit.insert(y, w);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(Subgroup {
            gens: gens.to_vec(),
            kind: SubKind::Finite(wit.into_iter().map(|(e, w)| (Elem::Table(e), w)).collect()),
        })
    }

    fn subgroup_contains(&self, h: &Subgroup, g: &Elem) -> Result<Option<Witness>> {
        self.idx(g)?;
        let m = self.members(h)?;
        Ok(m.binary_search_by(|(e, _)| e.cmp(g)).ok().map(|i| m[i].1.clone()))
    }

    fn decompose(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)> {
        let gi = self.idx(g)?;
        let m = self.members(h)?;
        let rep = m
            .iter()
            .map(|(e, _)| self.m(gi, self.idx(e).unwrap()))
            .min()
            .expect("subgroup contains the identity");
        let c = self.m(self.inverse[rep], gi);
        Ok((Elem::Table(rep), Elem::Table(c)))
    }

    fn conjugators_into(&self, g: &Elem, h: &Subgroup) -> Result<ConjugatorSet> {
        let gi = self.idx(g)?;
        let m = self.members(h)?;
        let inside: BTreeSet<usize> = m.iter().map(|(e, _)| self.idx(e).unwrap()).collect();
        let mut seen = BTreeSet::new();
        let mut pairs = Vec::new();
        for x in 0..self.n {
            let c = self.m(self.m(self.inverse[x], gi), x);
            if inside.contains(&c) && seen.insert(c) {
                pairs.push((Elem::Table(x), Elem::Table(c)));
            }
        }
        Ok(ConjugatorSet { pairs, centralizer: self.centralizer_gens(g)?, complete: true })
    }

    fn conjugacy_search(&self, u: &Elem, v: &Elem) -> Result<Option<Elem>> {
        let (ui, vi) = (self.idx(u)?, self.idx(v)?);
        Ok((0..self.n)
            .find(|&h| self.m(self.m(h, vi), self.inverse[h]) == ui)
            .map(Elem::Table))
    }

    fn centralizer_gens(&self, g: &Elem) -> Result<Vec<Elem>> {
        let gi = self.idx(g)?;
        let members: Vec<Elem> = (0..self.n)
            .filter(|&x| self.m(x, gi) == self.m(gi, x))
            .map(Elem::Table)
            .collect();
        greedy_generators(self, &members)
    }

    fn center_gens(&self) -> Result<Vec<Elem>> {
        let members: Vec<Elem> = (0..self.n)
            .filter(|&x| (0..self.n).all(|y| self.m(x, y) == self.m(y, x)))
            .map(Elem::Table)
            .collect();
        greedy_generators(self, &members)
    }

    fn elements(&self) -> Option<Vec<Elem>> {
        Some((0..self.n).map(Elem::Table).collect())
    }

    fn outer_order(&self, images: &[Elem], bound: usize) -> Result<OuterOrder> {
        let imgs: Vec<usize> = images.iter().map(|g| self.idx(g)).collect::<Result<_>>()?;
        if imgs.len() != self.gens.len() {
            return Err(Error::InvalidMonomorphism("one image per generator expected".into()));
        }
        let phi = self
            .extend_hom(&imgs)
            .filter(|map| map.iter().collect::<BTreeSet<_>>().len() == self.n)
            .ok_or_else(|| Error::InvalidMonomorphism("images do not define an automorphism".into()))?;
        let mut power: Vec<usize> = (0..self.n).collect();
        for n in 1..=bound {
            power = power.iter().map(|&x| phi[x]).collect();
            let inner = (0..self.n).find(|&a| {
                self.gens
                    .iter()
                    .all(|&g| power[g] == self.m(self.m(a, g), self.inverse[a]))
            });
            if let Some(a0) = inner {
                return Ok(OuterOrder::Finite { n, a0: Elem::Table(a0) });
            }
        }
        Ok(OuterOrder::Unknown(format!("no inner power up to {bound}")))
    }

    fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        let sa: BTreeSet<Elem> = self.members(a)?.iter().map(|(e, _)| e.clone()).collect();
        let both: Vec<Elem> =
            self.members(b)?.iter().map(|(e, _)| e.clone()).filter(|e| sa.contains(e)).collect();
        let gens = greedy_generators(self, &both)?;
        self.subgroup(&gens)
    }
}

impl FiniteGroup {
    /// Members of the subgroup generated by `gens`.
    pub fn span(&self, gens: &[Elem]) -> Result<BTreeSet<Elem>> {
        closure(self, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::GroupExt;

    fn s3() -> FiniteGroup {
        FiniteGroup::symmetric(3)
    }

    // lexicographic S3: 0 id, 1 (23), 2 (12), 3 (123)->[1,2,0], 4 [2,0,1], 5 (13)
    const T12: Elem = Elem::Table(2);
    const T13: Elem = Elem::Table(5);

    #[test]
    fn involution_squares_to_identity() {
        let g = s3();
        assert_eq!(g.mul(&T12, &T12).unwrap(), g.identity());
        assert!(!g.is_abelian());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table("x", vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(FiniteGroup::from_table("x", vec![]).is_err());
        // Latin square without associativity: the quasigroup of order 3 with x*y = 2x+2y mod 3.
        let rows = (0..3).map(|a| (0..3).map(|b| (2 * a + 2 * b) % 3).collect()).collect();
        assert!(FiniteGroup::from_table("q", rows).is_err());
    }

    #[test]
    fn z6_membership_and_cosets() {
        let z6 = FiniteGroup::cyclic(6);
        let h = z6.subgroup(&[Elem::Table(2)]).unwrap();
        assert_eq!(z6.subgroup_contains(&h, &Elem::Table(4)).unwrap(), Some(vec![(0, -1)]));
        assert_eq!(z6.subgroup_contains(&h, &Elem::Table(3)).unwrap(), None);
        assert_eq!(z6.decompose(&h, &Elem::Table(3)).unwrap(), (Elem::Table(1), Elem::Table(2)));
        assert_eq!(z6.decompose(&h, &Elem::Table(0)).unwrap(), (Elem::Table(0), Elem::Table(0)));
    }

    #[test]
    fn conjugators_into_order_two_subgroup() {
        let g = s3();
        let h = g.subgroup(&[T12]).unwrap();
        let set = g.conjugators_into(&T13, &h).unwrap();
        assert_eq!(set.pairs.len(), 1);
        let (x, c) = &set.pairs[0];
        assert_eq!(c, &T12);
        assert_eq!(g.conj(x, c).unwrap(), T13);
        let rot = Elem::Table(3);
        assert!(g.conjugators_into(&rot, &h).unwrap().pairs.is_empty());
    }

    #[test]
    fn centralizer_and_center() {
        let g = s3();
        let rot = Elem::Table(3);
        let z = g.span(&g.centralizer_gens(&rot).unwrap()).unwrap();
        assert_eq!(z, [Elem::Table(0), Elem::Table(3), Elem::Table(4)].into_iter().collect());
        assert!(g.center_gens().unwrap().is_empty());
        assert!(g.conjugacy_search(&T12, &T13).unwrap().is_some());
    }

    #[test]
    fn outer_order_of_inner_and_outer_maps() {
        let z6 = FiniteGroup::cyclic(6);
        let gens = z6.generators();
        assert_eq!(gens, vec![Elem::Table(1)]);
        assert_eq!(
            z6.outer_order(&[Elem::Table(1)], 64).unwrap(),
            OuterOrder::Finite { n: 1, a0: Elem::Table(0) }
        );
        assert_eq!(
            z6.outer_order(&[Elem::Table(5)], 64).unwrap(),
            OuterOrder::Finite { n: 2, a0: Elem::Table(0) }
        );
        assert!(z6.outer_order(&[Elem::Table(2)], 64).is_err());
    }
}
