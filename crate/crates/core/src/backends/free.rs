use super::{Capability, ConjugatorSet, Elem, GroupOracle, SubKind, Subgroup, Witness};
use crate::error::{Error, Result};
use crate::words::{GeneratorId, Letter, Scope, Word};

/// Free group on `rank` generators; subgroup support is limited to cyclic subgroups.
#[derive(Debug, Clone)]
pub struct FreeGroup {
    rank: usize,
}

fn reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn invert(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|l| -l).collect()
}

fn cat(a: &[i32], b: &[i32]) -> Vec<i32> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    reduce(&v)
}

fn power(w: &[i32], k: i64) -> Vec<i32> {
    let base = if k < 0 { invert(w) } else { w.to_vec() };
    let mut out = Vec::new();
    for _ in 0..k.unsigned_abs() {
        out = cat(&out, &base);
    }
    out
}

/// `w = u r u⁻¹` with `r` cyclically reduced.
fn cyclic_core(w: &[i32]) -> (Vec<i32>, Vec<i32>) {
    let w = reduce(w);
    let mut i = 0;
    while i < w.len() / 2 && w[i] == -w[w.len() - 1 - i] {
        i += 1;
    }
    (w[..i].to_vec(), w[i..w.len() - i].to_vec())
}

/// Shortest `ρ` with `r = ρ^m`, for cyclically reduced nonempty `r`.
fn primitive_root(r: &[i32]) -> Vec<i32> {
    let n = r.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (0..n).all(|i| r[i] == r[i % d]) {
            return r[..d].to_vec();
        }
    }
    r.to_vec()
}

fn rotate(w: &[i32], k: usize) -> Vec<i32> {
    let mut v = w[k..].to_vec();
    v.extend_from_slice(&w[..k]);
    v
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<FreeGroup> {
        if rank == 0 {
            return Err(Error::InvalidGroup("free group rank must be at least 1".into()));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn word<'a>(&self, g: &'a Elem) -> Result<&'a [i32]> {
        match g {
            Elem::Free(w) if self.is_member(g) => Ok(w),
            _ => Err(Error::Foreign { elem: g.to_string(), group: self.describe() }),
        }
    }

    fn cyclic<'a>(&self, h: &'a Subgroup) -> Result<(&'a [i32], &'a [i32])> {
        match &h.kind {
            SubKind::Cyclic { u, r } => Ok((u, r)),
            _ => Err(Error::InvalidSubgroup(format!("not a subgroup of {}", self.describe()))),
        }
    }

    /// `k` with `g = w^k` when it exists.
    fn log(&self, h: &Subgroup, g: &[i32]) -> Result<Option<i64>> {
        let (u, r) = self.cyclic(h)?;
        if r.is_empty() {
            return Ok(g.is_empty().then_some(0));
        }
        let y = cat(&cat(&invert(u), g), u);
        if !y.len().is_multiple_of(r.len()) {
            return Ok(None);
        }
        let k = (y.len() / r.len()) as i64;
        for k in [k, -k] {
            if power(r, k) == y {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Some `h` with `x = h y h⁻¹`, both words given.
    fn conjugator(x: &[i32], y: &[i32]) -> Option<Vec<i32>> {
        let (p, s) = cyclic_core(x);
        let (q, t) = cyclic_core(y);
        if s.len() != t.len() {
            return None;
        }
        if s.is_empty() {
            return Some(Vec::new());
        }
        // s = A⁻¹ t A with t = A B, so x = (p A⁻¹ q⁻¹) y (...)⁻¹.
        (0..t.len()).find(|&k| rotate(&t, k) == s).map(|k| {
            let a = &t[..k];
            cat(&cat(&p, &invert(a)), &invert(&q))
        })
    }
}

impl GroupOracle for FreeGroup {
    fn describe(&self) -> String {
        format!("F{}", self.rank)
    }

    fn capabilities(&self) -> Capability {
        Capability::SUBGROUP_MEMBERSHIP
            | Capability::TRANSVERSAL
            | Capability::CONJUGACY
            | Capability::CONJUGATORS_INTO_SUBGROUP
            | Capability::CENTRALIZER_GENS
            | Capability::CENTER_GENS
    }

    fn identity(&self) -> Elem {
        Elem::Free(Vec::new())
    }

    fn generators(&self) -> Vec<Elem> {
        (1..=self.rank as i32).map(|i| Elem::Free(vec![i])).collect()
    }

    fn is_member(&self, g: &Elem) -> bool {
        match g {
            Elem::Free(w) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.rank)
                    && reduce(w).len() == w.len()
            }
            _ => false,
        }
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(Elem::Free(cat(self.word(a)?, self.word(b)?)))
    }

    fn inv(&self, a: &Elem) -> Result<Elem> {
        Ok(Elem::Free(invert(self.word(a)?)))
    }

    fn is_abelian(&self) -> bool {
        self.rank == 1
    }

    fn letter(&self, gen: &GeneratorId) -> Result<Elem> {
        if gen.index < self.rank {
            Ok(Elem::Free(vec![gen.index as i32 + 1]))
        } else {
            Err(Error::Foreign { elem: gen.to_string(), group: self.describe() })
        }
    }

    fn to_word(&self, g: &Elem, scope: Scope) -> Result<Word> {
        Ok(Word::from_letters(
            self.word(g)?
                .iter()
                .map(|&l| {
                    let gen = GeneratorId { scope, index: l.unsigned_abs() as usize - 1 };
                    Letter::new(gen, if l > 0 { 1 } else { -1 })
                })
                .collect(),
        ))
    }

    fn subgroup(&self, gens: &[Elem]) -> Result<Subgroup> {
        let words: Vec<&[i32]> = gens.iter().map(|g| self.word(g)).collect::<Result<_>>()?;
        let nontrivial: Vec<&&[i32]> = words.iter().filter(|w| !w.is_empty()).collect();
        if nontrivial.len() > 1 {
            return Err(Error::capability(self.describe(), "membership in non-cyclic subgroups"));
        }
        let (u, r) = nontrivial.first().map_or((Vec::new(), Vec::new()), |w| cyclic_core(w));
        Ok(Subgroup { gens: gens.to_vec(), kind: SubKind::Cyclic { u, r } })
    }

    fn subgroup_contains(&self, h: &Subgroup, g: &Elem) -> Result<Option<Witness>> {
        let idx = h.gens.iter().position(|x| !matches!(x, Elem::Free(w) if w.is_empty()));
        Ok(self.log(h, self.word(g)?)?.map(|k| match (idx, k) {
            (_, 0) | (None, _) => Vec::new(),
            (Some(i), k) => vec![(i, k)],
        }))
    }

    fn decompose(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)> {
        let gw = self.word(g)?;
        let (u, r) = self.cyclic(h)?;
        if r.is_empty() {
            return Ok((g.clone(), self.identity()));
        }
        let w = cat(&cat(u, r), &invert(u));
        // Least (length, word) over the coset; the window covers every minimiser.
        let reach = (gw.len() + 2 * u.len()) / r.len() + 2;
        let best = (-(reach as i64)..=reach as i64)
            .map(|k| (k, cat(gw, &power(&w, k))))
            .min_by(|(_, a), (_, b)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .unwrap();
        let (k, rep) = best;
        Ok((Elem::Free(rep), Elem::Free(power(&w, -k))))
    }

    fn conjugators_into(&self, g: &Elem, h: &Subgroup) -> Result<ConjugatorSet> {
        let gw = self.word(g)?;
        let (u, r) = self.cyclic(h)?;
        let centralizer = self.centralizer_gens(g)?;
        let mut pairs = Vec::new();
        if gw.is_empty() {
            pairs.push((self.identity(), self.identity()));
        } else if !r.is_empty() {
            let (_, s) = cyclic_core(gw);
            if s.len() % r.len() == 0 {
                let k = (s.len() / r.len()) as i64;
                let w = cat(&cat(u, r), &invert(u));
                for k in [k, -k] {
                    let c = power(&w, k);
                    if let Some(x) = FreeGroup::conjugator(gw, &c) {
                        pairs.push((Elem::Free(x), Elem::Free(c)));
                    }
                }
            }
        }
        Ok(ConjugatorSet { pairs, centralizer, complete: true })
    }

    fn conjugacy_search(&self, u: &Elem, v: &Elem) -> Result<Option<Elem>> {
        Ok(FreeGroup::conjugator(self.word(u)?, self.word(v)?).map(Elem::Free))
    }

    fn centralizer_gens(&self, g: &Elem) -> Result<Vec<Elem>> {
        let gw = self.word(g)?;
        if gw.is_empty() {
            return Ok(self.generators());
        }
        let (p, s) = cyclic_core(gw);
        let root = primitive_root(&s);
        Ok(vec![Elem::Free(cat(&cat(&p, &root), &invert(&p)))])
    }

    fn center_gens(&self) -> Result<Vec<Elem>> {
        Ok(if self.rank == 1 { self.generators() } else { Vec::new() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(w: &[i32]) -> Elem {
        Elem::Free(w.to_vec())
    }

    #[test]
    fn word_problem() {
        let g = FreeGroup::new(2).unwrap();
        let x = f(&[1]);
        let y = f(&[2]);
        let xy = g.mul(&x, &y).unwrap();
        assert_eq!(g.mul(&xy, &g.inv(&y).unwrap()).unwrap(), x);
        assert!(!g.is_member(&f(&[1, -1])));
    }

    #[test]
    fn cyclic_membership() {
        let g = FreeGroup::new(1).unwrap();
        let h = g.subgroup(&[f(&[1, 1])]).unwrap();
        assert_eq!(g.subgroup_contains(&h, &f(&[1, 1, 1])).unwrap(), None);
        assert_eq!(g.subgroup_contains(&h, &f(&[-1, -1, -1, -1])).unwrap(), Some(vec![(0, -2)]));
    }

    #[test]
    fn conjugated_cyclic_membership() {
        let g = FreeGroup::new(2).unwrap();
        let w = f(&[2, 1, -2]);
        let h = g.subgroup(std::slice::from_ref(&w)).unwrap();
        let w3 = g.mul(&g.mul(&w, &w).unwrap(), &w).unwrap();
        assert_eq!(g.subgroup_contains(&h, &w3).unwrap(), Some(vec![(0, 3)]));
        let (rep, c) = g.decompose(&h, &g.mul(&f(&[1]), &w3).unwrap()).unwrap();
        assert_eq!(g.mul(&rep, &c).unwrap(), g.mul(&f(&[1]), &w3).unwrap());
        assert_eq!(rep, f(&[1]));
    }

    #[test]
    fn conjugacy_and_roots() {
        let g = FreeGroup::new(2).unwrap();
        let (xy, yx) = (f(&[1, 2]), f(&[2, 1]));
        let h = g.conjugacy_search(&xy, &yx).unwrap().unwrap();
        assert_eq!(g.mul(&g.mul(&h, &yx).unwrap(), &g.inv(&h).unwrap()).unwrap(), xy);
        assert!(g.conjugacy_search(&xy, &f(&[1, -2])).unwrap().is_none());
        assert_eq!(g.centralizer_gens(&f(&[1, 1])).unwrap(), vec![f(&[1])]);
        assert!(g.center_gens().unwrap().is_empty());
        assert!(g.subgroup(&[f(&[1]), f(&[2])]).is_err());
    }

    #[test]
    fn conjugators_into_cyclic() {
        let g = FreeGroup::new(2).unwrap();
        let h = g.subgroup(&[f(&[1, 1])]).unwrap();
        let target = f(&[2, 1, 1, -2]);
        let set = g.conjugators_into(&target, &h).unwrap();
        assert_eq!(set.pairs.len(), 1);
        let (x, c) = &set.pairs[0];
        assert_eq!(c, &f(&[1, 1]));
        let xc = g.mul(&g.mul(x, c).unwrap(), &g.inv(x).unwrap()).unwrap();
        assert_eq!(xc, target);
    }
}
