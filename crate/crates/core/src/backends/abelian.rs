use super::lattice::{mat_mul, Echelon};
use super::{Capability, ConjugatorSet, Elem, GroupOracle, OuterOrder, SubKind, Subgroup, Witness};
use crate::error::{Error, Result};
use crate::words::{GeneratorId, Scope, Word};

/// Ranks up to this bound have every finite matrix order at most 64.
const EXHAUSTIVE_RANK: usize = 9;

/// `ℤⁿ` with coordinate vectors; letter `g<i>` is the i-th basis vector.
#[derive(Debug, Clone)]
pub struct FreeAbelianGroup {
    rank: usize,
}

impl FreeAbelianGroup {
    pub fn new(rank: usize) -> Result<FreeAbelianGroup> {
        if rank == 0 {
            return Err(Error::InvalidGroup("free abelian rank must be at least 1".into()));
        }
        Ok(FreeAbelianGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vector(&self, g: &Elem) -> Result<Vec<i64>> {
        match g {
            Elem::Lattice(v) if v.len() == self.rank => Ok(v.clone()),
            _ => Err(Error::Foreign { elem: g.to_string(), group: self.describe() }),
        }
    }

    fn echelon<'a>(&self, h: &'a Subgroup) -> Result<&'a Echelon> {
        match &h.kind {
            SubKind::Lattice(e) if e.dim == self.rank => Ok(e),
            _ => Err(Error::InvalidSubgroup(format!("not a subgroup of {}", self.describe()))),
        }
    }

    pub fn unit(&self, i: usize) -> Elem {
        let mut v = vec![0; self.rank];
        v[i] = 1;
        Elem::Lattice(v)
    }
}

impl GroupOracle for FreeAbelianGroup {
    fn describe(&self) -> String {
        format!("Z^{}", self.rank)
    }

    fn capabilities(&self) -> Capability {
        Capability::all() - Capability::ENUMERATE
    }

    fn identity(&self) -> Elem {
        Elem::Lattice(vec![0; self.rank])
    }

    fn generators(&self) -> Vec<Elem> {
        (0..self.rank).map(|i| self.unit(i)).collect()
    }

    fn is_member(&self, g: &Elem) -> bool {
        matches!(g, Elem::Lattice(v) if v.len() == self.rank)
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let (a, b) = (self.vector(a)?, self.vector(b)?);
        Ok(Elem::Lattice(a.iter().zip(&b).map(|(x, y)| x + y).collect()))
    }

    fn inv(&self, a: &Elem) -> Result<Elem> {
        Ok(Elem::Lattice(self.vector(a)?.iter().map(|x| -x).collect()))
    }

    fn is_abelian(&self) -> bool {
        true
    }

    fn letter(&self, gen: &GeneratorId) -> Result<Elem> {
        if gen.index < self.rank {
            Ok(self.unit(gen.index))
        } else {
            Err(Error::Foreign { elem: gen.to_string(), group: self.describe() })
        }
    }

    fn to_word(&self, g: &Elem, scope: Scope) -> Result<Word> {
        let v = self.vector(g)?;
        let mut w = Word::empty();
        for (i, &k) in v.iter().enumerate() {
            w = w.concat(&Word::power_of(GeneratorId { scope, index: i }, k));
        }
        Ok(w)
    }

    fn subgroup(&self, gens: &[Elem]) -> Result<Subgroup> {
        let cols: Vec<Vec<i64>> = gens.iter().map(|g| self.vector(g)).collect::<Result<_>>()?;
        Ok(Subgroup { gens: gens.to_vec(), kind: SubKind::Lattice(Echelon::new(self.rank, &cols)) })
    }

    fn subgroup_contains(&self, h: &Subgroup, g: &Elem) -> Result<Option<Witness>> {
        let (rep, coef) = self.echelon(h)?.reduce(&self.vector(g)?);
        if rep.iter().any(|&x| x != 0) {
            return Ok(None);
        }
        Ok(Some(coef.into_iter().enumerate().filter(|&(_, k)| k != 0).collect()))
    }

    fn decompose(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)> {
        let v = self.vector(g)?;
        let (rep, _) = self.echelon(h)?.reduce(&v);
        let c = v.iter().zip(&rep).map(|(x, r)| x - r).collect();
        Ok((Elem::Lattice(rep), Elem::Lattice(c)))
    }

    fn conjugators_into(&self, g: &Elem, h: &Subgroup) -> Result<ConjugatorSet> {
        let pairs = match self.subgroup_contains(h, g)? {
            Some(_) => vec![(self.identity(), g.clone())],
            None => Vec::new(),
        };
        Ok(ConjugatorSet { pairs, centralizer: self.generators(), complete: true })
    }

    fn conjugacy_search(&self, u: &Elem, v: &Elem) -> Result<Option<Elem>> {
        self.vector(u)?;
        self.vector(v)?;
        Ok((u == v).then(|| self.identity()))
    }

    fn centralizer_gens(&self, g: &Elem) -> Result<Vec<Elem>> {
        self.vector(g)?;
        Ok(self.generators())
    }

    fn center_gens(&self) -> Result<Vec<Elem>> {
        Ok(self.generators())
    }

    fn outer_order(&self, images: &[Elem], bound: usize) -> Result<OuterOrder> {
        let m: Vec<Vec<i64>> = images.iter().map(|g| self.vector(g)).collect::<Result<_>>()?;
        // Unimodular iff the echelon form is lower unitriangular.
        let unimodular = m.len() == self.rank && {
            let e = Echelon::new(self.rank, &m);
            e.rank() == self.rank && e.cols.iter().enumerate().all(|(i, c)| c[i] == 1)
        };
        if !unimodular {
            return Err(Error::InvalidMonomorphism("matrix is not invertible over the integers".into()));
        }
        let id: Vec<Vec<i64>> =
            (0..self.rank).map(|j| (0..self.rank).map(|i| i64::from(i == j)).collect()).collect();
        let mut power = m.clone();
        for n in 1..=bound {
            if power == id {
                return Ok(OuterOrder::Finite { n, a0: self.identity() });
            }
            match mat_mul(&power, &m) {
                Some(p) => power = p,
                None => return Ok(OuterOrder::Unknown("matrix entries overflow".into())),
            }
        }
        if self.rank <= EXHAUSTIVE_RANK && bound >= 64 {
            Ok(OuterOrder::Infinite)
        } else {
            Ok(OuterOrder::Unknown(format!("no identity power up to {bound}")))
        }
    }

    fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        let ea = self.echelon(a)?;
        let eb = self.echelon(b)?;
        let mut cols = ea.cols.clone();
        cols.extend(eb.cols.iter().map(|c| c.iter().map(|x| -x).collect::<Vec<_>>()));
        let rel = Echelon::new(self.rank, &cols);
        let ra = ea.rank();
        let gens: Vec<Elem> = rel
            .kernel
            .iter()
            .map(|k| {
                let mut v = vec![0i64; self.rank];
                for (c, &x) in ea.cols.iter().zip(&k[..ra]) {
                    for (o, y) in v.iter_mut().zip(c) {
                        *o += x * y;
                    }
                }
                v
            })
            .filter(|v| v.iter().any(|&x| x != 0))
            .map(Elem::Lattice)
            .collect();
        let basis = Echelon::new(self.rank, &gens.iter().map(|g| self.vector(g).unwrap()).collect::<Vec<_>>());
        self.subgroup(&basis.cols.into_iter().map(Elem::Lattice).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Elem {
        Elem::Lattice(x.to_vec())
    }

    #[test]
    fn arithmetic() {
        let z2 = FreeAbelianGroup::new(2).unwrap();
        assert_eq!(z2.mul(&v(&[1, 0]), &v(&[0, 1])).unwrap(), v(&[1, 1]));
        assert!(FreeAbelianGroup::new(0).is_err());
    }

    #[test]
    fn membership_witness_matches_box_search() {
        let z2 = FreeAbelianGroup::new(2).unwrap();
        let h = z2.subgroup(&[v(&[2, 0]), v(&[0, 3])]).unwrap();
        let w = z2.subgroup_contains(&h, &v(&[4, 3])).unwrap().unwrap();
        // Oracle: the only coefficients in a small box solving 2a = 4, 3b = 3.
        let mut sols = Vec::new();
        for a in -5..=5i64 {
            for b in -5..=5i64 {
                if 2 * a == 4 && 3 * b == 3 {
                    sols.push(vec![(0usize, a), (1usize, b)]);
                }
            }
        }
        assert_eq!(sols, vec![w]);
        assert!(z2.conjugators_into(&v(&[1, 1]), &h).unwrap().pairs.is_empty());
    }

    #[test]
    fn residue_transversal() {
        let z = FreeAbelianGroup::new(1).unwrap();
        let h = z.subgroup(&[v(&[2])]).unwrap();
        assert_eq!(z.decompose(&h, &v(&[5])).unwrap(), (v(&[1]), v(&[4])));
        assert_eq!(z.decompose(&h, &v(&[-3])).unwrap(), (v(&[1]), v(&[-4])));
    }

    #[test]
    fn outer_orders() {
        let z = FreeAbelianGroup::new(1).unwrap();
        assert_eq!(z.outer_order(&[v(&[-1])], 64).unwrap(), OuterOrder::Finite { n: 2, a0: v(&[0]) });
        assert_eq!(z.outer_order(&[v(&[1])], 64).unwrap(), OuterOrder::Finite { n: 1, a0: v(&[0]) });
        let z2 = FreeAbelianGroup::new(2).unwrap();
        assert_eq!(z2.outer_order(&[v(&[1, 0]), v(&[1, 1])], 64).unwrap(), OuterOrder::Infinite);
        assert!(z2.outer_order(&[v(&[2, 0]), v(&[0, 1])], 64).is_err());
    }

    #[test]
    fn lattice_intersection() {
        let z = FreeAbelianGroup::new(1).unwrap();
        let a = z.subgroup(&[v(&[4])]).unwrap();
        let b = z.subgroup(&[v(&[6])]).unwrap();
        let c = z.intersect(&a, &b).unwrap();
        assert_eq!(c.gens, vec![v(&[12])]);
    }
}
