use std::collections::HashMap;
use std::fmt;

use super::{GroupExt, Oracle, Subgroup};
use super::Elem;
use crate::error::{Error, Result};

/// Injective homomorphism fixed by the images of a generating set of its source.
#[derive(Clone)]
pub struct Monomorphism {
    pub source: Oracle,
    pub target: Oracle,
    pub domain_gens: Vec<Elem>,
    pub images: Vec<Elem>,
    domain: Subgroup,
    /// Image subgroup; its generators are `images`, in order.
    pub image: Subgroup,
    forward: Option<HashMap<Elem, Elem>>,
    backward: Option<HashMap<Elem, Elem>>,
}

impl fmt::Debug for Monomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Monomorphism")
            .field("source", &self.source.describe())
            .field("target", &self.target.describe())
            .field("domain_gens", &self.domain_gens)
            .field("images", &self.images)
            .finish()
    }
}

impl Monomorphism {
    /// Builds and validates `domain_gens[i] ↦ images[i]`.
    pub fn new(
        source: Oracle,
        target: Oracle,
        domain_gens: Vec<Elem>,
        images: Vec<Elem>,
    ) -> Result<Monomorphism> {
        let mono = Monomorphism::unchecked(source, target, domain_gens, images)?;
        mono.validate()?;
        Ok(mono)
    }

    /// Builds without the injectivity check; used for maps known to be valid by construction.
    pub fn unchecked(
        source: Oracle,
        target: Oracle,
        domain_gens: Vec<Elem>,
        images: Vec<Elem>,
    ) -> Result<Monomorphism> {
        let bad = |m: String| Err(Error::InvalidMonomorphism(m));
        if domain_gens.len() != images.len() {
            return bad("one image per generator expected".into());
        }
        for g in &domain_gens {
            source.check_member(g)?;
        }
        for g in &images {
            if !target.is_member(g) {
                return bad(format!("image {g} is not an element of {}", target.describe()));
            }
        }
        let domain = source.subgroup(&domain_gens)?;
        for g in source.generators() {
            if source.subgroup_contains(&domain, &g)?.is_none() {
                return bad(format!("{} is not generated by the given elements", source.describe()));
            }
        }
        let image = target.subgroup(&images)?;
        let mut mono = Monomorphism {
            source,
            target,
            domain_gens,
            images,
            domain,
            image,
            forward: None,
            backward: None,
        };
        if let Some(all) = mono.source.elements() {
            if all.len() <= 4096 {
                let mut fwd = HashMap::new();
                let mut bwd = HashMap::new();
                for e in all {
                    let img = mono.apply_uncached(&e)?;
                    bwd.insert(img.clone(), e.clone());
                    fwd.insert(e, img);
                }
                mono.forward = Some(fwd);
                mono.backward = Some(bwd);
            }
        }
        Ok(mono)
    }

    fn apply_uncached(&self, e: &Elem) -> Result<Elem> {
        let w = self.source.subgroup_contains(&self.domain, e)?.ok_or_else(|| Error::Foreign {
            elem: e.to_string(),
            group: self.source.describe(),
        })?;
        self.target.eval_witness(&self.images, &w)
    }

    pub fn apply(&self, e: &Elem) -> Result<Elem> {
        if let Some(f) = &self.forward {
            return f.get(e).cloned().ok_or_else(|| Error::Foreign {
                elem: e.to_string(),
                group: self.source.describe(),
            });
        }
        self.apply_uncached(e)
    }

    /// Source element mapped to `c`, when `c` lies in the image.
    pub fn preimage(&self, c: &Elem) -> Result<Option<Elem>> {
        if let Some(b) = &self.backward {
            if !self.target.is_member(c) {
                return Err(Error::Foreign { elem: c.to_string(), group: self.target.describe() });
            }
            return Ok(b.get(c).cloned());
        }
        match self.target.subgroup_contains(&self.image, c)? {
            Some(w) => Ok(Some(self.source.eval_witness(&self.domain_gens, &w)?)),
            None => Ok(None),
        }
    }

    pub fn contains(&self, c: &Elem) -> Result<bool> {
        Ok(self.preimage(c)?.is_some())
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMonomorphism(m));
        if let Some(all) = self.source.elements() {
            // Homomorphism: compatible with right multiplication by every generator.
            let mut seen = HashMap::new();
            for e in &all {
                let img = self.apply(e)?;
                for (g, gi) in self.domain_gens.iter().zip(&self.images) {
                    let lhs = self.apply(&self.source.mul(e, g)?)?;
                    if lhs != self.target.mul(&img, gi)? {
                        return bad("the assignment does not respect the relations".into());
                    }
                }
                if let Some(prev) = seen.insert(img.clone(), e.clone()) {
                    return bad(format!("not injective: {prev} and {e} have the same image"));
                }
            }
            return Ok(());
        }
        // Infinite source: free abelian or infinite cyclic, basis given.
        if !self.source.is_abelian() {
            return Err(Error::Unsupported(format!(
                "monomorphisms out of {} are not checked",
                self.source.describe()
            )));
        }
        let rank = self.source.generators().len();
        if self.domain_gens.len() != rank {
            return bad("an infinite edge group must be given by a basis".into());
        }
        if self.target.elements().is_some() {
            return bad(format!("{} cannot embed in a finite group", self.source.describe()));
        }
        for (i, a) in self.images.iter().enumerate() {
            for b in &self.images[i + 1..] {
                if !self.target.commutes(a, b)? {
                    return bad("images of commuting generators do not commute".into());
                }
            }
        }
        let trivial_image = |x: &Elem| *x == self.target.identity();
        if self.target.is_abelian() && self.target.generators().iter().all(|g| matches!(g, Elem::Lattice(_))) {
            let cols: Vec<Vec<i64>> = self
                .images
                .iter()
                .map(|g| match g {
                    Elem::Lattice(v) => v.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let dim = cols.first().map_or(0, |c| c.len());
            if super::lattice::Echelon::new(dim, &cols).rank() != rank {
                return bad("image vectors are linearly dependent".into());
            }
            return Ok(());
        }
        if rank == 1 {
            if trivial_image(&self.images[0]) {
                return bad("generator of an infinite cyclic group mapped to the identity".into());
            }
            return Ok(());
        }
        if self.target.elements().is_none() && !self.target.is_abelian() {
            // In a free group commuting elements lie in a cyclic subgroup.
            if self.target.describe().starts_with('F') {
                return bad(format!("{} does not embed in a free group", self.source.describe()));
            }
        }
        Ok(())
    }
}
