//! Signed-letter words over scoped generators.
//!
//! A single [`Word`] may mix vertex-group generators, stable letters and
//! edge-group generators; the scope of each letter says which.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Vertex(usize),
    Stable(usize),
    Edge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId {
    pub scope: Scope,
    pub index: usize,
}

impl GeneratorId {
    pub fn vertex(v: usize, index: usize) -> Self {
        GeneratorId { scope: Scope::Vertex(v), index }
    }

    pub fn stable(edge: usize) -> Self {
        GeneratorId { scope: Scope::Stable(edge), index: 0 }
    }

    pub fn edge(edge: usize, index: usize) -> Self {
        GeneratorId { scope: Scope::Edge(edge), index }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scope {
            Scope::Vertex(0) => write!(f, "g{}", self.index),
            Scope::Vertex(v) => write!(f, "v{}.g{}", v, self.index),
            Scope::Stable(e) => write!(f, "t{}", e),
            Scope::Edge(e) => write!(f, "e{}.g{}", e, self.index),
        }
    }
}

/// One generator raised to +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GeneratorId,
    pub exp: i8,
}

impl Letter {
    pub fn new(gen: GeneratorId, exp: i8) -> Self {
        debug_assert!(exp == 1 || exp == -1);
        Letter { gen, exp }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, exp: -self.exp }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.exp == -other.exp
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letter(gen: GeneratorId, exp: i8) -> Self {
        Word { letters: vec![Letter::new(gen, exp)] }
    }

    /// `gen^k` written out letter by letter.
    pub fn power_of(gen: GeneratorId, k: i64) -> Self {
        let exp = if k < 0 { -1 } else { 1 };
        Word { letters: (0..k.unsigned_abs()).map(|_| Letter::new(gen, exp)).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn invert(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }

    /// Rotation moving the first `k` letters to the end; `0 <= k <= len`.
    pub fn cyclic_shift(&self, k: i64) -> Result<Word> {
        let len = self.letters.len();
        if k < 0 || k as usize > len {
            return Err(Error::ShiftOutOfRange { k, len });
        }
        let k = k as usize;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Ok(Word { letters })
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word { letters }
    }

    /// Conjugate `self · w · self⁻¹`.
    pub fn conjugate(&self, w: &Word) -> Word {
        self.concat(w).concat(&self.invert())
    }

    pub fn uses_scope(&self, pred: impl Fn(Scope) -> bool) -> bool {
        self.letters.iter().any(|l| pred(l.gen.scope))
    }

    /// Splits into maximal runs whose letters share the same key.
    pub fn runs_by<K: PartialEq>(&self, key: impl Fn(&Letter) -> K) -> Vec<(K, Word)> {
        let mut runs: Vec<(K, Word)> = Vec::new();
        for l in &self.letters {
            let k = key(l);
            match runs.last_mut() {
                Some((last, w)) if *last == k => w.letters.push(*l),
                _ => runs.push((k, Word::from_letters(vec![*l]))),
            }
        }
        runs
    }

    /// Parses the default literal syntax: `g3`, `v1.g0^-1`, `t2`, `e0.g1`, `eps`.
    pub fn parse(text: &str) -> Result<Word> {
        Word::parse_with(text, &mut default_atom)
    }

    /// Parses whitespace-separated atoms `name` or `name^k`, resolving each
    /// name through `resolve`.
    pub fn parse_with(
        text: &str,
        resolve: &mut dyn FnMut(&str) -> Option<GeneratorId>,
    ) -> Result<Word> {
        let syntax = |reason: String| Error::WordSyntax { text: text.to_string(), reason };
        let mut letters = Vec::new();
        for atom in text.split_whitespace() {
            if atom == "eps" || atom == "1" {
                continue;
            }
            let (name, exp) = match atom.split_once('^') {
                Some((n, e)) => {
                    let k: i64 = e.parse().map_err(|_| syntax(format!("bad exponent in `{atom}`")))?;
                    (n, k)
                }
                None => (atom, 1),
            };
            let gen = resolve(name).ok_or_else(|| syntax(format!("unknown generator `{name}`")))?;
            letters.extend(Word::power_of(gen, exp).letters);
        }
        Ok(Word { letters })
    }
}

fn default_atom(name: &str) -> Option<GeneratorId> {
    fn index(s: &str) -> Option<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }
    if let Some((scope, gen)) = name.split_once('.') {
        let i = index(gen.strip_prefix('g')?)?;
        if let Some(v) = scope.strip_prefix('v') {
            return Some(GeneratorId::vertex(index(v)?, i));
        }
        if let Some(e) = scope.strip_prefix('e') {
            return Some(GeneratorId::edge(index(e)?, i));
        }
        return None;
    }
    if let Some(i) = name.strip_prefix('g') {
        return Some(GeneratorId::vertex(0, index(i)?));
    }
    if let Some(e) = name.strip_prefix('t') {
        return Some(GeneratorId::stable(index(e)?));
    }
    None
}

/// Writes runs of equal letters as powers, `eps` for the empty word.
pub fn format_word(w: &Word, name: &dyn Fn(&GeneratorId) -> String) -> String {
    if w.is_empty() {
        return "eps".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.letters.len() {
        let l = w.letters[i];
        let mut j = i;
        while j < w.letters.len() && w.letters[j] == l {
            j += 1;
        }
        let k = (j - i) as i64 * l.exp as i64;
        let n = name(&l.gen);
        parts.push(if k == 1 { n } else { format!("{n}^{k}") });
        i = j;
    }
    parts.join(" ")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self, &|g| g.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn free_reduce_cancels() {
        assert_eq!(w("g0 g0^-1").free_reduce(), Word::empty());
        assert_eq!(w("g0 g1 g1^-1 g0").free_reduce(), w("g0 g0"));
        assert_eq!(w("g0 g1 g0^-1").free_reduce(), w("g0 g1 g0^-1"));
    }

    #[test]
    fn invert_and_shift() {
        assert_eq!(w("g0 g1").invert(), w("g1^-1 g0^-1"));
        assert_eq!(w("g0 g1 g2").cyclic_shift(1).unwrap(), w("g1 g2 g0"));
        assert_eq!(w("g0").concat(&w("g0^-1")).free_reduce(), Word::empty());
        assert!(matches!(w("g0 g1").cyclic_shift(3), Err(Error::ShiftOutOfRange { k: 3, len: 2 })));
        assert!(w("g0").cyclic_shift(-1).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let x = w("g3 v1.g0^-2 t2 e0.g1^-1 t2^-1");
        assert_eq!(x.len(), 6);
        assert_eq!(Word::parse(&x.to_string()).unwrap(), x);
        assert_eq!(w("eps"), Word::empty());
        assert!(Word::parse("q1").is_err());
        assert!(Word::parse("g1^x").is_err());
    }
}
