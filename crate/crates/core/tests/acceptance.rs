//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use bass_serre::amalgam::AmalgamPresentation;
use bass_serre::backends::{ball, Elem, FiniteGroup, GroupExt, GroupOracle, Oracle};
use bass_serre::cli::GogDocument;
use bass_serre::decide::{
    self, build_double, centralizer_structure, conjugacy_via_double, is_conjugate_graph, roots_report,
    successive_cyclic_reduction, CentralizerReport, Terminal,
};
use bass_serre::error::Verdict;
use bass_serre::fixtures::{self, Fixture};
use bass_serre::gog::{canonical_presentation, GraphOfGroups, Pi1Oracle};
use bass_serre::hnn::HnnPresentation;
use bass_serre::trajets::{find_trajet, is_sans_circuit, reduce_trajet, SansCircuit, Trajet};
use bass_serre::words::{GeneratorId, Letter, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_b055;
const BRITTON_WORDS: usize = 1000;
const BRITTON_MAX_LEN: usize = 12;
const BRITTON_MAX_PINCHES: usize = 3;
const BRITTON_TIME_LIMIT: Duration = Duration::from_secs(10);
const SL2_MAX_SYLLABLES: usize = 5;
const CENTER_BALL_RADIUS: usize = 4;
const CENTER_TIME_LIMIT: Duration = Duration::from_secs(30);
const BRUTE_CONJUGATOR_SYLLABLES: usize = 4;
const RANDOM_CONJUGATES: usize = 200;
const RANDOM_CONJUGATOR_LEN: usize = 6;
const MAX_WINDOWS: usize = 2;
const JSJ_GENERATORS: usize = 16;
const JSJ_RELATIONS: usize = 20;
const HYPERBOLIC_SAMPLES: usize = 20;
const ROOTS_K_MAX: u32 = 6;
const ROOTS_RADIUS: usize = 2;
/// Centralizer check: every ball element commuting with `u` is `W^m` for `|m| ≤` this.
const CENTRALIZER_POWER_BOUND: i64 = 16;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn full(f: &Fixture) -> Pi1Oracle {
    Pi1Oracle::full(f.0.clone(), &f.1).expect("fixture is valid")
}

fn letter(v: usize, i: usize, exp: i8) -> Letter {
    Letter::new(GeneratorId::vertex(v, i), exp)
}

/// Random word over the given letters (each with either sign).
fn random_word(rng: &mut ChaCha8Rng, gens: &[GeneratorId], len: usize) -> Word {
    Word::from_letters(
        (0..len)
            .map(|_| Letter::new(gens[rng.gen_range(0..gens.len())], if rng.gen_bool(0.5) { 1 } else { -1 }))
            .collect(),
    )
}

/// Vertex letters naming every nontrivial element of the finite vertex groups.
fn element_letters(g: &GraphOfGroups) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for v in 0..g.graph.n_vertices {
        let o = g.vertex_oracle(v).unwrap();
        match o.elements() {
            Some(all) => {
                for x in all {
                    if x != o.identity() {
                        let Elem::Table(i) = x else { unreachable!() };
                        out.push(GeneratorId::vertex(v, i));
                    }
                }
            }
            None => out.extend((0..o.generators().len()).map(|i| GeneratorId::vertex(v, i))),
        }
    }
    out
}

fn vertex_word(o: &dyn GroupOracle, v: usize, x: &Elem) -> Word {
    o.to_word(x, bass_serre::words::Scope::Vertex(v)).unwrap()
}

// 1 ------------------------------------------------------------------------

fn britton_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pinches = 0;
    for f in [fixtures::z6().map_err(e2s)?, fixtures::klein().map_err(e2s)?] {
        let p = full(&f);
        let gog = p.gog().clone();
        let hp = HnnPresentation::along(&p, 0).map_err(e2s)?;
        let base = gog.vertex_oracle(0).unwrap().clone();
        let t = GeneratorId::stable(0);
        let mut gens = element_letters(&gog);
        gens.push(t);
        // Edge-group images on each side; elements of infinite groups are sampled.
        let side = |arrow: usize, rng: &mut ChaCha8Rng| -> Elem {
            let m = gog.arrow_mono(arrow).unwrap();
            let src = &m.source;
            let x = match src.elements() {
                Some(all) => all[rng.gen_range(0..all.len())].clone(),
                None => src.pow(&src.generators()[0], rng.gen_range(-5..=5)).unwrap(),
            };
            m.apply(&x).unwrap()
        };
        for _ in 0..BRITTON_WORDS {
            let len = rng.gen_range(0..=BRITTON_MAX_LEN);
            let w = random_word(&mut rng, &gens, len);
            let mut pinched = w.clone();
            for _ in 0..rng.gen_range(0..=BRITTON_MAX_PINCHES) {
                // t^{-1} c t = φ(c) for c in the minus image; t c' t^{-1} = φ⁻¹(c') for c' in the plus image.
                let eps: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
                let arrow = if eps < 0 { 0 } else { 1 };
                let c = side(arrow, &mut rng);
                let value = gog.cross(arrow, &c).unwrap().expect("c lies in the edge image");
                let tl = Word::letter(t, eps);
                let pinch = tl
                    .concat(&vertex_word(base.as_ref(), 0, &c))
                    .concat(&tl.invert())
                    .concat(&vertex_word(base.as_ref(), 0, &value).invert());
                let at = rng.gen_range(0..=pinched.len());
                let mut letters = pinched.letters[..at].to_vec();
                letters.extend(pinch.letters);
                letters.extend_from_slice(&pinched.letters[at..]);
                pinched = Word::from_letters(letters);
                pinches += 1;
            }
            let (a, b) = (hp.britton_reduce(&w).map_err(e2s)?, hp.britton_reduce(&pinched).map_err(e2s)?);
            ensure(a == b, || format!("{} vs pinched {}: {a:?} != {b:?}", w, pinched))?;
        }
    }
    let el = start.elapsed();
    ensure(el < BRITTON_TIME_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("2 x {BRITTON_WORDS} words, {pinches} pinches, 0 failures, {:.2?}", el))
}

// 2 ------------------------------------------------------------------------

type Mat = [[i64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `ℤ/4 *_{ℤ/2} ℤ/6 ≅ SL(2,ℤ)` with `a ↦ [[0,-1],[1,0]]`, `b ↦ [[0,-1],[1,1]]`.
fn sl2_matrix(w: &[(usize, usize)]) -> Mat {
    let a: Mat = [[0, -1], [1, 0]];
    let b: Mat = [[0, -1], [1, 1]];
    let mut m: Mat = [[1, 0], [0, 1]];
    for &(v, k) in w {
        for _ in 0..k {
            m = mat_mul(&m, if v == 0 { &a } else { &b });
        }
    }
    m
}

fn sl2_normal_forms() -> Check {
    let f = fixtures::sl2().map_err(e2s)?;
    let p = full(&f);
    let am = AmalgamPresentation::along(&p, 0).map_err(e2s)?;
    // Syllables a^i (1 ≤ i ≤ 3) and b^j (1 ≤ j ≤ 5), alternating.
    let mut words: Vec<Vec<(usize, usize)>> = vec![vec![]];
    let mut layer = words.clone();
    for _ in 0..SL2_MAX_SYLLABLES {
        let mut next = Vec::new();
        for w in &layer {
            for v in 0..2 {
                if w.last().is_some_and(|&(u, _)| u == v) {
                    continue;
                }
                for k in 1..if v == 0 { 4 } else { 6 } {
                    let mut x = w.clone();
                    x.push((v, k));
                    next.push(x);
                }
            }
        }
        words.extend(next.iter().cloned());
        layer = next;
    }
    let mut by_nf: HashMap<_, Mat> = HashMap::new();
    let mut by_mat: HashMap<Mat, _> = HashMap::new();
    for w in &words {
        let word = Word::from_letters(w.iter().flat_map(|&(v, k)| std::iter::repeat_n(letter(v, 1, 1), k)).collect());
        let nf = am.normal_form(&word).map_err(e2s)?;
        let m = sl2_matrix(w);
        if let Some(prev) = by_nf.insert(nf.clone(), m) {
            ensure(prev == m, || format!("equal normal forms, different matrices at {word}"))?;
        }
        if let Some(prev) = by_mat.insert(m, nf.clone()) {
            ensure(prev == nf, || format!("equal matrices, different normal forms at {word}"))?;
        }
    }
    Ok(format!("{} words, {} distinct elements, 100% agreement", words.len(), by_nf.len()))
}

// 3 ------------------------------------------------------------------------

fn in_cyclic(p: &Pi1Oracle, gen: &Elem, z: &Elem, bound: i64) -> bool {
    (-bound..=bound).any(|k| p.pow(gen, k).ok().as_ref() == Some(z))
}

fn centers() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    let cases: [(&str, Fixture); 3] = [
        ("trefoil", fixtures::trefoil().map_err(e2s)?),
        ("klein", fixtures::klein().map_err(e2s)?),
        ("s3dbl", fixtures::s3dbl().map_err(e2s)?),
    ];
    for (name, f) in cases {
        let p = full(&f);
        // The factor-level procedures for the one-edge fixtures, the graph-level one for the double.
        let gens: Vec<Elem> = match name {
            "trefoil" => {
                let am = AmalgamPresentation::along(&p, 0).map_err(e2s)?;
                let c = am.center().map_err(e2s)?;
                c.iter().map(|z| p.eval_word(&am.to_word(z).unwrap()).unwrap()).collect()
            }
            "klein" => {
                let hp = HnnPresentation::along(&p, 0).map_err(e2s)?;
                let c = hp.center().map_err(e2s)?;
                c.iter().map(|z| p.eval_word(&hp.to_word(z).unwrap()).unwrap()).collect()
            }
            _ => match decide::center_graph(&f.0, &f.1).map_err(e2s)? {
                Verdict::Yes(ws) => ws.iter().map(|w| p.eval_word(w).unwrap()).collect(),
                other => return Err(format!("{name}: {other:?}")),
            },
        };
        let expected = match name {
            "trefoil" => vec![p.eval_word(&Word::power_of(GeneratorId::vertex(0, 0), 2)).unwrap()],
            "klein" => vec![p.eval_word(&Word::power_of(GeneratorId::stable(0), 2)).unwrap()],
            _ => vec![],
        };
        ensure(gens.len() == expected.len(), || format!("{name}: {} generators", gens.len()))?;
        for (g, e) in gens.iter().zip(&expected) {
            ensure(g == e || *g == p.inv(e).unwrap(), || format!("{name}: generator {g} is not ±{e}"))?;
        }
        let pres = p.generators();
        for g in &gens {
            for x in &pres {
                ensure(p.commutes(g, x).unwrap(), || format!("{name}: {g} does not commute with {x}"))?;
            }
        }
        let (b, _) = ball(&p, CENTER_BALL_RADIUS, usize::MAX).map_err(e2s)?;
        let mut central = 0;
        for z in &b {
            if pres.iter().all(|x| p.commutes(z, x).unwrap()) {
                central += 1;
                let inside = match gens.first() {
                    Some(g) => in_cyclic(&p, g, z, 2 * CENTER_BALL_RADIUS as i64),
                    None => *z == p.identity(),
                };
                ensure(inside, || format!("{name}: central {z} outside the returned subgroup"))?;
            }
        }
        notes.push(format!("{name} ball {} central {central}", b.len()));
    }
    let el = start.elapsed();
    ensure(el < CENTER_TIME_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{}, {:.2?}", notes.join(", "), el))
}

// 4 ------------------------------------------------------------------------

/// Elements of syllable length ≤ `n` in a two-vertex amalgam of finite groups.
fn syllable_ball(p: &Pi1Oracle, n: usize) -> Vec<Elem> {
    let gog = p.gog();
    let sides: Vec<Vec<Elem>> = (0..2)
        .map(|v| {
            let o = gog.vertex_oracle(v).unwrap();
            o.elements().unwrap().iter().map(|x| p.embed(v, x).unwrap()).collect()
        })
        .collect();
    let mut seen: BTreeSet<Elem> = sides[0].iter().cloned().collect();
    let mut layer: Vec<(usize, Elem)> = sides[0].iter().map(|x| (0, x.clone())).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for (last, x) in &layer {
            for y in &sides[1 - last] {
                let z = p.mul(x, y).unwrap();
                if seen.insert(z.clone()) {
                    next.push((1 - last, z));
                }
            }
        }
        layer = next;
    }
    for y in &sides[1] {
        seen.insert(y.clone());
    }
    seen.into_iter().collect()
}

fn conjugacy_oracle() -> Check {
    let mut pairs = 0;
    // SL2: elliptic elements and the length-two products a^i b^j, decided by the amalgam procedure.
    let f = fixtures::sl2().map_err(e2s)?;
    let p = full(&f);
    let am = AmalgamPresentation::along(&p, 0).map_err(e2s)?;
    let mut words: Vec<Word> = Vec::new();
    for (v, n) in [(0, 4), (1, 6)] {
        words.extend((0..n).map(|k| Word::from_letters(vec![letter(v, k, 1)])));
    }
    for i in [1, 3] {
        for j in [1, 2, 4, 5] {
            words.push(Word::from_letters(vec![letter(0, i, 1), letter(1, j, 1)]));
        }
    }
    let brute = syllable_ball(&p, BRUTE_CONJUGATOR_SYLLABLES);
    let found = |p: &Pi1Oracle, u: &Elem, v: &Elem| brute.iter().any(|h| p.conj(h, v).unwrap() == *u);
    for u in &words {
        for v in &words {
            let (ue, ve) = (p.eval_word(u).unwrap(), p.eval_word(v).unwrap());
            let r = am.is_conjugate(u, v, bass_serre::amalgam::DEFAULT_DEPTH);
            ensure(!r.is_unknown(), || format!("SL2 UNKNOWN on {u} ~ {v}"))?;
            ensure(r.is_yes() == found(&p, &ue, &ve), || format!("SL2 disagreement on {u} ~ {v}: {r:?}"))?;
            if let Verdict::Yes(h) = &r {
                ensure(p.conj(&p.eval_word(h).unwrap(), &ve).unwrap() == ue, || "bad SL2 conjugator".into())?;
            }
            pairs += 1;
        }
    }
    // S3DBL: all vertex elements, decided at graph level.
    let f = fixtures::s3dbl().map_err(e2s)?;
    let p = full(&f);
    let brute = syllable_ball(&p, BRUTE_CONJUGATOR_SYLLABLES);
    let words: Vec<Word> = (0..2).flat_map(|v| (0..6).map(move |k| Word::from_letters(vec![letter(v, k, 1)]))).collect();
    for u in &words {
        for v in &words {
            let (ue, ve) = (p.eval_word(u).unwrap(), p.eval_word(v).unwrap());
            let r = is_conjugate_graph(&p, &f.1, u, v, decide::DEFAULT_DEPTH).map_err(e2s)?;
            ensure(!r.is_unknown(), || format!("S3DBL UNKNOWN on {u} ~ {v}"))?;
            let b = brute.iter().any(|h| p.conj(h, &ve).unwrap() == ue);
            ensure(r.is_yes() == b, || format!("S3DBL disagreement on {u} ~ {v}: {r:?}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, 100% agreement, 0 UNKNOWN"))
}

// 5 ------------------------------------------------------------------------

fn doubles() -> Check {
    let mut total = 0;
    let cases: [(Oracle, Elem); 2] = [
        (Arc::new(FiniteGroup::symmetric(3)), Elem::Table(fixtures::S3_TRANSPOSITION_12)),
        (Arc::new(FiniteGroup::cyclic(4)), Elem::Table(2)),
    ];
    for (g, h) in cases {
        let spec = build_double("s", g.clone(), vec![vec![h]]).map_err(e2s)?;
        for u in g.elements().unwrap() {
            for v in g.elements().unwrap() {
                let r = conjugacy_via_double(&spec, &u, &v, decide::DEFAULT_DEPTH).map_err(e2s)?;
                ensure(r.agree, || format!("{} {u} ~ {v}: {r:?}", g.describe()))?;
                total += 1;
            }
        }
    }
    ensure(total == 36 + 16, || format!("{total} pairs"))?;
    Ok(format!("{total} pairs agree"))
}

// 6 ------------------------------------------------------------------------

fn random_conjugates() -> Check {
    let f = fixtures::s3dbl().map_err(e2s)?;
    let p = full(&f);
    let gog = p.gog().clone();
    let letters = element_letters(&gog);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for _ in 0..RANDOM_CONJUGATES {
        let s2 = rng.gen_range(0..2);
        let v = Elem::Table(rng.gen_range(0..6));
        let vw = vertex_word(gog.vertex_oracle(s2).unwrap().as_ref(), s2, &v);
        let len = rng.gen_range(0..=RANDOM_CONJUGATOR_LEN);
        let h = random_word(&mut rng, &letters, len);
        let u = h.concat(&vw).concat(&h.invert());
        let tr = successive_cyclic_reduction(&p, &f.1, &u).map_err(e2s)?;
        let Terminal::Vertex(s1) = tr.kind else { return Err(format!("{u} is not elliptic")) };
        let u1 = tr.vertex_elem.clone().unwrap();
        let t = match find_trajet(&p, &u1, s1, &v, s2, decide::DEFAULT_DEPTH).map_err(e2s)? {
            Verdict::Yes(t) => t,
            other => return Err(format!("{u} ~ {vw}: {other:?}")),
        };
        t.verify(&gog).map_err(|e| format!("trajet check: {e}"))?;
        let label = p.eval_word(&t.label(&gog, p.tree()).unwrap()).unwrap();
        let c = p.eval_word(&tr.conjugator).unwrap();
        let (ue, ve) = (p.eval_word(&u).unwrap(), p.eval_word(&vw).unwrap());
        ensure(p.conj(&p.mul(&c, &label).unwrap(), &ve).unwrap() == ue, || format!("label fails on {u}"))?;
    }
    Ok(format!("{RANDOM_CONJUGATES} pairs, 0 failures"))
}

// 7 ------------------------------------------------------------------------

/// All results of reducing in every possible order.
fn all_orders(gog: &GraphOfGroups, t: &Trajet, out: &mut Vec<Trajet>) {
    let ws = t.reducible_windows(gog).unwrap();
    if ws.is_empty() {
        out.push(t.clone());
    }
    for i in ws {
        all_orders(gog, &t.reduce_at(gog, i).unwrap(), out);
    }
}

/// Trajets of `len` arrows along the single edge, starting from the edge
/// generator, with every choice of interior `h` and sampled end elements.
fn constructed_trajets(f: &Fixture, len: usize) -> Vec<Trajet> {
    let gog = &f.0;
    let (o0, o1) = (gog.vertex_oracle(0).unwrap(), gog.vertex_oracle(1).unwrap());
    let c = gog.arrow_mono(0).unwrap();
    let c0 = c.apply(&c.source.generators()[0]).unwrap();
    let mut out = Vec::new();
    let interior: Vec<Vec<Elem>> = (1..len)
        .map(|i| if i % 2 == 1 { o1.elements().unwrap() } else { o0.elements().unwrap() })
        .collect();
    let mut choice = vec![0usize; len.saturating_sub(1)];
    loop {
        for h0 in o0.elements().unwrap() {
            let mut t = Trajet::trivial(o0.conj(&h0, &c0).unwrap(), 0, h0.clone(), Elem::Table(0));
            let mut cur = c0.clone();
            let mut ok = true;
            for i in 0..len {
                let a = if i % 2 == 0 { 0 } else { 1 };
                let Some(y) = gog.cross(a, &cur).unwrap() else {
                    ok = false;
                    break;
                };
                let vo = gog.vertex_oracle(gog.terminus(a)).unwrap();
                let h = if i + 1 < len { interior[i][choice[i]].clone() } else { vo.identity() };
                t.arrows.push(a);
                t.c_minus.push(cur);
                t.c_plus.push(y.clone());
                t.h.push(h.clone());
                cur = vo.conj(&vo.inv(&h).unwrap(), &y).unwrap();
            }
            if ok {
                t.s_e = gog.terminus(*t.arrows.last().unwrap());
                t.v = cur;
                if t.verify(gog).is_ok() {
                    out.push(t);
                }
            }
        }
        // Next interior choice.
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < interior[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn trajet_reduction() -> Check {
    let mut checked = 0;
    for f in [fixtures::s3dbl().map_err(e2s)?, fixtures::z4dbl().map_err(e2s)?] {
        let p = full(&f);
        let gog = p.gog();
        for len in 1..=4 {
            for t in constructed_trajets(&f, len) {
                let ws = t.reducible_windows(gog).map_err(e2s)?;
                if ws.len() > MAX_WINDOWS {
                    continue;
                }
                let label = t.label_elem(&p).map_err(e2s)?;
                let canonical = reduce_trajet(gog, &t).map_err(e2s)?;
                let mut results = Vec::new();
                all_orders(gog, &t, &mut results);
                for r in &results {
                    r.verify(gog).map_err(|e| format!("reduced trajet invalid: {e}"))?;
                    let r = &r.normalize(gog).map_err(e2s)?;
                    ensure(*r == canonical, || format!("order dependence on {}", t.render(gog, p.tree()).unwrap()))?;
                    ensure(r.label_elem(&p).unwrap() == label, || "label class changed".into())?;
                }
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no trajets constructed".into())?;
    Ok(format!("{checked} trajets, order-independent, labels preserved"))
}

// 8 ------------------------------------------------------------------------

/// Relator up to inversion and cyclic rotation, as a comparable key.
fn relator_key(w: &[(String, i64)]) -> Vec<(String, i64)> {
    let mut flat: Vec<(String, i64)> = Vec::new();
    for (n, k) in w {
        let s = k.signum();
        for _ in 0..k.abs() {
            flat.push((n.clone(), s));
        }
    }
    let inv: Vec<(String, i64)> = flat.iter().rev().map(|(n, s)| (n.clone(), -s)).collect();
    let mut best: Option<Vec<(String, i64)>> = None;
    for base in [flat, inv] {
        for r in 0..base.len().max(1) {
            let mut x = base.clone();
            x.rotate_left(r.min(base.len()));
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
    }
    best.unwrap_or_default()
}

fn parse_rel(s: &str) -> Vec<(String, i64)> {
    let (l, r) = s.split_once('=').unwrap_or((s, ""));
    let atoms = |t: &str| -> Vec<(String, i64)> {
        t.split_whitespace()
            .map(|a| match a.split_once('^') {
                Some((n, e)) => (n.to_string(), e.parse().unwrap()),
                None => (a.to_string(), 1),
            })
            .collect()
    };
    let mut w = atoms(l);
    w.extend(atoms(r).into_iter().rev().map(|(n, k)| (n, -k)));
    w
}

fn jsj_presentation() -> Check {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/jsj.gog")).map_err(e2s)?;
    let (g, dec) = GogDocument::parse(&src).and_then(|d| d.build()).map_err(e2s)?;
    let p = canonical_presentation(&g, &dec).map_err(e2s)?;
    ensure(p.generators.len() == JSJ_GENERATORS, || format!("{} generators", p.generators.len()))?;
    ensure(p.relations.len() == JSJ_RELATIONS, || format!("{} relations", p.relations.len()))?;
    // The displayed presentation, vertex prefixes dropped. The a4 and a5
    // identifications follow the per-edge isomorphisms stated alongside the
    // subgroup generators; the displayed block lists those images swapped.
    let expected = [
        "x1 y1 x1^-1 y1^-1", "x1 z1 x1^-1 z1^-1", "y2 z2 y2^-1 z2^-1", "x3 y3 x3^-1 y3^-1",
        "y3 z3 y3^-1 z3^-1", "x5 y5 x5^-1 y5^-1", "y5 z5 y5^-1 z5^-1",
        "x2^3 = y2^2", "x4^2 = y4^3", "x6 y6^2 x6^2 y6 x6 y6^-1 x6^-2 y6^-1",
        "x1 y1^-1 = y2", "y1 = z2", "y1 z1^-1 = y3", "x1 = x3", "z1 = y5", "x1 = x5",
        "z3 = x4^2", "y3 = x4^-1 y4", "z5 = x6 y6 x6 y6^-1 x6^-1 y6^2 x6^2 y6 x6^-1", "y5 = x6",
    ];
    let mut want: BTreeMap<Vec<(String, i64)>, usize> = BTreeMap::new();
    for e in expected {
        *want.entry(relator_key(&parse_rel(e))).or_default() += 1;
    }
    let mut got: BTreeMap<Vec<(String, i64)>, usize> = BTreeMap::new();
    for r in &p.relations {
        let atoms: Vec<(String, i64)> = r
            .letters
            .iter()
            .map(|l| {
                let n = g.vertex_gen_name(&l.gen);
                (n.split_once('.').map(|x| x.1.to_string()).unwrap_or(n), i64::from(l.exp))
            })
            .collect();
        *got.entry(relator_key(&atoms)).or_default() += 1;
    }
    ensure(got == want, || "relations differ from the displayed presentation".into())?;
    let names: BTreeSet<String> =
        p.names.iter().map(|n| n.split_once('.').map(|x| x.1.to_string()).unwrap_or(n.clone())).collect();
    ensure(names.len() == JSJ_GENERATORS, || "generator names are not distinct".into())?;
    Ok(format!("{JSJ_GENERATORS} generators, {JSJ_RELATIONS} relations, matching up to order"))
}

// 9 ------------------------------------------------------------------------

fn sans_circuit_structure() -> Check {
    let f = fixtures::s3dbl().map_err(e2s)?;
    let p = full(&f);
    let gog = p.gog().clone();
    ensure(matches!(is_sans_circuit(&p).map_err(e2s)?, SansCircuit::Yes), || "S3DBL not certified".into())?;
    let mut elliptic = 0;
    for v in 0..2 {
        for k in 0..6 {
            let u = Word::from_letters(vec![letter(v, k, 1)]);
            match centralizer_structure(&p, &f.1, &u).map_err(e2s)? {
                CentralizerReport::Vertex { gens, .. } => {
                    let ue = p.eval_word(&u).unwrap();
                    for g in &gens {
                        ensure(p.commutes(&p.eval_word(g).unwrap(), &ue).unwrap(), || format!("{g} vs {u}"))?;
                    }
                }
                other => return Err(format!("elliptic {u}: {other:?}")),
            }
            let r = roots_report(&p, &f.1, &u, ROOTS_K_MAX, ROOTS_RADIUS).map_err(e2s)?;
            ensure(r.violations.is_empty(), || format!("{u}: {:?}", r.violations))?;
            elliptic += 1;
        }
    }
    let letters = element_letters(&gog);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let (b, _) = ball(&p, 3, usize::MAX).map_err(e2s)?;
    let mut hyperbolic = 0;
    let mut roots = 0;
    while hyperbolic < HYPERBOLIC_SAMPLES {
        let len = rng.gen_range(2..=8);
        let u = random_word(&mut rng, &letters, len);
        let tr = successive_cyclic_reduction(&p, &f.1, &u).map_err(e2s)?;
        if !matches!(tr.kind, Terminal::Long(_)) {
            continue;
        }
        let (w, j) = match centralizer_structure(&p, &f.1, &u).map_err(e2s)? {
            CentralizerReport::Cyclic { w, j } => (w, j),
            other => return Err(format!("hyperbolic {u}: {other:?}")),
        };
        let (ue, we) = (p.eval_word(&u).unwrap(), p.eval_word(&w).unwrap());
        ensure(p.pow(&we, j).unwrap() == ue, || format!("{w}^{j} != {u}"))?;
        for z in &b {
            if p.commutes(z, &ue).unwrap() {
                ensure(in_cyclic(&p, &we, z, CENTRALIZER_POWER_BOUND), || format!("{z} centralizes {u} outside <{w}>"))?;
            }
        }
        let r = roots_report(&p, &f.1, &u, ROOTS_K_MAX, ROOTS_RADIUS).map_err(e2s)?;
        ensure(r.violations.is_empty(), || format!("{u}: {:?}", r.violations))?;
        roots += r.roots.len();
        hyperbolic += 1;
    }
    Ok(format!("{elliptic} elliptic, {hyperbolic} hyperbolic centralizers verified, {roots} roots, 0 violations"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Britton normal forms ignore inserted pinches", britton_suite),
        ("SL2 normal forms match the matrix oracle", sl2_normal_forms),
        ("centers of trefoil, Klein and the S3 double", centers),
        ("conjugacy agrees with brute force", conjugacy_oracle),
        ("conjugacy through the double", doubles),
        ("random conjugate pairs have verified trajets", random_conjugates),
        ("trajet reduction is confluent", trajet_reduction),
        ("JSJ canonical presentation", jsj_presentation),
        ("centralizers and roots without circuits", sans_circuit_structure),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
