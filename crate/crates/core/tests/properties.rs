use bass_serre::amalgam::AmalgamPresentation;
use bass_serre::backends::{Elem, GroupExt, GroupOracle};
use bass_serre::decide::{self, commute_classify_graph, is_conjugate_graph, CommuteReport};
use bass_serre::error::Verdict;
use bass_serre::fixtures::{self, Fixture};
use bass_serre::gog::{GraphOfGroups, Pi1Oracle};
use bass_serre::hnn::HnnPresentation;
use bass_serre::trajets::find_trajet;
use bass_serre::words::{GeneratorId, Letter, Scope, Word};
use proptest::prelude::*;

fn full(f: &Fixture) -> Pi1Oracle {
    Pi1Oracle::full(f.0.clone(), &f.1).unwrap()
}

/// Letters naming nontrivial elements (finite vertices) or generators, plus stable letters.
fn letters(g: &GraphOfGroups, tree: &std::collections::BTreeSet<usize>) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for v in 0..g.graph.n_vertices {
        let o = g.vertex_oracle(v).unwrap();
        match o.elements() {
            Some(all) => out.extend((1..all.len()).map(|i| GeneratorId::vertex(v, i))),
            None => out.extend((0..o.generators().len()).map(|i| GeneratorId::vertex(v, i))),
        }
    }
    out.extend((0..g.graph.n_edges()).filter(|e| !tree.contains(e)).map(GeneratorId::stable));
    out
}

fn word_over(gens: Vec<GeneratorId>, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens.len(), any::<bool>()), 0..=max).prop_map(move |v| {
        Word::from_letters(v.into_iter().map(|(i, s)| Letter::new(gens[i], if s { 1 } else { -1 })).collect())
    })
}

fn fixture_words(f: &Fixture, max: usize) -> impl Strategy<Value = Word> {
    word_over(letters(&f.0, &f.1.tree), max)
}

fn abstract_word() -> impl Strategy<Value = Word> {
    word_over((0..3).map(|i| GeneratorId::vertex(0, i)).collect(), 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_algebra(w in abstract_word(), v in abstract_word()) {
        prop_assert_eq!(w.invert().invert(), w.clone());
        prop_assert_eq!(w.free_reduce().free_reduce(), w.free_reduce());
        prop_assert!(w.concat(&w.invert()).free_reduce().is_empty());
        prop_assert_eq!(w.concat(&v).invert(), v.invert().concat(&w.invert()));
        prop_assert_eq!(w.cyclic_shift(w.len() as i64).unwrap(), w.clone());
        prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn amalgam_normal_forms_multiply(u in fixture_words(&fixtures::sl2().unwrap(), 10), v in fixture_words(&fixtures::sl2().unwrap(), 10)) {
        let f = fixtures::sl2().unwrap();
        let am = AmalgamPresentation::along(&full(&f), 0).unwrap();
        let (nu, nv) = (am.normal_form(&u).unwrap(), am.normal_form(&v).unwrap());
        prop_assert_eq!(am.normal_form(&u.concat(&v)).unwrap(), am.mul(&nu, &nv).unwrap());
        prop_assert_eq!(am.normal_form(&am.to_word(&nu).unwrap()).unwrap(), nu.clone());
        prop_assert!(am.is_identity(&am.mul(&nu, &am.inv(&nu).unwrap()).unwrap()));
        let (core, c) = am.cyclically_reduce_nf(&nu).unwrap();
        prop_assert!(am.is_cyclically_reduced(&core));
        prop_assert_eq!(am.conj(&c, &core).unwrap(), nu);
    }

    #[test]
    fn trefoil_conjugates_are_found(u in fixture_words(&fixtures::trefoil().unwrap(), 8), h in fixture_words(&fixtures::trefoil().unwrap(), 6)) {
        let f = fixtures::trefoil().unwrap();
        let p = full(&f);
        let am = AmalgamPresentation::along(&p, 0).unwrap();
        let v = h.concat(&u).concat(&h.invert());
        match am.is_conjugate(&v, &u, bass_serre::amalgam::DEFAULT_DEPTH) {
            Verdict::Yes(k) => {
                let (ve, ue, ke) = (p.eval_word(&v).unwrap(), p.eval_word(&u).unwrap(), p.eval_word(&k).unwrap());
                prop_assert_eq!(p.conj(&ke, &ue).unwrap(), ve);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn britton_forms_are_canonical(u in fixture_words(&fixtures::z6().unwrap(), 12), v in fixture_words(&fixtures::z6().unwrap(), 12)) {
        let f = fixtures::z6().unwrap();
        let hp = HnnPresentation::along(&full(&f), 0).unwrap();
        let (nu, nv) = (hp.britton_reduce(&u).unwrap(), hp.britton_reduce(&v).unwrap());
        prop_assert_eq!(hp.britton_reduce(&u.concat(&v)).unwrap(), hp.mul(&nu, &nv).unwrap());
        prop_assert_eq!(hp.britton_reduce(&hp.to_word(&nu).unwrap()).unwrap(), nu.clone());
        let (core, c) = hp.cyclically_reduce_nf(&nu).unwrap();
        prop_assert!(hp.is_cyclically_reduced(&core).unwrap());
        prop_assert_eq!(hp.conj(&c, &core).unwrap(), nu);
    }

    #[test]
    fn klein_conjugacy_and_lengths(u in fixture_words(&fixtures::klein().unwrap(), 8), h in fixture_words(&fixtures::klein().unwrap(), 6)) {
        let f = fixtures::klein().unwrap();
        let p = full(&f);
        let hp = HnnPresentation::along(&p, 0).unwrap();
        let v = h.concat(&u).concat(&h.invert());
        let (cu, _) = hp.cyclically_reduce_nf(&hp.britton_reduce(&u).unwrap()).unwrap();
        let (cv, _) = hp.cyclically_reduce_nf(&hp.britton_reduce(&v).unwrap()).unwrap();
        // Conjugate cyclically reduced elements have equal length.
        prop_assert_eq!(cu.t_length(), cv.t_length());
        match hp.is_conjugate(&v, &u, bass_serre::hnn::DEFAULT_DEPTH) {
            Verdict::Yes(k) => {
                let (ve, ue, ke) = (p.eval_word(&v).unwrap(), p.eval_word(&u).unwrap(), p.eval_word(&k).unwrap());
                prop_assert_eq!(p.conj(&ke, &ue).unwrap(), ve);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn path_forms_round_trip(u in fixture_words(&fixtures::s3dbl().unwrap(), 10), v in fixture_words(&fixtures::s3dbl().unwrap(), 10)) {
        let f = fixtures::s3dbl().unwrap();
        let p = full(&f);
        let (ue, ve) = (p.eval_word(&u).unwrap(), p.eval_word(&v).unwrap());
        prop_assert_eq!(p.eval_word(&u.concat(&v)).unwrap(), p.mul(&ue, &ve).unwrap());
        prop_assert_eq!(p.eval_word(&p.to_word(&ue, Scope::Vertex(0)).unwrap()).unwrap(), ue.clone());
        let (g0, steps) = p.parts(&ue).unwrap();
        prop_assert_eq!(p.from_parts(&g0, &steps).unwrap(), ue);
    }

    #[test]
    fn graph_conjugacy_finds_verified_witnesses(u in fixture_words(&fixtures::s3dbl().unwrap(), 8), h in fixture_words(&fixtures::s3dbl().unwrap(), 6)) {
        let f = fixtures::s3dbl().unwrap();
        let p = full(&f);
        let v = h.concat(&u).concat(&h.invert());
        match is_conjugate_graph(&p, &f.1, &v, &u, decide::DEFAULT_DEPTH).unwrap() {
            Verdict::Yes(k) => {
                let (ve, ue, ke) = (p.eval_word(&v).unwrap(), p.eval_word(&u).unwrap(), p.eval_word(&k).unwrap());
                prop_assert_eq!(p.conj(&ke, &ue).unwrap(), ve);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn powers_commute_with_a_verified_report(u in fixture_words(&fixtures::s3dbl().unwrap(), 8), k in -3i64..=3) {
        let f = fixtures::s3dbl().unwrap();
        let p = full(&f);
        let report = commute_classify_graph(&p, &f.1, &u, &u.pow(k)).unwrap();
        prop_assert!(!matches!(report, CommuteReport::Unknown(_)), "{:?}", report);
    }

    #[test]
    fn trajet_inverses_invert_labels(x in 0usize..6, y in 0usize..6, s in 0usize..2) {
        let f = fixtures::s3dbl().unwrap();
        let p = full(&f);
        let gog = p.gog();
        if let Verdict::Yes(t) = find_trajet(&p, &Elem::Table(x), s, &Elem::Table(y), 1 - s, decide::DEFAULT_DEPTH).unwrap() {
            let ti = t.inverse(gog).unwrap();
            ti.verify(gog).unwrap();
            prop_assert_eq!(ti.inverse(gog).unwrap(), t.clone());
            prop_assert_eq!(ti.label_elem(&p).unwrap(), p.inv(&t.label_elem(&p).unwrap()).unwrap());
            let n = t.normalize(gog).unwrap();
            prop_assert_eq!(n.label_elem(&p).unwrap(), t.label_elem(&p).unwrap());
            prop_assert_eq!(n.normalize(gog).unwrap(), n);
        }
    }
}
