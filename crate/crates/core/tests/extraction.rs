mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semmatch_core::{
    encode, extract_corpus, extract_instances, relatedness, Execution, Extractor, MarkingFile,
    Stopwords, Thresholds,
};

fn table1() -> MarkingFile {
    MarkingFile::parse(TABLE1, "marking.tsv").unwrap()
}

fn instance_phrases(
    sets: &BTreeMap<String, semmatch_core::InstanceSet>,
) -> BTreeSet<(String, String)> {
    sets.iter()
        .flat_map(|(id, s)| s.iter().map(move |r| (id.clone(), r.phrase.clone())))
        .collect()
}

#[test]
fn sunny_decision_follows_oracle() {
    let r = oracle_relatedness("sun", "sunny");
    assert!((r - 0.7851685636836444).abs() < 1e-12);
    let admit = r < 0.01;
    let mut mf = table1();
    let set = extract_instances("d", "a sunny day", &mut mf, Thresholds::default());
    assert_eq!(set.get("sunny").is_some(), admit);
    assert!(!admit);

    // a same-length variant does clear the threshold
    let r = oracle_relatedness("sun", "sum");
    assert!(r < 0.01);
    let set = extract_instances("d", "sum", &mut table1(), Thresholds::default());
    let rec = set.get("sum").unwrap();
    assert!((rec.best_r - r).abs() < 1e-12);
    assert_eq!(rec.matched_marked_phrase, "sun");
}

#[test]
fn best_r_is_minimum_over_marking() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let corpus = random_corpus(&mut rng, 20, &["energy", "sun", "wind", "resources"]);
    let mut mf = table1();
    let before = table1();
    let out = extract_corpus(&corpus, &mut mf, Thresholds::default());
    // documents after the first see a grown marking, so check only doc000
    let first = out.values().next().unwrap();
    for rec in first.iter() {
        let v = encode(&rec.phrase).unwrap();
        let min = before
            .entries()
            .iter()
            .map(|e| relatedness(&encode(&e.phrase).unwrap(), &v))
            .fold(f64::INFINITY, f64::min);
        assert!(rec.best_r <= min);
        assert!(rec.best_r < 0.01);
    }
}

#[test]
fn corpus_yields_one_set_per_document() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let marked = ["energy", "sun", "wind"];
    for n in [0, 10, 30] {
        let corpus = random_corpus(&mut rng, n, &marked);
        let out = extract_corpus(&corpus, &mut table1(), Thresholds::default());
        assert_eq!(out.len(), n);
        assert!(out.keys().eq(corpus.keys()));
        for (id, set) in &out {
            assert_eq!(&set.document_id, id);
        }
    }
}

#[test]
fn extraction_is_deterministic_across_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let corpus = random_corpus(&mut rng, 25, &["energy", "sun", "wind", "energy sources"]);
    let seq = Extractor::new(Thresholds::default(), Stopwords::default())
        .with_execution(Execution::Sequential);
    let par = seq.clone().with_execution(Execution::Parallel);
    let (mut a, mut b, mut c) = (table1(), table1(), table1());
    let ra = seq.extract_corpus(&corpus, &mut a);
    let rb = par.extract_corpus(&corpus, &mut b);
    let rc = par.extract_corpus(&corpus, &mut c);
    assert_eq!(ra, rb);
    assert_eq!(rb, rc);
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(b.to_text(), c.to_text());
}

#[test]
fn every_instance_lands_in_marking() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let corpus = random_corpus(&mut rng, 40, &["energy", "sun", "wind", "resources"]);
    let mut mf = table1();
    let out = extract_corpus(&corpus, &mut mf, Thresholds::default());
    let mut total = 0;
    for set in out.values() {
        for rec in set.iter() {
            assert!(mf.contains(&rec.phrase), "{} missing", rec.phrase);
            assert!(rec.frequency >= 1);
            total += 1;
        }
    }
    assert!(total > 0);
}

#[test]
fn threshold_sweep_is_nested() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let corpus = random_corpus(
        &mut rng,
        50,
        &["energy", "sun", "wind", "resources", "energy sources"],
    );
    let sweep: Vec<BTreeSet<(String, String)>> = [0.005, 0.01, 0.02]
        .into_iter()
        .map(|r| {
            let t = Thresholds::default().with_r_threshold(r).unwrap();
            instance_phrases(&extract_corpus(&corpus, &mut table1(), t))
        })
        .collect();
    assert!(sweep[0].is_subset(&sweep[1]));
    assert!(sweep[1].is_subset(&sweep[2]));
    // the corpus contains near-variants on both sides of the thresholds
    assert!(sweep[0].len() < sweep[2].len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planted_marked_phrases_are_exact_hits(seed in any::<u64>(), plant in prop::collection::vec(0usize..5, 1..10)) {
        let mf0 = table1();
        let phrases: Vec<String> = mf0.entries().iter().map(|e| e.phrase.clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let filler = random_corpus(&mut rng, 1, &["panel"]).into_values().next().unwrap();
        let planted: Vec<&str> = plant.iter().map(|&i| phrases[i].as_str()).collect();
        let text = format!("{filler} . {}", planted.join(" . "));
        let mut mf = table1();
        let set = extract_instances("d", &text, &mut mf, Thresholds::default());
        for &i in &plant {
            let rec = set.get(&phrases[i]).unwrap();
            prop_assert_eq!(rec.best_r, 0.0);
            prop_assert!(!rec.via_fallback);
        }
    }

    #[test]
    fn raising_r_threshold_never_drops_instances(seed in any::<u64>(), lo in 0.001f64..0.02, bump in 0.0f64..0.02) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, 6, &["energy", "sun", "wind"]);
        let t_lo = Thresholds::default().with_r_threshold(lo).unwrap();
        let t_hi = Thresholds::default().with_r_threshold(lo + bump).unwrap();
        let a = instance_phrases(&extract_corpus(&corpus, &mut table1(), t_lo));
        let b = instance_phrases(&extract_corpus(&corpus, &mut table1(), t_hi));
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn marking_updates_match_counting_oracle(ops in prop::collection::vec(("[a-e]{1,2}", 1u64..20), 0..40)) {
        let mut mf = table1();
        let mut oracle: HashMap<String, u64> = mf.entries().iter().map(|e| (e.phrase.clone(), e.frequency)).collect();
        for (phrase, f) in &ops {
            let before = mf.get(phrase).map(|e| e.frequency);
            mf.update(phrase, *f).unwrap();
            *oracle.entry(phrase.clone()).or_insert(0) += f;
            let after = mf.get(phrase).unwrap().frequency;
            prop_assert!(before.map_or(true, |b| after > b));
        }
        prop_assert_eq!(mf.len(), oracle.len());
        for e in mf.entries() {
            prop_assert_eq!(oracle[&e.phrase], e.frequency);
        }
        // original entries keep their positions
        let original = table1();
        prop_assert_eq!(&mf.entries()[..5], original.entries());
    }
}
