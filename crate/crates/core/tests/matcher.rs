mod common;

use std::collections::{BTreeSet, HashMap};

use cheapbwe::matcher::{
    build_delete_index, candidate_pairs, deletion_variants, levenshtein, match_transliterations, normalized_similarity,
    MatchConfig, RankedWord,
};
use cheapbwe::rng::keyed_rng;
use cheapbwe::romanizer::{romanize, RomanizationTable};
use common::{lev_full, mixed_alphabet, random_word, similarity_oracle, variants_by_subsets};
use proptest::prelude::*;
use rand::Rng;

fn indexed(words: &[String]) -> Vec<(String, usize)> {
    words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect()
}

#[test]
fn similarity_matches_full_table_dp_on_mixed_scripts() {
    let alphabet = mixed_alphabet();
    let mut rng = keyed_rng(11, &[]);
    for _ in 0..10_000 {
        let a = random_word(&mut rng, &alphabet, 1, 12);
        let b = random_word(&mut rng, &alphabet, 1, 12);
        assert_eq!(normalized_similarity(&a, &b).unwrap(), similarity_oracle(&a, &b), "{a} / {b}");
    }
}

#[test]
fn similarity_rejects_empty_strings() {
    assert!(normalized_similarity("", "abc").is_err());
    assert!(normalized_similarity("abc", "").is_err());
}

#[test]
fn variants_equal_subset_enumeration() {
    let alphabet: Vec<char> = "abcab".chars().collect();
    let mut rng = keyed_rng(12, &[]);
    for _ in 0..500 {
        let w = random_word(&mut rng, &alphabet, 0, 9);
        for k in 0..=3 {
            let got: BTreeSet<String> = deletion_variants(&w, k).into_iter().collect();
            assert_eq!(got, variants_by_subsets(&w, k), "{w} k={k}");
        }
    }
}

#[test]
fn variant_count_bounded_for_24_chars() {
    let w: String = ('a'..='x').collect();
    assert_eq!(w.chars().count(), 24);
    assert_eq!(deletion_variants(&w, 2).len(), 301);
}

#[test]
fn index_buckets_match_brute_force_on_sampled_words() {
    let alphabet: Vec<char> = "abcdefgh".chars().collect();
    let mut rng = keyed_rng(13, &[]);
    let words: Vec<String> = (0..10_000).map(|_| random_word(&mut rng, &alphabet, 1, 8)).collect();
    let index = build_delete_index(&indexed(&words), 2);
    let all: Vec<BTreeSet<String>> = words.iter().map(|w| variants_by_subsets(w, 2)).collect();
    for _ in 0..100 {
        let probe = &words[rng.random_range(0..words.len())];
        for v in variants_by_subsets(probe, 2) {
            let expected: Vec<u32> = all
                .iter()
                .enumerate()
                .filter(|(_, vs)| vs.contains(&v))
                .map(|(i, _)| i as u32)
                .collect();
            assert_eq!(index.bucket(&v), expected.as_slice(), "variant {v:?}");
        }
    }
}

#[test]
fn candidate_pairs_equal_shared_variant_oracle() {
    let alphabet: Vec<char> = "abcdef".chars().collect();
    let mut rng = keyed_rng(14, &[]);
    let src: Vec<String> = (0..1000).map(|_| random_word(&mut rng, &alphabet, 1, 6)).collect();
    let trg: Vec<String> = (0..1000).map(|_| random_word(&mut rng, &alphabet, 1, 6)).collect();
    let got = candidate_pairs(&build_delete_index(&indexed(&src), 2), &build_delete_index(&indexed(&trg), 2)).unwrap();

    let sv: Vec<BTreeSet<String>> = src.iter().map(|w| variants_by_subsets(w, 2)).collect();
    let tv: Vec<BTreeSet<String>> = trg.iter().map(|w| variants_by_subsets(w, 2)).collect();
    let mut expected = BTreeSet::new();
    for (i, a) in sv.iter().enumerate() {
        for (j, b) in tv.iter().enumerate() {
            if a.intersection(b).next().is_some() {
                expected.insert((i, j));
            }
        }
    }
    assert_eq!(got, expected);

    for (i, s) in src.iter().enumerate() {
        let sc: Vec<char> = s.chars().collect();
        for (j, t) in trg.iter().enumerate() {
            let tc: Vec<char> = t.chars().collect();
            if lev_full(&sc, &tc) <= 1 {
                assert!(got.contains(&(i, j)), "{s} / {t}");
            }
        }
    }
}

#[test]
fn candidate_pairs_rejects_mismatched_k() {
    let words = indexed(&["abc".to_string()]);
    assert!(candidate_pairs(&build_delete_index(&words, 1), &build_delete_index(&words, 2)).is_err());
}

#[test]
fn index_construction_is_deterministic() {
    let words = indexed(&["paris".into(), "parys".into(), "london".into()]);
    let a = build_delete_index(&words, 2);
    let b = build_delete_index(&words, 2);
    let mut ka: Vec<(String, Vec<u32>)> = a.buckets().map(|(k, v)| (k.to_string(), v.to_vec())).collect();
    let mut kb: Vec<(String, Vec<u32>)> = b.buckets().map(|(k, v)| (k.to_string(), v.to_vec())).collect();
    ka.sort();
    kb.sort();
    assert_eq!(ka, kb);
}

#[test]
fn match_equals_index_then_filter_route() {
    let table = RomanizationTable::bundled("cyrillic").unwrap();
    let latin: Vec<char> = "abdeiklmnoprstuvz".chars().collect();
    let cyr: Vec<char> = "абдеиклмнопрстувз".chars().collect();
    let mut rng = keyed_rng(15, &[]);
    let sources: Vec<String> = (0..300).map(|_| random_word(&mut rng, &latin, 3, 7)).collect();
    let targets: Vec<String> = (0..300).map(|_| random_word(&mut rng, &cyr, 3, 7)).collect();
    let config = MatchConfig {
        sim_threshold: 0.6,
        ..MatchConfig::default()
    };
    let out = match_transliterations(&RankedWord::from_list(&sources), &RankedWord::from_list(&targets), &table, &config)
        .unwrap();

    let mut src_unique: Vec<String> = Vec::new();
    for s in &sources {
        if !src_unique.contains(s) {
            src_unique.push(s.clone());
        }
    }
    let mut forms: Vec<String> = Vec::new();
    let mut originals: HashMap<String, Vec<String>> = HashMap::new();
    for t in &targets {
        let r = romanize(t, &table).text;
        if !originals.contains_key(&r) {
            forms.push(r.clone());
        }
        let list = originals.entry(r).or_default();
        if !list.contains(t) {
            list.push(t.clone());
        }
    }
    let pairs = candidate_pairs(&build_delete_index(&indexed(&src_unique), 2), &build_delete_index(&indexed(&forms), 2))
        .unwrap();
    let mut expected = BTreeSet::new();
    for (i, j) in pairs {
        if similarity_oracle(&src_unique[i], &forms[j]) >= 0.6 {
            for t in &originals[&forms[j]] {
                expected.insert((src_unique[i].clone(), t.clone()));
            }
        }
    }
    let got: BTreeSet<(String, String)> = out.pairs.iter().map(|p| (p.src.clone(), p.trg.clone())).collect();
    assert!(!expected.is_empty());
    assert_eq!(got, expected);
    for p in &out.pairs {
        assert!(p.similarity >= 0.6);
        assert_eq!(p.similarity, similarity_oracle(&p.src, &p.romanized));
    }
    let keys: Vec<(usize, usize)> = out.pairs.iter().map(|p| (p.src_rank, p.trg_rank)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn single_substitution_fixture_fully_recovered() {
    let table = RomanizationTable::new();
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz".chars().collect();
    let mut rng = keyed_rng(16, &[]);
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    while sources.len() < 500 {
        let s = random_word(&mut rng, &alphabet, 5, 12);
        if sources.contains(&s) {
            continue;
        }
        let mut chars: Vec<char> = s.chars().collect();
        let pos = rng.random_range(0..chars.len());
        let old = chars[pos];
        while chars[pos] == old {
            chars[pos] = alphabet[rng.random_range(0..alphabet.len())];
        }
        sources.push(s);
        targets.push(chars.into_iter().collect::<String>());
    }
    let out = match_transliterations(
        &RankedWord::from_list(&sources),
        &RankedWord::from_list(&targets),
        &table,
        &MatchConfig::default(),
    )
    .unwrap();
    let got: BTreeSet<(String, String)> = out.pairs.iter().map(|p| (p.src.clone(), p.trg.clone())).collect();
    for (s, t) in sources.iter().zip(&targets) {
        assert!(got.contains(&(s.clone(), t.clone())), "{s} / {t}");
    }
    for p in &out.pairs {
        assert!(p.similarity >= 0.8);
    }
}

#[test]
fn exact_mode_finds_pairs_the_index_misses() {
    let table = RomanizationTable::new();
    let src = vec!["abcdefghijklmno".to_string()];
    let trg = vec!["xbcdefyhijklmnz".to_string()];
    let approximate = match_transliterations(
        &RankedWord::from_list(&src),
        &RankedWord::from_list(&trg),
        &table,
        &MatchConfig::default(),
    )
    .unwrap();
    assert!(approximate.pairs.is_empty());
    let exact = match_transliterations(
        &RankedWord::from_list(&src),
        &RankedWord::from_list(&trg),
        &table,
        &MatchConfig {
            exact: true,
            ..MatchConfig::default()
        },
    )
    .unwrap();
    assert_eq!(exact.pairs.len(), 1);
    assert_eq!(exact.pairs[0].similarity, similarity_oracle(&src[0], &trg[0]));
}

#[test]
fn greek_and_cyrillic_examples() {
    let greek = RomanizationTable::bundled("greek").unwrap();
    let out = match_transliterations(
        &RankedWord::from_list(&["babylon"]),
        &RankedWord::from_list(&["βαβυλών"]),
        &greek,
        &MatchConfig::default(),
    )
    .unwrap();
    assert_eq!(out.pairs.len(), 1);
    assert_eq!(out.pairs[0].similarity, 1.0);

    let cyr = RomanizationTable::bundled("cyrillic").unwrap();
    let out = match_transliterations(
        &RankedWord::from_list(&["carl"]),
        &RankedWord::from_list(&["карл"]),
        &cyr,
        &MatchConfig::default(),
    )
    .unwrap();
    assert_eq!(out.pairs.len(), 1);
    assert_eq!(out.pairs[0].romanized, "carl");
}

proptest! {
    #[test]
    fn levenshtein_matches_oracle(a in "[a-dα-δ]{0,10}", b in "[a-dα-δ]{0,10}") {
        let ac: Vec<char> = a.chars().collect();
        let bc: Vec<char> = b.chars().collect();
        prop_assert_eq!(levenshtein(&ac, &bc), lev_full(&ac, &bc));
        prop_assert_eq!(levenshtein(&ac, &bc), levenshtein(&bc, &ac));
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in "[abc]{1,10}", b in "[abc]{1,10}") {
        let s = normalized_similarity(&a, &b).unwrap();
        prop_assert_eq!(s, normalized_similarity(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, a == b);
    }

    #[test]
    fn pairs_within_k_deletions_share_a_bucket(a in "[abc]{1,8}", b in "[abc]{1,8}") {
        let ac: Vec<char> = a.chars().collect();
        let bc: Vec<char> = b.chars().collect();
        let shared = candidate_pairs(
            &build_delete_index(&[(a.clone(), 0)], 2),
            &build_delete_index(&[(b.clone(), 0)], 2),
        ).unwrap();
        let d = lev_full(&ac, &bc);
        if d <= 1 || (ac.len().abs_diff(bc.len()) == d && d <= 2) {
            prop_assert!(shared.contains(&(0, 0)));
        }
    }
}
