mod common;

use cheapbwe::csls::{argmax, csls_score, knn_means, Rows};
use cheapbwe::embeddings::EmbeddingSpace;
use cheapbwe::evaluation::{evaluate_bdi, EvalConfig};
use cheapbwe::lexicon::{Provenance, SeedLexicon};
use cheapbwe::rng::keyed_rng;
use cheapbwe::synthetic::{noisy_rotated_space, random_unit_space};
use cheapbwe::Error;
use common::{dense_csls, dense_sims, first_argmax, unit_rows};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn lex(pairs: &[(String, String)]) -> SeedLexicon {
    SeedLexicon::from_pairs("src", "trg", Provenance::External, pairs.iter().cloned())
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn noisy_pair(n: usize, seed: u64) -> (EmbeddingSpace, EmbeddingSpace) {
    let x = random_unit_space("src", n, 16, seed);
    let z = noisy_rotated_space(&x, &DMatrix::identity(16, 16), 0.3, seed + 1, "trg");
    (x, z)
}

fn gold_pairs(n: usize) -> Vec<(String, String)> {
    (0..n).map(|i| (format!("w{i}"), format!("w{i}"))).collect()
}

#[test]
fn csls_equals_dense_oracle() {
    let mut rng = keyed_rng(71, &[]);
    for n in [20, 200] {
        let d = 12;
        let src = unit_rows(&mut rng, n, d);
        let trg = unit_rows(&mut rng, n, d);
        let sims = dense_sims(&src, &trg, d);
        for k in [1, 5, 10] {
            let (scores, r_src, r_trg) = dense_csls(&sims, k);
            let (s_rows, t_rows) = (Rows::new(&src, d), Rows::new(&trg, d));
            assert_eq!(knn_means(s_rows, t_rows, k), r_src);
            assert_eq!(knn_means(t_rows, s_rows, k), r_trg);
            for i in 0..n {
                let got = csls_score(s_rows.row(i), t_rows, r_src[i], &r_trg);
                assert_eq!(got, scores[i], "n={n} k={k} row {i}");
                assert_eq!(argmax(&got), Some(first_argmax(&scores[i])));
            }
        }
    }
}

#[test]
fn zero_penalties_reduce_to_cosine() {
    let mut rng = keyed_rng(72, &[]);
    let src = unit_rows(&mut rng, 30, 6);
    let trg = unit_rows(&mut rng, 30, 6);
    let sims = dense_sims(&src, &trg, 6);
    for (i, row) in sims.iter().enumerate() {
        let scores = csls_score(&src[i * 6..(i + 1) * 6], Rows::new(&trg, 6), 0.0, &[0.0; 30]);
        assert_eq!(argmax(&scores), Some(first_argmax(row)));
    }
}

#[test]
fn hub_target_is_penalized() {
    let hub = unit([1.0, 0.0, 0.0]);
    let specific = unit([0.6, 0.8, 0.0]);
    let query = unit([0.9, 0.436, 0.0]);
    let others = [unit([0.99, 0.0, 0.141]), unit([0.99, 0.0, -0.141]), unit([0.98, -0.199, 0.0])];
    let mut src: Vec<f64> = query.to_vec();
    others.iter().for_each(|o| src.extend(o));
    let trg: Vec<f64> = hub.iter().chain(&specific).copied().collect();

    let sims = dense_sims(&src, &trg, 3);
    assert_eq!(first_argmax(&sims[0]), 0);
    let (scores, r_src, r_trg) = dense_csls(&sims, 2);
    assert_eq!(first_argmax(&scores[0]), 1);
    let got = csls_score(&query, Rows::new(&trg, 3), r_src[0], &r_trg);
    assert_eq!(argmax(&got), Some(1));

    let src_words: Vec<String> = ["query", "a", "b", "c"].map(String::from).to_vec();
    let trg_words: Vec<String> = ["hub", "specific"].map(String::from).to_vec();
    let s = EmbeddingSpace::new("src", src_words, src, 3).unwrap();
    let t = EmbeddingSpace::new("trg", trg_words, trg, 3).unwrap();
    let report = evaluate_bdi(&s, &t, &lex(&[("query".into(), "specific".into())]), &EvalConfig { csls_k: 2, ..EvalConfig::default() }).unwrap();
    assert_eq!(report.per_query[0].predicted, "specific");
    assert_eq!(report.summary().acc_at_1, 100.0);
}

#[test]
fn self_retrieval_is_perfect() {
    let x = random_unit_space("src", 300, 16, 73);
    let report = evaluate_bdi(&x, &x, &lex(&gold_pairs(300)), &EvalConfig::default()).unwrap();
    assert_eq!(report.hits, 300);
    assert_eq!(report.summary().acc_at_1, 100.0);
}

#[test]
fn accuracy_matches_dense_retrieval() {
    let (x, z) = noisy_pair(250, 74);
    let pairs: Vec<(String, String)> = gold_pairs(250).into_iter().step_by(2).collect();
    let report = evaluate_bdi(&x, &z, &lex(&pairs), &EvalConfig::default()).unwrap();
    let (scores, _, _) = dense_csls(&dense_sims(x.as_slice(), z.as_slice(), 16), 10);
    let mut hits = 0;
    for (s, t) in &pairs {
        let i = x.rank(s).unwrap();
        if z.word(first_argmax(&scores[i])) == t {
            hits += 1;
        }
    }
    assert!(hits > 0 && hits < pairs.len());
    assert_eq!(report.hits, hits);
    assert_eq!(report.evaluated_queries, pairs.len());
    assert_eq!(report.summary().acc_at_1, (10_000.0 * hits as f64 / pairs.len() as f64).round() / 100.0);
}

#[test]
fn order_of_test_lines_does_not_matter() {
    let (x, z) = noisy_pair(200, 75);
    let mut pairs = gold_pairs(200);
    pairs.push(("w3".into(), "w7".into()));
    let base = evaluate_bdi(&x, &z, &lex(&pairs), &EvalConfig::default()).unwrap();
    let mut rng = keyed_rng(76, &[]);
    for _ in 0..5 {
        pairs.shuffle(&mut rng);
        assert_eq!(evaluate_bdi(&x, &z, &lex(&pairs), &EvalConfig::default()).unwrap(), base);
    }
}

#[test]
fn unreachable_gold_changes_nothing() {
    let (x, z) = noisy_pair(150, 77);
    let pairs = gold_pairs(150);
    let base = evaluate_bdi(&x, &z, &lex(&pairs), &EvalConfig::default()).unwrap();
    let mut extended = pairs.clone();
    extended.extend((0..150).step_by(3).map(|i| (format!("w{i}"), format!("missing{i}"))));
    assert_eq!(evaluate_bdi(&x, &z, &lex(&extended), &EvalConfig::default()).unwrap(), base);
}

#[test]
fn skipped_queries_are_accounted() {
    let (x, z) = noisy_pair(100, 78);
    let mut pairs = gold_pairs(50);
    pairs.push(("absent".into(), "w1".into()));
    pairs.push(("w60".into(), "absent".into()));
    pairs.push(("w60".into(), "gone".into()));
    let report = evaluate_bdi(&x, &z, &lex(&pairs), &EvalConfig::default()).unwrap();
    assert_eq!(report.skipped_oov, 2);
    assert_eq!(report.evaluated_queries + report.skipped_oov, 52);

    let all_oov = lex(&[("w1".into(), "nowhere".into())]);
    assert!(matches!(evaluate_bdi(&x, &z, &all_oov, &EvalConfig::default()), Err(Error::NoEvaluableQueries { skipped: 1 })));
    assert!(matches!(evaluate_bdi(&x, &z, &lex(&[]), &EvalConfig::default()), Err(Error::EmptyTestLexicon)));
}

#[test]
fn report_is_identical_across_thread_counts() {
    let (x, z) = noisy_pair(400, 79);
    let test = lex(&gold_pairs(400));
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evaluate_bdi(&x, &z, &test, &EvalConfig::default()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(8));
    let mut a = Vec::new();
    let mut b = Vec::new();
    one.write_per_query(&mut a).unwrap();
    run(3).write_per_query(&mut b).unwrap();
    assert_eq!(a, b);
    assert_eq!(one.table(), run(2).table());
}

proptest! {
    #[test]
    fn constant_target_shift_keeps_argmax(seed in 0u64..1000, c in -5.0f64..5.0, k in 1usize..8) {
        let mut rng = keyed_rng(seed, &[80]);
        let src = unit_rows(&mut rng, 15, 4);
        let trg = unit_rows(&mut rng, 25, 4);
        let (s_rows, t_rows) = (Rows::new(&src, 4), Rows::new(&trg, 4));
        let r_src = knn_means(s_rows, t_rows, k);
        let r_trg = knn_means(t_rows, s_rows, k);
        let shifted: Vec<f64> = r_trg.iter().map(|r| r + c).collect();
        for (i, &r) in r_src.iter().enumerate() {
            let a = csls_score(s_rows.row(i), t_rows, r, &r_trg);
            let b = csls_score(s_rows.row(i), t_rows, r, &shifted);
            prop_assert_eq!(argmax(&a), argmax(&b));
        }
    }
}
