//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

/// Levenshtein distance from the full (n+1) x (m+1) table.
pub fn lev_full(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut t = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in t[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            t[i][j] = (t[i - 1][j] + 1).min(t[i][j - 1] + 1).min(t[i - 1][j - 1] + cost);
        }
    }
    t[n][m]
}

pub fn similarity_oracle(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    1.0 - lev_full(&a, &b) as f64 / a.len().max(b.len()) as f64
}

/// Every string obtained by removing a set of at most `k` positions.
pub fn variants_by_subsets(word: &str, k: usize) -> BTreeSet<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut out = BTreeSet::new();
    fn rec(chars: &[char], start: usize, left: usize, removed: &mut Vec<usize>, out: &mut BTreeSet<String>) {
        let kept: String = chars
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, c)| *c)
            .collect();
        out.insert(kept);
        if left == 0 {
            return;
        }
        for i in start..chars.len() {
            removed.push(i);
            rec(chars, i + 1, left - 1, removed, out);
            removed.pop();
        }
    }
    rec(&chars, 0, k, &mut Vec::new(), &mut out);
    out
}

pub fn random_word(rng: &mut impl Rng, alphabet: &[char], min: usize, max: usize) -> String {
    let len = rng.random_range(min..=max);
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Latin, Cyrillic, Greek, Devanagari and Han letters plus a combining mark.
pub fn mixed_alphabet() -> Vec<char> {
    let mut v: Vec<char> = "abcdefxyz".chars().collect();
    v.extend("абвгдж".chars());
    v.extend("αβγδλω".chars());
    v.extend("कखगमि".chars());
    v.extend("中国東京".chars());
    v.push('\u{0301}');
    v
}

/// Row-major dot products with a plain double loop.
pub fn dense_sims(src: &[f64], trg: &[f64], d: usize) -> Vec<Vec<f64>> {
    let ns = src.len() / d;
    let nt = trg.len() / d;
    let mut out = vec![vec![0.0; nt]; ns];
    for i in 0..ns {
        for j in 0..nt {
            let mut s = 0.0;
            for t in 0..d {
                s += src[i * d + t] * trg[j * d + t];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Mean of the k largest entries after a full descending sort.
pub fn topk_oracle(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = k.min(v.len());
    let mut s = 0.0;
    for x in &v[..k] {
        s += x;
    }
    s / k as f64
}

/// CSLS score matrix and neighborhood terms from the dense similarities.
pub fn dense_csls(sims: &[Vec<f64>], k: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let ns = sims.len();
    let nt = sims[0].len();
    let r_src: Vec<f64> = sims.iter().map(|row| topk_oracle(row, k)).collect();
    let r_trg: Vec<f64> = (0..nt)
        .map(|j| topk_oracle(&sims.iter().map(|row| row[j]).collect::<Vec<_>>(), k))
        .collect();
    let mut scores = vec![vec![0.0; nt]; ns];
    for i in 0..ns {
        for j in 0..nt {
            scores[i][j] = 2.0 * sims[i][j] - r_src[i] - r_trg[j];
        }
    }
    (scores, r_src, r_trg)
}

/// First index of the maximum.
pub fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub fn unit_rows(rng: &mut impl Rng, n: usize, d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>() - 0.5).collect();
    for row in v.chunks_mut(d) {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        row.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn chars(ranges: &[(u32, u32)], skip: &[u32]) -> Vec<char> {
    ranges
        .iter()
        .flat_map(|&(a, b)| a..=b)
        .filter(|c| !skip.contains(c))
        .filter_map(char::from_u32)
        .collect()
}

/// Core letters of the scripts the bundled tables must cover.
pub fn script_letters() -> Vec<(&'static str, Vec<char>)> {
    vec![
        ("cyrillic", chars(&[(0x0410, 0x044F), (0x0451, 0x0451)], &[])),
        ("greek", chars(&[(0x0391, 0x03A9), (0x03B1, 0x03C9)], &[0x03A2])),
        ("hebrew", chars(&[(0x05D0, 0x05EA)], &[])),
        ("arabic", chars(&[(0x0621, 0x063A), (0x0641, 0x064A)], &[])),
        ("devanagari", chars(&[(0x0905, 0x0914), (0x0915, 0x0939)], &[])),
        (
            "bengali",
            chars(
                &[(0x0985, 0x098C), (0x098F, 0x0990), (0x0993, 0x09A8), (0x09AA, 0x09B0), (0x09B2, 0x09B2), (0x09B6, 0x09B9)],
                &[],
            ),
        ),
        (
            "tamil",
            chars(
                &[
                    (0x0B85, 0x0B8A),
                    (0x0B8E, 0x0B90),
                    (0x0B92, 0x0B95),
                    (0x0B99, 0x0B9A),
                    (0x0B9C, 0x0B9C),
                    (0x0B9E, 0x0B9F),
                    (0x0BA3, 0x0BA4),
                    (0x0BA8, 0x0BAA),
                    (0x0BAE, 0x0BB9),
                ],
                &[],
            ),
        ),
        (
            "kannada",
            chars(
                &[(0x0C85, 0x0C8C), (0x0C8E, 0x0C90), (0x0C92, 0x0CA8), (0x0CAA, 0x0CB3), (0x0CB5, 0x0CB9)],
                &[],
            ),
        ),
        ("thai", chars(&[(0x0E01, 0x0E2E), (0x0E30, 0x0E30), (0x0E32, 0x0E33), (0x0E40, 0x0E44)], &[])),
        ("hangul", chars(&[(0xAC00, 0xD7A3)], &[])),
    ]
}
