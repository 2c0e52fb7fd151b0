//! Seeded synthetic data: random spaces, rotations, and a small bilingual
//! fixture with a Latin and a Cyrillic vocabulary whose vectors are related
//! by a known rotation.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embeddings::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{Provenance, SeedLexicon};

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn unit_rows(data: &mut [f64], dim: usize) {
    for row in data.chunks_exact_mut(dim) {
        let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        row.iter_mut().for_each(|x| *x /= n);
    }
}

/// `n` unit-norm gaussian vectors named `w0, w1, ...`.
pub fn random_unit_space(lang: &str, n: usize, dim: usize, seed: u64) -> EmbeddingSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..n * dim).map(|_| gaussian(&mut rng)).collect();
    unit_rows(&mut data, dim);
    let words = (0..n).map(|i| format!("w{i}")).collect();
    EmbeddingSpace::new(lang, words, data, dim).expect("consistent shape")
}

/// Orthogonal matrix from the QR decomposition of a gaussian matrix.
pub fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Same words, vectors `x Q`.
pub fn rotated_space(space: &EmbeddingSpace, q: &DMatrix<f64>, lang: &str) -> EmbeddingSpace {
    space.transformed(q).expect("square rotation").with_lang(lang)
}

/// Same words, vectors `x Q + noise`, renormalized to unit length.
pub fn noisy_rotated_space(space: &EmbeddingSpace, q: &DMatrix<f64>, sigma: f64, seed: u64, lang: &str) -> EmbeddingSpace {
    let rotated = rotated_space(space, q, lang);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = rotated.as_slice().iter().map(|x| x + sigma * gaussian(&mut rng)).collect();
    unit_rows(&mut data, space.dim());
    EmbeddingSpace::new(lang, rotated.words().to_vec(), data, space.dim()).expect("consistent shape")
}

const CONSONANTS: &[(char, char)] = &[
    ('b', 'б'),
    ('d', 'д'),
    ('f', 'ф'),
    ('g', 'г'),
    ('k', 'к'),
    ('l', 'л'),
    ('m', 'м'),
    ('n', 'н'),
    ('p', 'п'),
    ('r', 'р'),
    ('s', 'с'),
    ('t', 'т'),
    ('v', 'в'),
    ('z', 'з'),
];
const VOWELS: &[(char, char)] = &[('a', 'а'), ('e', 'е'), ('i', 'и'), ('o', 'о'), ('u', 'у')];

/// Letter-by-letter Cyrillic spelling of a word built from the fixture
/// alphabet.
pub fn to_cyrillic(word: &str) -> String {
    word.chars()
        .map(|c| {
            CONSONANTS
                .iter()
                .chain(VOWELS)
                .find(|(l, _)| *l == c)
                .map_or(c, |(_, cyr)| *cyr)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureParams {
    pub words: usize,
    pub dim: usize,
    pub noise: f64,
    /// Every `identical_every`-th word is spelled the same on both sides.
    pub identical_every: usize,
    /// Every `candidate_every`-th source word is listed as a candidate.
    pub candidate_every: usize,
    pub seed: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams {
            words: 1000,
            dim: 32,
            noise: 0.01,
            identical_every: 10,
            candidate_every: 3,
            seed: 2024,
        }
    }
}

/// A source space, a target space that is a noisy rotation of it, and the
/// gold translation of every source word.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub src: EmbeddingSpace,
    pub trg: EmbeddingSpace,
    /// Gold pairs for all words, in source order.
    pub gold: SeedLexicon,
    /// Gold pairs whose two sides are spelled differently.
    pub test: SeedLexicon,
    pub candidates: Vec<String>,
    pub rotation: DMatrix<f64>,
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl Fixture {
    pub fn generate(p: &FixtureParams) -> Fixture {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let mut src_words = Vec::with_capacity(p.words);
        let mut seen = std::collections::HashSet::new();
        while src_words.len() < p.words {
            let syllables = rng.random_range(2..=4);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())].0);
                w.push(VOWELS[rng.random_range(0..VOWELS.len())].0);
            }
            if seen.insert(w.clone()) {
                src_words.push(w);
            }
        }
        let trg_of: Vec<String> = src_words
            .iter()
            .enumerate()
            .map(|(i, w)| if i % p.identical_every == 0 { w.clone() } else { to_cyrillic(w) })
            .collect();

        let mut x: Vec<f64> = (0..p.words * p.dim).map(|_| gaussian(&mut rng)).collect();
        unit_rows(&mut x, p.dim);
        x.iter_mut().for_each(|v| *v = round6(*v));
        let rotation = random_orthogonal(p.dim, &mut rng);
        let src = EmbeddingSpace::new("src", src_words.clone(), x, p.dim).expect("consistent shape");
        let noisy = noisy_rotated_space(&src, &rotation, p.noise, rng.random(), "trg");

        // target frequency order: source order shuffled within windows of 5
        let mut order: Vec<usize> = (0..p.words).collect();
        for chunk in order.chunks_mut(5) {
            chunk.shuffle(&mut rng);
        }
        let mut trg_words = Vec::with_capacity(p.words);
        let mut trg_data = Vec::with_capacity(p.words * p.dim);
        for &i in &order {
            trg_words.push(trg_of[i].clone());
            trg_data.extend(noisy.vector(i).iter().map(|v| round6(*v)));
        }
        let trg = EmbeddingSpace::new("trg", trg_words, trg_data, p.dim).expect("consistent shape");

        let gold = SeedLexicon::from_pairs("src", "trg", Provenance::External, src_words.iter().zip(&trg_of).map(|(s, t)| (s.clone(), t.clone())));
        let test = SeedLexicon::from_pairs(
            "src",
            "trg",
            Provenance::External,
            gold.pairs().iter().filter(|(s, t)| s != t).cloned(),
        );
        let candidates = src_words.iter().step_by(p.candidate_every).cloned().collect();
        Fixture {
            src,
            trg,
            gold,
            test,
            candidates,
            rotation,
        }
    }

    /// Writes `src.vec`, `trg.vec`, `test.tsv` and `candidates.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.src.save(&dir.join("src.vec"))?;
        self.trg.save(&dir.join("trg.vec"))?;
        self.test.save(dir.join("test.tsv"))?;
        let path = dir.join("candidates.txt");
        let mut text = self.candidates.join("\n");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::orthogonality_error;

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = random_orthogonal(16, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(orthogonality_error(&q) < 1e-12);
    }

    #[test]
    fn unit_space_rows_are_unit() {
        let s = random_unit_space("x", 20, 7, 3);
        for i in 0..20 {
            let n: f64 = s.vector(i).iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixture_is_reproducible() {
        let p = FixtureParams {
            words: 60,
            dim: 6,
            ..FixtureParams::default()
        };
        let a = Fixture::generate(&p);
        let b = Fixture::generate(&p);
        assert_eq!(a.src, b.src);
        assert_eq!(a.trg, b.trg);
        assert_eq!(a.gold, b.gold);
        assert_eq!(a.test.len(), 54);
        assert_eq!(a.candidates.len(), 20);
    }

    #[test]
    fn cyrillic_spelling() {
        assert_eq!(to_cyrillic("tokio"), "токио");
    }
}
