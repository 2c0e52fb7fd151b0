//! Approximate transliteration matching.
//!
//! Source candidates (Latin) are compared with romanized target words using
//! normalized Levenshtein similarity. A Symmetric-Delete index restricts the
//! comparison to pairs that become identical after at most `k` deletions on
//! each side; `MatchConfig::exact` switches to comparing every pair.

use std::collections::{BTreeSet, HashMap, HashSet};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Provenance, SeedLexicon};
use crate::romanizer::{romanize, RomanizationTable};

/// Unit-cost edit distance over codepoints.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(a, b) / max(|a|, |b|)`, lengths in codepoints.
pub fn normalized_similarity(w1: &str, w2: &str) -> Result<f64> {
    let a: Vec<char> = w1.chars().collect();
    let b: Vec<char> = w2.chars().collect();
    similarity_chars(&a, &b)
}

pub(crate) fn similarity_chars(a: &[char], b: &[char]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyString);
    }
    let longest = a.len().max(b.len());
    Ok(1.0 - levenshtein(a, b) as f64 / longest as f64)
}

/// Every distinct string reachable from `word` by deleting 0..=k codepoints.
pub fn deletion_variants(word: &str, k: usize) -> HashSet<String> {
    let mut all = HashSet::new();
    all.insert(word.to_string());
    let mut frontier: Vec<Vec<char>> = vec![word.chars().collect()];
    for _ in 0..k {
        let mut next = Vec::new();
        for chars in &frontier {
            for i in 0..chars.len() {
                let mut v = chars.clone();
                v.remove(i);
                if all.insert(v.iter().collect()) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    all
}

/// Symmetric-Delete index: deletion variant -> ids of the words producing it.
#[derive(Clone, Debug)]
pub struct DeleteIndex {
    k: usize,
    buckets: HashMap<String, Vec<u32>>,
    originals: Vec<(String, usize)>,
}

impl DeleteIndex {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn originals(&self) -> &[(String, usize)] {
        &self.originals
    }

    /// Word ids stored under `variant`, ascending.
    pub fn bucket(&self, variant: &str) -> &[u32] {
        self.buckets.get(variant).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn buckets(&self) -> impl Iterator<Item = (&str, &[u32])> {
        self.buckets.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn num_buckets(&self) -> usize {
        self.buckets.len()
    }
}

pub fn build_delete_index(words: &[(String, usize)], k: usize) -> DeleteIndex {
    let variants: Vec<HashSet<String>> = words.par_iter().map(|(w, _)| deletion_variants(w, k)).collect();
    let mut buckets: HashMap<String, Vec<u32>> = HashMap::new();
    // ids are pushed in increasing order, so every bucket stays sorted
    for (id, vs) in variants.into_iter().enumerate() {
        for v in vs {
            buckets.entry(v).or_default().push(id as u32);
        }
    }
    DeleteIndex {
        k,
        buckets,
        originals: words.to_vec(),
    }
}

/// All (source id, target id) pairs sharing at least one bucket key.
pub fn candidate_pairs(index_src: &DeleteIndex, index_trg: &DeleteIndex) -> Result<BTreeSet<(usize, usize)>> {
    if index_src.k != index_trg.k {
        return Err(Error::MismatchedK(index_src.k, index_trg.k));
    }
    let mut pairs = BTreeSet::new();
    let (small, large, flipped) = if index_src.buckets.len() <= index_trg.buckets.len() {
        (index_src, index_trg, false)
    } else {
        (index_trg, index_src, true)
    };
    for (key, ids) in &small.buckets {
        let Some(other) = large.buckets.get(key) else {
            continue;
        };
        for &a in ids {
            for &b in other {
                let pair = if flipped { (b as usize, a as usize) } else { (a as usize, b as usize) };
                pairs.insert(pair);
            }
        }
    }
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    /// Deletions per side in the index.
    pub k: usize,
    pub sim_threshold: f64,
    /// Minimum length in codepoints, applied to lowercased sources and
    /// romanized targets.
    pub min_len: usize,
    /// Minimum corpus count; only applies to words that carry a count.
    pub min_freq: u64,
    /// Compare every pair instead of using the index.
    pub exact: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            k: 2,
            sim_threshold: 0.8,
            min_len: 1,
            min_freq: 1,
            exact: false,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sim_threshold > 0.0 && self.sim_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "sim_threshold must be in (0, 1], got {}",
                self.sim_threshold
            )));
        }
        Ok(())
    }
}

/// A word with its frequency rank and, when known, its corpus count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedWord {
    pub word: String,
    pub rank: usize,
    pub count: Option<u64>,
}

impl RankedWord {
    pub fn new(word: impl Into<String>, rank: usize) -> Self {
        RankedWord {
            word: word.into(),
            rank,
            count: None,
        }
    }

    /// Words in list order, ranked by position.
    pub fn from_list<S: AsRef<str>>(words: &[S]) -> Vec<RankedWord> {
        words.iter().enumerate().map(|(i, w)| RankedWord::new(w.as_ref(), i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedPair {
    pub src: String,
    pub trg: String,
    pub src_rank: usize,
    pub trg_rank: usize,
    pub romanized: String,
    pub similarity: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchOutput {
    pub pairs: Vec<MatchedPair>,
    pub sources_used: usize,
    pub romanized_forms: usize,
    /// Target words containing codepoints the table does not cover.
    pub targets_with_uncovered: usize,
    /// Pairs that reached the similarity check.
    pub compared: usize,
}

impl MatchOutput {
    pub fn to_lexicon(&self, src_lang: &str, trg_lang: &str) -> SeedLexicon {
        let mut lex = SeedLexicon::new(src_lang, trg_lang, Provenance::Romanized);
        for p in &self.pairs {
            lex.push(p.src.clone(), p.trg.clone());
        }
        lex
    }
}

struct RomanizedTarget {
    form: Vec<char>,
    text: String,
    rank: usize,
    originals: Vec<usize>,
}

fn passes_freq(w: &RankedWord, min_freq: u64) -> bool {
    w.count.is_none_or(|c| c >= min_freq)
}

/// Pairs source candidates with target words whose romanization is similar
/// enough. Output is sorted by (source rank, target rank).
pub fn match_transliterations(
    sources: &[RankedWord],
    targets: &[RankedWord],
    table: &RomanizationTable,
    config: &MatchConfig,
) -> Result<MatchOutput> {
    config.validate()?;
    if sources.is_empty() {
        return Err(Error::EmptyCandidates);
    }

    // sources: lowercase, filter, keep the best-ranked spelling
    let mut seen = HashSet::new();
    let mut src: Vec<(Vec<char>, String, usize)> = Vec::new();
    let mut ordered: Vec<&RankedWord> = sources.iter().collect();
    ordered.sort_by_key(|w| w.rank);
    for w in ordered {
        let lower = w.word.to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        if chars.len() < config.min_len.max(1) || !passes_freq(w, config.min_freq) {
            continue;
        }
        if seen.insert(lower.clone()) {
            src.push((chars, lower, w.rank));
        }
    }
    if src.is_empty() {
        return Err(Error::EmptyCandidates);
    }

    // targets: romanize and group originals by romanized form
    let romanized: Vec<_> = targets.par_iter().map(|t| romanize(&t.word, table)).collect();
    let mut out = MatchOutput {
        sources_used: src.len(),
        targets_with_uncovered: romanized.iter().filter(|r| r.uncovered > 0).count(),
        ..MatchOutput::default()
    };
    let any_matched = romanized.iter().any(|r| r.matched > 0);
    if !any_matched && out.targets_with_uncovered > 0 {
        warn!("romanization table covers none of the target scripts; no pairs produced");
        return Ok(out);
    }

    let mut forms: Vec<RomanizedTarget> = Vec::new();
    let mut by_text: HashMap<&str, usize> = HashMap::new();
    for (i, (t, r)) in targets.iter().zip(&romanized).enumerate() {
        let form: Vec<char> = r.text.chars().collect();
        if form.len() < config.min_len.max(1) || !passes_freq(t, config.min_freq) {
            continue;
        }
        match by_text.get(r.text.as_str()) {
            Some(&f) => {
                forms[f].rank = forms[f].rank.min(t.rank);
                forms[f].originals.push(i);
            }
            None => {
                by_text.insert(r.text.as_str(), forms.len());
                forms.push(RomanizedTarget {
                    form,
                    text: r.text.clone(),
                    rank: t.rank,
                    originals: vec![i],
                });
            }
        }
    }
    out.romanized_forms = forms.len();

    let threshold = config.sim_threshold;
    let hits: Vec<(usize, usize, f64, usize)> = if config.exact {
        src.par_iter()
            .enumerate()
            .map(|(s, (chars, _, _))| {
                let mut local = Vec::new();
                let mut compared = 0;
                for (f, t) in forms.iter().enumerate() {
                    let longest = chars.len().max(t.form.len()) as f64;
                    let gap = chars.len().abs_diff(t.form.len()) as f64;
                    // lev >= length gap, so these can never pass
                    if 1.0 - gap / longest < threshold {
                        continue;
                    }
                    compared += 1;
                    let sim = similarity_chars(chars, &t.form).expect("non-empty");
                    if sim >= threshold {
                        local.push((s, f, sim, 0));
                    }
                }
                if let Some(first) = local.first_mut() {
                    first.3 = compared;
                } else if compared > 0 {
                    local.push((s, usize::MAX, 0.0, compared));
                }
                local
            })
            .flatten()
            .collect()
    } else {
        let words: Vec<(String, usize)> = forms.iter().map(|f| (f.text.clone(), f.rank)).collect();
        let index = build_delete_index(&words, config.k);
        src.par_iter()
            .enumerate()
            .map(|(s, (chars, text, _))| {
                let mut reach: Vec<u32> = deletion_variants(text, config.k)
                    .iter()
                    .flat_map(|v| index.bucket(v).iter().copied())
                    .collect();
                reach.sort_unstable();
                reach.dedup();
                let compared = reach.len();
                let mut local: Vec<(usize, usize, f64, usize)> = reach
                    .into_iter()
                    .filter_map(|f| {
                        let sim = similarity_chars(chars, &forms[f as usize].form).expect("non-empty");
                        (sim >= threshold).then_some((s, f as usize, sim, 0))
                    })
                    .collect();
                if let Some(first) = local.first_mut() {
                    first.3 = compared;
                } else if compared > 0 {
                    local.push((s, usize::MAX, 0.0, compared));
                }
                local
            })
            .flatten()
            .collect()
    };

    let mut pairs = Vec::new();
    for (s, f, sim, compared) in hits {
        out.compared += compared;
        if f == usize::MAX {
            continue;
        }
        let (_, src_word, src_rank) = &src[s];
        for &t in &forms[f].originals {
            pairs.push(MatchedPair {
                src: src_word.clone(),
                trg: targets[t].word.clone(),
                src_rank: *src_rank,
                trg_rank: targets[t].rank,
                romanized: forms[f].text.clone(),
                similarity: sim,
            });
        }
    }
    pairs.sort_by(|a, b| {
        (a.src_rank, a.trg_rank, &a.src, &a.trg).cmp(&(b.src_rank, b.trg_rank, &b.src, &b.trg))
    });
    pairs.dedup_by(|a, b| a.src == b.src && a.trg == b.trg);
    debug_assert!(pairs.iter().all(|p| p.similarity >= threshold));
    out.pairs = pairs;
    Ok(out)
}
