//! Source-side candidate words for transliteration matching: an external
//! list, or a capitalization heuristic over a tokenized corpus.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcher::RankedWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    ExternalFile,
    Heuristic,
}

/// Lowercase, distinct words in descending frequency order.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateList {
    pub words: Vec<String>,
    /// Corpus counts, known for heuristic lists.
    pub counts: Option<Vec<u64>>,
    pub source: CandidateSource,
}

impl CandidateList {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words ranked by list position.
    pub fn ranked(&self) -> Vec<RankedWord> {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| RankedWord {
                word: w.clone(),
                rank: i,
                count: self.counts.as_ref().map(|c| c[i]),
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for w in &self.words {
            writeln!(out, "{w}")?;
        }
        out.flush()
    }
}

/// One word per line; blank lines are ignored.
pub fn read_candidates<R: Read>(reader: R, source_name: &str) -> Result<CandidateList> {
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        let word = line.trim();
        if word.is_empty() {
            continue;
        }
        if word.contains(char::is_whitespace) {
            return Err(Error::parse(source_name, i + 1, format!("candidate {word:?} contains whitespace")));
        }
        let lower = word.to_lowercase();
        if seen.insert(lower.clone()) {
            words.push(lower);
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    Ok(CandidateList {
        words,
        counts: None,
        source: CandidateSource::ExternalFile,
    })
}

pub fn load_candidates(path: impl AsRef<Path>) -> Result<CandidateList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_candidates(file, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    /// Required share of capitalized non-sentence-initial occurrences.
    pub min_capitalized_ratio: f64,
    pub min_count: u64,
    /// Minimum length in codepoints.
    pub min_len: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            min_capitalized_ratio: 0.8,
            min_count: 2,
            min_len: 2,
        }
    }
}

#[derive(Default)]
struct Tally {
    total: u64,
    mid: u64,
    mid_capitalized: u64,
    first_seen: usize,
}

fn ends_sentence(token: &str) -> bool {
    token.ends_with(['.', '!', '?'])
}

/// Capitalization-based proxy for proper-noun detection over whitespace
/// tokenized text. Tokens are stripped of surrounding punctuation; a token
/// is sentence-initial at the start of a line or after a token ending in
/// `.`, `!` or `?`.
pub fn heuristic_candidates<R: BufRead>(corpus: R, config: &HeuristicConfig) -> Result<CandidateList> {
    let mut tallies: HashMap<String, Tally> = HashMap::new();
    let mut position = 0;
    for (lineno, line) in corpus.lines().enumerate() {
        let line = line.map_err(|e| Error::parse("corpus", lineno + 1, e.to_string()))?;
        let mut sentence_start = true;
        for raw in line.split_whitespace() {
            let initial = sentence_start;
            sentence_start = ends_sentence(raw);
            let token = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if token.chars().count() < config.min_len || !token.chars().all(char::is_alphabetic) {
                continue;
            }
            position += 1;
            let capitalized = token.chars().next().is_some_and(char::is_uppercase);
            let t = tallies.entry(token.to_lowercase()).or_insert_with(|| Tally {
                first_seen: position,
                ..Tally::default()
            });
            t.total += 1;
            if !initial {
                t.mid += 1;
                t.mid_capitalized += u64::from(capitalized);
            }
        }
    }
    if tallies.is_empty() {
        warn!("corpus has no usable tokens; candidate list is empty");
    }
    let mut chosen: Vec<(String, Tally)> = tallies
        .into_iter()
        .filter(|(_, t)| {
            t.total >= config.min_count
                && t.mid_capitalized > 0
                && t.mid_capitalized as f64 >= config.min_capitalized_ratio * t.mid as f64
        })
        .collect();
    chosen.sort_by(|a, b| b.1.total.cmp(&a.1.total).then(a.1.first_seen.cmp(&b.1.first_seen)));
    Ok(CandidateList {
        counts: Some(chosen.iter().map(|(_, t)| t.total).collect()),
        words: chosen.into_iter().map(|(w, _)| w).collect(),
        source: CandidateSource::Heuristic,
    })
}
