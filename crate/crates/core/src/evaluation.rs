//! Bilingual dictionary induction evaluation with CSLS retrieval.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csls::{argmax, csls_from_sims, knn_means, similarities, topk_mean};
use crate::embeddings::{normalize, EmbeddingSpace, NormStep, NormalizationPlan};
use crate::error::{Error, Result};
use crate::lexicon::SeedLexicon;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub csls_k: usize,
    /// Count queries with out-of-vocabulary words as misses instead of
    /// leaving them out of the accuracy.
    pub oov_as_error: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            csls_k: 10,
            oov_as_error: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub src: String,
    pub predicted: String,
    /// In-vocabulary gold translations, sorted.
    pub gold: Vec<String>,
    pub hit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub hits: usize,
    pub evaluated_queries: usize,
    pub skipped_oov: usize,
    pub csls_k: usize,
    pub oov_as_error: bool,
    /// One entry per evaluated query, ordered by source word.
    pub per_query: Vec<QueryResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    /// Percentage, rounded to two decimals.
    pub acc_at_1: f64,
    pub hits: usize,
    pub evaluated_queries: usize,
    pub skipped_oov: usize,
    pub csls_k: usize,
    pub oov_as_error: bool,
}

impl EvalReport {
    /// Fraction of correct top-1 retrievals.
    pub fn accuracy(&self) -> f64 {
        let denom = if self.oov_as_error {
            self.evaluated_queries + self.skipped_oov
        } else {
            self.evaluated_queries
        };
        self.hits as f64 / denom as f64
    }

    pub fn percent(&self) -> f64 {
        (self.accuracy() * 10_000.0).round() / 100.0
    }

    pub fn summary(&self) -> EvalSummary {
        EvalSummary {
            acc_at_1: self.percent(),
            hits: self.hits,
            evaluated_queries: self.evaluated_queries,
            skipped_oov: self.skipped_oov,
            csls_k: self.csls_k,
            oov_as_error: self.oov_as_error,
        }
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let rows = [
            ("acc@1 (%)", format!("{:.2}", self.percent())),
            ("hits", self.hits.to_string()),
            ("evaluated queries", self.evaluated_queries.to_string()),
            ("skipped (OOV)", self.skipped_oov.to_string()),
            ("csls k", self.csls_k.to_string()),
        ];
        for (k, v) in rows {
            writeln!(s, "{k:<20}{v:>10}").expect("writing to a string");
        }
        s
    }

    /// One JSON line per evaluated query.
    pub fn write_per_query<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for q in &self.per_query {
            serde_json::to_writer(&mut out, q)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// acc@1 of CSLS retrieval from `mapped_src` into `mapped_trg`. Rows are
/// unit-normalized first; neighborhoods span both full vocabularies.
pub fn evaluate_bdi(
    mapped_src: &EmbeddingSpace,
    mapped_trg: &EmbeddingSpace,
    test_lex: &SeedLexicon,
    config: &EvalConfig,
) -> Result<EvalReport> {
    if test_lex.is_empty() {
        return Err(Error::EmptyTestLexicon);
    }
    if config.csls_k == 0 {
        return Err(Error::Config("csls_k must be at least 1".into()));
    }
    if mapped_src.dim() != mapped_trg.dim() {
        return Err(Error::DimensionMismatch(mapped_src.dim(), mapped_trg.dim()));
    }

    let mut gold: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (s, t) in test_lex.pairs() {
        gold.entry(s).or_default().push(t);
    }
    let mut queries: Vec<(usize, &str, Vec<&str>)> = Vec::new();
    let mut skipped = 0;
    for (s, golds) in gold {
        let mut inside: Vec<&str> = golds.into_iter().filter(|t| mapped_trg.contains(t)).collect();
        inside.sort_unstable();
        inside.dedup();
        match mapped_src.rank(s) {
            Some(rank) if !inside.is_empty() => queries.push((rank, s, inside)),
            _ => skipped += 1,
        }
    }
    if queries.is_empty() {
        return Err(Error::NoEvaluableQueries { skipped });
    }

    let unit = NormalizationPlan::new(vec![NormStep::Unit])?;
    let src = normalize(mapped_src, &unit)?;
    let trg = normalize(mapped_trg, &unit)?;
    let k = config.csls_k;
    let r_trg = knn_means(trg.rows(), src.rows(), k);

    let trg_rows = trg.rows();
    let per_query: Vec<QueryResult> = queries
        .par_iter()
        .map_init(
            || vec![0.0; trg.len()],
            |sims, (rank, word, golds)| {
                similarities(src.vector(*rank), trg_rows, sims);
                let r_src = topk_mean(sims, k);
                csls_from_sims(sims, r_src, &r_trg);
                let best = argmax(sims).expect("non-empty target space");
                let predicted = trg.word(best);
                QueryResult {
                    src: word.to_string(),
                    predicted: predicted.to_string(),
                    gold: golds.iter().map(|g| g.to_string()).collect(),
                    hit: golds.binary_search(&predicted).is_ok(),
                }
            },
        )
        .collect();

    Ok(EvalReport {
        hits: per_query.iter().filter(|q| q.hit).count(),
        evaluated_queries: per_query.len(),
        skipped_oov: skipped,
        csls_k: k,
        oov_as_error: config.oov_as_error,
        per_query,
    })
}
