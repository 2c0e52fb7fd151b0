//! Monolingual word embeddings in the plain-text word-vector format.
//!
//! The first line holds `<count> <dim>`, every following line a word and its
//! `dim` components. Files are assumed to be sorted by descending corpus
//! frequency, so the position of a word doubles as its frequency rank.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use log::warn;
use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use crate::csls::Rows;
use crate::error::{Error, Result};

/// Rows with a norm below this are treated as zero vectors.
pub const MIN_NORM: f64 = 1e-12;

/// A vocabulary in frequency order together with one vector per word.
///
/// Vectors are stored contiguously, word after word, which is also the
/// column-major layout of a `dim x len` matrix. [`EmbeddingSpace::matrix`]
/// exposes that view without copying.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSpace {
    lang: String,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    dim: usize,
}

impl EmbeddingSpace {
    pub fn new(lang: impl Into<String>, words: Vec<String>, vectors: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if vectors.len() != words.len() * dim {
            return Err(Error::DimensionMismatch(vectors.len(), words.len() * dim));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate word {w:?} in vocabulary")));
            }
        }
        Ok(EmbeddingSpace {
            lang: lang.into(),
            words,
            index,
            vectors,
            dim,
        })
    }

    /// Builds a space from a `dim x len` matrix whose columns are word vectors.
    pub fn from_matrix(lang: impl Into<String>, words: Vec<String>, matrix: &DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() != words.len() {
            return Err(Error::DimensionMismatch(matrix.ncols(), words.len()));
        }
        EmbeddingSpace::new(lang, words, matrix.as_slice().to_vec(), matrix.nrows())
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, rank: usize) -> &str {
        &self.words[rank]
    }

    /// Frequency rank of `word`, if it is in the vocabulary.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn vector(&self, rank: usize) -> &[f64] {
        &self.vectors[rank * self.dim..(rank + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.vectors
    }

    /// `dim x len` view, one column per word.
    pub fn matrix(&self) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.vectors, self.dim, self.words.len())
    }

    /// The first `n` words (all of them if `n >= len`).
    pub fn truncated(&self, n: usize) -> EmbeddingSpace {
        let n = n.min(self.len());
        EmbeddingSpace {
            lang: self.lang.clone(),
            words: self.words[..n].to_vec(),
            index: self
                .words
                .iter()
                .take(n)
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect(),
            vectors: self.vectors[..n * self.dim].to_vec(),
            dim: self.dim,
        }
    }

    /// Row view for the similarity kernels.
    pub fn rows(&self) -> Rows<'_> {
        Rows::new(&self.vectors, self.dim)
    }

    /// Every vector `x` replaced by the row product `x W`.
    pub fn transformed(&self, w: &DMatrix<f64>) -> Result<EmbeddingSpace> {
        if w.nrows() != self.dim {
            return Err(Error::DimensionMismatch(w.nrows(), self.dim));
        }
        let mapped = w.tr_mul(&self.matrix());
        Ok(EmbeddingSpace {
            vectors: mapped.as_slice().to_vec(),
            dim: w.ncols(),
            ..self.clone()
        })
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = lang.into();
        self
    }

    /// Writes the space in the text format. Values use the shortest
    /// representation that parses back to the identical `f64`.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        let mut line = String::new();
        for (i, w) in self.words.iter().enumerate() {
            line.clear();
            line.push_str(w);
            for v in self.vector(i) {
                use std::fmt::Write as _;
                let _ = write!(line, " {v}");
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_text(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// What happened while reading an embedding file besides the accepted rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub declared_count: usize,
    pub duplicates_skipped: usize,
    pub zero_norm_rejected: Vec<String>,
}

/// Reads at most `max_vocab` words from an embedding file.
pub fn load_embeddings(path: &Path, max_vocab: usize, lang: &str) -> Result<(EmbeddingSpace, LoadReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings(BufReader::new(file), &path.display().to_string(), max_vocab, lang)
}

pub fn read_embeddings<R: BufRead>(
    mut reader: R,
    source_name: &str,
    max_vocab: usize,
    lang: &str,
) -> Result<(EmbeddingSpace, LoadReport)> {
    if max_vocab == 0 {
        return Err(Error::Config("max_vocab must be at least 1".into()));
    }
    let io_err = |e| Error::io(source_name, e);

    let mut line = String::new();
    reader.read_line(&mut line).map_err(io_err)?;
    let mut header = line.split_whitespace();
    let (count, dim) = match (header.next(), header.next(), header.next()) {
        (Some(c), Some(d), None) => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(source_name, 1, format!("malformed header {:?}", line.trim_end()))),
        },
        _ => return Err(Error::parse(source_name, 1, format!("malformed header {:?}", line.trim_end()))),
    };

    let mut report = LoadReport {
        declared_count: count,
        ..LoadReport::default()
    };
    let mut words = Vec::with_capacity(count.min(max_vocab));
    let mut index: HashMap<String, usize> = HashMap::with_capacity(count.min(max_vocab));
    let mut vectors = Vec::with_capacity(count.min(max_vocab) * dim);
    let mut row = Vec::with_capacity(dim);
    let mut line_no = 1;

    while words.len() < max_vocab {
        line.clear();
        if reader.read_line(&mut line).map_err(io_err)? == 0 {
            break;
        }
        line_no += 1;
        let text = line.trim_end_matches(['\n', '\r']);
        if text.trim().is_empty() {
            continue;
        }
        let Some((word, rest)) = text.split_once(|c: char| c.is_whitespace()) else {
            return Err(Error::parse(source_name, line_no, format!("expected {dim} values, found 0")));
        };
        row.clear();
        for tok in rest.split_whitespace() {
            let v = f64::from_str(tok)
                .map_err(|_| Error::parse(source_name, line_no, format!("invalid number {tok:?}")))?;
            row.push(v);
        }
        if row.len() != dim {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected {dim} values, found {}", row.len()),
            ));
        }
        if index.contains_key(word) {
            report.duplicates_skipped += 1;
            continue;
        }
        if norm(&row) < MIN_NORM {
            report.zero_norm_rejected.push(word.to_string());
            continue;
        }
        index.insert(word.to_string(), words.len());
        words.push(word.to_string());
        vectors.extend_from_slice(&row);
    }

    if report.duplicates_skipped > 0 {
        warn!("{source_name}: skipped {} duplicate words", report.duplicates_skipped);
    }
    if !report.zero_norm_rejected.is_empty() {
        warn!(
            "{source_name}: rejected {} zero-norm vectors",
            report.zero_norm_rejected.len()
        );
    }

    let space = EmbeddingSpace {
        lang: lang.to_string(),
        words,
        index,
        vectors,
        dim,
    };
    Ok((space, report))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormStep {
    Unit,
    Center,
}

impl fmt::Display for NormStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormStep::Unit => "unit",
            NormStep::Center => "center",
        })
    }
}

impl FromStr for NormStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(NormStep::Unit),
            "center" => Ok(NormStep::Center),
            other => Err(Error::Config(format!("unknown normalization step {other:?}"))),
        }
    }
}

/// Ordered preprocessing steps. Defaults to unit, center, unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<NormStep>", into = "Vec<NormStep>")]
pub struct NormalizationPlan(Vec<NormStep>);

impl NormalizationPlan {
    pub fn new(steps: Vec<NormStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Config("normalization plan must not be empty".into()));
        }
        Ok(NormalizationPlan(steps))
    }

    pub fn steps(&self) -> &[NormStep] {
        &self.0
    }
}

impl Default for NormalizationPlan {
    fn default() -> Self {
        NormalizationPlan(vec![NormStep::Unit, NormStep::Center, NormStep::Unit])
    }
}

impl TryFrom<Vec<NormStep>> for NormalizationPlan {
    type Error = Error;

    fn try_from(steps: Vec<NormStep>) -> Result<Self> {
        NormalizationPlan::new(steps)
    }
}

impl From<NormalizationPlan> for Vec<NormStep> {
    fn from(plan: NormalizationPlan) -> Self {
        plan.0
    }
}

impl FromStr for NormalizationPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<_>>>()?;
        NormalizationPlan::new(steps)
    }
}

/// Applies `plan` to a copy of `space`.
pub fn normalize(space: &EmbeddingSpace, plan: &NormalizationPlan) -> Result<EmbeddingSpace> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let dim = space.dim;
    let mut data = space.vectors.clone();
    for step in plan.steps() {
        match step {
            NormStep::Unit => {
                for (i, row) in data.chunks_exact_mut(dim).enumerate() {
                    let n = norm(row);
                    if n < MIN_NORM {
                        return Err(Error::ZeroNorm(space.words[i].clone()));
                    }
                    row.iter_mut().for_each(|x| *x /= n);
                }
            }
            NormStep::Center => {
                let mut mean = vec![0.0; dim];
                for row in data.chunks_exact(dim) {
                    mean.iter_mut().zip(row).for_each(|(m, x)| *m += x);
                }
                let n = space.len() as f64;
                mean.iter_mut().for_each(|m| *m /= n);
                for row in data.chunks_exact_mut(dim) {
                    row.iter_mut().zip(&mean).for_each(|(x, m)| *x -= m);
                }
            }
        }
    }
    Ok(EmbeddingSpace {
        vectors: data,
        ..space.clone()
    })
}
