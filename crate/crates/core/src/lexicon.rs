//! Seed lexicons: construction, set algebra, filtering and OOV accounting.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingSpace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Identical,
    Romanized,
    Merged,
    Pivot,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Identical => "identical",
            Provenance::Romanized => "romanized",
            Provenance::Merged => "merged",
            Provenance::Pivot => "pivot",
            Provenance::External => "external",
        })
    }
}

/// Ordered list of distinct (source, target) word pairs.
#[derive(Clone, Debug)]
pub struct SeedLexicon {
    pairs: Vec<(String, String)>,
    seen: HashSet<(String, String)>,
    provenance: Provenance,
    src_lang: String,
    trg_lang: String,
}

impl PartialEq for SeedLexicon {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
            && self.provenance == other.provenance
            && self.src_lang == other.src_lang
            && self.trg_lang == other.trg_lang
    }
}

impl SeedLexicon {
    pub fn new(src_lang: impl Into<String>, trg_lang: impl Into<String>, provenance: Provenance) -> Self {
        SeedLexicon {
            pairs: Vec::new(),
            seen: HashSet::new(),
            provenance,
            src_lang: src_lang.into(),
            trg_lang: trg_lang.into(),
        }
    }

    pub fn from_pairs<S, T>(
        src_lang: &str,
        trg_lang: &str,
        provenance: Provenance,
        pairs: impl IntoIterator<Item = (S, T)>,
    ) -> Self
    where
        S: Into<String>,
        T: Into<String>,
    {
        let mut lex = SeedLexicon::new(src_lang, trg_lang, provenance);
        for (s, t) in pairs {
            lex.push(s, t);
        }
        lex
    }

    /// Appends a pair; returns false if it was already present.
    pub fn push(&mut self, src: impl Into<String>, trg: impl Into<String>) -> bool {
        let pair = (src.into(), trg.into());
        if self.seen.contains(&pair) {
            return false;
        }
        self.seen.insert(pair.clone());
        self.pairs.push(pair);
        true
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn contains(&self, src: &str, trg: &str) -> bool {
        self.seen.contains(&(src.to_string(), trg.to_string()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn src_lang(&self) -> &str {
        &self.src_lang
    }

    pub fn trg_lang(&self) -> &str {
        &self.trg_lang
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Pairs as an unordered set.
    pub fn pair_set(&self) -> HashSet<(String, String)> {
        self.seen.clone()
    }

    /// The same pairs with sides exchanged.
    pub fn swapped(&self) -> SeedLexicon {
        let mut lex = SeedLexicon::new(&self.trg_lang, &self.src_lang, self.provenance);
        for (s, t) in &self.pairs {
            lex.push(t.clone(), s.clone());
        }
        lex
    }

    /// Pairs whose words both occur in the given spaces, as (src rank, trg rank).
    pub fn to_ids(&self, src: &EmbeddingSpace, trg: &EmbeddingSpace) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .filter_map(|(s, t)| Some((src.rank(s)?, trg.rank(t)?)))
            .collect()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (s, t) in &self.pairs {
            writeln!(out, "{s}\t{t}")?;
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// A lexicon read from a file, with the number of repeated pairs dropped.
#[derive(Clone, Debug)]
pub struct LoadedLexicon {
    pub lexicon: SeedLexicon,
    pub duplicates: usize,
}

/// Reads `src<TAB>trg` lines. A single space is accepted as separator when
/// the line has no TAB. Blank lines are skipped.
pub fn read_lexicon<R: Read>(reader: R, source_name: &str, src_lang: &str, trg_lang: &str) -> Result<LoadedLexicon> {
    let mut lex = SeedLexicon::new(src_lang, trg_lang, Provenance::External);
    let mut duplicates = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let sep = if line.contains('\t') { '\t' } else { ' ' };
        let fields: Vec<&str> = line.split(sep).collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("expected two words separated by one {}", if sep == '\t' { "TAB" } else { "space" }),
            ));
        }
        if !lex.push(fields[0], fields[1]) {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        warn!("{source_name}: dropped {duplicates} duplicate pairs");
    }
    Ok(LoadedLexicon {
        lexicon: lex,
        duplicates,
    })
}

pub fn load_lexicon(path: impl AsRef<Path>, src_lang: &str, trg_lang: &str) -> Result<LoadedLexicon> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_lexicon(file, &path.display().to_string(), src_lang, trg_lang)
}

/// Pairs (w, w) for every string in both vocabularies, in source rank order.
pub fn extract_identical(space_a: &EmbeddingSpace, space_b: &EmbeddingSpace) -> SeedLexicon {
    let mut lex = SeedLexicon::new(space_a.lang(), space_b.lang(), Provenance::Identical);
    for w in space_a.words() {
        if space_b.contains(w) {
            lex.push(w.clone(), w.clone());
        }
    }
    if lex.is_empty() {
        warn!("no identical strings shared by the two vocabularies");
    }
    lex
}

fn check_langs(a: &SeedLexicon, b: &SeedLexicon) -> Result<()> {
    if a.src_lang != b.src_lang || a.trg_lang != b.trg_lang {
        return Err(Error::LanguageMismatch(format!(
            "{}-{} vs {}-{}",
            a.src_lang, a.trg_lang, b.src_lang, b.trg_lang
        )));
    }
    Ok(())
}

/// Union of both lexicons: pairs of `a` in order, then new pairs of `b`.
pub fn merge(a: &SeedLexicon, b: &SeedLexicon) -> Result<SeedLexicon> {
    check_langs(a, b)?;
    let mut out = SeedLexicon::new(&a.src_lang, &a.trg_lang, Provenance::Merged);
    for (s, t) in a.pairs.iter().chain(&b.pairs) {
        out.push(s.clone(), t.clone());
    }
    Ok(out)
}

/// Joins two lexicons sharing a source (pivot) language into a lexicon
/// between their target languages.
pub fn pivot_join(a: &SeedLexicon, b: &SeedLexicon) -> Result<SeedLexicon> {
    if a.src_lang != b.src_lang {
        return Err(Error::LanguageMismatch(format!(
            "pivot languages differ: {} vs {}",
            a.src_lang, b.src_lang
        )));
    }
    let mut by_pivot: HashMap<&str, Vec<&str>> = HashMap::new();
    for (e, t) in &b.pairs {
        by_pivot.entry(e).or_default().push(t);
    }
    let mut out = SeedLexicon::new(&a.trg_lang, &b.trg_lang, Provenance::Pivot);
    for (e, t1) in &a.pairs {
        for t2 in by_pivot.get(e.as_str()).into_iter().flatten() {
            out.push(t1.clone(), *t2);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyEnd {
    /// Most frequent source words (smallest ranks).
    Highest,
    /// Least frequent source words.
    Lowest,
}

/// Selects `n` pairs by source-word frequency rank. Pairs whose source word
/// is not in `space_src` are dropped first. Ties keep lexicon order, and the
/// result keeps the original relative order of the selected pairs.
pub fn subset_by_frequency(
    lex: &SeedLexicon,
    space_src: &EmbeddingSpace,
    n: usize,
    which: FrequencyEnd,
) -> Result<SeedLexicon> {
    if n == 0 {
        return Err(Error::Config("subset size must be at least 1".into()));
    }
    let mut usable: Vec<(usize, usize)> = lex
        .pairs
        .iter()
        .enumerate()
        .filter_map(|(i, (s, _))| space_src.rank(s).map(|r| (r, i)))
        .collect();
    if n > usable.len() {
        return Err(Error::NotEnoughPairs {
            requested: n,
            available: usable.len(),
        });
    }
    match which {
        FrequencyEnd::Highest => usable.sort_by_key(|&(r, i)| (r, i)),
        FrequencyEnd::Lowest => usable.sort_by_key(|&(r, i)| (std::cmp::Reverse(r), i)),
    }
    let mut chosen: Vec<usize> = usable[..n].iter().map(|&(_, i)| i).collect();
    chosen.sort_unstable();
    let mut out = SeedLexicon::new(&lex.src_lang, &lex.trg_lang, lex.provenance);
    for i in chosen {
        let (s, t) = &lex.pairs[i];
        out.push(s.clone(), t.clone());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Src,
    Trg,
    Either,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "src" => Ok(Side::Src),
            "trg" => Ok(Side::Trg),
            "either" => Ok(Side::Either),
            other => Err(Error::Config(format!("unknown side {other:?} (expected src, trg or either)"))),
        }
    }
}

/// Removes pairs whose word on `side` is in `names`, ignoring case.
pub fn filter_pairs_by_wordlist<S: AsRef<str>>(lex: &SeedLexicon, names: &[S], side: Side) -> SeedLexicon {
    let names: HashSet<String> = names.iter().map(|n| n.as_ref().to_lowercase()).collect();
    let hit = |w: &str| names.contains(&w.to_lowercase());
    let mut out = SeedLexicon::new(&lex.src_lang, &lex.trg_lang, lex.provenance);
    for (s, t) in &lex.pairs {
        let drop = match side {
            Side::Src => hit(s),
            Side::Trg => hit(t),
            Side::Either => hit(s) || hit(t),
        };
        if !drop {
            out.push(s.clone(), t.clone());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovReport {
    pub total_pairs: usize,
    /// Pairs with both words in vocabulary.
    pub usable_pairs: usize,
    /// Pairs whose source word is out of vocabulary.
    pub oov_src: usize,
    /// Pairs whose target word is out of vocabulary.
    pub oov_trg: usize,
}

impl fmt::Display for OovReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} pairs usable; source OOV in {}, target OOV in {}",
            self.usable_pairs, self.total_pairs, self.oov_src, self.oov_trg
        )
    }
}

pub fn oov_report(lex: &SeedLexicon, space_src: &EmbeddingSpace, space_trg: &EmbeddingSpace) -> OovReport {
    let mut r = OovReport {
        total_pairs: lex.len(),
        ..OovReport::default()
    };
    for (s, t) in &lex.pairs {
        let s_in = space_src.contains(s);
        let t_in = space_trg.contains(t);
        r.oov_src += usize::from(!s_in);
        r.oov_trg += usize::from(!t_in);
        r.usable_pairs += usize::from(s_in && t_in);
    }
    r
}
