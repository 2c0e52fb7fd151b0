//! Table-driven romanization of non-Latin words.
//!
//! Input is lowercased per codepoint and canonically decomposed (NFD) before
//! a greedy longest-match scan over the table keys. Table keys are stored in
//! NFD as well, so a table may map a precomposed letter (`й`, `ά`, a Hangul
//! syllable's jamo) as a multi-codepoint sequence. Combining marks that have
//! no entry are dropped. Anything else without an entry is copied through
//! and counted as uncovered.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Longest key, in codepoints.
pub const MAX_KEY_LEN: usize = 4;

/// Literal written in table files for an empty replacement.
pub const EMPTY_MARKER: &str = "∅";

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/tables/", $name, ".tsv")))),*]
    };
}

/// Tables shipped with the crate, by name.
pub const BUNDLED_TABLES: &[(&str, &str)] = bundled!(
    "arabic",
    "bengali",
    "cyrillic",
    "devanagari",
    "greek",
    "hangul",
    "hebrew",
    "kana",
    "kannada",
    "tamil",
    "thai",
);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RomanizationTable {
    entries: HashMap<Vec<char>, String>,
    scripts: Vec<String>,
    max_key_len: usize,
}

/// Output of [`romanize`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Romanized {
    pub text: String,
    /// Codepoints copied through without a table entry (ASCII letters and
    /// digits excluded).
    pub uncovered: usize,
    /// Number of table matches applied.
    pub matched: usize,
}

fn valid_replacement(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'')
}

impl RomanizationTable {
    pub fn new() -> Self {
        RomanizationTable::default()
    }

    /// Adds one entry. The key is decomposed to NFD first.
    pub fn insert(&mut self, key: &str, replacement: &str) -> Result<()> {
        let chars: Vec<char> = key.nfd().collect();
        if chars.is_empty() || chars.len() > MAX_KEY_LEN {
            return Err(Error::InvalidTableEntry {
                key: key.into(),
                replacement: replacement.into(),
                reason: "key must have 1 to 4 codepoints",
            });
        }
        if !valid_replacement(replacement) {
            return Err(Error::InvalidTableEntry {
                key: key.into(),
                replacement: replacement.into(),
                reason: "replacement may only contain a-z, 0-9 and '",
            });
        }
        if self.entries.contains_key(&chars) {
            return Err(Error::DuplicateKey(key.into()));
        }
        self.max_key_len = self.max_key_len.max(chars.len());
        self.entries.insert(chars, replacement.into());
        Ok(())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut table = RomanizationTable::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(scripts) = comment.trim().strip_prefix("script:") {
                    table.scripts.push(scripts.trim().to_string());
                }
                continue;
            }
            let Some((key, replacement)) = line.split_once('\t') else {
                return Err(Error::parse(source_name, line_no, "expected <key><TAB><replacement>"));
            };
            let replacement = if replacement == EMPTY_MARKER { "" } else { replacement };
            table.insert(key, replacement).map_err(|e| match e {
                Error::DuplicateKey(_) | Error::InvalidTableEntry { .. } => {
                    Error::parse(source_name, line_no, e.to_string())
                }
                other => other,
            })?;
        }
        Ok(table)
    }

    /// Union of two tables. Overlapping keys are an error.
    pub fn merge(&mut self, other: &RomanizationTable) -> Result<()> {
        for (k, v) in &other.entries {
            if self.entries.contains_key(k) {
                return Err(Error::DuplicateKey(k.iter().collect()));
            }
            self.entries.insert(k.clone(), v.clone());
        }
        self.max_key_len = self.max_key_len.max(other.max_key_len);
        for s in &other.scripts {
            if !self.scripts.contains(s) {
                self.scripts.push(s.clone());
            }
        }
        Ok(())
    }

    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED_TABLES
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("no bundled romanization table named {name:?}")))?;
        RomanizationTable::parse(text, &format!("bundled:{name}"))
    }

    /// All bundled tables merged into one.
    pub fn bundled_all() -> Self {
        let mut table = RomanizationTable::new();
        for (name, _) in BUNDLED_TABLES {
            let t = RomanizationTable::bundled(name).expect("bundled tables are valid");
            table.merge(&t).expect("bundled tables have disjoint keys");
        }
        table
    }

    /// Resolves `bundled`, `bundled:<name>` or a file path.
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec {
            "bundled" => Ok(RomanizationTable::bundled_all()),
            s => match s.strip_prefix("bundled:") {
                Some(name) => RomanizationTable::bundled(name),
                None => load_table(Path::new(s)),
            },
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scripts(&self) -> &[String] {
        &self.scripts
    }

    pub fn get(&self, key: &[char]) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[char], &str)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v.as_str()))
    }
}

pub fn load_table(path: &Path) -> Result<RomanizationTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RomanizationTable::parse(&text, &path.display().to_string())
}

/// Lowercases and decomposes `word` the way [`romanize`] does before lookup.
pub fn prepare(word: &str) -> Vec<char> {
    word.chars().flat_map(char::to_lowercase).nfd().collect()
}

pub fn romanize(word: &str, table: &RomanizationTable) -> Romanized {
    let chars = prepare(word);
    let mut out = Romanized {
        text: String::with_capacity(chars.len()),
        ..Romanized::default()
    };
    let mut i = 0;
    while i < chars.len() {
        let longest = table.max_key_len.min(chars.len() - i);
        let hit = (1..=longest)
            .rev()
            .find_map(|len| table.entries.get(&chars[i..i + len]).map(|r| (len, r)));
        if let Some((len, replacement)) = hit {
            out.text.push_str(replacement);
            out.matched += 1;
            i += len;
            continue;
        }
        let c = chars[i];
        if is_combining_mark(c) {
            // unmapped diacritic
        } else if c.is_ascii_lowercase() || c.is_ascii_digit() {
            out.text.push(c);
        } else {
            out.text.push(c);
            out.uncovered += 1;
        }
        i += 1;
    }
    out
}
