//! Declarative run configuration and the end-to-end pipeline:
//! load, normalize, build the seed lexicon, self-learn, evaluate.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::candidates::load_candidates;
use crate::embeddings::{load_embeddings, normalize, EmbeddingSpace, NormalizationPlan};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_bdi, EvalConfig, EvalReport};
use crate::lexicon::{extract_identical, load_lexicon, merge, oov_report, pivot_join, OovReport, SeedLexicon};
use crate::mapping::{self_learn, MappingConfig, MappingResult};
use crate::matcher::{match_transliterations, MatchConfig, RankedWord};
use crate::romanizer::RomanizationTable;

pub const DEFAULT_MAX_VOCAB: usize = 200_000;

/// How the initial seed lexicon is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconMode {
    /// Identical strings.
    Id,
    /// Romanization-based transliteration pairs.
    Rom,
    /// Identical strings plus romanization pairs.
    Idpp,
    /// A lexicon file.
    External,
    /// Two lexicons from a shared pivot language, joined.
    Pivot,
}

impl FromStr for LexiconMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(json!(s)).map_err(|_| Error::Config(format!("unknown lexicon mode {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub src_embeddings: Option<PathBuf>,
    pub trg_embeddings: Option<PathBuf>,
    /// `bundled`, `bundled:<script>` or table file paths.
    pub tables: Vec<String>,
    pub candidates: Option<PathBuf>,
    pub test_lexicon: Option<PathBuf>,
    pub seed_lexicon: Option<PathBuf>,
    /// Pivot-to-source lexicon for the pivot mode.
    pub pivot_src_lexicon: Option<PathBuf>,
    /// Pivot-to-target lexicon for the pivot mode.
    pub pivot_trg_lexicon: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub src_lang: String,
    pub trg_lang: String,
    pub mode: LexiconMode,
    pub max_vocab: usize,
    pub normalization: NormalizationPlan,
    pub per_query: bool,
    pub paths: Paths,
    pub matching: MatchConfig,
    pub mapping: MappingConfig,
    pub evaluation: EvalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            src_lang: "src".into(),
            trg_lang: "trg".into(),
            mode: LexiconMode::Id,
            max_vocab: DEFAULT_MAX_VOCAB,
            normalization: NormalizationPlan::default(),
            per_query: false,
            paths: Paths {
                tables: vec!["bundled".into()],
                ..Paths::default()
            },
            matching: MatchConfig::default(),
            mapping: MappingConfig::default(),
            evaluation: EvalConfig::default(),
        }
    }
}

/// Applies `key.path=value` to a TOML document. Values are read as TOML
/// when possible and as plain strings otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let mut table = doc;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {part:?} is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) -> Result<()> {
    if let Some(path) = p {
        let joined = if path.is_absolute() { path.clone() } else { base.join(&*path) };
        *p = Some(std::path::absolute(&joined).map_err(|e| Error::io(&joined, e))?);
    }
    Ok(())
}

impl PipelineConfig {
    /// Parses TOML, applies overrides and resolves relative paths against
    /// `base_dir`.
    pub fn from_toml(text: &str, overrides: &[String], base_dir: &Path) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut config: PipelineConfig = doc.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.resolve_paths(base_dir)?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_toml(&text, overrides, base)
    }

    fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        let p = &mut self.paths;
        for slot in [
            &mut p.src_embeddings,
            &mut p.trg_embeddings,
            &mut p.candidates,
            &mut p.test_lexicon,
            &mut p.seed_lexicon,
            &mut p.pivot_src_lexicon,
            &mut p.pivot_trg_lexicon,
            &mut p.output_dir,
        ] {
            resolve(base, slot)?;
        }
        for t in &mut p.tables {
            if t != "bundled" && !t.starts_with("bundled:") {
                let mut slot = Some(PathBuf::from(&*t));
                resolve(base, &mut slot)?;
                *t = slot.expect("resolved").display().to_string();
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.matching.validate()?;
        self.mapping.validate()?;
        if self.max_vocab == 0 {
            return Err(Error::Config("max_vocab must be at least 1".into()));
        }
        let p = &self.paths;
        let need = |name: &str, path: &Option<PathBuf>| -> Result<()> {
            match path {
                None => Err(Error::Config(format!("paths.{name} is required for mode {:?}", self.mode))),
                Some(path) if !path.exists() => {
                    Err(Error::Config(format!("paths.{name}: {} does not exist", path.display())))
                }
                Some(_) => Ok(()),
            }
        };
        need("src_embeddings", &p.src_embeddings)?;
        need("trg_embeddings", &p.trg_embeddings)?;
        match self.mode {
            LexiconMode::Id => {}
            LexiconMode::Rom | LexiconMode::Idpp => {
                need("candidates", &p.candidates)?;
                if p.tables.is_empty() {
                    return Err(Error::Config("paths.tables must list at least one table".into()));
                }
                for t in &p.tables {
                    if !t.starts_with("bundled") && !Path::new(t).exists() {
                        return Err(Error::Config(format!("romanization table {t} does not exist")));
                    }
                }
            }
            LexiconMode::External => need("seed_lexicon", &p.seed_lexicon)?,
            LexiconMode::Pivot => {
                need("pivot_src_lexicon", &p.pivot_src_lexicon)?;
                need("pivot_trg_lexicon", &p.pivot_trg_lexicon)?;
            }
        }
        if p.test_lexicon.is_some() {
            need("test_lexicon", &p.test_lexicon)?;
        }
        if p.output_dir.is_none() {
            return Err(Error::Config("paths.output_dir is required".into()));
        }
        Ok(())
    }

    /// The configuration as recorded in the manifest; the output location
    /// is not part of it.
    pub fn recorded(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.paths.output_dir = None;
        serde_json::to_value(&c).expect("config serializes")
    }

    /// SHA-256 of the recorded configuration.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.recorded()).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn romanization_table(&self) -> Result<RomanizationTable> {
        let mut table = RomanizationTable::new();
        for spec in &self.paths.tables {
            table.merge(&RomanizationTable::resolve(spec)?)?;
        }
        Ok(table)
    }

    pub fn load_spaces(&self) -> Result<(EmbeddingSpace, EmbeddingSpace)> {
        let load = |p: &Option<PathBuf>, lang: &str| -> Result<EmbeddingSpace> {
            let path = p.as_ref().ok_or_else(|| Error::Config("embedding path missing".into()))?;
            let (space, report) = load_embeddings(path, self.max_vocab, lang)?;
            if !report.zero_norm_rejected.is_empty() {
                warn!("{}: rejected {} zero-norm rows", path.display(), report.zero_norm_rejected.len());
            }
            Ok(space)
        };
        Ok((
            load(&self.paths.src_embeddings, &self.src_lang)?,
            load(&self.paths.trg_embeddings, &self.trg_lang)?,
        ))
    }
}

/// Everything the pipeline produced, in memory.
#[derive(Debug)]
pub struct PipelineOutput {
    pub config_hash: String,
    pub seed_lexicon: SeedLexicon,
    pub oov: OovReport,
    pub mapping: MappingResult,
    pub eval: Option<EvalReport>,
    pub artifacts: Vec<PathBuf>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage {
            stage: name,
            source: Box::new(other),
        },
    })
}

/// Identical, romanized, or combined lexicon built from loaded spaces.
pub fn romanized_lexicon(
    config: &PipelineConfig,
    src: &EmbeddingSpace,
    trg: &EmbeddingSpace,
) -> Result<SeedLexicon> {
    let path = config
        .paths
        .candidates
        .as_ref()
        .ok_or_else(|| Error::Config("paths.candidates missing".into()))?;
    let candidates = load_candidates(path)?;
    let table = config.romanization_table()?;
    let targets: Vec<RankedWord> = trg
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| RankedWord::new(w.as_str(), i))
        .collect();
    let out = match_transliterations(&candidates.ranked(), &targets, &table, &config.matching)?;
    Ok(out.to_lexicon(src.lang(), trg.lang()))
}

struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))
    }

    fn cleanup(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn jsonl(records: impl IntoIterator<Item = serde_json::Value>) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

fn stamped(mut v: serde_json::Value, hash: &str, seed: u64) -> serde_json::Value {
    let obj = v.as_object_mut().expect("records are objects");
    obj.insert("config_hash".into(), json!(hash));
    obj.insert("seed".into(), json!(seed));
    v
}

/// Runs every stage and writes the artifacts into `paths.output_dir`. On
/// failure the files written so far are removed.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput> {
    config.validate()?;
    let out_dir = config.paths.output_dir.clone().expect("validated");
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let mut writer = Writer {
        dir: out_dir,
        written: Vec::new(),
    };
    match run_stages(config, &mut writer) {
        Ok(out) => Ok(out),
        Err(e) => {
            writer.cleanup();
            Err(e)
        }
    }
}

fn run_stages(config: &PipelineConfig, w: &mut Writer) -> Result<PipelineOutput> {
    let hash = config.hash();
    let seed = config.seed;
    info!("config hash {hash}");

    let (src_raw, trg_raw) = stage("load", config.load_spaces())?;
    let src = stage("normalize", normalize(&src_raw, &config.normalization))?;
    let trg = stage("normalize", normalize(&trg_raw, &config.normalization))?;

    let lexicon = stage("lexicon", (|| -> Result<SeedLexicon> {
        let lex = match config.mode {
            LexiconMode::Id => {
                let id = extract_identical(&src, &trg);
                id.save(w.path("identical.tsv"))?;
                id
            }
            LexiconMode::Rom => {
                let rom = romanized_lexicon(config, &src, &trg)?;
                rom.save(w.path("romanized.tsv"))?;
                rom
            }
            LexiconMode::Idpp => {
                let id = extract_identical(&src, &trg);
                let rom = romanized_lexicon(config, &src, &trg)?;
                id.save(w.path("identical.tsv"))?;
                rom.save(w.path("romanized.tsv"))?;
                merge(&id, &rom)?
            }
            LexiconMode::External => {
                let p = config.paths.seed_lexicon.as_ref().expect("validated");
                load_lexicon(p, &config.src_lang, &config.trg_lang)?.lexicon
            }
            LexiconMode::Pivot => {
                let a = load_lexicon(config.paths.pivot_src_lexicon.as_ref().expect("validated"), "pivot", &config.src_lang)?;
                let b = load_lexicon(config.paths.pivot_trg_lexicon.as_ref().expect("validated"), "pivot", &config.trg_lang)?;
                pivot_join(&a.lexicon, &b.lexicon)?
            }
        };
        lex.save(w.path("seed_lexicon.tsv"))?;
        Ok(lex)
    })())?;

    let oov = oov_report(&lexicon, &src, &trg);
    info!("seed lexicon: {oov}");
    w.text("oov_report.json", &format!("{}\n", stamped(json!(oov), &hash, seed)))?;

    let mapping_config = MappingConfig {
        seed,
        ..config.mapping.clone()
    };
    let mapping = stage("mapping", self_learn(&src, &trg, &lexicon, &mapping_config))?;
    let trace = jsonl(mapping.trace.iter().map(|r| stamped(json!(r), &hash, seed)));
    w.text("trace.jsonl", &trace)?;

    let (mapped_src, mapped_trg) = stage("mapping", mapping.apply(&src, &trg))?;
    stage("write", mapped_src.save(&w.path("mapped_src.vec")))?;
    stage("write", mapped_trg.save(&w.path("mapped_trg.vec")))?;

    let eval = match &config.paths.test_lexicon {
        Some(p) => {
            let report = stage("evaluation", (|| {
                let test = load_lexicon(p, &config.src_lang, &config.trg_lang)?.lexicon;
                evaluate_bdi(&mapped_src, &mapped_trg, &test, &config.evaluation)
            })())?;
            w.text("eval.jsonl", &jsonl([stamped(json!(report.summary()), &hash, seed)]))?;
            w.text("eval.txt", &report.table())?;
            if config.per_query {
                let mut buf = Vec::new();
                report.write_per_query(&mut buf).map_err(|e| Error::io("per_query.jsonl", e))?;
                w.text("per_query.jsonl", &String::from_utf8(buf).expect("json is utf-8"))?;
            }
            Some(report)
        }
        None => {
            warn!("no test lexicon configured; skipping evaluation");
            None
        }
    };

    let mut artifacts = Vec::new();
    for p in &w.written {
        let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
        let name = p.file_name().expect("file name").to_string_lossy().into_owned();
        artifacts.push(json!({"name": name, "sha256": hex::encode(Sha256::digest(&bytes))}));
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": hash,
        "seed": seed,
        "config": config.recorded(),
        "seed_lexicon": {"pairs": lexicon.len(), "provenance": lexicon.provenance()},
        "mapping": {
            "iterations": mapping.trace.len(),
            "best_iteration": mapping.best_iteration,
            "best_objective": mapping.best_objective,
            "converged": mapping.converged,
            "induced_pairs": mapping.induced_dict.len(),
        },
        "eval": eval.as_ref().map(|e| e.summary()),
        "artifacts": artifacts,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    w.text("manifest.json", &text)?;

    Ok(PipelineOutput {
        config_hash: hash,
        seed_lexicon: lexicon,
        oov,
        mapping,
        eval,
        artifacts: w.written.clone(),
    })
}
