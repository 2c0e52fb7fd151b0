use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use cheapbwe::candidates::{heuristic_candidates, load_candidates, HeuristicConfig};
use cheapbwe::embeddings::{load_embeddings, normalize, EmbeddingSpace};
use cheapbwe::evaluation::evaluate_bdi;
use cheapbwe::lexicon::{
    extract_identical, filter_pairs_by_wordlist, load_lexicon, merge, oov_report, pivot_join, subset_by_frequency,
    FrequencyEnd, SeedLexicon, Side,
};
use cheapbwe::mapping::self_learn;
use cheapbwe::matcher::{match_transliterations, RankedWord};
use cheapbwe::pipeline::{run_pipeline, PipelineConfig};
use cheapbwe::romanizer::{romanize, RomanizationTable};
use cheapbwe::synthetic::{Fixture, FixtureParams};
use cheapbwe::{Error, Result};

#[derive(Parser)]
#[command(name = "cheapbwe", version, about = "Bilingual word embeddings from identical strings and romanization")]
struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// Run configuration shared by subcommands that read one.
#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set mapping.csls_k=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig> {
        match &self.config {
            Some(p) => PipelineConfig::load(p, &self.overrides),
            None => PipelineConfig::from_toml("", &self.overrides, Path::new(".")),
        }
    }
}

#[derive(Args)]
struct Langs {
    #[arg(long, default_value = "src")]
    src_lang: String,
    #[arg(long, default_value = "trg")]
    trg_lang: String,
}

#[derive(Args)]
struct Output {
    /// Output file (standard output if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Output {
    fn open(&self) -> Result<Box<dyn Write>> {
        match &self.output {
            Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?))),
            None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        }
    }

    fn write_lexicon(&self, lex: &SeedLexicon) -> Result<()> {
        let name = self.name();
        lex.write_to(self.open()?).map_err(|e| Error::io(name, e))
    }

    fn name(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| "<stdout>".into())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pairs of strings present in both vocabularies.
    ExtractIdentical {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        trg: PathBuf,
        #[arg(long, default_value_t = cheapbwe::pipeline::DEFAULT_MAX_VOCAB)]
        max_vocab: usize,
        #[command(flatten)]
        langs: Langs,
        #[command(flatten)]
        out: Output,
    },
    /// Romanize words given as arguments or one per line on standard input.
    Romanize {
        /// `bundled`, `bundled:<script>` or a table file (repeatable).
        #[arg(long = "table", default_value = "bundled")]
        tables: Vec<String>,
        words: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Build a source candidate list from a corpus or clean an existing list.
    Candidates {
        /// Whitespace-tokenized corpus for the capitalization heuristic.
        #[arg(long, conflicts_with = "list", required_unless_present = "list")]
        corpus: Option<PathBuf>,
        /// Existing list to lowercase and deduplicate.
        #[arg(long)]
        list: Option<PathBuf>,
        #[arg(long, default_value_t = 0.8)]
        min_ratio: f64,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 2)]
        min_len: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Transliteration pairs between source candidates and a target vocabulary.
    Match {
        #[arg(long)]
        candidates: PathBuf,
        /// Target embeddings (only the vocabulary is used).
        #[arg(long)]
        trg: PathBuf,
        #[arg(long, default_value_t = cheapbwe::pipeline::DEFAULT_MAX_VOCAB)]
        max_vocab: usize,
        #[arg(long = "table", default_value = "bundled")]
        tables: Vec<String>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long)]
        min_len: Option<usize>,
        #[arg(long)]
        min_freq: Option<u64>,
        /// Compare every pair instead of using the delete index.
        #[arg(long)]
        exact_match: bool,
        /// Add the romanized form and similarity as extra columns.
        #[arg(long)]
        scores: bool,
        #[command(flatten)]
        langs: Langs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Union of two lexicons.
    Merge {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        langs: Langs,
        #[command(flatten)]
        out: Output,
    },
    /// Join two lexicons that share a source (pivot) language.
    PivotJoin {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Select pairs by source-word frequency.
    Subset {
        lexicon: PathBuf,
        /// Source embeddings providing frequency ranks.
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "highest")]
        lowest: bool,
        #[arg(long)]
        highest: bool,
        #[arg(long, default_value_t = cheapbwe::pipeline::DEFAULT_MAX_VOCAB)]
        max_vocab: usize,
        #[command(flatten)]
        langs: Langs,
        #[command(flatten)]
        out: Output,
    },
    /// Drop pairs containing listed names.
    FilterNames {
        lexicon: PathBuf,
        /// One name per line.
        #[arg(long)]
        names: PathBuf,
        #[arg(long, default_value = "src")]
        side: String,
        #[command(flatten)]
        langs: Langs,
        #[command(flatten)]
        out: Output,
    },
    /// Count lexicon pairs covered by two vocabularies.
    OovReport {
        lexicon: PathBuf,
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        trg: PathBuf,
        #[arg(long, default_value_t = cheapbwe::pipeline::DEFAULT_MAX_VOCAB)]
        max_vocab: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        langs: Langs,
    },
    /// Self-learning alignment from a seed lexicon.
    Map {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        trg: PathBuf,
        #[arg(long)]
        seed_lexicon: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Writes mapped_src.vec, mapped_trg.vec and trace.jsonl here.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// acc@1 of CSLS retrieval between two mapped spaces.
    Evaluate {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        trg: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        csls_k: Option<usize>,
        #[arg(long)]
        oov_as_error: bool,
        /// Write one JSON record per query here.
        #[arg(long)]
        per_query: Option<PathBuf>,
        /// Write the summary record here.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Full run driven by a configuration file.
    Pipeline {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Write the synthetic demo fixture.
    #[command(hide = true)]
    GenerateFixture {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = FixtureParams::default().words)]
        words: usize,
        #[arg(long, default_value_t = FixtureParams::default().dim)]
        dim: usize,
        #[arg(long, default_value_t = FixtureParams::default().seed)]
        seed: u64,
    },
}

fn load_space(path: &Path, max_vocab: usize, lang: &str) -> Result<EmbeddingSpace> {
    let (space, report) = load_embeddings(path, max_vocab, lang)?;
    if report.duplicates_skipped > 0 {
        warn!("{}: skipped {} duplicate words", path.display(), report.duplicates_skipped);
    }
    if !report.zero_norm_rejected.is_empty() {
        warn!("{}: rejected {} zero-norm rows", path.display(), report.zero_norm_rejected.len());
    }
    Ok(space)
}

fn table_from(specs: &[String]) -> Result<RomanizationTable> {
    let mut table = RomanizationTable::new();
    for s in specs {
        table.merge(&RomanizationTable::resolve(s)?)?;
    }
    Ok(table)
}

fn read_words(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::ExtractIdentical {
            src,
            trg,
            max_vocab,
            langs,
            out,
        } => {
            let a = load_space(&src, max_vocab, &langs.src_lang)?;
            let b = load_space(&trg, max_vocab, &langs.trg_lang)?;
            let lex = extract_identical(&a, &b);
            info!("{} identical pairs", lex.len());
            out.write_lexicon(&lex)
        }
        Command::Romanize { tables, words, out } => {
            let table = table_from(&tables)?;
            let words = if words.is_empty() {
                io::stdin()
                    .lock()
                    .lines()
                    .collect::<io::Result<Vec<_>>>()
                    .map_err(|e| Error::io("<stdin>", e))?
            } else {
                words
            };
            let mut w = out.open()?;
            let mut uncovered = 0;
            for word in words.iter().filter(|w| !w.trim().is_empty()) {
                let r = romanize(word.trim(), &table);
                uncovered += r.uncovered;
                writeln!(w, "{}\t{}", word.trim(), r.text).map_err(|e| Error::io(out.name(), e))?;
            }
            w.flush().map_err(|e| Error::io(out.name(), e))?;
            if uncovered > 0 {
                warn!("{uncovered} codepoints not covered by the table");
            }
            Ok(())
        }
        Command::Candidates {
            corpus,
            list,
            min_ratio,
            min_count,
            min_len,
            out,
        } => {
            let cands = match (corpus, list) {
                (Some(p), _) => {
                    let file = File::open(&p).map_err(|e| Error::io(&p, e))?;
                    let cfg = HeuristicConfig {
                        min_capitalized_ratio: min_ratio,
                        min_count,
                        min_len,
                    };
                    heuristic_candidates(BufReader::new(file), &cfg)?
                }
                (None, Some(p)) => load_candidates(&p)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            info!("{} candidates", cands.len());
            cands.write_to(out.open()?).map_err(|e| Error::io(out.name(), e))
        }
        Command::Match {
            candidates,
            trg,
            max_vocab,
            tables,
            threshold,
            k,
            min_len,
            min_freq,
            exact_match,
            scores,
            langs,
            config,
            out,
        } => {
            let mut cfg = config.load()?.matching;
            cfg.sim_threshold = threshold.unwrap_or(cfg.sim_threshold);
            cfg.k = k.unwrap_or(cfg.k);
            cfg.min_len = min_len.unwrap_or(cfg.min_len);
            cfg.min_freq = min_freq.unwrap_or(cfg.min_freq);
            cfg.exact |= exact_match;
            cfg.validate()?;
            let cands = load_candidates(&candidates)?;
            let space = load_space(&trg, max_vocab, &langs.trg_lang)?;
            let targets: Vec<RankedWord> = space
                .words()
                .iter()
                .enumerate()
                .map(|(i, w)| RankedWord::new(w.as_str(), i))
                .collect();
            let table = table_from(&tables)?;
            let result = match_transliterations(&cands.ranked(), &targets, &table, &cfg)?;
            info!(
                "{} pairs from {} candidates and {} romanized forms ({} comparisons)",
                result.pairs.len(),
                result.sources_used,
                result.romanized_forms,
                result.compared
            );
            if scores {
                let mut w = out.open()?;
                for p in &result.pairs {
                    writeln!(w, "{}\t{}\t{}\t{:.6}", p.src, p.trg, p.romanized, p.similarity)
                        .map_err(|e| Error::io(out.name(), e))?;
                }
                w.flush().map_err(|e| Error::io(out.name(), e))
            } else {
                out.write_lexicon(&result.to_lexicon(&langs.src_lang, &langs.trg_lang))
            }
        }
        Command::Merge { a, b, langs, out } => {
            let a = load_lexicon(&a, &langs.src_lang, &langs.trg_lang)?.lexicon;
            let b = load_lexicon(&b, &langs.src_lang, &langs.trg_lang)?.lexicon;
            out.write_lexicon(&merge(&a, &b)?)
        }
        Command::PivotJoin { a, b, out } => {
            let a = load_lexicon(&a, "pivot", "l1")?.lexicon;
            let b = load_lexicon(&b, "pivot", "l2")?.lexicon;
            out.write_lexicon(&pivot_join(&a, &b)?)
        }
        Command::Subset {
            lexicon,
            src,
            n,
            lowest,
            highest,
            max_vocab,
            langs,
            out,
        } => {
            if lowest == highest {
                return Err(Error::Config("choose exactly one of --lowest and --highest".into()));
            }
            let which = if lowest { FrequencyEnd::Lowest } else { FrequencyEnd::Highest };
            let lex = load_lexicon(&lexicon, &langs.src_lang, &langs.trg_lang)?.lexicon;
            let space = load_space(&src, max_vocab, &langs.src_lang)?;
            out.write_lexicon(&subset_by_frequency(&lex, &space, n, which)?)
        }
        Command::FilterNames {
            lexicon,
            names,
            side,
            langs,
            out,
        } => {
            let side: Side = side.parse()?;
            let lex = load_lexicon(&lexicon, &langs.src_lang, &langs.trg_lang)?.lexicon;
            let names = read_words(&names)?;
            let kept = filter_pairs_by_wordlist(&lex, &names, side);
            info!("kept {} of {} pairs", kept.len(), lex.len());
            out.write_lexicon(&kept)
        }
        Command::OovReport {
            lexicon,
            src,
            trg,
            max_vocab,
            json,
            langs,
        } => {
            let lex = load_lexicon(&lexicon, &langs.src_lang, &langs.trg_lang)?.lexicon;
            let a = load_space(&src, max_vocab, &langs.src_lang)?;
            let b = load_space(&trg, max_vocab, &langs.trg_lang)?;
            let r = oov_report(&lex, &a, &b);
            if json {
                println!("{}", serde_json::to_string(&r).expect("report serializes"));
            } else {
                println!("{r}");
            }
            Ok(())
        }
        Command::Map {
            src,
            trg,
            seed_lexicon,
            seed,
            out_dir,
            config,
        } => {
            let cfg = config.load()?;
            let mut mapping = cfg.mapping.clone();
            mapping.seed = seed.unwrap_or(cfg.seed);
            mapping.validate()?;
            let a = normalize(&load_space(&src, cfg.max_vocab, &cfg.src_lang)?, &cfg.normalization)?;
            let b = normalize(&load_space(&trg, cfg.max_vocab, &cfg.trg_lang)?, &cfg.normalization)?;
            let lex = load_lexicon(&seed_lexicon, &cfg.src_lang, &cfg.trg_lang)?.lexicon;
            let result = self_learn(&a, &b, &lex, &mapping)?;
            let (ma, mb) = result.apply(&a, &b)?;
            fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            ma.save(&out_dir.join("mapped_src.vec"))?;
            mb.save(&out_dir.join("mapped_trg.vec"))?;
            let mut trace = String::new();
            for r in &result.trace {
                trace.push_str(&serde_json::to_string(r).expect("trace serializes"));
                trace.push('\n');
            }
            let p = out_dir.join("trace.jsonl");
            fs::write(&p, trace).map_err(|e| Error::io(&p, e))?;
            info!(
                "{} iterations, best objective {:.6}, {} induced pairs",
                result.trace.len(),
                result.best_objective,
                result.induced_dict.len()
            );
            Ok(())
        }
        Command::Evaluate {
            src,
            trg,
            test,
            csls_k,
            oov_as_error,
            per_query,
            jsonl,
            config,
        } => {
            let cfg = config.load()?;
            let mut eval = cfg.evaluation.clone();
            eval.csls_k = csls_k.unwrap_or(eval.csls_k);
            eval.oov_as_error |= oov_as_error;
            let a = load_space(&src, cfg.max_vocab, &cfg.src_lang)?;
            let b = load_space(&trg, cfg.max_vocab, &cfg.trg_lang)?;
            let lex = load_lexicon(&test, &cfg.src_lang, &cfg.trg_lang)?.lexicon;
            let report = evaluate_bdi(&a, &b, &lex, &eval)?;
            print!("{}", report.table());
            if let Some(p) = per_query {
                let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
                report.write_per_query(BufWriter::new(f)).map_err(|e| Error::io(&p, e))?;
            }
            if let Some(p) = jsonl {
                let line = serde_json::to_string(&report.summary()).expect("summary serializes") + "\n";
                fs::write(&p, line).map_err(|e| Error::io(&p, e))?;
            }
            Ok(())
        }
        Command::Pipeline { config, output_dir } => {
            let mut cfg = config.load()?;
            if let Some(d) = output_dir {
                cfg.paths.output_dir = Some(std::path::absolute(&d).map_err(|e| Error::io(&d, e))?);
            }
            let out = run_pipeline(&cfg)?;
            println!("config hash {}", out.config_hash);
            println!("seed lexicon: {}", out.oov);
            if let Some(e) = &out.eval {
                print!("{}", e.table());
            }
            Ok(())
        }
        Command::GenerateFixture {
            out_dir,
            words,
            dim,
            seed,
        } => {
            let params = FixtureParams {
                words,
                dim,
                seed,
                ..FixtureParams::default()
            };
            Fixture::generate(&params).write(&out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(Error::Config(format!("cannot start {} worker threads: {e}", cli.threads))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
