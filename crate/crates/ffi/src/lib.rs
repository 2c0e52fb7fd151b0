//! C ABI over `cheapbwe`.
//!
//! Every fallible function returns a [`CbweStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`cbwe_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `*_free` function; strings returned
//! by the library are released with [`cbwe_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use cheapbwe::embeddings::{load_embeddings, normalize, EmbeddingSpace, NormalizationPlan};
use cheapbwe::evaluation::{evaluate_bdi, EvalConfig};
use cheapbwe::lexicon::{extract_identical, load_lexicon, merge, SeedLexicon};
use cheapbwe::mapping::{self_learn, MappingConfig, MappingResult};
use cheapbwe::matcher::normalized_similarity;
use cheapbwe::pipeline::{run_pipeline, PipelineConfig};
use cheapbwe::romanizer::{romanize, RomanizationTable};
use cheapbwe::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbweStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Io = 4,
    Parse = 5,
    InvalidInput = 6,
    Numerical = 7,
    Panic = 8,
}

pub struct CbweTable(RomanizationTable);

pub struct CbweSpace(EmbeddingSpace);

pub struct CbweLexicon(SeedLexicon);

pub struct CbweMapping(MappingResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: CbweStatus,
    message: String,
}

impl Failure {
    fn new(status: CbweStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

fn status_of(e: &Error) -> CbweStatus {
    match e {
        Error::Config(_) => CbweStatus::InvalidConfig,
        Error::Io { .. } => CbweStatus::Io,
        Error::Parse { .. } => CbweStatus::Parse,
        Error::Singular(_) => CbweStatus::Numerical,
        Error::Stage { source, .. } => status_of(source),
        _ => CbweStatus::InvalidInput,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(status_of(&e), e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CbweStatus {
    let failure = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return CbweStatus::Ok,
        Ok(Err(failure)) => failure,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Failure::new(CbweStatus::Panic, format!("internal panic: {msg}"))
        }
    };
    set_last_error(&failure.message);
    failure.status
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(CbweStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(CbweStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(CbweStatus::NullPointer, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure::new(CbweStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(p)
    }
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(CbweStatus::InvalidInput, "result contains a NUL byte"))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cbwe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbwe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens a romanization table: `bundled`, `bundled:<script>` or a file path.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_table_open(spec: *const c_char, out: *mut *mut CbweTable) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let table = RomanizationTable::resolve(str_arg(spec, "spec")?)?;
        *out = boxed(CbweTable(table));
        Ok(())
    })
}

/// # Safety
/// `table` must be NULL or a handle from [`cbwe_table_open`], freed once.
#[no_mangle]
pub unsafe extern "C" fn cbwe_table_free(table: *mut CbweTable) {
    release(table)
}

/// Romanizes one word. `out_uncovered` may be NULL.
///
/// # Safety
/// Pointers must be valid; `*out_text` must be released with [`cbwe_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cbwe_romanize(
    table: *const CbweTable,
    word: *const c_char,
    out_text: *mut *mut c_char,
    out_uncovered: *mut usize,
) -> CbweStatus {
    guard(|| {
        let out_text = out_arg(out_text, "out_text")?;
        let r = romanize(str_arg(word, "word")?, &ref_arg(table, "table")?.0);
        if !out_uncovered.is_null() {
            *out_uncovered = r.uncovered;
        }
        *out_text = owned_string(r.text)?;
        Ok(())
    })
}

/// `1 - lev(a, b) / max(|a|, |b|)` over Unicode scalar values.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_similarity(a: *const c_char, b: *const c_char, out: *mut f64) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = normalized_similarity(str_arg(a, "a")?, str_arg(b, "b")?)?;
        Ok(())
    })
}

/// Loads at most `max_vocab` words from a word2vec text file.
///
/// # Safety
/// `path` and `lang` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_load(
    path: *const c_char,
    max_vocab: usize,
    lang: *const c_char,
    out: *mut *mut CbweSpace,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (space, _) = load_embeddings(Path::new(str_arg(path, "path")?), max_vocab, str_arg(lang, "lang")?)?;
        *out = boxed(CbweSpace(space));
        Ok(())
    })
}

/// Applies the default normalization (unit, center, unit) into a new handle.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_normalize(space: *const CbweSpace, out: *mut *mut CbweSpace) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let normalized = normalize(&ref_arg(space, "space")?.0, &NormalizationPlan::default())?;
        *out = boxed(CbweSpace(normalized));
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_save(space: *const CbweSpace, path: *const c_char) -> CbweStatus {
    guard(|| {
        ref_arg(space, "space")?.0.save(Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// Number of words, or 0 for NULL.
///
/// # Safety
/// `space` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_len(space: *const CbweSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.len())
}

/// Vector dimension, or 0 for NULL.
///
/// # Safety
/// `space` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_dim(space: *const CbweSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `space` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbwe_space_free(space: *mut CbweSpace) {
    release(space)
}

/// Loads a two-column lexicon file (tab or space separated).
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_load(
    path: *const c_char,
    src_lang: *const c_char,
    trg_lang: *const c_char,
    out: *mut *mut CbweLexicon,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let loaded = load_lexicon(str_arg(path, "path")?, str_arg(src_lang, "src_lang")?, str_arg(trg_lang, "trg_lang")?)?;
        *out = boxed(CbweLexicon(loaded.lexicon));
        Ok(())
    })
}

/// Pairs every word spelled identically in both vocabularies.
///
/// # Safety
/// `src` and `trg` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_identical(
    src: *const CbweSpace,
    trg: *const CbweSpace,
    out: *mut *mut CbweLexicon,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let lex = extract_identical(&ref_arg(src, "src")?.0, &ref_arg(trg, "trg")?.0);
        *out = boxed(CbweLexicon(lex));
        Ok(())
    })
}

/// Order-preserving union of two lexicons over the same language pair.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_merge(
    a: *const CbweLexicon,
    b: *const CbweLexicon,
    out: *mut *mut CbweLexicon,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let merged = merge(&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0)?;
        *out = boxed(CbweLexicon(merged));
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_save(lexicon: *const CbweLexicon, path: *const c_char) -> CbweStatus {
    guard(|| {
        ref_arg(lexicon, "lexicon")?.0.save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Number of pairs, or 0 for NULL.
///
/// # Safety
/// `lexicon` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_len(lexicon: *const CbweLexicon) -> usize {
    lexicon.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `lexicon` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbwe_lexicon_free(lexicon: *mut CbweLexicon) {
    release(lexicon)
}

/// Self-learning alignment with default settings and the given seed.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_mapping_learn(
    src: *const CbweSpace,
    trg: *const CbweSpace,
    seed_lexicon: *const CbweLexicon,
    seed: u64,
    out: *mut *mut CbweMapping,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = MappingConfig {
            seed,
            ..MappingConfig::default()
        };
        let result = self_learn(
            &ref_arg(src, "src")?.0,
            &ref_arg(trg, "trg")?.0,
            &ref_arg(seed_lexicon, "seed_lexicon")?.0,
            &config,
        )?;
        *out = boxed(CbweMapping(result));
        Ok(())
    })
}

/// Maps both spaces into the shared space as new handles.
///
/// # Safety
/// Handles must be live; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_mapping_apply(
    mapping: *const CbweMapping,
    src: *const CbweSpace,
    trg: *const CbweSpace,
    out_src: *mut *mut CbweSpace,
    out_trg: *mut *mut CbweSpace,
) -> CbweStatus {
    guard(|| {
        let out_src = out_arg(out_src, "out_src")?;
        let out_trg = out_arg(out_trg, "out_trg")?;
        let (a, b) = ref_arg(mapping, "mapping")?.0.apply(&ref_arg(src, "src")?.0, &ref_arg(trg, "trg")?.0)?;
        *out_src = boxed(CbweSpace(a));
        *out_trg = boxed(CbweSpace(b));
        Ok(())
    })
}

/// Iterations run, or 0 for NULL.
///
/// # Safety
/// `mapping` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbwe_mapping_iterations(mapping: *const CbweMapping) -> usize {
    mapping.as_ref().map_or(0, |m| m.0.trace.len())
}

/// Objective of the best iteration, or NaN for NULL.
///
/// # Safety
/// `mapping` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbwe_mapping_objective(mapping: *const CbweMapping) -> f64 {
    mapping.as_ref().map_or(f64::NAN, |m| m.0.best_objective)
}

/// # Safety
/// `mapping` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbwe_mapping_free(mapping: *mut CbweMapping) {
    release(mapping)
}

/// CSLS acc@1 in percent, rounded to two decimals.
///
/// # Safety
/// Handles must be live; `out_percent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_evaluate(
    mapped_src: *const CbweSpace,
    mapped_trg: *const CbweSpace,
    test_lexicon: *const CbweLexicon,
    csls_k: usize,
    out_percent: *mut f64,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out_percent, "out_percent")?;
        if csls_k == 0 {
            return Err(Failure::new(CbweStatus::InvalidConfig, "csls_k must be at least 1"));
        }
        let config = EvalConfig {
            csls_k,
            ..EvalConfig::default()
        };
        let report = evaluate_bdi(
            &ref_arg(mapped_src, "mapped_src")?.0,
            &ref_arg(mapped_trg, "mapped_trg")?.0,
            &ref_arg(test_lexicon, "test_lexicon")?.0,
            &config,
        )?;
        *out = report.percent();
        Ok(())
    })
}

/// Runs the full pipeline from a TOML configuration and writes its
/// artifacts. `output_dir` may be NULL to use the configured directory.
/// `out_percent` receives acc@1, or NaN when no test lexicon is configured.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_percent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbwe_pipeline_run(
    config_path: *const c_char,
    output_dir: *const c_char,
    out_percent: *mut f64,
) -> CbweStatus {
    guard(|| {
        let out = out_arg(out_percent, "out_percent")?;
        let mut config = PipelineConfig::load(Path::new(str_arg(config_path, "config_path")?), &[])?;
        if !output_dir.is_null() {
            let dir = PathBuf::from(str_arg(output_dir, "output_dir")?);
            config.paths.output_dir = Some(std::path::absolute(&dir).map_err(|e| Error::io(&dir, e))?);
        }
        let result = run_pipeline(&config)?;
        *out = result.eval.map_or(f64::NAN, |e| e.percent());
        Ok(())
    })
}
