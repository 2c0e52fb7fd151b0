use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cheapbwe_ffi::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/synthetic").join(name)
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn cpath(p: &Path) -> CString {
    c(p.to_str().unwrap())
}

fn last_error() -> String {
    let p = cbwe_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn romanize_with(table: *const CbweTable, word: &str) -> (String, usize) {
    let mut text: *mut c_char = ptr::null_mut();
    let mut uncovered = usize::MAX;
    assert_eq!(cbwe_romanize(table, c(word).as_ptr(), &mut text, &mut uncovered), CbweStatus::Ok);
    let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
    cbwe_string_free(text);
    (s, uncovered)
}

#[test]
fn romanize_round_trip() {
    unsafe {
        let mut table = ptr::null_mut();
        assert_eq!(cbwe_table_open(c("bundled:greek").as_ptr(), &mut table), CbweStatus::Ok);
        assert_eq!(romanize_with(table, "βαβυλών"), ("babylon".to_owned(), 0));
        assert_eq!(romanize_with(table, "漢"), ("漢".to_owned(), 1));
        cbwe_table_free(table);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut table = ptr::null_mut();
        assert_eq!(cbwe_table_open(c("bundled:nope").as_ptr(), &mut table), CbweStatus::InvalidConfig);
        assert!(table.is_null());
        assert!(last_error().contains("nope"));

        assert_eq!(cbwe_table_open(ptr::null(), &mut table), CbweStatus::NullPointer);
        assert_eq!(last_error(), "spec is null");
        assert_eq!(cbwe_table_open(c("bundled").as_ptr(), ptr::null_mut()), CbweStatus::NullPointer);

        let bad = [0xffu8, 0];
        let mut out = 0.0;
        assert_eq!(cbwe_similarity(bad.as_ptr().cast(), c("a").as_ptr(), &mut out), CbweStatus::InvalidUtf8);
        assert_eq!(cbwe_similarity(c("").as_ptr(), c("").as_ptr(), &mut out), CbweStatus::InvalidInput);

        let mut space = ptr::null_mut();
        let missing = cbwe_space_load(c("/nonexistent/x.vec").as_ptr(), 10, c("en").as_ptr(), &mut space);
        assert_eq!(missing, CbweStatus::Io);

        let dir = tempfile::tempdir().unwrap();
        let broken = dir.path().join("b.vec");
        std::fs::write(&broken, "2 2\na 1 0\nb x 1\n").unwrap();
        assert_eq!(cbwe_space_load(cpath(&broken).as_ptr(), 10, c("en").as_ptr(), &mut space), CbweStatus::Parse);
        assert!(last_error().contains("b.vec:3"));
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        cbwe_table_free(ptr::null_mut());
        cbwe_space_free(ptr::null_mut());
        cbwe_lexicon_free(ptr::null_mut());
        cbwe_mapping_free(ptr::null_mut());
        cbwe_string_free(ptr::null_mut());
        assert_eq!(cbwe_space_len(ptr::null()), 0);
        assert_eq!(cbwe_lexicon_len(ptr::null()), 0);
        assert!(cbwe_mapping_objective(ptr::null()).is_nan());
    }
}

#[test]
fn similarity_matches_core() {
    let pairs = [("kitten", "sitting"), ("карл", "карла"), ("a", "a"), ("ab", "ba")];
    for (a, b) in pairs {
        let mut out = -1.0;
        assert_eq!(unsafe { cbwe_similarity(c(a).as_ptr(), c(b).as_ptr(), &mut out) }, CbweStatus::Ok);
        assert_eq!(out, cheapbwe::matcher::normalized_similarity(a, b).unwrap());
    }
}

#[test]
fn alignment_through_handles_matches_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut acc_pipeline = 0.0;
        let status = cbwe_pipeline_run(cpath(&fixture("config.toml")).as_ptr(), cpath(dir.path()).as_ptr(), &mut acc_pipeline);
        assert_eq!(status, CbweStatus::Ok, "{}", last_error());
        assert!(dir.path().join("eval.jsonl").exists());

        let (mut src, mut trg) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cbwe_space_load(cpath(&fixture("src.vec")).as_ptr(), 200_000, c("src").as_ptr(), &mut src), CbweStatus::Ok);
        assert_eq!(cbwe_space_load(cpath(&fixture("trg.vec")).as_ptr(), 200_000, c("trg").as_ptr(), &mut trg), CbweStatus::Ok);
        assert_eq!((cbwe_space_len(src), cbwe_space_dim(src)), (1000, 32));
        let (mut nsrc, mut ntrg) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cbwe_space_normalize(src, &mut nsrc), CbweStatus::Ok);
        assert_eq!(cbwe_space_normalize(trg, &mut ntrg), CbweStatus::Ok);

        let mut seed = ptr::null_mut();
        assert_eq!(cbwe_lexicon_identical(nsrc, ntrg, &mut seed), CbweStatus::Ok);
        assert_eq!(cbwe_lexicon_len(seed), 100);
        let mut merged = ptr::null_mut();
        assert_eq!(cbwe_lexicon_merge(seed, seed, &mut merged), CbweStatus::Ok);
        assert_eq!(cbwe_lexicon_len(merged), 100);
        let saved = dir.path().join("seed.tsv");
        assert_eq!(cbwe_lexicon_save(merged, cpath(&saved).as_ptr()), CbweStatus::Ok);
        assert_eq!(std::fs::read(&saved).unwrap(), std::fs::read(dir.path().join("seed_lexicon.tsv")).unwrap());

        let mut mapping = ptr::null_mut();
        assert_eq!(cbwe_mapping_learn(nsrc, ntrg, seed, 7, &mut mapping), CbweStatus::Ok);
        assert!(cbwe_mapping_iterations(mapping) >= 1);
        assert!(cbwe_mapping_objective(mapping) > 0.0);
        let (mut msrc, mut mtrg) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cbwe_mapping_apply(mapping, nsrc, ntrg, &mut msrc, &mut mtrg), CbweStatus::Ok);
        let mapped = dir.path().join("m.vec");
        assert_eq!(cbwe_space_save(msrc, cpath(&mapped).as_ptr()), CbweStatus::Ok);
        assert_eq!(std::fs::read(&mapped).unwrap(), std::fs::read(dir.path().join("mapped_src.vec")).unwrap());

        let mut test = ptr::null_mut();
        let status = cbwe_lexicon_load(cpath(&fixture("test.tsv")).as_ptr(), c("src").as_ptr(), c("trg").as_ptr(), &mut test);
        assert_eq!(status, CbweStatus::Ok);
        let mut acc = 0.0;
        assert_eq!(cbwe_evaluate(msrc, mtrg, test, 10, &mut acc), CbweStatus::Ok);
        assert_eq!(acc, acc_pipeline);
        assert!(acc >= 95.0);
        assert_eq!(cbwe_evaluate(msrc, mtrg, test, 0, &mut acc), CbweStatus::InvalidConfig);

        let other = dir.path().join("other.tsv");
        std::fs::write(&other, "zzz\tqqq\n").unwrap();
        let mut oov = ptr::null_mut();
        assert_eq!(cbwe_lexicon_load(cpath(&other).as_ptr(), c("src").as_ptr(), c("trg").as_ptr(), &mut oov), CbweStatus::Ok);
        let mut none = ptr::null_mut();
        assert_eq!(cbwe_mapping_learn(nsrc, ntrg, oov, 7, &mut none), CbweStatus::InvalidInput);
        assert!(last_error().contains("no usable pairs"));

        for s in [src, trg, nsrc, ntrg, msrc, mtrg] {
            cbwe_space_free(s);
        }
        for l in [seed, merged, test, oov] {
            cbwe_lexicon_free(l);
        }
        cbwe_mapping_free(mapping);
    }
}

#[test]
fn header_is_current_and_c_program_links() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cheapbwe.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cbwe_last_error_message", "cbwe_mapping_learn", "cbwe_pipeline_run", "CBWE_STATUS_OK", "typedef struct CbweSpace CbweSpace"] {
        assert!(text.contains(name), "{name} missing from header");
    }

    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libcheapbwe_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C link check: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let build = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(header.parent().unwrap())
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe)
        .arg(fixture("src.vec"))
        .arg(fixture("trg.vec"))
        .arg(fixture("test.tsv"))
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("acc@1 "));
}
