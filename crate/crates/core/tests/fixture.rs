use std::fs;
use std::path::Path;

use cheapbwe::embeddings::load_embeddings;
use cheapbwe::lexicon::{extract_identical, load_lexicon};
use cheapbwe::synthetic::{Fixture, FixtureParams};

const FILES: [&str; 4] = ["src.vec", "trg.vec", "test.tsv", "candidates.txt"];

fn committed() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic"))
}

#[test]
fn committed_fixture_matches_generator() {
    let tmp = tempfile::tempdir().unwrap();
    Fixture::generate(&FixtureParams::default()).write(tmp.path()).unwrap();
    for name in FILES {
        assert_eq!(fs::read(tmp.path().join(name)).unwrap(), fs::read(committed().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn fixture_shape() {
    let p = FixtureParams::default();
    let (src, _) = load_embeddings(&committed().join("src.vec"), usize::MAX, "src").unwrap();
    let (trg, _) = load_embeddings(&committed().join("trg.vec"), usize::MAX, "trg").unwrap();
    assert_eq!((src.len(), src.dim()), (p.words, p.dim));
    assert_eq!(trg.len(), p.words);
    let id = extract_identical(&src, &trg);
    assert_eq!(id.len(), p.words / p.identical_every);
    let test = load_lexicon(committed().join("test.tsv"), "src", "trg").unwrap().lexicon;
    assert_eq!(test.len() + id.len(), p.words);
    assert!(test.pairs().iter().all(|(s, t)| s != t && src.contains(s) && trg.contains(t)));
}
