use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/planted")
        .join(name)
}

fn coword(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coword"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn map_args<'a>(corpus: &'a str, lexicon: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "map",
        "-i",
        corpus,
        "--lexicon",
        lexicon,
        "--output-dir",
        out,
    ]
}

#[test]
fn map_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (c, l) = (fixture("corpus.txt"), fixture("lexicon.txt"));
    let out = dir.path().join("out");
    let mut args = map_args(
        c.to_str().unwrap(),
        l.to_str().unwrap(),
        out.to_str().unwrap(),
    );
    args.extend(["--min-count", "2"]);
    let run = coword(&args);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("documents           60"));
    assert!(stdout.contains("vocabulary size     20"));
    assert!(stdout.contains("factors (k)         4"));
    assert!(stdout.contains("threshold used"));
    assert!(out.join("map.net").exists());
    assert!(!out.join("segmented.tsv").exists());
}

#[test]
fn explicit_threshold_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let (c, l) = (fixture("corpus.txt"), fixture("lexicon.txt"));
    let out = dir.path().join("out");
    let mut args = map_args(
        c.to_str().unwrap(),
        l.to_str().unwrap(),
        out.to_str().unwrap(),
    );
    args.extend(["--min-count", "2", "-k", "2", "--threshold", "0.07"]);
    let run = coword(&args);
    assert!(run.status.success());
    assert!(String::from_utf8(run.stdout)
        .unwrap()
        .contains("threshold used      0.070000"));
}

#[test]
fn empty_vocabulary_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (c, l) = (fixture("corpus.txt"), fixture("lexicon.txt"));
    let out = dir.path().join("out");
    let mut args = map_args(
        c.to_str().unwrap(),
        l.to_str().unwrap(),
        out.to_str().unwrap(),
    );
    args.extend(["--min-count", "1000000"]);
    let run = coword(&args);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("vocabulary stage failed"));
}

#[test]
fn stage_errors_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let l = fixture("lexicon.txt");
    let run = coword(&map_args(
        "/nonexistent/corpus.txt",
        l.to_str().unwrap(),
        out.to_str().unwrap(),
    ));
    assert_eq!(run.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("read stage failed"), "{stderr}");
    assert!(stderr.contains("/nonexistent/corpus.txt"), "{stderr}");

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "学报\tx\n").unwrap();
    let c = fixture("corpus.txt");
    let run = coword(&map_args(
        c.to_str().unwrap(),
        bad.to_str().unwrap(),
        out.to_str().unwrap(),
    ));
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("invalid weight"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(coword(&["map"]).status.code(), Some(2));
    assert_eq!(coword(&["frobnicate"]).status.code(), Some(2));
    let run = coword(&[
        "map",
        "--tokens",
        "t.tsv",
        "--output-dir",
        "o",
        "--threshold",
        "1.5",
    ]);
    assert_eq!(run.status.code(), Some(2));
    let run = coword(&["map", "--tokens", "t.tsv", "--output-dir", "o", "-k", "0"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn segment_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    let lexicon = dir.path().join("l.txt");
    std::fs::write(&corpus, "北京理工大学学报\n\nChinese Journal，2024\n").unwrap();
    std::fs::write(&lexicon, "北京\n大学\n北京理工大学\n学报\n").unwrap();
    let run = coword(&[
        "segment",
        "-i",
        corpus.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "1\t北京理工大学 学报\n3\tChinese Journal 2024\n"
    );
}

#[test]
fn stopwords_removed_before_counting() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    let lexicon = dir.path().join("l.txt");
    let stop = dir.path().join("s.txt");
    let seg = dir.path().join("seg.tsv");
    std::fs::write(&corpus, "学报研究\n大学研究 the\n").unwrap();
    std::fs::write(&lexicon, "学报\n大学\n研究\n").unwrap();
    std::fs::write(&stop, "研究\nThe\n").unwrap();
    let run = coword(&[
        "segment",
        "-i",
        corpus.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--stopwords",
        stop.to_str().unwrap(),
        "-o",
        seg.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    assert_eq!(std::fs::read_to_string(&seg).unwrap(), "1\t学报\n2\t大学\n");
}

#[test]
fn factors_without_frequency_uses_row_totals() {
    let dir = tempfile::tempdir().unwrap();
    let occ = dir.path().join("occurrence.csv");
    std::fs::write(&occ, "word,1,2,3,4\na,2,1,0,0\nb,1,1,0,1\nc,0,0,3,1\n").unwrap();
    let out = dir.path().join("f");
    let run = coword(&[
        "factors",
        "--matrix",
        occ.to_str().unwrap(),
        "-k",
        "2",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let factors = std::fs::read_to_string(out.join("factors.csv")).unwrap();
    let counts: Vec<&str> = factors
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(counts, ["3", "3", "4"]);
}
