use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_framemap"))
}

struct Outcome {
    code: i32,
    stderr: String,
}

fn run(args: &[&str], cwd: &Path) -> Outcome {
    let out = bin().args(args).current_dir(cwd).output().unwrap();
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn sample_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples/autopoiesis-style")
}

fn manifest(out: &Path) -> Value {
    serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap()
}

fn read(out: &Path, name: &str) -> String {
    fs::read_to_string(out.join(name)).unwrap()
}

fn run_sample(out: &Path, extra: &[&str]) -> Outcome {
    let config = sample_dir().join("framemap.ini");
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, &sample_dir())
}

const FOUR_DOCS: &str = "media frame news media frames\r\n\
public opinion news frame\r\n\
network map word networks analysis\r\n\
word map frame theory opinion\r\n";

const TEN_WORDS: &str = "media\nframe\nnews\npublic\nopinion\nnetwork\nmap\nword\ntheory\nanalysis\n";

#[test]
fn four_documents_by_ten_words() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), FOUR_DOCS).unwrap();
    fs::write(dir.path().join("words.txt"), TEN_WORDS).unwrap();
    let o = run(&["matrix", "--input", "text.txt", "--words", "words.txt", "--out", "out"], dir.path());
    assert_eq!(o.code, 0, "{}", o.stderr);
    let csv = read(&dir.path().join("out"), "matrix.csv");
    // counted by hand; the plural rule also folds "news" and "analysis"
    assert_eq!(
        csv,
        "\"document\",\"media\",\"frame\",\"new\",\"public\",\"opinion\",\"network\",\"map\",\"word\",\"theory\",\"analysi\"\n\
         \"line 1\",2,2,1,0,0,0,0,0,0,0\n\
         \"line 2\",0,1,1,1,1,0,0,0,0,0\n\
         \"line 3\",0,0,0,0,0,2,1,1,0,1\n\
         \"line 4\",0,1,0,0,1,0,1,1,1,0\n"
    );
    let labels = read(&dir.path().join("out"), "labels.csv");
    assert!(labels.contains("\"analysi\",\"analysis\"\n"), "{labels}");
    for name in ["cosine.dat", "cosine.net", "cosine.csv", "labels.csv"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
    let dat = read(&dir.path().join("out"), "cosine.dat");
    assert!(dat.starts_with("*Vertices 10\r\n1 \"media\"\r\n"));
    assert!(dat.contains("*Matrix\r\n1.0000 "));
}

#[test]
fn binary_flag_and_missing_word() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), FOUR_DOCS).unwrap();
    fs::write(dir.path().join("words.txt"), format!("{TEN_WORDS}cosine\n")).unwrap();
    let o = run(
        &["matrix", "--input", "text.txt", "--words", "words.txt", "--binary", "--out", "out"],
        dir.path(),
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stderr.contains("cosine"), "{}", o.stderr);
    let csv = read(&dir.path().join("out"), "matrix.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 11);
    for line in lines {
        for cell in line.split(',').skip(1) {
            assert!(cell == "0" || cell == "1", "{line}");
        }
    }
}

#[test]
fn freq_sorted_and_stopwords_removed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), "the frame the frame the news\nthe map\n").unwrap();
    fs::write(dir.path().join("stop.txt"), "# articles\nthe\n").unwrap();
    let o = run(&["freq", "--input", "text.txt", "--out", "a"], dir.path());
    assert_eq!(o.code, 0);
    assert!(read(&dir.path().join("a"), "wrdfrq.csv").contains("\n\"the\",4,"));
    let o = run(&["freq", "--input", "text.txt", "--stopwords", "stop.txt", "--out", "b"], dir.path());
    assert_eq!(o.code, 0);
    let csv = read(&dir.path().join("b"), "wrdfrq.csv");
    let words: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(words, ["\"frame\"", "\"map\"", "\"new\""]);
}

#[test]
fn missing_input_is_exit_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["freq", "--input", "nowhere.txt"], dir.path());
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("nowhere.txt"), "{}", o.stderr);
    let o = run(&["freq"], dir.path());
    assert_eq!(o.code, 2);
}

#[test]
fn bad_options_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), FOUR_DOCS).unwrap();
    assert_eq!(run(&["freq", "--input", "text.txt", "--threshold", "1.5"], dir.path()).code, 2);
    assert_eq!(run(&["freq", "--input", "text.txt", "--n-factors", "x"], dir.path()).code, 2);
    fs::write(dir.path().join("bad.ini"), "[map]\ncolour = red\n").unwrap();
    let o = run(&["freq", "--config", "bad.ini"], dir.path());
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("bad.ini:2"), "{}", o.stderr);
}

#[test]
fn empty_selection_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), FOUR_DOCS).unwrap();
    let o = run(&["matrix", "--input", "text.txt", "--min-count", "1000"], dir.path());
    assert_eq!(o.code, 3, "{}", o.stderr);
}

#[test]
fn all_zero_variance_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), "alpha beta\nalpha beta\nalpha beta\n").unwrap();
    let o = run(&["run", "--input", "text.txt", "--out", "out"], dir.path());
    assert_eq!(o.code, 3, "{}", o.stderr);
    let m = manifest(&dir.path().join("out"));
    assert_eq!(m["failure"]["command"], "factors");
    // outputs of the completed stages stay on disk
    assert!(dir.path().join("out/matrix.csv").exists());
}

#[test]
fn corrupted_stopwords_fail_at_corpus_stage() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("text.txt"), FOUR_DOCS).unwrap();
    fs::write(dir.path().join("stop.txt"), "the\n%%%\n").unwrap();
    let o = run(&["run", "--input", "text.txt", "--stopwords", "stop.txt", "--out", "out"], dir.path());
    assert_eq!(o.code, 2);
    let m = manifest(&dir.path().join("out"));
    assert_eq!(m["failure"]["stage"], "corpus");
    assert_eq!(m["failure"]["command"], "freq");
}

#[test]
fn factor_count_and_suppression() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("six");
    assert_eq!(run_sample(&out, &["--n-factors", "6"]).code, 0);
    let header = read(&out, "loadings.csv").lines().next().unwrap().to_string();
    assert!(header.ends_with("\"component_6\""), "{header}");
    let text = read(&out, "loadings.txt");
    assert!(text.contains("Absolute values below .100 suppressed."));
    assert!(text.contains("Rotation converged in "));
    let display = read(&out, "loadings_display.csv");
    assert!(display.lines().skip(1).any(|l| l.contains(",,") || l.ends_with(',')));

    let out = dir.path().join("one");
    assert_eq!(run_sample(&out, &["--n-factors", "1"]).code, 0);
    assert_eq!(read(&out, "reliability.csv").lines().count(), 2);
}

#[test]
fn map_without_frames_uses_cores() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample_dir();
    let out = dir.path().join("out");
    let o = run(
        &[
            "matrix",
            "--corpus-dir",
            sample.to_str().unwrap(),
            "--stopwords",
            sample.join("stopwords.txt").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(run(&["map", "--out", out.to_str().unwrap()], dir.path()).code, 0);
    let m = manifest(&out);
    let notices = m["stages"][0]["notices"].as_array().unwrap();
    assert!(notices.iter().any(|n| n.as_str().unwrap().contains("core number")));
    assert_eq!(read(&out, "map.clu"), read(&out, "core.clu"));
    assert!(m["config"]["map.threshold"] == "0.2");
}

#[test]
fn kk_layout_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(run_sample(&a, &["--layout", "kk", "--seed", "7"]).code, 0);
    assert_eq!(run_sample(&b, &["--layout", "kk", "--seed", "7"]).code, 0);
    assert_eq!(run_sample(&c, &["--layout", "fr", "--seed", "7"]).code, 0);
    assert_eq!(fs::read(a.join("map.svg")).unwrap(), fs::read(b.join("map.svg")).unwrap());
    assert_ne!(fs::read(a.join("map.svg")).unwrap(), fs::read(c.join("map.svg")).unwrap());
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn run_equals_the_four_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let whole = dir.path().join("whole");
    let parts = dir.path().join("parts");
    assert_eq!(run_sample(&whole, &[]).code, 0);
    let config = sample_dir().join("framemap.ini");
    for cmd in ["freq", "matrix", "factors", "map"] {
        let o = run(
            &[cmd, "--config", config.to_str().unwrap(), "--out", parts.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(o.code, 0, "{cmd}: {}", o.stderr);
    }
    let strip = |t: Vec<(String, Vec<u8>)>| -> Vec<(String, Vec<u8>)> {
        t.into_iter().filter(|(n, _)| n != "manifest.json").collect()
    };
    assert_eq!(strip(tree(&whole)), strip(tree(&parts)));
}

#[test]
fn bundled_expected_tree_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run_sample(&out, &[]).code, 0);
    let expected = tree(&sample_dir().join("expected"));
    let got = tree(&out);
    let names = |t: &[(String, Vec<u8>)]| t.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    assert_eq!(names(&got), names(&expected));
    for ((name, a), (_, b)) in got.iter().zip(&expected) {
        assert!(a == b, "{name} differs from the bundled expected output");
    }
}
