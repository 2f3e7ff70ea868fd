mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::res_dir;

fn valenz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valenz"))
        .args(args)
        .env_remove("SYNTAGMA_RES")
        .output()
        .expect("run binary")
}

fn dir(lang: &str) -> String {
    res_dir(lang).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn parse_prints_table() {
    let out = valenz(&[
        "--grammar",
        &dir("it"),
        "parse",
        "--format",
        "table",
        "Paolo chiede a Giovanni di lasciargli prendere l'automobile",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# text = Paolo chiede"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("5.1 ") && l.contains("Ts")));
}

#[test]
fn empty_input_exits_2() {
    let out = valenz(&["--grammar", &dir("en"), "parse", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty input"));
}

#[test]
fn unparsable_sentence_exits_2() {
    let out = valenz(&["--grammar", &dir("en"), "parse", "Paul eats a cherries"]);
    assert_eq!(out.status.code(), Some(2));
    let out = valenz(&[
        "--grammar",
        &dir("en"),
        "parse",
        "--profile",
        "informal",
        "Paul eats a cherries",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("penalty=1;"));
}

#[test]
fn missing_resources_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let gone = tmp.path().join("nowhere");
    let gone = gone.to_str().unwrap();
    assert_eq!(
        valenz(&["--grammar", gone, "parse", "Paul eats"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        valenz(&["--grammar", gone, "validate"]).status.code(),
        Some(1)
    );
}

#[test]
fn resource_directory_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_valenz"))
        .args([
            "parse",
            "--format",
            "columns",
            "Paul wants to eat a hamburger",
        ])
        .env("SYNTAGMA_RES", dir("en"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("2.1\t_\t_\tTs"));
}

#[test]
fn stdin_sentences_keep_input_order() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_valenz"))
        .args(["--grammar", &dir("en"), "parse", "--format", "columns"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"Good drinks and food. James builds and repairs computers.\nPaul picks and Mary eats cherries\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let texts: Vec<String> = stdout(&out)
        .lines()
        .filter_map(|l| l.strip_prefix("# text = ").map(String::from))
        .collect();
    assert_eq!(
        texts,
        [
            "Good drinks and food.",
            "James builds and repairs computers.",
            "Paul picks and Mary eats cherries"
        ]
    );
}

#[test]
fn graph_format_is_dot() {
    let out = valenz(&[
        "--grammar",
        &dir("en"),
        "parse",
        "--format",
        "graph",
        "James builds and repairs computers",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("digraph analysis {"));
    assert!(text.contains("\"w4\" -> \"w5\" [label=\"obj\", style=dashed];"));
}

#[test]
fn lattice_dump_lists_clitic_split() {
    let out = valenz(&[
        "--grammar",
        &dir("it"),
        "parse",
        "--dump-lattice",
        "Paolo chiede a Luigi di poterla prendere",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("RANGE\tCAT\tLEMMA"));
    assert!(text.contains("\tpotere\t") && text.contains("\tPronAcc\tla\t"));
}

#[test]
fn explain_reports_meanings_and_unknown_words() {
    let out = valenz(&[
        "--grammar",
        &dir("it"),
        "explain",
        "Paolo chiede a Giovanni di lasciargli prendere l'automobile",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("chiedere: kept {1.4} rejected {1.1,1.2,1.3}"));

    let out = valenz(&["--grammar", &dir("en"), "explain", "Paul"]);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains(" accept ")).count(), 1);

    let out = valenz(&["--grammar", &dir("en"), "explain", "Paul snores"]);
    assert!(stdout(&out).contains("unknown word `snores`"));
}

#[test]
fn validate_reports_undeclared_category() {
    let tmp = tempfile::tempdir().unwrap();
    for f in ["grammar.sg", "lexicon.sg"] {
        std::fs::copy(res_dir("en").join(f), tmp.path().join(f)).unwrap();
    }
    let grammar = tmp.path().join("grammar.sg");
    let mut text = std::fs::read_to_string(&grammar).unwrap();
    text.push_str("PATTERN NP 42 { seq: Det QP; dep: 2 0; fnct: det head }\n");
    std::fs::write(&grammar, text).unwrap();
    let out = valenz(&["--grammar", tmp.path().to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("QP"));
    let out = valenz(&["--grammar", &dir("it"), "validate"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "--grammar",
        &dir("en"),
        "parse",
        "--k",
        "5",
        "--format",
        "columns",
        "He graduated in linguistics in Paris, philosophy of language and computer science in Rome",
    ];
    let a = valenz(&args);
    let b = valenz(&args);
    assert_eq!(a.stdout, b.stdout);
}
