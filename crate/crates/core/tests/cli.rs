mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use synerr::{ConfusionMatrix, Scheme};

use common::fixture;

struct Out {
    stdout: String,
    stderr: String,
    code: i32,
}

fn synerr(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_synerr"))
        .args(args)
        .output()
        .expect("binary runs");
    Out {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap_or(-1),
    }
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

fn corpus_args() -> Vec<String> {
    vec![
        "--m2".into(),
        path(&fixture("corpus/learner.m2")),
        "--src-conllu".into(),
        path(&fixture("corpus/source.conllu")),
        "--cor-conllu".into(),
        path(&fixture("corpus/corrected.conllu")),
    ]
}

fn with(cmd: &str, base: Vec<String>, extra: &[&str]) -> Out {
    let mut args: Vec<String> = vec![cmd.to_string()];
    args.extend(base);
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    synerr(&refs)
}

fn write_bundle(dir: &Path, m2: &str, src: &str, cor: &str) -> Vec<String> {
    let files = [("a.m2", m2), ("src.conllu", src), ("cor.conllu", cor)];
    for (name, text) in files {
        fs::write(dir.join(name), text).unwrap();
    }
    vec![
        "--m2".into(),
        path(&dir.join("a.m2")),
        "--src-conllu".into(),
        path(&dir.join("src.conllu")),
        "--cor-conllu".into(),
        path(&dir.join("cor.conllu")),
    ]
}

#[test]
fn classify_streams_one_line_per_edit() {
    let out = with("classify", corpus_args(), &[]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[0], "0\t0\tReplacement\tUPOS\tADJ\tADV\t5\t6\tR:ADJ:FORM");
    assert!(out.stderr.contains("tie rate"));
}

#[test]
fn empty_m2_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_bundle(dir.path(), "", "", "");
    let out = with("classify", args, &[]);
    assert_eq!((out.code, out.stdout.as_str()), (0, ""));
}

#[test]
fn corrupted_parse_exits_two_and_names_the_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let cor = fs::read_to_string(fixture("corpus/corrected.conllu"))
        .unwrap()
        .replace("\tyour\t", "\tyours\t");
    let args = write_bundle(
        dir.path(),
        &fs::read_to_string(fixture("corpus/learner.m2")).unwrap(),
        &fs::read_to_string(fixture("corpus/source.conllu")).unwrap(),
        &cor,
    );
    let out = with("classify", args.clone(), &[]);
    assert_eq!(out.code, 2);
    assert_eq!(out.stdout.lines().count(), 19);
    assert!(out.stderr.contains("sentence 7"), "{}", out.stderr);
    assert_eq!(with("matrix", args.clone(), &[]).code, 2);
    assert_eq!(with("levels", args, &["--level", "A"]).code, 2);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_bundle(dir.path(), "S a\n\n", "1\ta\n\n", "");
    assert_eq!(with("classify", args, &[]).code, 1);
    assert_eq!(synerr(&["classify", "--m2", "/nonexistent"]).code, 1);
    assert_eq!(synerr(&["matrix", "--scheme", "bogus"]).code, 1);
    assert_eq!(synerr(&["--help"]).code, 0);
}

#[test]
fn matrix_cells_and_round_trip() {
    let out = with("matrix", corpus_args(), &["--kinds", "rep"]);
    assert_eq!(out.code, 0);
    let m = ConfusionMatrix::from_tsv_str(&out.stdout, Scheme::Upos).unwrap();
    assert_eq!(m.to_tsv(), out.stdout);
    assert_eq!(m.get(Some("ADJ"), Some("ADV")), 2);
    assert_eq!(m.get(Some("NOUN"), Some("PROPN")), 1);
    assert_eq!(m.total(), 14);

    let adds = with("matrix", corpus_args(), &["--kinds", "add"]);
    let m = ConfusionMatrix::from_tsv_str(&adds.stdout, Scheme::Upos).unwrap();
    assert_eq!(m.total(), 3);
    assert_eq!(m.get(None, Some("DET")), 1);
    assert_eq!(m.get(None, Some("PUNCT")), 1);
}

#[test]
fn two_inserted_articles_land_in_one_cell() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = "S I saw cat and dog .\n\
              A 2 2|||M:DET|||the|||REQUIRED|||-NONE-|||0\n\
              A 4 4|||M:DET|||the|||REQUIRED|||-NONE-|||0\n\n";
    let row = |id: usize, form: &str, pos: &str, head: usize, rel: &str| {
        format!("{id}\t{form}\t_\t{pos}\t_\t_\t{head}\t{rel}\t_\t_\n")
    };
    let src = [
        row(1, "I", "PRON", 2, "nsubj"),
        row(2, "saw", "VERB", 0, "root"),
        row(3, "cat", "NOUN", 2, "obj"),
        row(4, "and", "CCONJ", 5, "cc"),
        row(5, "dog", "NOUN", 3, "conj"),
        row(6, ".", "PUNCT", 2, "punct"),
    ]
    .concat()
        + "\n";
    let cor = [
        row(1, "I", "PRON", 2, "nsubj"),
        row(2, "saw", "VERB", 0, "root"),
        row(3, "the", "DET", 4, "det"),
        row(4, "cat", "NOUN", 2, "obj"),
        row(5, "and", "CCONJ", 7, "cc"),
        row(6, "the", "DET", 7, "det"),
        row(7, "dog", "NOUN", 4, "conj"),
        row(8, ".", "PUNCT", 2, "punct"),
    ]
    .concat()
        + "\n";
    let args = write_bundle(dir.path(), m2, &src, &cor);
    let out = with("matrix", args, &["--kinds", "add"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let m = ConfusionMatrix::from_tsv_str(&out.stdout, Scheme::Upos).unwrap();
    assert_eq!(m.get(None, Some("DET")), 2);
    assert_eq!(m.total(), 2);
}

#[test]
fn matrix_total_equals_classify_lines_under_the_same_filters() {
    let report = with("classify", corpus_args(), &[]).stdout;
    for (kinds, exclude) in [("add,del,rep", ""), ("rep", "PUNCT"), ("del", "AUX,ADP")] {
        let out = with("matrix", corpus_args(), &["--kinds", kinds, "--exclude-labels", exclude]);
        let m = ConfusionMatrix::from_tsv_str(&out.stdout, Scheme::Upos).unwrap();
        let excluded: Vec<&str> = exclude.split(',').filter(|s| !s.is_empty()).collect();
        let wanted: Vec<&str> = kinds
            .split(',')
            .map(|k| match k {
                "add" => "Addition",
                "del" => "Deletion",
                _ => "Replacement",
            })
            .collect();
        let lines = report
            .lines()
            .map(|l| l.split('\t').collect::<Vec<_>>())
            .filter(|c| wanted.contains(&c[2]) && !excluded.contains(&c[4]) && !excluded.contains(&c[5]))
            .count();
        assert_eq!(m.total(), lines as u64, "{kinds} / {exclude}");
    }
}

#[test]
fn report_input_gives_the_same_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.tsv");
    fs::write(&report, with("classify", corpus_args(), &["--scheme", "deprel"]).stdout).unwrap();
    let direct = with("matrix", corpus_args(), &["--scheme", "deprel"]);
    let from_report = synerr(&["matrix", "--report", &path(&report)]);
    assert_eq!(direct.stdout, from_report.stdout);
    assert!(direct.stdout.starts_with("\tadvmod\tamod\taux\tcase"));
}

#[test]
fn levels_from_corpus_and_matrices() {
    let out = with("levels", corpus_args(), &["--level", "A"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("label\tA"));
    // sorted ascending by the single column
    let values: Vec<f64> = lines
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));

    let mut args = Vec::new();
    for tag in ["A", "B", "C", "N"] {
        args.extend([
            "--matrix".to_string(),
            path(&fixture(&format!("published/levels_{tag}.tsv"))),
            "--level".to_string(),
            tag.to_string(),
        ]);
    }
    let out = with("levels", args, &["--format", "json", "--exclude-labels", "INTJ,SYM,X"]);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let rows = json["levels"].as_array().unwrap();
    assert_eq!(rows[0]["label"], "SCONJ");
    assert_eq!(rows.len(), 14);
    assert_eq!(rows[0]["A"], 0.804);
}

#[test]
fn recall_against_gold() {
    let out = synerr(&[
        "recall",
        "--gold",
        &path(&fixture("published/recall_gold_counts.tsv")),
        "--matrix",
        &path(&fixture("published/recall_uedin_ms_counts.tsv")),
        "--level",
        "UEDIN-MS",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "label\tgold\tUEDIN-MS\tUEDIN-MS_ratio");
    assert!(lines.contains(&"CCONJ\t158\t71\t0.449"));
    assert_eq!(*lines.last().unwrap(), "Overall\t4790\t2686\t0.561");

    let gold = path(&fixture("published/recall_gold_counts.tsv"));
    let same = synerr(&["recall", "--gold", &gold, "--matrix", &gold]);
    assert!(same.stdout.lines().skip(1).all(|l| l.ends_with("\t1.000")));
}

#[test]
fn compare_on_report_and_joint_table() {
    let out = with("compare", corpus_args(), &["--min-count", "2", "--against", "deprel"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("# taxonomy_overlap\nse_type\ttotal\targmax\tmax_frac\ttop3_frac\n"));
    assert!(out.stdout.contains("ADJ->ADV\t2\tR:ADJ:FORM\t1.000\t1.000"));
    assert!(out.stdout.contains("# scheme_association"));

    let joint = path(&fixture("published/nucle_joint_counts.tsv"));
    let out = synerr(&["compare", "--joint", &joint, "--decimals", "4"]);
    assert!(out.stdout.contains("None->DET\t3581\tArtOrDet\t0.9590\t0.9757"));
    let strict = synerr(&["compare", "--joint", &joint, "--min-count", "100000"]);
    assert!(strict.stdout.contains("types\t0\n"));
}

#[test]
fn compare_matrices() {
    let a = path(&fixture("published/levels_A.tsv"));
    let b = path(&fixture("published/levels_B.tsv"));
    let out = synerr(&["compare", "--matrix", &a, "--matrix", &b, "--format", "json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let stats = json["matrix_statistics"].as_array().unwrap();
    assert_eq!(stats.len(), 2);
    assert_eq!(stats[0]["matrix"], "levels_A");
    let r = json["distribution_comparison"][0]["pearson"].as_f64().unwrap();
    assert!(r > 0.5 && r <= 1.0);
}

#[test]
fn outputs_are_deterministic() {
    for cmd in ["classify", "matrix", "levels", "compare"] {
        let extra: &[&str] = if cmd == "levels" { &["--level", "A"] } else { &[] };
        let a = with(cmd, corpus_args(), extra);
        let b = with(cmd, corpus_args(), extra);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(a.stderr, b.stderr, "{cmd}");
    }
}
