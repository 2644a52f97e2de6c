#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cemaint_core::analysis::{generate_simpson_corpus, SimpsonParams};
use cemaint_core::corpus::{write_ratings, Dimension, Likert, MaintainabilityRating};
use cemaint_core::entropy::{write_scores, ScoreRow};
use cemaint_core::features::LabeledInstance;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cemaint"));
    c.env_remove("CEMAINT_ENDPOINT").env("RUST_LOG", "error");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cemaint")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Likert vectors that binarize to `label` on every dimension.
pub fn rating_for(file: &str, label: u8) -> MaintainabilityRating {
    let agree = Likert::new(0.7, 0.1, 0.1, 0.1);
    let disagree = Likert::new(0.1, 0.1, 0.1, 0.7);
    let dims = Dimension::ALL.map(|d| match (label == 1, d.is_negative()) {
        (true, false) | (false, true) => agree,
        _ => disagree,
    });
    MaintainabilityRating::new(file, dims)
}

pub fn score_row(i: &LabeledInstance, model: &str) -> ScoreRow {
    ScoreRow {
        file: i.file_id.clone(),
        model_id: model.into(),
        lloc: i.lloc,
        total_targets: 100,
        n_chunks: 1,
        cross_entropy: i.ce,
        perplexity: i.ce.exp(),
    }
}

/// Scores and ratings CSVs for a generated Simpson corpus.
pub fn write_synthetic(dir: &Path, seed: u64, n: usize, model: &str) -> (PathBuf, PathBuf) {
    let corpus = generate_simpson_corpus(seed, n, &SimpsonParams::default());
    let scores = dir.join(format!("scores-{model}.csv"));
    let ratings = dir.join("ratings.csv");
    let rows: Vec<ScoreRow> = corpus.iter().map(|i| score_row(i, model)).collect();
    write_scores(fs::File::create(&scores).unwrap(), &rows).unwrap();
    let rs: Vec<MaintainabilityRating> = corpus.iter().map(|i| rating_for(&i.file_id, i.label)).collect();
    write_ratings(fs::File::create(&ratings).unwrap(), &rs).unwrap();
    (scores, ratings)
}

pub fn write_java_corpus(dir: &Path) {
    let files = [
        ("pkg/A.java", "package pkg;\n// comment\npublic class A {\n  int x = 1; /* inline */\n}\n"),
        ("pkg/B.java", "/** doc */\npublic class B {\n  String s = \"// kept\";\n}\n"),
        ("C.java", "class C { void f() { return; } }\n"),
    ];
    for (name, body) in files {
        let p = dir.join(name);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, body).unwrap();
    }
}
