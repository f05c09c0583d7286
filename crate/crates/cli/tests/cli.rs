use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csembed"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(o: &Output, key: &str) -> String {
    let prefix = format!("{key}=");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(o)))
}

fn train_small_lm(dir: &Path, out: &str, direction: &str, corpus: &str) -> Output {
    run(
        dir,
        &[
            "train-lm",
            "--corpus",
            corpus,
            "--hidden",
            "16",
            "--embed-dim",
            "8",
            "--epochs",
            "1",
            "--seed",
            "7",
            "--direction",
            direction,
            "--out",
            out,
        ],
    )
}

#[test]
fn train_lm_then_eval_lm() {
    let dir = tempfile::tempdir().unwrap();
    let o = train_small_lm(dir.path(), "lm.csem", "forward", &fixture("lm_corpus.txt"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("lm.csem").exists());
    let e = run(
        dir.path(),
        &[
            "eval-lm",
            "--model",
            "lm.csem",
            "--text",
            &fixture("contexts.txt"),
        ],
    );
    assert_eq!(e.status.code(), Some(0));
    let ppl: f64 = value(&e, "perplexity").parse().unwrap();
    assert!(ppl.is_finite() && ppl >= 1.0);
    assert!(stdout(&e).lines().all(|l| l.contains('=')));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["train-lm", "--corpus", &fixture("lm_corpus.txt")],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage:"));
    let o = run(dir.path(), &["eval-lm", "--no-such-flag", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "hidden = 8\nlearning_rate = 3\n",
    )
    .unwrap();
    let o = run(
        dir.path(),
        &[
            "train-lm",
            "--config",
            "run.cfg",
            "--corpus",
            &fixture("lm_corpus.txt"),
            "--out",
            "x.csem",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("learning_rate"));
}

#[test]
fn printed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(
        dir.path(),
        &[
            "train-classifier",
            "--train",
            &fixture("reviews_train.txt"),
            "--static",
            &fixture("static.vec"),
            "--hidden",
            "8",
            "--epochs",
            "3",
            "--seed",
            "11",
            "--out",
            "a.csem",
        ],
    );
    assert!(first.status.success(), "{}", stderr(&first));
    let config = stderr(&first).replace("out = a.csem", "out = b.csem");
    assert!(config.contains("seed = 11"));
    std::fs::write(dir.path().join("echo.cfg"), config).unwrap();
    let second = run(dir.path(), &["train-classifier", "--config", "echo.cfg"]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(
        std::fs::read(dir.path().join("a.csem")).unwrap(),
        std::fs::read(dir.path().join("b.csem")).unwrap()
    );
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "hidden = 8\nepochs = 2\nseed = 3\n",
    )
    .unwrap();
    let o = run(
        dir.path(),
        &[
            "train-classifier",
            "--config",
            "run.cfg",
            "--hidden",
            "5",
            "--train",
            &fixture("reviews_train.txt"),
            "--static",
            &fixture("static.vec"),
            "--out",
            "c.csem",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("hidden = 5") && err.contains("epochs = 2") && err.contains("seed = 3"));
}

#[test]
fn classifier_over_static_vectors_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "train-classifier",
            "--train",
            &fixture("reviews_train.txt"),
            "--static",
            &fixture("static.vec"),
            "--out",
            "cls.csem",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value(&o, "train_accuracy"), "1");
    assert_eq!(value(&o, "embedding_dim"), "8");
    let e = run(
        dir.path(),
        &[
            "eval-classifier",
            "--model",
            "cls.csem",
            "--test",
            &fixture("reviews_test.txt"),
            "--report",
            "r.txt",
        ],
    );
    assert!(e.status.success());
    let acc: f64 = value(&e, "accuracy").parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    let report = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(report.starts_with("accuracy "));
}

#[test]
fn embed_stacks_in_flag_order() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        train_small_lm(dir.path(), "f.csem", "forward", &fixture("lm_corpus.txt"))
            .status
            .success()
    );
    let o = run(
        dir.path(),
        &[
            "embed",
            "--static",
            &fixture("static.vec"),
            "--contextual",
            "f.csem",
            "--text",
            &fixture("contexts.txt"),
            "--out",
            "vecs.tsv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value(&o, "dim"), "24");
    assert!(stderr(&o).contains(&format!(
        "embeddings = static:{} contextual:f.csem",
        fixture("static.vec")
    )));
    let text = std::fs::read_to_string(dir.path().join("vecs.tsv")).unwrap();
    let first = text.lines().next().unwrap();
    let (tok, vals) = first.split_once('\t').unwrap();
    assert_eq!(tok, "कमल");
    assert_eq!(vals.split(' ').count(), 24);
}

#[test]
fn mismatched_dictionaries_exit_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let other: PathBuf = dir.path().join("other.txt");
    std::fs::write(&other, "xyz zyx\nabc cba\nqq rr\nabc xyz\n".repeat(5)).unwrap();
    assert!(
        train_small_lm(dir.path(), "f.csem", "forward", &fixture("lm_corpus.txt"))
            .status
            .success()
    );
    assert!(
        train_small_lm(dir.path(), "b.csem", "backward", other.to_str().unwrap())
            .status
            .success()
    );
    let o = run(
        dir.path(),
        &[
            "embed",
            "--contextual",
            "f.csem,b.csem",
            "--text",
            &fixture("contexts.txt"),
            "--out",
            "v.tsv",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("f.csem") && err.contains("b.csem"), "{err}");
}

#[test]
fn corrupt_model_file_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(
        dir.path(),
        &[
            "build-dict",
            "--corpus",
            &fixture("lm_corpus.txt"),
            "--out",
            "d.csem"
        ]
    )
    .status
    .success());
    let mut bytes = std::fs::read(dir.path().join("d.csem")).unwrap();
    bytes[12] ^= 1;
    std::fs::write(dir.path().join("d.csem"), bytes).unwrap();
    let o = run(
        dir.path(),
        &[
            "train-lm",
            "--corpus",
            &fixture("lm_corpus.txt"),
            "--dict",
            "d.csem",
            "--out",
            "lm.csem",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("corrupt"));
}

#[test]
fn divergent_training_exits_with_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "train-classifier",
            "--train",
            &fixture("reviews_train.txt"),
            "--static",
            &fixture("static.vec"),
            "--lr",
            "1e38",
            "--clip",
            "1e38",
            "--out",
            "x.csem",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn split_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "split",
            "--corpus",
            &fixture("lm_corpus.txt"),
            "--out-dir",
            "parts",
        ],
    );
    assert!(o.status.success());
    assert_eq!(
        (value(&o, "train"), value(&o, "valid"), value(&o, "test")),
        ("160".into(), "20".into(), "20".into())
    );
    let n = std::fs::read_to_string(dir.path().join("parts/valid.txt"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(n, 20);
}

#[test]
fn paper_preset_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    // fails on the missing corpus, after the config is resolved and echoed
    let o = run(
        dir.path(),
        &[
            "train-lm", "--preset", "paper", "--corpus", "nope.txt", "--out", "x",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("hidden = 1024")
            && err.contains("seq-len = 250")
            && err.contains("batch = 100")
    );
}
