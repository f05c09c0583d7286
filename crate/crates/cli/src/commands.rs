use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use csembed::charlm::{perplexity, train_lm_with, CharLm, LmTrainLog};
use csembed::classifier::{evaluate_classifier, train_classifier, ClassifierConfig, GruClassifier};
use csembed::embed::{ContextualEmbedder, EmbedderPart, StackedEmbedder};
use csembed::persist;
use csembed::tagger::{evaluate_tagger, train_tagger, CrfTagger, TaggerConfig};
use csembed::textcorpus::{
    load_vec_table, read_conllu, read_labeled, read_lines, split_corpus, CharDictionary, Sentence,
    StaticWordTable, PAPER_RATIOS,
};
use csembed::{Error, FitConfig};

use crate::settings::{PartSpec, Settings};
use crate::CliError;

pub fn dispatch(s: &Settings) -> Result<(), CliError> {
    match s.command.as_str() {
        "build-dict" => build_dict(s),
        "split" => split(s),
        "train-lm" => train_lm_cmd(s),
        "eval-lm" => eval_lm(s),
        "embed" => embed(s),
        "train-tagger" => train_tagger_cmd(s),
        "eval-tagger" => eval_tagger(s),
        "train-classifier" => train_classifier_cmd(s),
        "eval-classifier" => eval_classifier(s),
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    }
}

/// Machine-readable result line.
fn emit(key: &str, value: impl std::fmt::Display) {
    println!("{key}={value}");
}

fn non_empty(lines: Vec<String>) -> Vec<String> {
    lines.into_iter().filter(|l| !l.trim().is_empty()).collect()
}

fn check_fit(f: &FitConfig) -> Result<(), CliError> {
    let ok = f.lr > 0.0 && f.epochs > 0 && f.batch > 0 && f.anneal_factor > 1.0 && f.clip > 0.0;
    if !ok {
        return Err(CliError::Usage(
            "lr, epochs, batch and clip must be positive and anneal-factor above 1".into(),
        ));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| {
        CliError::Lib(Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    })
}

fn build_dict(s: &Settings) -> Result<(), CliError> {
    let lines = read_lines(s.str("corpus"))?;
    let dict = CharDictionary::build(&lines, s.get("max-chars")?)?;
    persist::save(&dict, s.str("out"))?;
    emit("chars", dict.chars().len());
    emit("vocab", dict.len());
    Ok(())
}

fn split(s: &Settings) -> Result<(), CliError> {
    let lines = non_empty(read_lines(s.str("corpus"))?);
    let parts = split_corpus(lines, PAPER_RATIOS, s.seed()?)?;
    let dir = PathBuf::from(s.str("out-dir"));
    fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    for (name, part) in [
        ("train", &parts.train),
        ("valid", &parts.valid),
        ("test", &parts.test),
    ] {
        let mut text = part.join("\n");
        text.push('\n');
        write_text(&dir.join(format!("{name}.txt")), &text)?;
        emit(name, part.len());
    }
    Ok(())
}

fn train_lm_cmd(s: &Settings) -> Result<(), CliError> {
    let config = s.lm_config()?;
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = s.seed()?;
    let corpus = non_empty(read_lines(s.str("corpus"))?);
    let (train, valid, test) = match s.opt_str("valid") {
        Some(v) => (corpus, non_empty(read_lines(v)?), None),
        None => {
            let p = split_corpus(corpus, PAPER_RATIOS, seed)?;
            (p.train, p.valid, Some(p.test))
        }
    };
    let dict = match s.opt_str("dict") {
        Some(path) => persist::load::<CharDictionary>(path)?,
        None => CharDictionary::build(&train, s.get("max-chars")?)?,
    };
    let mut log_file = match s.opt_str("log") {
        Some(path) => {
            let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::Io {
                    path: path.into(),
                    source: e,
                })?;
            let mut w = BufWriter::new(f);
            if fresh {
                let _ = writeln!(w, "{}", LmTrainLog::TSV_HEADER);
            }
            Some(w)
        }
        None => None,
    };
    let (lm, log) = train_lm_with::<f32>(&config, dict, &train, &valid, seed, |cp| {
        log::info!("step {} ppl {:.4} lr {}", cp.step, cp.valid_ppl, cp.lr);
        if let Some(w) = log_file.as_mut() {
            let _ = writeln!(w, "{}", cp.tsv_line());
        }
    })?;
    if let Some(mut w) = log_file {
        w.flush().map_err(|e| Error::Io {
            path: s.str("log").into(),
            source: e,
        })?;
    }
    persist::save(&lm, s.str("out"))?;
    emit("initial_valid_perplexity", log.checkpoints[0].valid_ppl);
    emit("valid_perplexity", perplexity(&lm, &valid)?);
    if let Some(test) = test {
        emit("test_perplexity", perplexity(&lm, &test)?);
    }
    emit("checkpoints", log.checkpoints.len());
    emit(
        "final_lr",
        log.checkpoints.last().map_or(config.lr0, |c| c.lr),
    );
    Ok(())
}

fn eval_lm(s: &Settings) -> Result<(), CliError> {
    let lm: CharLm = persist::load(s.str("model"))?;
    let text = non_empty(read_lines(s.str("text"))?);
    emit("perplexity", perplexity(&lm, &text)?);
    Ok(())
}

fn load_static(path: &Path) -> Result<StaticWordTable, CliError> {
    let head = fs::read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    if head.starts_with(&persist::MAGIC) {
        Ok(persist::load(path)?)
    } else {
        Ok(load_vec_table(path)?)
    }
}

fn load_embedder(parts: &[PartSpec]) -> Result<StackedEmbedder, CliError> {
    let mut out = Vec::new();
    for p in parts {
        out.push(match p {
            PartSpec::Static(path) => EmbedderPart::Static(load_static(path)?),
            PartSpec::Contextual { forward, backward } => {
                let f: CharLm = persist::load(forward)?;
                let b: Option<CharLm> = backward.as_ref().map(persist::load).transpose()?;
                let ctx = ContextualEmbedder::new(f, b).map_err(|e| {
                    let names = match backward {
                        Some(b) => format!("{} and {}", forward.display(), b.display()),
                        None => forward.display().to_string(),
                    };
                    CliError::Lib(Error::Data(format!("{names}: {e}")))
                })?;
                EmbedderPart::Contextual(ctx)
            }
        });
    }
    Ok(StackedEmbedder::new(out)?)
}

fn embed(s: &Settings) -> Result<(), CliError> {
    let emb = load_embedder(&s.embeddings()?)?;
    let sentences = non_empty(read_lines(s.str("text"))?)
        .iter()
        .map(|l| Sentence::from_text(l))
        .collect::<csembed::Result<Vec<_>>>()?;
    let refs: Vec<&Sentence> = sentences.iter().collect();
    let vectors = emb.embed_all(&refs)?;
    let mut text = String::new();
    let mut tokens = 0;
    for (sent, v) in sentences.iter().zip(&vectors) {
        for (i, tok) in sent.tokens().iter().enumerate() {
            let vals: Vec<String> = v.row(i).iter().map(|x| x.to_string()).collect();
            text.push_str(&format!("{tok}\t{}\n", vals.join(" ")));
            tokens += 1;
        }
        text.push('\n');
    }
    write_text(Path::new(s.str("out")), &text)?;
    emit("sentences", sentences.len());
    emit("tokens", tokens);
    emit("dim", emb.dim());
    Ok(())
}

fn cols(s: &Settings) -> Result<(usize, usize), CliError> {
    Ok((s.get("form-col")?, s.get("tag-col")?))
}

fn train_tagger_cmd(s: &Settings) -> Result<(), CliError> {
    let config = TaggerConfig {
        hidden: s.get("hidden")?,
        word_dropout: s.get("word-dropout")?,
        fit: s.fit()?,
    };
    check_fit(&config.fit)?;
    let (fc, tc) = cols(s)?;
    let train = read_conllu(s.str("train"), fc, tc)?;
    let dev = match s.opt_str("dev") {
        Some(p) => read_conllu(p, fc, tc)?,
        None => Vec::new(),
    };
    let emb = load_embedder(&s.embeddings()?)?;
    let (tagger, log) = train_tagger(emb, &train, &dev, config, s.seed()?)?;
    persist::save(&tagger, s.str("out"))?;
    emit("epochs", log.len());
    emit("final_lr", log.last().map_or(0.0, |e| e.lr));
    emit("train_micro_f1", evaluate_tagger(&tagger, &train)?.micro_f1);
    if !dev.is_empty() {
        emit("dev_micro_f1", evaluate_tagger(&tagger, &dev)?.micro_f1);
    }
    emit("tags", tagger.tags.len());
    emit("embedding_dim", tagger.embedder.dim());
    Ok(())
}

fn eval_tagger(s: &Settings) -> Result<(), CliError> {
    let tagger: CrfTagger = persist::load(s.str("model"))?;
    let (fc, tc) = cols(s)?;
    let test = read_conllu(s.str("test"), fc, tc)?;
    let report = evaluate_tagger(&tagger, &test)?;
    let table = report.to_string();
    eprint!("{table}");
    if let Some(path) = s.opt_str("report") {
        write_text(Path::new(path), &table)?;
    }
    for r in &report.rows {
        println!(
            "tag={} precision={:.4} recall={:.4} f1={:.4} support={}",
            r.tag, r.precision, r.recall, r.f1, r.support
        );
    }
    emit("tokens", report.tokens);
    emit("micro_f1", report.micro_f1);
    Ok(())
}

fn train_classifier_cmd(s: &Settings) -> Result<(), CliError> {
    let config = ClassifierConfig {
        hidden: s.get("hidden")?,
        fit: s.fit()?,
    };
    check_fit(&config.fit)?;
    let train = read_labeled(s.str("train"))?;
    let dev = match s.opt_str("dev") {
        Some(p) => read_labeled(p)?,
        None => Vec::new(),
    };
    let emb = load_embedder(&s.embeddings()?)?;
    let (model, log) = train_classifier(emb, &train, &dev, config, s.seed()?)?;
    persist::save(&model, s.str("out"))?;
    emit("epochs", log.len());
    emit("final_lr", log.last().map_or(0.0, |e| e.lr));
    emit(
        "train_accuracy",
        evaluate_classifier(&model, &train)?.accuracy,
    );
    if !dev.is_empty() {
        emit("dev_accuracy", evaluate_classifier(&model, &dev)?.accuracy);
    }
    emit("classes", model.labels.len());
    emit("embedding_dim", model.embedder.dim());
    Ok(())
}

fn eval_classifier(s: &Settings) -> Result<(), CliError> {
    let model: GruClassifier = persist::load(s.str("model"))?;
    let test = read_labeled(s.str("test"))?;
    let report = evaluate_classifier(&model, &test)?;
    let text = report.to_string();
    eprint!("{text}");
    if let Some(path) = s.opt_str("report") {
        write_text(Path::new(path), &text)?;
    }
    emit("examples", report.total());
    emit("accuracy", report.accuracy);
    Ok(())
}
