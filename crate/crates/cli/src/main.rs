//! `csembed` command-line pipeline.

mod commands;
mod settings;

use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use settings::keys;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys or values.
    Usage(String),
    /// A required setting has no value.
    Missing(String),
    Lib(csembed::Error),
}

impl From<csembed::Error> for CliError {
    fn from(e: csembed::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Missing(_) => 1,
            CliError::Lib(csembed::Error::Numeric(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

const COMMANDS: [(&str, &str); 9] = [
    ("build-dict", "Build a character dictionary from a corpus"),
    (
        "split",
        "Split a corpus into train/valid/test by line (80/10/10)",
    ),
    ("train-lm", "Train a character language model"),
    ("eval-lm", "Report per-character perplexity of a text"),
    ("embed", "Write per-word vectors from a stacked embedder"),
    (
        "train-tagger",
        "Train a BiLSTM-CRF tagger over stacked embeddings",
    ),
    ("eval-tagger", "Per-tag precision/recall/F1 of a tagger"),
    (
        "train-classifier",
        "Train a GRU text classifier over stacked embeddings",
    ),
    (
        "eval-classifier",
        "Accuracy and confusion matrix of a classifier",
    ),
];

fn cli() -> Command {
    let mut root = Command::new("csembed")
        .about("Contextual character-LM embeddings with tagging and classification heads")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in COMMANDS {
        let mut sub = Command::new(name)
            .bin_name(format!("csembed {name}"))
            .about(about)
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("key = value settings file; flags override it"),
            );
        for k in keys(name) {
            let mut help = k.help.to_owned();
            if k.required {
                help.push_str(" (required)");
            }
            sub = sub.arg(Arg::new(k.name).long(k.name).value_name("VALUE").help(help));
        }
        if keys(name).iter().any(|k| k.name == "embeddings") {
            sub = sub
                .arg(
                    Arg::new("contextual")
                        .long("contextual")
                        .value_name("FWD[,BWD]")
                        .action(ArgAction::Append)
                        .help("character LM file(s); stacked in flag order"),
                )
                .arg(
                    Arg::new("static")
                        .long("static")
                        .value_name("FILE")
                        .action(ArgAction::Append)
                        .help("word vectors (.vec text or saved table); stacked in flag order"),
                );
        }
        root = root.subcommand(sub);
    }
    root
}

fn run(name: &str, m: &ArgMatches) -> Result<(), CliError> {
    let s = settings::Settings::resolve(name, m)?;
    eprint!("{}", s.render());
    commands::dispatch(&s)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Missing(flag) => {
                    eprintln!("error: missing required {flag}\n");
                    let mut c = cli();
                    if let Some(sub) = c.find_subcommand_mut(name) {
                        eprintln!("{}", sub.render_help());
                    }
                }
                CliError::Lib(err) => eprintln!("error: {err}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
