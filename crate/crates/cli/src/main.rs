mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use econreason::corpus::{Corpus, Example};
use econreason::qe::{OrderMode, QeConfig};
use econreason::report::{run, Action, ResultDocument, RunError};
use serde::{Deserialize, Serialize};

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "econreason", version, about = "Classify economic theorems by real quantifier elimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the hypothesis as True, False, Mixed or contradictory.
    Analyze(FileArgs),
    /// Project the assumptions onto single coordinates.
    Possibilities {
        #[command(flatten)]
        file: FileArgs,
        /// Coordinate to project onto; repeatable. Defaults to all.
        #[arg(long = "var")]
        vars: Vec<String>,
    },
    /// Suggest one-variable assumptions that make the hypothesis follow.
    Sufficient(FileArgs),
    /// Show the scalar coordinates of the problem space.
    Space(FileArgs),
    /// Work with the bundled example corpus.
    Examples {
        #[command(subcommand)]
        command: ExamplesCommand,
        /// Read examples from this directory instead of the bundled set.
        #[arg(long, global = true)]
        dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesCommand {
    List {
        #[arg(long)]
        json: bool,
    },
    Show {
        id: String,
    },
    /// Analyze every example and print a timing table.
    RunAll(RunOptions),
}

#[derive(Args, Debug)]
struct FileArgs {
    file: PathBuf,
    #[command(flatten)]
    opts: RunOptions,
}

#[derive(Args, Debug, Clone)]
struct RunOptions {
    /// Emit the JSON result document.
    #[arg(long)]
    json: bool,
    /// Seconds before the computation is abandoned.
    #[arg(long, default_value_t = 60.0, value_parser = positive_f64)]
    timeout: f64,
    /// Maximum number of decomposition cells per call.
    #[arg(long, default_value_t = 50_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_cells: u64,
    /// Variable ordering: heuristic or search.
    #[arg(long, default_value = "heuristic")]
    order: OrderMode,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("'{s}' is not a positive number of seconds")),
    }
}

impl RunOptions {
    fn config(&self) -> QeConfig {
        QeConfig {
            max_cells: self.max_cells as usize,
            order_mode: self.order,
            ..QeConfig::default()
        }
        .with_timeout(Duration::from_secs_f64(self.timeout))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Analyze(f) => run_file(&f, Action::Analyze),
        Command::Possibilities { file, vars } => {
            let vars = (!vars.is_empty()).then_some(vars);
            run_file(&file, Action::Possibilities(vars))
        }
        Command::Sufficient(f) => run_file(&f, Action::Sufficient),
        Command::Space(f) => run_file(&f, Action::Space),
        Command::Examples { command, dir } => examples(command, dir.as_deref()),
    }
}

fn run_file(args: &FileArgs, action: Action) -> ExitCode {
    let source = match std::fs::read_to_string(&args.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&source, &action, &args.opts.config()) {
        Ok(doc) => {
            if args.opts.json {
                println!("{}", doc.to_json());
            } else {
                print!("{}", render::document(&action, &doc));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if args.opts.json {
                println!("{}", serde_json::to_string_pretty(&e.to_document()).expect("serializable"));
            }
            eprintln!("{}: {e}", args.file.display());
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &RunError) -> u8 {
    match e {
        RunError::Parse(_) | RunError::Usage(_) => EXIT_USAGE,
        RunError::Resource { .. } => EXIT_RESOURCE,
        RunError::Internal(_) => EXIT_INTERNAL,
    }
}

fn load_corpus(dir: Option<&Path>) -> Result<Corpus, ExitCode> {
    match dir {
        None => Ok(Corpus::bundled()),
        Some(d) => Corpus::from_dir(d).map_err(|e| {
            eprintln!("error: cannot read corpus {}: {e}", d.display());
            ExitCode::from(EXIT_USAGE)
        }),
    }
}

fn examples(cmd: ExamplesCommand, dir: Option<&Path>) -> ExitCode {
    let corpus = match load_corpus(dir) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match cmd {
        ExamplesCommand::List { json } => {
            if json {
                println!("{}", serde_json::to_string_pretty(&corpus.examples).expect("serializable"));
            } else {
                for e in &corpus.examples {
                    println!("{:<24} {}", e.id, e.title);
                }
            }
            ExitCode::SUCCESS
        }
        ExamplesCommand::Show { id } => match corpus.get(&id) {
            Some(e) => {
                print!("{}", e.source);
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: no example '{id}'");
                ExitCode::from(EXIT_USAGE)
            }
        },
        ExamplesCommand::RunAll(opts) => run_all(&corpus, &opts),
    }
}

/// One line of the corpus timing table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub example: String,
    pub total_ms: f64,
    pub universal_ms: Option<f64>,
    pub existential_ms: Option<f64>,
    pub verdict: Option<String>,
    pub error: Option<String>,
    pub expected: Option<String>,
}

fn run_row(e: &Example, corpus: &Corpus, opts: &RunOptions) -> Row {
    let start = Instant::now();
    let result = run(&e.source, &Action::Analyze, &opts.config());
    let expected = corpus.golden.get(&e.id).map(|q| q.as_str().to_string());
    match result {
        Ok(ResultDocument { verdict, stats, .. }) => Row {
            example: e.id.clone(),
            total_ms: stats.total_ms,
            universal_ms: stats.universal_ms,
            existential_ms: stats.existential_ms,
            verdict: verdict.map(|q| q.as_str().to_string()),
            error: None,
            expected,
        },
        Err(err) => Row {
            example: e.id.clone(),
            total_ms: start.elapsed().as_secs_f64() * 1000.0,
            universal_ms: None,
            existential_ms: None,
            verdict: None,
            error: Some(err.to_string()),
            expected,
        },
    }
}

fn run_all(corpus: &Corpus, opts: &RunOptions) -> ExitCode {
    let rows: Vec<Row> = corpus.examples.iter().map(|e| run_row(e, corpus, opts)).collect();
    if opts.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
    } else {
        print!("{}", render::timing_table(&rows));
    }
    let mismatches: Vec<&Row> = rows
        .iter()
        .filter(|r| r.error.is_none() && r.expected.is_some() && r.expected != r.verdict)
        .collect();
    for r in &mismatches {
        eprintln!(
            "mismatch: {} gave {} but golden verdict is {}",
            r.example,
            r.verdict.as_deref().unwrap_or("-"),
            r.expected.as_deref().unwrap_or("-")
        );
    }
    if mismatches.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INTERNAL)
    }
}
