use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use valenz::engine::{parse, ParseConfig, ParseOutcome, Resources};
use valenz::grammar::{validate_grammar, validate_semantics};
use valenz::lexicon::FALLBACK_PENALTY;
use valenz::output::{to_columns, to_graph, to_table};
use valenz::tagger::{dump_lattice, split_sentences};

/// Exit status: success.
const OK: u8 = 0;
/// Exit status: resources missing or unreadable.
const EXIT_RESOURCES: u8 = 1;
/// Exit status: a sentence had no analysis, or the input was empty.
const EXIT_NO_ANALYSIS: u8 = 2;
/// Exit status: resources loaded but failed validation.
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "valenz", version, about = "Valency-driven dependency parser")]
struct Cli {
    /// Resource directory holding grammar.sg, lexicon.sg, semnet.sg and pairs.tsv
    #[arg(long, global = true, env = "SYNTAGMA_RES", default_value = "res/en")]
    grammar: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Columns,
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Parse sentences given as arguments, or read from standard input
    Parse {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Number of analyses to print per sentence
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "strict")]
        profile: String,
        /// Print the terminal lattice before the analyses
        #[arg(long)]
        dump_lattice: bool,
        sentences: Vec<String>,
    },
    /// Check the resource directory for consistency
    Validate,
    /// Show every frame application tried on a sentence
    Explain {
        #[arg(long, default_value = "strict")]
        profile: String,
        sentence: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate => validate(&cli.grammar),
        Command::Parse {
            format,
            k,
            profile,
            dump_lattice,
            sentences,
        } => cmd_parse(&cli.grammar, format, k, profile, dump_lattice, sentences),
        Command::Explain { profile, sentence } => explain(&cli.grammar, profile, &sentence),
    };
    ExitCode::from(code)
}

fn load(dir: &Path) -> Result<Resources, u8> {
    Resources::load_dir(dir).map_err(|e| {
        eprintln!("error: {e}");
        if e.is_io() {
            EXIT_RESOURCES
        } else {
            EXIT_INVALID
        }
    })
}

fn validate(dir: &Path) -> u8 {
    let res = match load(dir) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let mut diags = validate_grammar(&res.grammar, &res.lexicon);
    diags.extend(validate_semantics(&res.lexicon, &res.semnet));
    if diags.is_empty() {
        println!("ok");
        return OK;
    }
    for d in &diags {
        eprintln!("{d}");
    }
    EXIT_INVALID
}

fn read_stdin_sentences() -> Vec<String> {
    let mut text = String::new();
    if io::stdin().read_to_string(&mut text).is_err() {
        return Vec::new();
    }
    text.lines().flat_map(split_sentences).collect()
}

fn cmd_parse(
    dir: &Path,
    format: Format,
    k: usize,
    profile: String,
    lattice: bool,
    args: Vec<String>,
) -> u8 {
    let res = match load(dir) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let sentences = if args.is_empty() {
        read_stdin_sentences()
    } else {
        args
    };
    if sentences.iter().all(|s| s.trim().is_empty()) {
        eprintln!("empty input");
        return EXIT_NO_ANALYSIS;
    }
    let cfg = ParseConfig {
        profile,
        beam: Some(k.max(1)),
        ..ParseConfig::default()
    };
    // Sentences are independent; parse them in parallel and print in order.
    let outcomes: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = sentences
            .iter()
            .map(|text| s.spawn(|| parse(text, &res, &cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("parser thread"))
            .collect()
    });

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut code = OK;
    for (text, outcome) in sentences.iter().zip(outcomes) {
        let outcome: ParseOutcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_RESOURCES;
            }
        };
        if lattice {
            let _ = write!(out, "{}", dump_lattice(&outcome.lattice));
        }
        if outcome.analyses.is_empty() {
            eprintln!("no analysis: {}", text.trim());
            code = EXIT_NO_ANALYSIS;
            continue;
        }
        for a in &outcome.analyses {
            let text = match format {
                Format::Table => to_table(a).to_string(),
                Format::Columns => to_columns(a),
                Format::Graph => to_graph(a),
            };
            let _ = writeln!(out, "{text}");
            for d in &a.diagnostics {
                eprintln!("note: {d}");
            }
        }
    }
    code
}

fn explain(dir: &Path, profile: String, sentence: &str) -> u8 {
    let res = match load(dir) {
        Ok(r) => r,
        Err(code) => return code,
    };
    if sentence.trim().is_empty() {
        eprintln!("empty input");
        return EXIT_NO_ANALYSIS;
    }
    let cfg = ParseConfig {
        profile,
        explain: true,
        ..ParseConfig::default()
    };
    let outcome = match parse(sentence, &res, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RESOURCES;
        }
    };
    let mut noted = Vec::new();
    for n in outcome
        .lattice
        .iter()
        .filter(|n| n.penalty == FALLBACK_PENALTY)
    {
        if !noted.contains(&n.entry.surface) {
            println!(
                "note: unknown word `{}` gets fallback entries",
                n.entry.surface
            );
            noted.push(n.entry.surface.clone());
        }
    }
    for e in &outcome.explain {
        println!("{e}");
    }
    if outcome.budget_exhausted {
        println!("cycle budget exhausted after {} cycles", outcome.cycles);
    }
    println!("{} analyses", outcome.analyses.len());
    OK
}
