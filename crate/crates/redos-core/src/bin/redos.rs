//! Command-line front end: `analyze` classifies a pattern corpus and
//! prints a text or JSON report; `simulate` runs the step-counted
//! backtracking matcher on a single pattern and input.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use redos_core::arena::ExprArena;
use redos_core::attack::AnalysisConfig;
use redos_core::machine::{self, MatchStatus};
use redos_core::parser;
use redos_core::pattern::SourcePattern;
use redos_core::report;

#[derive(Parser)]
#[command(name = "redos", version, about = "Detect regexes vulnerable to catastrophic backtracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every pattern in a corpus and report attack inputs.
    Analyze(AnalyzeArgs),
    /// Run the backtracking matcher once and print its step count.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// File with one pattern per line; `-` reads stdin.
    file: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Treat the input as Snort rules and extract pcre:"..." options.
    #[arg(long)]
    snort: bool,
    /// Stop after the pumpable-string search; skip attack synthesis
    /// and confirmation (nothing is reported as vulnerable).
    #[arg(long)]
    no_verify: bool,
    /// Step cap for the pumpable-string search, per star.
    #[arg(long, default_value_t = 100_000)]
    hfpi_cap: u64,
    /// Matcher step budget per verification run.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Highest pump count tried during verification.
    #[arg(long, default_value_t = 20)]
    pump_max: u32,
    /// Minimum step-growth ratio between consecutive pump counts.
    #[arg(long, default_value_t = 1.8)]
    threshold: f64,
    /// Print the supported pattern syntax and exit.
    #[arg(long)]
    syntax: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// The pattern to match with.
    pattern: String,
    /// The subject string.
    input: String,
    /// Step budget for the run.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Simulate(args) => simulate(args),
    };
    ExitCode::from(code)
}

fn analyze(args: AnalyzeArgs) -> u8 {
    if args.syntax {
        print!("{}", parser::supported_syntax_report());
        return 0;
    }
    let Some(file) = args.file else {
        eprintln!("error: no pattern file given (use `-` for stdin)");
        return 2;
    };

    let config = AnalysisConfig {
        hfpi_cap: args.hfpi_cap,
        budget: args.budget,
        pump_max: args.pump_max,
        threshold: args.threshold,
        verify: !args.no_verify,
        ..AnalysisConfig::default()
    };
    if let Err(message) = config.validate() {
        eprintln!("error: {message}");
        return 2;
    }

    let mut reader: Box<dyn BufRead> = if file.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        match File::open(&file) {
            Ok(f) => Box::new(BufReader::new(f)),
            Err(err) => {
                eprintln!("error: {}: {err}", file.display());
                return 2;
            }
        }
    };
    let ingested = if args.snort {
        report::ingest_snort(&mut reader)
    } else {
        report::ingest_lines(&mut reader).map(|patterns| (patterns, Vec::new()))
    };
    let (patterns, warnings) = match ingested {
        Ok(ingested) => ingested,
        Err(err) => {
            eprintln!("error: reading {}: {err}", file.display());
            return 2;
        }
    };
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let corpus = report::run(&config, patterns);
    match args.format {
        Format::Text => print!("{}", report::render_text(&corpus)),
        Format::Json => print!("{}", report::render_json(&corpus)),
    }
    u8::from(corpus.summary.vulnerable > 0)
}

fn simulate(args: SimulateArgs) -> u8 {
    let sp = SourcePattern::new(args.pattern.into_bytes());
    let parsed = match parser::parse(&sp) {
        Ok(parsed) => parsed,
        Err(err) => {
            eprintln!("error: {err}");
            return 2;
        }
    };
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    let arena = ExprArena::build(&parsed.ast);
    let outcome = machine::pwf_run(&arena, args.input.as_bytes(), args.budget);
    match outcome.status {
        MatchStatus::Matched(end) => {
            println!("matched {end} byte(s) in {} step(s)", outcome.steps)
        }
        MatchStatus::NoMatch => println!("no match after {} step(s)", outcome.steps),
        MatchStatus::BudgetExceeded => {
            println!("budget exceeded after {} step(s)", outcome.steps)
        }
    }
    0
}
