//! `relatorlab`: evaluate terms and run bounded relator, similarity and
//! Howe checks from the command line.
//!
//! Exit status: 0 pass, 1 counterexample, 2 inconclusive, 3 usage or
//! configuration error. A JSON report is printed for statuses 0 to 2.

mod commands;
mod envelope;
mod inputs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relatorlab::report::Verdict;
use relatorlab::Error;

#[derive(Parser)]
#[command(name = "relatorlab", version, about = "Bounded relational reasoning for effectful λ-terms")]
struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed term and print its approximant.
    Eval(commands::EvalArgs),
    /// Check the relator and lax-extension axioms on a finite carrier.
    Axioms(commands::AxiomsArgs),
    /// Check that a relation is an applicative simulation.
    Simcheck(commands::SimcheckArgs),
    /// Compute bounded applicative similarity on a universe.
    Similarity(commands::SimilarityArgs),
    /// Compute bounded applicative bisimilarity on a universe.
    Bisimilarity(commands::SimilarityArgs),
    /// Compute a Howe closure and check its properties.
    Howe(commands::HoweArgs),
    /// Check the relator against evaluation for a set of term pairs.
    Preadequate(commands::PreadequateArgs),
}

/// The monad of a run.
#[derive(Args, Clone)]
pub struct MonadArgs {
    /// partial, exc, partexc, nondet, dist, state, output or probexc.
    #[arg(long)]
    monad: String,
    /// Exceptions, states or output symbols, replacing the monad's defaults.
    #[arg(long, value_delimiter = ',', visible_aliases = ["exceptions", "states", "alphabet"])]
    params: Vec<String>,
    /// Extra operation declarations, one `name/arity` per line.
    #[arg(long)]
    signature: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let mut env = envelope::Envelope::new(cli.command.name());
    let outcome = match &cli.command {
        Command::Eval(a) => commands::eval(a, &mut env),
        Command::Axioms(a) => commands::axioms(a, &mut env),
        Command::Simcheck(a) => commands::simcheck(a, &mut env),
        Command::Similarity(a) => commands::similarity(a, false, &mut env),
        Command::Bisimilarity(a) => commands::similarity(a, true, &mut env),
        Command::Howe(a) => commands::howe(a, &mut env),
        Command::Preadequate(a) => commands::preadequate(a, &mut env),
    };
    if let Err(e) = outcome {
        match e.downcast_ref::<Error>() {
            // Running out of budget is an inconclusive result, not a misuse.
            Some(Error::Budget(msg)) => {
                env.verdict = Verdict::Inconclusive;
                env.result = serde_json::json!({ "budget_exhausted": msg });
            }
            _ => {
                eprintln!("error: {e:#}");
                return ExitCode::from(3);
            }
        }
    }
    let text = serde_json::to_string_pretty(&env.to_json()).expect("reports serialise") + "\n";
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(env.verdict.exit_code() as u8)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Axioms(_) => "axioms",
            Command::Simcheck(_) => "simcheck",
            Command::Similarity(_) => "similarity",
            Command::Bisimilarity(_) => "bisimilarity",
            Command::Howe(_) => "howe",
            Command::Preadequate(_) => "preadequate",
        }
    }
}
