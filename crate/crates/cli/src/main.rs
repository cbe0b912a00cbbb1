use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coxmap_cli::{run, Command, ProblemDocument, RunOptions, EXIT_INPUT};

/// Check, complete and construct Cox descriptions of toric maps.
#[derive(Parser, Debug)]
#[command(name = "coxmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the zero-cone, homogeneity and relevance conditions and report
    /// whether the description is complete.
    Check(Common),
    /// Modify a description until it is complete.
    Complete(Common),
    /// Build a complete description from a character map.
    Construct(Common),
    /// Evaluate all branches at points and compare their orbits.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rational coordinates, e.g. `4` or `1,2/3`.
        #[arg(long)]
        point: Option<String>,
    },
    /// Check that the pullback of every ideal generator vanishes.
    VerifyIdeal(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem document (JSON).
    input: String,
    /// Write the output document here instead of stdout.
    #[arg(short, long)]
    output: Option<String>,
    /// Numerical tolerance for orbit comparisons.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of random sample points for `check`.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the sanity check on stored factors.
    #[arg(long)]
    trust_factors: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common, point) = match cli.command {
        Cmd::Check(c) => (Command::Check, c, None),
        Cmd::Complete(c) => (Command::Complete, c, None),
        Cmd::Construct(c) => (Command::Construct, c, None),
        Cmd::Eval { common, point } => (Command::Eval, common, point),
        Cmd::VerifyIdeal(c) => (Command::VerifyIdeal, c, None),
    };
    let doc = match ProblemDocument::read(&common.input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let opts = RunOptions {
        tol: common.tol,
        samples: common.samples,
        seed: common.seed,
        trust_factors: common.trust_factors,
        point,
    };
    let outcome = run(cmd, &doc, &opts);
    eprint!("{}", outcome.report);
    if let Some(out) = &outcome.document {
        let text = serde_json::to_string_pretty(out).expect("document serializes");
        let written = match &common.output {
            Some(path) => std::fs::write(path, text + "\n"),
            None => writeln!(std::io::stdout(), "{text}"),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
