//! Command-line front end.
//!
//! Exit codes: `0` for every completed run (whatever the verdict), `1` for
//! I/O or schema errors, `2` when `verify-lemmas` finds a failing case.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use psirred::cli::lemmas::run_all;
use psirred::cli::{
    expand_inputs, poles_report, render_batch_table, render_table, run_batch, run_file, Report,
    RunOptions, Selector, SCHEMA_VERSION,
};
use psirred::mupoles::RankOneCase;
use psirred::rootdata::weyl_budget_from_env;
use psirred::Error;

#[derive(Parser)]
#[command(
    name = "psirred",
    version,
    about = "Irreducibility criteria for p-adic principal series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an engine on one input document.
    Check {
        /// Input document (JSON).
        file: PathBuf,
        /// Engine selector (overrides `options.theorem`).
        #[arg(long)]
        theorem: Option<Selector>,
        /// Include the full condition trace.
        #[arg(long)]
        trace: bool,
        /// Print a human-readable table instead of JSON.
        #[arg(long)]
        table: bool,
        /// Use the refined pole denominators.
        #[arg(long)]
        refined: bool,
        /// Maximal number of Weyl group elements to enumerate.
        #[arg(long)]
        weyl_budget: Option<u64>,
        /// Wrap the report in an envelope with the elapsed time.
        #[arg(long)]
        timing: bool,
    },
    /// Print the candidate pole set of a rank-one case.
    Poles {
        /// One of i, ii3, ii4, iii1, iii2, iv4, iv5.
        #[arg(long)]
        case: String,
        /// Degree parameter for case i.
        #[arg(long)]
        d: Option<u32>,
        /// Use the refined denominators.
        #[arg(long)]
        refined: bool,
        /// Print a human-readable line instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Run the structural invariant suites.
    VerifyLemmas {
        /// Largest torus rank of the preset groups.
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
    },
    /// Run every document in the given files and directories.
    Batch {
        /// Files or directories (directories contribute their *.json files).
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Engine selector for every entry.
        #[arg(long)]
        theorem: Option<Selector>,
        /// Include full condition traces.
        #[arg(long)]
        trace: bool,
        /// Print a summary table instead of JSON.
        #[arg(long)]
        table: bool,
        /// Use the refined pole denominators.
        #[arg(long)]
        refined: bool,
        /// Maximal number of Weyl group elements to enumerate.
        #[arg(long)]
        weyl_budget: Option<u64>,
        /// Wrap the output in an envelope with the elapsed time.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    elapsed_ms: f64,
    output: T,
}

fn print_json<T: Serialize>(value: &T, timing: Option<Instant>) {
    let text = match timing {
        Some(start) => serde_json::to_string_pretty(&Envelope {
            schema_version: SCHEMA_VERSION,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            output: value,
        }),
        None => serde_json::to_string_pretty(value),
    }
    .expect("reports serialize");
    out(&format!("{text}\n"));
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("psirred: {e}");
    ExitCode::from(1)
}

fn strip(r: Report, trace: bool) -> Report {
    if trace {
        r
    } else {
        r.without_trace()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            file,
            theorem,
            trace,
            table,
            refined,
            weyl_budget,
            timing,
        } => {
            let start = Instant::now();
            let opts = RunOptions {
                theorem,
                refined,
                weyl_budget,
            };
            let report = match run_file(&file, &opts) {
                Ok(r) => strip(r, trace || table),
                Err(e) => return fail(&e),
            };
            if table {
                out(&render_table(&report));
            } else {
                print_json(&report, timing.then_some(start));
            }
        }
        Command::Poles {
            case,
            d,
            refined,
            table,
        } => {
            let case = match RankOneCase::parse(&case, d) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let report = poles_report(case, refined);
            if table {
                out(&format!(
                    "{}: {{{}}}  (s_0 >= 0: {{{}}})\n",
                    report.case,
                    report.poles.join(", "),
                    report.s0_candidates.join(", ")
                ));
            } else {
                print_json(&report, None);
            }
        }
        Command::VerifyLemmas { max_rank } => {
            let results = match run_all(max_rank, weyl_budget_from_env()) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let mut ok = true;
            for r in &results {
                out(&format!(
                    "{} {}: {} cases\n",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.cases
                ));
                for f in &r.failures {
                    out(&format!("    {f}\n"));
                }
                ok &= r.passed();
            }
            if !ok {
                return ExitCode::from(2);
            }
        }
        Command::Batch {
            paths,
            theorem,
            trace,
            table,
            refined,
            weyl_budget,
            timing,
        } => {
            let start = Instant::now();
            let files = match expand_inputs(&paths) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let opts = RunOptions {
                theorem,
                refined,
                weyl_budget,
            };
            let mut batch = run_batch(&files, &opts);
            for e in batch.entries.iter_mut() {
                if let Some(r) = e.report.take() {
                    e.report = Some(strip(r, trace));
                }
            }
            if table {
                out(&render_batch_table(&batch));
            } else {
                print_json(&batch, timing.then_some(start));
            }
        }
    }
    ExitCode::SUCCESS
}
