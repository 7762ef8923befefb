use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use brnr::corpus::default_corpus;
use brnr::error::{Error, Result};
use brnr::group::DEFAULT_ELEMENT_CAP;
use brnr::job::{build_galois, build_group, corpus_from_json, parse_json, read_input, run_compute, run_h1, Options};
use brnr::norms::GroupContext;
use brnr::oracle::differential_suite;

/// Algebraic unramified Brauer groups of homogeneous spaces with finite
/// stabilizer.
#[derive(Parser)]
#[command(name = "brnr", version)]
struct Cli {
    /// Worker threads (default: BRNR_THREADS, else all cores).
    #[arg(long, global = true, env = "BRNR_THREADS")]
    threads: Option<usize>,
    /// Largest group enumerated, in elements.
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_CAP)]
    cap: usize,
    /// Also write the JSON result to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JobArgs {
    /// Group: inline JSON, @file, a file path, or a built-in name.
    #[arg(long)]
    group: String,
    /// Galois data: inline JSON, @file or a file path.
    #[arg(long)]
    galois: String,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Br_nr,al.
    Compute {
        #[command(flatten)]
        job: JobArgs,
        /// Cross-check against the independent oracles.
        #[arg(long)]
        oracle: bool,
        /// Include intermediate witnesses.
        #[arg(long)]
        witnesses: bool,
    },
    /// Compute H^1 and Sha^1_cyc only.
    H1 {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Run the differential suite.
    Verify {
        /// `default` or a corpus JSON file.
        #[arg(long, default_value = "default")]
        corpus: String,
    },
    /// The Demarche group over a finite field.
    Demarche {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        witnesses: bool,
    },
}

enum Report {
    Document(Value, bool),
    Stream(Vec<Value>, bool),
}

fn context(group: &str, cap: usize) -> Result<GroupContext> {
    let g = build_group(&parse_json(&read_input(group)?)?, cap)?;
    Ok(GroupContext::new(g))
}

fn run(cli: &Cli) -> Result<Report> {
    let cap = cli.cap;
    match &cli.command {
        Command::Compute {
            job,
            oracle,
            witnesses,
        } => {
            let ctx = context(&job.group, cap)?;
            let galois = build_galois(&ctx, &parse_json(&read_input(&job.galois)?)?, cap)?;
            let opts = Options {
                oracle: *oracle,
                witnesses: *witnesses,
            };
            let out = run_compute(&ctx, &galois, opts)?;
            Ok(Report::Document(out.document, out.agreement))
        }
        Command::H1 { job } => {
            let ctx = context(&job.group, cap)?;
            let galois = build_galois(&ctx, &parse_json(&read_input(&job.galois)?)?, cap)?;
            Ok(Report::Document(run_h1(&ctx, &galois)?, true))
        }
        Command::Verify { corpus } => {
            let cases = if corpus == "default" {
                default_corpus(cap)?
            } else {
                corpus_from_json(&parse_json(&read_input(corpus)?)?, cap)?
            };
            let reports = differential_suite(&cases, None);
            let agreement = reports.iter().all(|r| r.agreement);
            let disagreements = reports.iter().filter(|r| !r.agreement).count();
            eprintln!(
                "{} cases, {} checks, {} disagreements",
                cases.len(),
                reports.len(),
                disagreements
            );
            let values = reports
                .iter()
                .map(serde_json::to_value)
                .collect::<std::result::Result<_, _>>()?;
            Ok(Report::Stream(values, agreement))
        }
        Command::Demarche {
            l,
            m,
            q,
            oracle,
            witnesses,
        } => {
            let group = json!({"kind": "demarche", "l": l, "m": m});
            let ctx = GroupContext::new(build_group(&group, cap)?);
            let galois = build_galois(&ctx, &json!({"mode": "fq", "q": q, "action": "trivial"}), cap)?;
            let opts = Options {
                oracle: *oracle,
                witnesses: *witnesses,
            };
            let out = run_compute(&ctx, &galois, opts)?;
            Ok(Report::Document(out.document, out.agreement))
        }
    }
}

fn emit(cli: &Cli, report: Report) -> Result<bool> {
    let (text, file_text, agreement) = match report {
        Report::Document(doc, ok) => {
            let s = serde_json::to_string_pretty(&doc)?;
            (s.clone(), s, ok)
        }
        Report::Stream(values, ok) => {
            let lines: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            let array = serde_json::to_string_pretty(&Value::Array(values))?;
            (lines.join("\n"), array, ok)
        }
    };
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(Error::Resource(format!("cannot write output: {e}")));
        }
    }
    if let Some(path) = &cli.json {
        std::fs::write(path, file_text + "\n")
            .map_err(|e| Error::argument(format!("cannot write {path}: {e}")))?;
    }
    Ok(agreement)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli).and_then(|r| emit(&cli, r))),
        Err(e) => Err(Error::Resource(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: oracle disagreement");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
