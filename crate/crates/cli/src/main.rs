use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use esl_core::mapspec::{parse_map_spec, MapSpec};
use esl_core::padic::DEFAULT_CELL_BUDGET;
use esl_core::report::{cmd_exact, cmd_padic, cmd_real, InvariantReport, RealOptions};
use esl_core::verify::{run_suites, Suite};

mod render;

/// Integrability exponents of pushforward measures under polynomial maps.
#[derive(Debug, Parser)]
#[command(name = "esl", version)]
struct Cli {
    /// Worker threads for sampling and enumeration (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact lct, eps, k and delta at the base point.
    Exact {
        /// Map-spec file, `-` for stdin, or the spec text itself.
        spec: String,
    },
    /// Monte Carlo tail fit of the pushforward of the uniform measure on [-1, 1]^n.
    Real {
        spec: String,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Also fit the Fourier decay exponent.
        #[arg(long)]
        fourier: bool,
        /// Write the tail histogram as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact p-adic ball masses for depths 0..=k.
    Padic {
        spec: String,
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'k')]
        k: u32,
        /// Write the mass table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a built-in verification suite (`all` runs every suite).
    Verify { suite: String },
}

fn read_spec(arg: &str) -> Result<MapSpec> {
    let text = if arg == "-" {
        std::io::read_to_string(std::io::stdin()).context("reading spec from stdin")?
    } else if Path::new(arg).exists() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else if arg.trim_start().starts_with("map") {
        arg.to_string()
    } else {
        bail!("no such spec file: {arg}");
    };
    parse_map_spec(&text).map_err(|e| anyhow::anyhow!("{arg}: {e}"))
}

fn cell_budget() -> Result<u64> {
    match std::env::var("ESL_CELL_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("ESL_CELL_BUDGET={v} is not a nonnegative integer")),
        Err(_) => Ok(DEFAULT_CELL_BUDGET),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<InvariantReport> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .context("configuring worker pool")?;
    }
    let report = match cli.command {
        Command::Exact { spec } => cmd_exact(&read_spec(&spec)?)?,
        Command::Real {
            spec,
            samples,
            seed,
            bins,
            fourier,
            csv,
        } => {
            let opts = RealOptions {
                samples,
                seed,
                bins,
                workers: None,
                fourier,
            };
            let (report, hist) = cmd_real(&read_spec(&spec)?, &opts)?;
            if let Some(path) = csv {
                write(&path, &hist.to_csv())?;
            }
            report
        }
        Command::Padic { spec, p, k, csv } => {
            let (report, table) = cmd_padic(&read_spec(&spec)?, p, k, cell_budget()?)?;
            if let Some(path) = csv {
                write(&path, &table.to_csv())?;
            }
            report
        }
        Command::Verify { suite } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse().map_err(anyhow::Error::msg)?]
            };
            run_suites(&suites)
        }
    };
    Ok(report)
}

/// Error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, json) = (cli.out.clone(), cli.json);
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            return ExitCode::from(2);
        }
    };
    let doc = report.to_json_pretty();
    if let Some(path) = out {
        if let Err(e) = write(&path, &doc) {
            eprintln!("error: {}", describe(&e));
            return ExitCode::from(2);
        }
    }
    if json {
        println!("{doc}");
    } else {
        print!("{}", render::summary(&report));
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
