//! `htmlsift` — convert messy HTML to Markdown or structured JSON, score
//! outputs, synthesize training data, and manage corpora.
//!
//! Exit codes: 0 on full success, 1 on fatal or usage errors, 2 when some
//! documents failed but the run produced its other outputs.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use config::Config;

#[derive(Debug, Parser)]
#[command(
    name = "htmlsift",
    version,
    about = "HTML-to-data toolkit: Markdown conversion, JSON extraction, metrics, and synthesis",
    max_term_width = 100
)]
struct Cli {
    /// TOML config file (also honored via HTMLSIFT_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every random decision in the run.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (default: logical cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Task flavor for eval and synth.
    #[arg(long, global = true, value_parser = ["markdown", "json"])]
    task: Option<String>,

    /// Resume an interrupted synth run from its stage logs.
    #[arg(long, global = true)]
    resume: bool,

    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert HTML files to clean Markdown (one .md per input).
    Convert(commands::convert::ConvertArgs),
    /// Extract schema-guided JSON from HTML files (one .json per input).
    ExtractJson(commands::extract_json::ExtractJsonArgs),
    /// Score predictions against references and print a metrics table.
    Eval(commands::eval::EvalArgs),
    /// Run the draft-refine-critique synthesis pipeline over a corpus.
    Synth(commands::synth::SynthArgs),
    /// Ingest, inspect, and bucket corpus stores.
    Corpus(commands::corpus::CorpusArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("HTMLSIFT_CONFIG").map(PathBuf::from));
    let mut cfg = match &config_path {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    cfg.apply_env()?;
    if let Some(seed) = cli.seed {
        cfg.global.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.global.jobs = jobs;
    }
    if let Some(task) = &cli.task {
        cfg.global.task = task.clone();
    }
    if cli.resume {
        cfg.global.resume = true;
    }
    cfg.validate()?;

    let _ = env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(&cfg.global.log_level),
    )
    .format_timestamp(None)
    .try_init();

    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(0);
    }

    let Some(command) = cli.command else {
        bail!("no subcommand given; run `htmlsift --help` for usage");
    };
    match command {
        Command::Convert(args) => commands::convert::run(&args, &cfg),
        Command::ExtractJson(args) => commands::extract_json::run(&args, &cfg),
        Command::Eval(args) => commands::eval::run(&args, &cfg),
        Command::Synth(args) => commands::synth::run(&args, &cfg),
        Command::Corpus(args) => commands::corpus::run(&args, &cfg),
    }
}
