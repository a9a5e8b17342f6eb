mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Cli, Output, RunConfig};

fn threads() -> Result<usize> {
    match std::env::var("MH_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("MH_THREADS must be a positive integer, got {v:?}"))?;
            anyhow::ensure!(n >= 1, "MH_THREADS must be at least 1");
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run(cfg: &RunConfig) -> Result<usize> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads()?).build()?;
    let start = Instant::now();
    let mut report = pool.install(|| commands::run(cfg))?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    if cfg.timing || cfg.output == Output::Human {
        report.timing_ms = Some(elapsed);
    }
    let text = match cfg.output {
        Output::Json => report.to_json(),
        Output::Csv => report.to_csv(),
        Output::Human => report.to_human(),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(report.violations())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_command(cli.command).and_then(|cfg| run(&cfg));
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} violation(s) found");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
