mod args;
mod commands;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;
use output::{manifest_path, RunManifest};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let run = commands::run(&cli.command, cli.seed)?;
    let outputs = run.outputs.paths();
    // the subcommand's options sit one level down, under its name
    let config = match serde_json::to_value(&cli.command)? {
        serde_json::Value::Object(mut m) if m.len() == 1 => m.remove(cli.command.name()).unwrap_or_default(),
        other => other,
    };
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        threads: cli.threads,
        config,
        inputs: run.inputs,
        outputs: outputs.clone(),
        summary: run.summary,
    };
    let path = manifest_path(cli.manifest.as_deref(), &outputs);
    let mut staged = run.outputs;
    staged.put(Some(&path), serde_json::to_string_pretty(&manifest)? + "\n")?;
    staged.commit()
}
