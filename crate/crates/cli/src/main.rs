// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use floquet_cages_cli::config::{ExperimentConfig, Observable};
use floquet_cages_cli::error::CliError;
use floquet_cages_cli::recipes::{figure_recipes, recipe};
use floquet_cages_cli::run::{execute, RunManifest};
use floquet_cages_cli::sweep::{number_text, run_sweep};

#[derive(Parser)]
#[command(name = "fcages", version, about = "Floquet many-body cage experiments")]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the state graph; writes graph.json and edges.txt.
    Enumerate,
    /// Diagonalise the static Hamiltonian; writes spectrum.csv.
    Spectrum,
    /// Build the drive and solve for quasienergies.
    Evolve,
    /// Evolve and compute the observables listed in the config.
    Observe,
    /// Detect grafted trees and their compact localised states.
    Cages,
    /// Run a built-in configuration; `list` shows them all.
    Recipe {
        name: String,
        /// Print the configuration instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Run the config's sweep block and aggregate the results.
    Sweep,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config <path> is required for this command".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ExperimentConfig::parse(&text)
}

fn default_stages(cfg: &ExperimentConfig) -> Vec<Observable> {
    let mut stages = cfg.observables.compute.clone();
    if stages.is_empty() {
        if cfg.drive.is_some() {
            stages = vec![Observable::Quasienergies, Observable::Echo, Observable::Memory];
        } else {
            stages = vec![Observable::Spectrum];
        }
    }
    stages
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads: must be at least 1".into()));
        }
        // Fails only if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let (name, mut cfg) = match &cli.command {
        Command::Recipe { name, print_config } => {
            if name == "list" {
                for r in figure_recipes() {
                    println!("{:<10} {}", r.name, r.description);
                }
                return Ok(());
            }
            let cfg = recipe(name).ok_or_else(|| {
                let names: Vec<&str> = figure_recipes().iter().map(|r| r.name).collect();
                CliError::Validation(format!("recipe: unknown name `{name}`; available: {}", names.join(", ")))
            })?;
            if *print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            ("recipe", cfg)
        }
        Command::Enumerate => ("enumerate", load(cli)?),
        Command::Spectrum => ("spectrum", load(cli)?),
        Command::Evolve => ("evolve", load(cli)?),
        Command::Observe => ("observe", load(cli)?),
        Command::Cages => ("cages", load(cli)?),
        Command::Sweep => ("sweep", load(cli)?),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.directory = out.display().to_string();
    }
    cfg.validate()?;

    let stages = match &cli.command {
        Command::Enumerate => vec![Observable::Graph],
        Command::Spectrum => vec![Observable::Spectrum],
        Command::Evolve => vec![Observable::Quasienergies],
        Command::Cages => vec![Observable::Cages],
        _ => default_stages(&cfg),
    };
    let dir = Path::new(&cfg.output.directory).to_path_buf();
    let sweeping = matches!(cli.command, Command::Sweep) || (matches!(cli.command, Command::Recipe { .. }) && cfg.sweep.is_some());
    let output = if sweeping {
        run_sweep(&cfg, &stages, &dir, cli.threads)?
    } else {
        execute(&cfg, &stages, &dir, "")?
    };
    let manifest = RunManifest::new(name, &cfg, output);
    let path = manifest.write(&dir)?;
    for (k, v) in &manifest.summary {
        println!("{k} = {}", number_text(*v));
    }
    println!("wrote {} files; manifest {}", manifest.files.len(), path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fcages: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
