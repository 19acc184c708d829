// Copyright 2026 The qrff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrff_core::experiment::{
    emit_outputs, feature_model, fit_exact, fit_rff, generate_dataset, posterior_csv, quantum_csv, run_experiment,
    run_quantum, summary_text, write_file, RunConfig,
};
use qrff_core::pipeline::Mode;
use qrff_core::{selftest, Error, Result};

/// Exact, random-Fourier-feature and simulated quantum Gaussian process regression.
#[derive(Debug, Parser)]
#[command(name = "qrff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact GP posterior over the grid, written to exact.csv.
    FitExact(RunArgs),
    /// Random-Fourier-feature GP posterior over the grid, written to rff.csv.
    FitRff(RunArgs),
    /// Quantum-pipeline posterior over the grid, written to quantum.csv.
    RunQuantum(RunArgs),
    /// All three, written to results.csv, summary.txt and plot.dat.
    Compare(RunArgs),
    /// Invariant checks on the default configuration.
    Selftest {
        /// Eigenvalue register width.
        #[arg(long, default_value_t = 10)]
        tau: usize,
    },
}

/// Flags override values from the config file.
#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    seed_data: Option<u64>,
    #[arg(long)]
    seed_freq: Option<u64>,
    #[arg(long)]
    seed_shots: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.seed_data {
            cfg.seed_data = v;
        }
        if let Some(v) = self.seed_freq {
            cfg.seed_freq = v;
        }
        if let Some(v) = self.seed_shots {
            cfg.seed_shots = v;
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = &self.out {
            cfg.output = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create_output_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output).map_err(|source| Error::Io {
        path: cfg.output.clone(),
        source,
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::FitExact(args) => {
            let cfg = args.config()?;
            let ds = generate_dataset(&cfg)?;
            let posts = fit_exact(&cfg, &ds)?;
            create_output_dir(&cfg)?;
            write_file(
                &cfg.output.join("exact.csv"),
                &posterior_csv(&cfg.grid.points(cfg.d), &posts),
            )?;
        }
        Command::FitRff(args) => {
            let cfg = args.config()?;
            let ds = generate_dataset(&cfg)?;
            let fm = feature_model(&cfg, &ds)?;
            let posts = fit_rff(&cfg, &fm, &ds)?;
            create_output_dir(&cfg)?;
            write_file(
                &cfg.output.join("rff.csv"),
                &posterior_csv(&cfg.grid.points(cfg.d), &posts),
            )?;
        }
        Command::RunQuantum(args) => {
            let cfg = args.config()?;
            let ds = generate_dataset(&cfg)?;
            let fm = feature_model(&cfg, &ds)?;
            let (_, est) = run_quantum(&cfg, &fm, &ds)?;
            create_output_dir(&cfg)?;
            write_file(
                &cfg.output.join("quantum.csv"),
                &quantum_csv(&cfg.grid.points(cfg.d), &est),
            )?;
        }
        Command::Compare(args) => {
            let cfg = args.config()?;
            let report = run_experiment(&cfg)?;
            emit_outputs(&report, &cfg, &cfg.output)?;
            print!("{}", summary_text(&report, &cfg));
        }
        Command::Selftest { tau } => {
            let checks = selftest::run(tau)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let message = e.to_string().replace('"', "'");
            eprintln!("error kind={} code={} message=\"{}\"", e.kind(), e.exit_code(), message);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
