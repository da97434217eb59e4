use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use objectivity::harness::{self, Experiment, Override};

#[derive(Parser)]
#[command(
    name = "objectivity",
    version,
    about = "Objectivity diagnostics for a qubit in a random-coupling environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// System entropy, excited population and coherence over time.
    Evolve(Flags),
    /// Mean mutual information per fragment size.
    MiSweep(Flags),
    /// Accessible information and discord per fragment size.
    InfoDecomp(Flags),
    /// Minimal broadcast-structure bound per fragment size.
    SbsSweep(Flags),
}

#[derive(Args)]
struct Flags {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Environment size(s), comma separated.
    #[arg(long = "N", value_name = "N[,N...]")]
    n: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = ["superposition", "thermal", "both"])]
    env_init: Option<String>,
    #[arg(long, value_parser = ["perez", "staircase", "both"])]
    trace: Option<String>,
    /// Comma list of times; `start:stop:step` ranges allowed.
    #[arg(long, allow_hyphen_values = true)]
    times: Option<String>,
    #[arg(long, value_parser = ["true", "fragment"])]
    system_source: Option<String>,
    /// Random axes per search round.
    #[arg(long)]
    search_samples: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker thread cap.
    #[arg(long)]
    jobs: Option<usize>,
    /// Number of coupling realizations to average over.
    #[arg(long)]
    ensemble: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> Vec<Override> {
        let mut out = Vec::new();
        let mut push = |flag: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(Override::new(flag, v));
            }
        };
        push("--seed", self.seed.map(|v| v.to_string()));
        push("--N", self.n.clone());
        push("--lambda", self.lambda.map(|v| v.to_string()));
        push("--beta", self.beta.map(|v| v.to_string()));
        push("--env-init", self.env_init.clone());
        push("--trace", self.trace.clone());
        push("--times", self.times.clone());
        push("--system-source", self.system_source.clone());
        push(
            "--search-samples",
            self.search_samples.map(|v| v.to_string()),
        );
        push(
            "--output",
            self.output.as_ref().map(|p| p.display().to_string()),
        );
        push("--format", self.format.clone());
        push("--jobs", self.jobs.map(|v| v.to_string()));
        push("--ensemble", self.ensemble.map(|v| v.to_string()));
        out
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, flags) = match &cli.command {
        Command::Evolve(f) => (Experiment::Evolution, f),
        Command::MiSweep(f) => (Experiment::MiSweep, f),
        Command::InfoDecomp(f) => (Experiment::InfoDecomposition, f),
        Command::SbsSweep(f) => (Experiment::SbsSweep, f),
    };
    let result = harness::load_config(experiment, flags.config.as_deref(), &flags.overrides())
        .and_then(|cfg| {
            let summaries = harness::run(&cfg)?;
            harness::output::write(&cfg, &summaries)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
