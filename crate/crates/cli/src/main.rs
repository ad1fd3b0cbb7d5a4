use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maruin_cli::acceptance;
use maruin_cli::commands;
use maruin_cli::config::Config;
use maruin_cli::output::{Format, Output};
use maruin_cli::CliError;

#[derive(Parser)]
#[command(
    name = "maruin",
    version,
    about = "Moving-average large deviations: segments, ruin and rate functions"
)]
struct Cli {
    /// JSON config laid over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "both")]
    format: Format,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment rate bounds and the ruin asymptote for the configured model.
    Rate,
    /// Simulate longest strange segment growth.
    Segments,
    /// Estimate ruin probabilities and fit their decay.
    Ruin,
    /// Emit the exponent tables over the configured grids.
    Tables,
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value = "primary")]
        suite: String,
        /// Run only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            Config::from_json(&text)?
        }
        None => Config::defaults(),
    };
    if let Some(s) = cli.seed {
        cfg.experiment.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = load(&cli)?;
    let out = Output::new(&cli.out_dir, cli.format, cli.svg)?;
    let threads = rayon::current_num_threads();
    let (stem, summary) = match &cli.command {
        Command::Rate => ("rate", commands::rate(&cfg, &out)?),
        Command::Segments => ("segments", commands::segments(&cfg, &out)?),
        Command::Ruin => ("ruin", commands::ruin(&cfg, &out)?),
        Command::Tables => ("tables", commands::tables(&cfg, &out)?),
        Command::Verify { suite, only } => {
            if suite != "primary" {
                return Err(CliError::Config(format!(
                    "unknown suite `{suite}`; the only suite is `primary`"
                )));
            }
            let ids = only.clone().unwrap_or_else(acceptance::all_ids);
            let results = acceptance::run(&ids);
            for r in &results {
                println!("{}", r.line());
            }
            out.json("verify", &results)?;
            out.sidecar("verify", &cfg, threads)?;
            let failed: Vec<String> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.id.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Acceptance(format!(
                    "criteria {} failed",
                    failed.join(", ")
                )));
            }
            return Ok(format!("{} criteria passed", results.len()));
        }
    };
    out.sidecar(stem, &cfg, threads)?;
    Ok(summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("maruin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
