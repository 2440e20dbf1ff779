use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectrum_auction::config::{parse_config_with_preset, ScenarioConfig};
use spectrum_auction::report::{run_scenario, ReportError};
use spectrum_auction::{ConfigError, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "spectrum-auction",
    version,
    about = "Repeated spectrum auctions with threshold learning and regret matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write scenario.toml, summary.csv and slots.csv.
    Run {
        /// Flat TOML override document.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Start from a named preset (fig2, fig3, fig4, fig56, fig7).
        #[arg(long)]
        preset: Option<String>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, created if missing.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the number of replications.
        #[arg(long)]
        replications: Option<u32>,
        /// Worker threads for replications (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Validate the document on top of a named preset.
        #[arg(long)]
        preset: Option<String>,
    },
}

enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn config(source: &str, err: &ConfigError) -> Self {
        match err.line {
            Some(line) => {
                let mut e = err.clone();
                e.line = None;
                Failure::Config(format!("{source}:{line}: {e}"))
            }
            None => Failure::Config(format!("{source}: {err}")),
        }
    }
}

fn load(config: Option<&Path>, preset: Option<&str>) -> Result<ScenarioConfig, Failure> {
    let (text, source) = match config {
        Some(path) => (
            fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
            path.display().to_string(),
        ),
        None if preset.is_some() => (String::new(), "<preset>".to_string()),
        None => {
            return Err(Failure::Config(
                "either --config or --preset is required".to_string(),
            ))
        }
    };
    parse_config_with_preset(&text, preset).map_err(|e| Failure::config(&source, &e))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config, preset } => {
            let cfg = load(Some(&config), preset.as_deref())?;
            let runs = cfg.expand().len();
            println!(
                "ok: {} SUs, {} channels, {} slots, {} scheme(s), {} configuration(s) x {} replication(s)",
                cfg.num_sus,
                cfg.num_channels,
                cfg.horizon,
                cfg.schemes.len(),
                runs,
                cfg.replications
            );
            Ok(())
        }
        Command::Run {
            config,
            preset,
            seed,
            out,
            replications,
            threads,
        } => {
            let mut cfg = load(config.as_deref(), preset.as_deref())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(n) = replications {
                cfg.replications = n;
            }
            if threads == Some(0) {
                return Err(Failure::Config("--threads must be >= 1".to_string()));
            }
            let report = run_scenario(&cfg, &out, threads).map_err(|e| match e {
                ReportError::Sim(Error::Config(c)) => Failure::config("config", &c),
                ReportError::Sim(other) => Failure::Config(other.to_string()),
                other => Failure::Io(other.to_string()),
            })?;
            println!(
                "{:<28} {:<18} {:>5} {:>12} {:>12} {:>10} {:>10}",
                "label", "scheme", "su", "mean_gamma", "std_gamma", "jain", "gain_%"
            );
            for row in report.summary.iter().filter(|r| r.su.is_none()) {
                println!(
                    "{:<28} {:<18} {:>5} {:>12.6} {:>12.6} {:>10.4} {:>10}",
                    row.label,
                    row.scheme,
                    "all",
                    row.mean_gamma,
                    row.std_gamma,
                    row.mean_jain,
                    row.gain_pct.map_or_else(String::new, |g| format!("{g:.2}"))
                );
            }
            println!("summary: {}", report.summary_path.display());
            if let Some(p) = report.slots_path {
                println!("slots:   {}", p.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
