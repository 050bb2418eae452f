//! `reserving`: seeded batch runs of the Mack and Mack-Net reserving models
//! over Schedule P triangles.

mod artifacts;
mod commands;
mod config;
mod data;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use reserving::LineOfBusiness;

use config::{KindChoice, ModelChoice, RunConfig};
use error::{CliError, CliResult};
use io::{write_json, Layout};

#[derive(Debug, Parser)]
#[command(name = "reserving", version, about = "Stochastic claims reserving with Mack and Mack-Net")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Leave the timestamp out of the run metadata file.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a Schedule P CSV into canonical per-company triangles.
    Ingest(Common),
    /// Fit the models and write parameters with per-line averages.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Time and error of Mack-Net with the triangles cut to 5..10 years.
        #[arg(long)]
        bench: bool,
    },
    /// Bootstrap reserve distributions.
    Simulate(Common),
    /// Error and backtest tables against the realised ultimates.
    Report(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Fit { bench: true, .. } => "bench",
            Command::Fit { .. } => "fit",
            Command::Simulate(_) => "simulate",
            Command::Report(_) => "report",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Ingest(c) | Command::Simulate(c) | Command::Report(c) => c,
            Command::Fit { common, .. } => common,
        }
    }
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Schedule P CSV, or a directory written by `ingest` (default OUT/data).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_parser = parse_lob)]
    lob: Option<LineOfBusiness>,
    #[arg(long, value_enum)]
    kind: Option<KindChoice>,
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    /// `all`, `meyers-all`, or comma-separated company codes.
    #[arg(long)]
    companies: Option<String>,
    /// Codes used by `--companies meyers-all`.
    #[arg(long)]
    company_list: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sims: Option<usize>,
    #[arg(long)]
    members: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use incurred losses including bulk reserves.
    #[arg(long)]
    gross_incurred: bool,
}

fn parse_lob(s: &str) -> Result<LineOfBusiness, String> {
    s.parse().map_err(|e: reserving::Error| e.to_string())
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.data {
            cfg.data = Some(v.clone());
        }
        if let Some(v) = self.lob {
            cfg.lob = v;
        }
        if let Some(v) = self.kind {
            cfg.kind = v;
        }
        if let Some(v) = self.model {
            cfg.model = v;
        }
        if let Some(v) = &self.companies {
            cfg.companies = v.clone();
        }
        if let Some(v) = &self.company_list {
            cfg.company_list = Some(v.clone());
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = self.sims {
            cfg.bootstrap.n_sims = v;
        }
        if let Some(v) = self.members {
            cfg.ensemble.members = v;
        }
        if let Some(v) = self.epochs {
            cfg.ensemble.train.epochs = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if self.gross_incurred {
            cfg.net_bulk = false;
        }
    }
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    command: &'a str,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    config: &'a RunConfig,
}

fn effective_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(cmd) = &cli.command {
        cmd.common().apply(&mut cfg);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = effective_config(&cli)?;
    if cli.show_config {
        let text = cfg.to_toml()?;
        if cfg.seed.is_none() {
            print!("# seed is required by simulate and by fit with macknet\n# seed = 0\n{text}");
        } else {
            print!("{text}");
        }
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no command given; see --help".into()));
    };
    cfg.validate()?;
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
    }
    let layout = Layout::new(&cfg.out);
    match command {
        Command::Ingest(_) => drop(commands::ingest::run(&cfg, &layout)?),
        Command::Fit { bench: true, .. } => drop(commands::bench::run(&cfg, &layout)?),
        Command::Fit { .. } => drop(commands::fit::run(&cfg, &layout)?),
        Command::Simulate(_) => drop(commands::simulate::run(&cfg, &layout)?),
        Command::Report(_) => drop(commands::report::run(&cfg, &layout)?),
    }
    let timestamp_unix = (!cli.no_timestamp).then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    write_json(
        &layout.run_metadata(command.name()),
        &RunMetadata {
            command: command.name(),
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
            config: &cfg,
        },
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
