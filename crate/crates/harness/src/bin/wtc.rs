use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use wiretap_commit::protocol::{SessionRecord, Verdict};
use wiretap_commit_harness::config::{ExperimentConfig, ExperimentKind, OutputFormat, CONFIG_VERSION};
use wiretap_commit_harness::{run_experiment, Cell, ColumnType, HarnessError, ResultTable};

#[derive(Parser)]
#[command(name = "wtc", version, about = "Commitment over binary symmetric wiretap channels: batch experiments")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: config output, else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Capacities and converse bounds over a (p, q) grid.
    Capacity,
    /// Honest-rejection rate.
    Soundness,
    /// Binding attack by a cheating Alice.
    Binding,
    /// Leakage of the commitment to Bob.
    Concealment,
    /// Leakage of the commitment to Eve.
    Secrecy,
    /// One experiment over a list of parameter values.
    Sweep,
    /// Re-run Bob's reveal test on a serialized session.
    Replay {
        /// Session record (JSON) with a claim.
        record: PathBuf,
    },
}

impl Command {
    fn kind(&self) -> Option<ExperimentKind> {
        Some(match self {
            Command::Capacity => ExperimentKind::CapacityGrid,
            Command::Soundness => ExperimentKind::Soundness,
            Command::Binding => ExperimentKind::Binding,
            Command::Concealment => ExperimentKind::Concealment,
            Command::Secrecy => ExperimentKind::Secrecy,
            Command::Sweep => ExperimentKind::Sweep,
            Command::Replay { .. } => return None,
        })
    }
}

fn load_config(cli: &Cli, kind: ExperimentKind) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None if kind == ExperimentKind::CapacityGrid => ExperimentConfig {
            version: CONFIG_VERSION,
            kind,
            params: None,
            channel: None,
            trials: None,
            seed: 0,
            output: None,
            format: None,
            mode: None,
            method: None,
            view: None,
            ideal_pad: false,
            grid: None,
            sweep: None,
        },
        None => bail!("{} needs --config", kind.name()),
    };
    if config.kind != kind {
        bail!(
            "config kind is {} but the subcommand runs {}",
            config.kind.name(),
            kind.name()
        );
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn replay(path: &Path) -> anyhow::Result<ResultTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let record: SessionRecord =
        serde_json::from_str(&text).map_err(|e| HarnessError::parse(&path.display().to_string(), &e))?;
    let verdict = record.replay()?;
    let mut t = ResultTable::new(&[
        ("verdict", ColumnType::Text),
        ("failed_condition", ColumnType::Int),
        ("n", ColumnType::Int),
    ]);
    let (name, cond) = match verdict {
        Verdict::Accept => ("accept", Cell::Null),
        Verdict::Reject(r) => ("reject", Cell::Int(r.index() as u64)),
    };
    t.push(vec![Cell::text(name), cond, Cell::Int(record.params.n() as u64)]);
    t.metadata.insert("kind".into(), "replay".into());
    Ok(t)
}

fn emit(table: &ResultTable, format: OutputFormat, out: Option<&Path>) -> anyhow::Result<()> {
    let text = match format {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json(),
    };
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("starting worker pool")?;
    }
    let (table, config_format, config_out) = match cli.command.kind() {
        Some(kind) => {
            let config = load_config(&cli, kind)?;
            (run_experiment(&config)?, config.format, config.output.clone())
        }
        None => {
            let Command::Replay { record } = &cli.command else {
                unreachable!()
            };
            if cli.seed.is_some() {
                bail!("--seed does not apply to replay");
            }
            (replay(record)?, None, None)
        }
    };
    let out = cli.out.clone().or(config_out);
    let format = match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => config_format.unwrap_or_else(|| match out.as_deref().and_then(Path::extension) {
            Some(ext) if ext == "json" => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }),
    };
    emit(&table, format, out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
