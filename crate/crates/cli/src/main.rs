use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spamdrift::corpus::{dump_enron_layout, synth_drift, SynthParams};
use spamdrift::driftloop::SessionMode;
use spamdrift_cli::error::{CliError, Result};
use spamdrift_cli::experiment::{Checkpoint, ExperimentTable, TableRow};
use spamdrift_cli::{emit_report, render_table, run_configured, ReportFormat, RunConfig};

#[derive(Parser)]
#[command(name = "spamdrift", version, about = "Incrementally retrained SVM spam filter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiment 1 (mode = batch) or experiment 2 (mode = incremental).
    Run {
        #[command(flatten)]
        settings: Settings,
        /// Table formats to write, comma separated.
        #[arg(long = "report", value_delimiter = ',', default_value = "csv,json")]
        formats: Vec<ReportFormat>,
    },
    /// Configuration utilities.
    Config {
        #[command(subcommand)]
        command: ConfigCommand,
    },
    /// Write a synthetic drifting corpus in the Enron directory layout.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 150)]
        vocab: usize,
        #[arg(long, default_value_t = 1000)]
        docs_per_phase: usize,
        #[arg(long, default_value_t = 0.2)]
        overlap: f64,
        #[arg(long, default_value_t = 0.5)]
        camouflage: f64,
    },
    /// Re-render saved session checkpoints as a table on stdout.
    Report {
        #[arg(required = true)]
        checkpoints: Vec<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
}

#[derive(Subcommand)]
enum ConfigCommand {
    /// Print the effective configuration in canonical form.
    Dump {
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Args)]
struct Settings {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    manifest: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    selector: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// Any other key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Settings {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => Some(fs::read_to_string(path).map_err(|e| CliError::io(path, e))?),
            None => None,
        };
        let named = [
            ("dataset", &self.dataset),
            ("manifest", &self.manifest),
            ("format", &self.format),
            ("selector", &self.selector),
            ("n", &self.n),
            ("rho", &self.rho),
            ("c", &self.c),
            ("kernel", &self.kernel),
            ("mode", &self.mode),
            ("seed", &self.seed),
            ("output", &self.output),
        ];
        let mut overrides: Vec<(String, String)> = named
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_owned(), v.clone())))
            .collect();
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::config("set", format!("expected KEY=VALUE, got {pair:?}")))?;
            overrides.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        RunConfig::parse(file.as_deref(), &overrides)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { settings, formats } => {
            let config = settings.resolve()?;
            let experiment = run_configured(&config)?;
            emit_report(&experiment, &formats, &config.output)?;
            print!("{}", render_table(&experiment.table, ReportFormat::Csv));
        }
        Command::Config { command: ConfigCommand::Dump { settings } } => {
            print!("{}", settings.resolve()?.dump());
        }
        Command::Synth { output, seed, vocab, docs_per_phase, overlap, camouflage } => {
            let mut params = SynthParams::new(vocab, docs_per_phase, overlap);
            params.camouflage = camouflage;
            let corpus = synth_drift(seed, &params)?;
            dump_enron_layout(&corpus, &output)?;
            println!("wrote {} documents to {}", corpus.len(), output.display());
        }
        Command::Report { checkpoints, format } => {
            let mut rows = Vec::new();
            for path in &checkpoints {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let checkpoint: Checkpoint =
                    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.clone(), source })?;
                rows.push(TableRow::new(&checkpoint.dataset, checkpoint.selector, &checkpoint.report()?));
            }
            let experiment = if rows.iter().any(|r| r.mode == SessionMode::Incremental) { 2 } else { 1 };
            print!("{}", render_table(&ExperimentTable { experiment, rows }, format));
        }
    }
    std::io::stdout().flush().map_err(|e| CliError::io("<stdout>", e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\t'], " ");
            eprintln!("error\t{}\t{message}", e.kind());
            ExitCode::FAILURE
        }
    }
}
