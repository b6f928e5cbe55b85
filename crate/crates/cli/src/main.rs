//! `logskel`: build, render and classify with log skeletons, or serve the
//! HTTP API.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or unparsable input,
//! 3 internal failure.

use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log_skeleton::ingestion::{read_log, LogFormat, ReadError};
use log_skeleton::ClassifierConfig;
use log_skeleton_service::{
    classify_document, router, serve, skeleton_document, ApiError, AppState, ReportFormat, ServiceConfig, SkeletonQuery,
};

#[derive(Parser)]
#[command(name = "logskel", version, about = "Log skeletons: discover, browse and classify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the skeleton of a log and print a view of it.
    Build(BuildArgs),
    /// Classify test traces against a training log.
    Classify(ClassifyArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct BuildArgs {
    log: PathBuf,
    /// Input format; guessed from the extension when absent.
    #[arg(long)]
    format: Option<LogFormat>,
    /// Print Graphviz text (the default).
    #[arg(long, group = "output_format")]
    dot: bool,
    /// Print the JSON graph document.
    #[arg(long, group = "output_format")]
    json: bool,
    /// Print the skeleton relations and counters as JSON.
    #[arg(long, group = "output_format")]
    skeleton: bool,
    /// Relations to show, comma separated (names or codes). Empty for none.
    #[arg(long)]
    relations: Option<String>,
    /// Keep only traces containing all of these activities.
    #[arg(long)]
    required: Option<String>,
    /// Keep only traces containing none of these activities.
    #[arg(long)]
    forbidden: Option<String>,
    /// Activities to show; all when absent.
    #[arg(long)]
    activities: Option<String>,
    /// Group arcs into hyper arcs.
    #[arg(long)]
    hyper: bool,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    training: PathBuf,
    test: PathBuf,
    #[arg(long)]
    format: Option<LogFormat>,
    #[arg(long)]
    test_format: Option<LogFormat>,
    /// Largest combined size of required and forbidden sets.
    #[arg(long, default_value_t = 3)]
    max_filter_size: usize,
    /// Smallest filtered training log on which a directly-follows violation counts.
    #[arg(long = "df-support", default_value_t = 16)]
    df_support_min: usize,
    /// Stop after the tier in which this many negatives have been found.
    #[arg(long)]
    negative_cap: Option<usize>,
    /// Also check filters that leave no training traces.
    #[arg(long)]
    strict_empty: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the report as JSON instead of TSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Persist uploaded logs here.
    #[arg(long, env = "LOGSKEL_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Directory of built explorer assets, served at `/`.
    #[arg(long)]
    ui: Option<PathBuf>,
    /// Allow cross-origin requests from this origin (UI dev server).
    #[arg(long)]
    cors_origin: Option<String>,
    #[arg(long, default_value_t = 64)]
    max_upload_mb: usize,
    /// Per-request time limit in seconds.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ReadError> for CliError {
    fn from(e: ReadError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<log_skeleton::Error> for CliError {
    fn from(e: log_skeleton::Error) -> Self {
        match e {
            log_skeleton::Error::Parse(p) => CliError::Input(p.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ApiError> for CliError {
    fn from(e: ApiError) -> Self {
        if e.status().is_client_error() {
            CliError::Usage(e.message().to_string())
        } else {
            CliError::Internal(e.message().to_string())
        }
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let written = match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(CliError::Internal)
}

fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn build(args: BuildArgs) -> Result<(), CliError> {
    let log = read_log(&args.log, args.format)?.into_log()?;
    let format = if args.json {
        "json"
    } else if args.skeleton {
        "skeleton"
    } else {
        "dot"
    };
    let query = SkeletonQuery {
        required: args.required,
        forbidden: args.forbidden,
        relations: args.relations,
        activities: args.activities,
        hyper: Some(args.hyper.to_string()),
        format: Some(format.to_string()),
    };
    let text = skeleton_document(&log, &display_name(&args.log), &query.resolve()?)?;
    emit(&text, args.output.as_deref())
}

fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let training = read_log(&args.training, args.format)?.into_log()?;
    let tests = read_log(&args.test, args.test_format)?.into_labeled();
    let config = ClassifierConfig {
        max_filter_size: args.max_filter_size,
        df_support_min: args.df_support_min,
        negative_cap: args.negative_cap,
        skip_empty_training: !args.strict_empty,
    };
    let report = if args.json { ReportFormat::Json } else { ReportFormat::Tsv };
    let text = classify_document(&training, &tests, config, report, &AtomicBool::new(false))?
        .ok_or_else(|| CliError::Internal("classification was cancelled".into()))?;
    emit(&text, args.report.as_deref())
}

fn serve_cmd(args: ServeArgs) -> Result<(), CliError> {
    let config = ServiceConfig {
        max_upload_bytes: args.max_upload_mb.saturating_mul(1024 * 1024),
        request_timeout: Duration::from_secs(args.timeout),
        data_dir: args.data_dir,
        ui_dir: args.ui,
        cors_origin: args.cors_origin,
        ..ServiceConfig::default()
    };
    let state = AppState::new(config).map_err(|e| CliError::Input(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(SocketAddr::new(args.host, args.port))
            .await
            .map_err(|e| CliError::Usage(format!("cannot listen on {}:{}: {e}", args.host, args.port)))?;
        let addr = listener.local_addr().map_err(|e| CliError::Internal(e.to_string()))?;
        println!("listening on http://{addr}");
        serve(listener, router(Arc::new(state)))
            .await
            .map_err(|e| CliError::Internal(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_env("LOGSKEL_LOG"))
        .with_writer(std::io::stderr)
        .init();
    let result = match cli.command {
        Command::Build(args) => build(args),
        Command::Classify(args) => classify(args),
        Command::Serve(args) => serve_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("logskel: {e}");
            ExitCode::from(e.code())
        }
    }
}
