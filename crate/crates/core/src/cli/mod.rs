//! Batch front end: `mepack run <scenario.json> [options]`.

pub mod modes;
pub mod report;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use modes::{run_mode, RunOutput};
pub use scenario::{Mode, Scenario};

use crate::error::{MepackError, Result};

/// Environment variable capping the worker threads used for sweeps.
pub const THREADS_ENV: &str = "MEPACK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mepack",
    version,
    about = "Maximum-entropy phase-space packets: moments, dynamics and quantum corrections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Directory for output files (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run mode (overrides `run.mode`).
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Expression such as "q*p"; repeatable, replaces `run.expressions`.
    #[arg(long = "expr")]
    pub expr: Vec<String>,
    /// Comma-separated nu values (overrides `run.nu`).
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<f64>>,
    /// Taylor or derivative order (overrides `run.order`).
    #[arg(long)]
    pub order: Option<usize>,
    /// Fock basis size for oracle runs (overrides `run.cutoff`).
    #[arg(long)]
    pub cutoff: Option<usize>,
}

/// Process exit status for an error.
pub fn exit_code(err: &MepackError) -> i32 {
    match err {
        MepackError::Domain(_)
        | MepackError::PureStateLimit
        | MepackError::Parse { .. }
        | MepackError::UnboundSymbol(_)
        | MepackError::Config(_) => 2,
        MepackError::CutoffInsufficient { .. } | MepackError::HorizonExceeded { .. } | MepackError::TaylorBreakdown { .. } => 3,
        MepackError::Io { .. } => 4,
        MepackError::Consistency(_) => 1,
    }
}

fn hint(err: &MepackError) -> Option<&'static str> {
    match err {
        MepackError::CutoffInsufficient { .. } => Some("raise --cutoff or lower nu"),
        MepackError::HorizonExceeded { .. } => Some("raise --cutoff or shorten the time grid"),
        MepackError::TaylorBreakdown { .. } => Some("shorten the time grid or change --order"),
        MepackError::UnboundSymbol(_) => Some("numeric modes need numeric potential coefficients"),
        _ => None,
    }
}

/// Applies command-line overrides to a loaded scenario.
pub fn apply_overrides(scenario: &mut Scenario, args: &RunArgs) {
    if let Some(m) = args.mode {
        scenario.run.mode = Some(m);
    }
    if !args.expr.is_empty() {
        scenario.run.expressions = args.expr.clone();
    }
    if let Some(nu) = &args.nu {
        scenario.run.nu = nu.clone();
    }
    if let Some(o) = args.order {
        scenario.run.order = Some(o);
    }
    if let Some(c) = args.cutoff {
        scenario.run.cutoff = Some(c);
    }
    if let Some(out) = &args.out {
        scenario.output.dir = Some(out.clone());
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| MepackError::Io { path, source })
}

/// Writes the data files and `run.json` metadata into `dir`.
pub fn write_outputs(dir: &Path, output: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| MepackError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, content) in &output.files {
        write_file(dir, name, content)?;
    }
    write_file(dir, "run.json", &output.footer.json())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| MepackError::Config(format!("{THREADS_ENV}: expected a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| MepackError::Config(format!("thread pool: {e}")))
}

/// Loads, validates and runs a scenario, writing outputs; returns the report text.
pub fn run_scenario(args: &RunArgs) -> Result<String> {
    let mut scenario = Scenario::load(&args.scenario)?;
    apply_overrides(&mut scenario, args);
    let output = thread_pool()?.install(|| run_mode(&scenario))?;
    if let Some(dir) = &scenario.output.dir {
        write_outputs(dir, &output)?;
    }
    Ok(format!("{}{}", output.text, output.footer.text()))
}

/// Entry point shared by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::Run(args) => match run_scenario(&args) {
            Ok(text) => {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(text.as_bytes());
                0
            }
            Err(err) => {
                eprintln!("mepack: {err}");
                if let Some(h) = hint(&err) {
                    eprintln!("hint: {h}");
                }
                exit_code(&err)
            }
        },
    }
}
