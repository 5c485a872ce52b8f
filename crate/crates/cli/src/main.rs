use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod target;

use config::{PipelineConfig, CONFIG_ENV};

/// Usage problems detected after argument parsing (missing inputs, bad
/// profile names). Exit code 1 like parse errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "patchforge", version, about = "Security-patch mining and patch-focused fuzzing for JavaScript engines")]
struct Cli {
    /// Pipeline config file (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Engine profile: jsc, v8, sm, ch, jerry, qjs or fake.
    #[arg(long, global = true)]
    profile: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a commit stream and emit per-commit diff statistics.
    Mine(MineArgs),
    /// Score commits and emit security-patch verdicts.
    Classify(ClassifyArgs),
    /// Extract, dry-run and repair PoCs from security patches.
    Extract(ExtractArgs),
    /// Select functions to instrument and compute hot-file statistics.
    Plan(PlanArgs),
    /// Record runtime variable types of corpus files.
    Probe(ProbeArgs),
    /// Run a fuzzing campaign.
    Fuzz(FuzzArgs),
    /// Summarize a campaign directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct MineArgs {
    #[arg(long)]
    pub commits: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub commits: Option<PathBuf>,
    /// Issue tracker export, one JSON object per line.
    #[arg(long)]
    pub issues: Option<PathBuf>,
    /// Keyword list, one per line.
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub commits: Option<PathBuf>,
    /// Verdicts from `classify`; only security commits are used. Without it
    /// every commit is used.
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    /// Repair rules (JSON lines); defaults to the profile's bundled rules.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Corpus directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    /// Security patches (commit stream).
    #[arg(long)]
    pub commits: Option<PathBuf>,
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    /// Engine source tree to extract functions and calls from.
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Call graph TSV (caller, callee); used with --function-index instead of --source.
    #[arg(long)]
    pub call_graph: Option<PathBuf>,
    #[arg(long)]
    pub function_index: Option<PathBuf>,
    /// Source file census, one path per line, for hot-file statistics.
    #[arg(long)]
    pub census: Option<PathBuf>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub allowlist: Option<PathBuf>,
    #[arg(long)]
    pub budget_execs: Option<u64>,
    #[arg(long)]
    pub budget_secs: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub stop_on_crash: bool,
    /// Campaign directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Campaign directory written by `fuzz`.
    pub campaign: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Context {
    pub config: PipelineConfig,
    pub profile: Option<String>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| UsageError(format!("{e:#}")))?,
        None => PipelineConfig::default(),
    };
    let ctx = Context { config, profile: cli.profile };
    match cli.command {
        Command::Mine(a) => commands::mine(&ctx, a),
        Command::Classify(a) => commands::classify(&ctx, a),
        Command::Extract(a) => commands::extract(&ctx, a),
        Command::Plan(a) => commands::plan(&ctx, a),
        Command::Probe(a) => commands::probe(&ctx, a),
        Command::Fuzz(a) => commands::fuzz(&ctx, a),
        Command::Report(a) => commands::report(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                eprintln!("run `patchforge --help` for usage");
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
