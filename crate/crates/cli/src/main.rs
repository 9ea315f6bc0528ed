use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lingcx::run::{parse_stages, run, unknown_env_keys, RunConfig, RunError, Stage, DEFAULT_SEED};
use lingcx::stats::{DEFAULT_ITERATIONS, DEFAULT_LEVEL};

/// Linguistic complexity of scientific articles against citation impact.
///
/// Every option can also be set through a `LINGCX_*` environment variable
/// (for example `LINGCX_SEED`). Command-line flags take precedence over the
/// environment, which takes precedence over built-in defaults.
#[derive(Parser, Debug)]
#[command(name = "lingcx", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse article XML into corpus.jsonl.
    Ingest(Common),
    /// Segment, tokenize and tag the corpus into tagged.tsv.
    Tag(Common),
    /// Compute the twelve complexity variables into profiles.csv.
    Profile(Common),
    /// Normalize citation counts into normalized.csv.
    Normalize(Common),
    /// Assign impact groups into scores.csv.
    Group(Common),
    /// KS tests, ECDF points and bootstrap intervals per group.
    Compare(Common),
    /// Fit the six regression models for every cohort.
    Regress(Common),
    /// Run a sequence of stages (all by default).
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated stage list, e.g. `profile,group,compare`.
        #[arg(long, env = "LINGCX_STAGES")]
        stages: Option<String>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Directory of article XML files.
    #[arg(long, env = "LINGCX_INPUT")]
    input: Option<PathBuf>,
    /// CSV of doc_id, year, domain, total_citations.
    #[arg(long, env = "LINGCX_CITATIONS")]
    citations: Option<PathBuf>,
    /// Precomputed baselines (year, domain, adc, n) instead of computing them.
    #[arg(long, env = "LINGCX_BASELINES")]
    baselines: Option<PathBuf>,
    /// Output directory for all stage files.
    #[arg(long, env = "LINGCX_OUT", default_value = "out")]
    out: PathBuf,
    /// Root seed for the bootstrap.
    #[arg(long, env = "LINGCX_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Bootstrap resamples per estimate.
    #[arg(long, env = "LINGCX_ITERATIONS", default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    /// Confidence level of the bootstrap intervals.
    #[arg(long, env = "LINGCX_LEVEL", default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Abbreviation table (key TAB expansion).
    #[arg(long, env = "LINGCX_ABBREV")]
    abbrev: Option<PathBuf>,
    /// Directory of externally tagged files to use at the tag stage.
    #[arg(long = "import-tagged", env = "LINGCX_IMPORT_TAGGED")]
    import_tagged: Option<PathBuf>,
}

impl Common {
    fn into_config(self, stages: Vec<Stage>) -> RunConfig {
        RunConfig {
            input: self.input,
            citations: self.citations,
            baselines: self.baselines,
            abbrev: self.abbrev,
            import_tagged: self.import_tagged,
            out: self.out,
            seed: self.seed,
            iterations: self.iterations,
            level: self.level,
            stages,
        }
    }
}

fn config_from(command: Command) -> Result<RunConfig, String> {
    let (common, stages) = match command {
        Command::Ingest(c) => (c, vec![Stage::Ingest]),
        Command::Tag(c) => (c, vec![Stage::Tag]),
        Command::Profile(c) => (c, vec![Stage::Profile]),
        Command::Normalize(c) => (c, vec![Stage::Normalize]),
        Command::Group(c) => (c, vec![Stage::Group]),
        Command::Compare(c) => (c, vec![Stage::Compare]),
        Command::Regress(c) => (c, vec![Stage::Regress]),
        Command::Run { common, stages } => {
            let stages = match stages {
                Some(list) => parse_stages(&list)?,
                None => Stage::ALL.to_vec(),
            };
            if stages.is_empty() {
                return Err("--stages names no stage".into());
            }
            (common, stages)
        }
    };
    Ok(common.into_config(stages))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();

    let unknown = unknown_env_keys(std::env::vars_os().filter_map(|(k, _)| k.into_string().ok()));
    if !unknown.is_empty() {
        eprintln!("error: unknown environment variable(s): {}", unknown.join(", "));
        return ExitCode::from(2);
    }

    let cli = Cli::parse();
    let config = match config_from(cli.command) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    log::debug!("config hash {}", config.config_hash());

    match run(&config) {
        Ok(summary) => {
            for path in &summary.written {
                log::info!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            report(&err);
            ExitCode::FAILURE
        }
    }
}

fn report(err: &RunError) {
    log::error!("{err}");
    eprint!("{}", err.to_json());
}
