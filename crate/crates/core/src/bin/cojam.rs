use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cojam::error::Error;
use cojam::geometry::Bounds;
use cojam::harness::output::emit_field_raster;
use cojam::harness::setup::build_scenario;
use cojam::harness::{emit_outputs, run_sweep, ExperimentResult, ResolvedConfig, ScenarioConfig};

const EXIT_RUN_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 74;

/// Cooperative-jamming secrecy simulator with mobile helpers.
#[derive(Debug, Parser)]
#[command(name = "cojam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one helper count over the configured seeds.
    Run(Common),
    /// Sweep helper counts and write rate-vs-step aggregates and plot.
    Sweep(Common),
    /// Dump |α| of the Bob and Eve fading maps for the first seed as CSV.
    DiagField(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario config file; the reference experiment when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// `N` (seeds 1..=N), a list `3,7,9`, or a range `a..b` (inclusive).
    #[arg(long, value_name = "SEEDS")]
    seeds: Option<String>,
    /// Motion steps per run.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    /// Helper counts: `4`, `1,2,4,6` or `1..6`. `run` takes a single count.
    #[arg(long, value_name = "LIST")]
    helpers: Option<String>,
    /// Worker threads; all cores when omitted.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Sim(#[from] Error),
    #[error("{0} run(s) failed; see failures.csv")]
    Failed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_CONFIG,
            CliError::Sim(Error::Config(_) | Error::InvalidParameter(_)) => EXIT_CONFIG,
            CliError::Sim(Error::Io { .. }) => EXIT_IO,
            CliError::Sim(_) | CliError::Failed(_) => EXIT_RUN_FAILURE,
        }
    }
}

/// Parses `a..b` (inclusive) or a comma list. A single number is returned as is.
fn parse_list(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse list `{text}`"));
    let text = text.trim();
    let values: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    match text.trim().parse::<u64>() {
        Ok(0) => Err(CliError::Usage("--seeds must be at least 1".into())),
        Ok(n) => Ok((1..=n).collect()),
        Err(_) => parse_list(text),
    }
}

fn parse_counts(text: &str) -> Result<Vec<usize>, CliError> {
    parse_list(text)?
        .into_iter()
        .map(|v| {
            usize::try_from(v).map_err(|_| CliError::Usage(format!("helper count {v} too large")))
        })
        .collect()
}

fn load_config(args: &Common) -> Result<ResolvedConfig, CliError> {
    let file = match &args.config {
        Some(path) => ScenarioConfig::load(path).map_err(|e| match e {
            Error::Io { .. } => CliError::Usage(e.to_string()),
            e => CliError::Sim(e),
        })?,
        None => ScenarioConfig::default(),
    };
    let mut config = file.resolve()?;
    if let Some(seeds) = &args.seeds {
        config.seeds = parse_seeds(seeds)?;
    }
    if let Some(steps) = args.steps {
        config.steps = steps;
    }
    if let Some(helpers) = &args.helpers {
        config.helper_counts = parse_counts(helpers)?;
    }
    config.validate()?;
    Ok(config)
}

fn report(result: &ExperimentResult) {
    for &count in &result.helper_counts {
        let rows = result.aggregate_for(count);
        if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
            println!(
                "helpers={count} median rate: step 0 {:.4} bits, step {} {:.4} bits (R_sup {:.4})",
                first.median_rate, last.step, last.median_rate, last.r_sup
            );
        }
    }
    for cell in result.failures() {
        if let Err(msg) = &cell.outcome {
            eprintln!(
                "helpers={} seed={} failed: {msg}",
                cell.helper_count, cell.seed
            );
        }
    }
}

fn experiment(args: &Common, single: bool) -> Result<(), CliError> {
    let mut config = load_config(args)?;
    let counts = if single {
        let count = match &args.helpers {
            Some(_) if config.helper_counts.len() != 1 => {
                return Err(CliError::Usage("`run` takes a single helper count".into()))
            }
            Some(_) => config.helper_counts[0],
            None => config.helper_count,
        };
        config.helper_count = count;
        vec![count]
    } else {
        config.helper_counts.clone()
    };
    let result = run_sweep(&config, &counts)?;
    report(&result);
    for path in emit_outputs(&result, &args.out)? {
        println!("wrote {}", path.display());
    }
    match result.failures().count() {
        0 => Ok(()),
        n => Err(CliError::Failed(n)),
    }
}

fn diag_field(args: &Common) -> Result<(), CliError> {
    let config = load_config(args)?;
    let scenario = build_scenario(&config, config.seeds[0])?;
    let region = Bounds::from_size(config.plane_width, config.plane_height)?;
    let path = emit_field_raster(
        &scenario.field,
        &region,
        config.wavelength / 20.0,
        &args.out,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let args = match &cli.command {
        Command::Run(a) | Command::Sweep(a) | Command::DiagField(a) => a,
    };
    let task = || match &cli.command {
        Command::Run(a) => experiment(a, true),
        Command::Sweep(a) => experiment(a, false),
        Command::DiagField(a) => diag_field(a),
    };
    match args.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(task),
        None => task(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_forms() {
        assert_eq!(parse_seeds("3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("4,9").unwrap(), vec![4, 9]);
        assert_eq!(parse_seeds("5..7").unwrap(), vec![5, 6, 7]);
        assert!(parse_seeds("0").is_err());
        assert!(parse_seeds("7..5").is_err());
        assert!(parse_seeds("a").is_err());
    }

    #[test]
    fn count_forms() {
        assert_eq!(parse_counts("6").unwrap(), vec![6]);
        assert_eq!(parse_counts("1,2,4,6").unwrap(), vec![1, 2, 4, 6]);
        assert_eq!(parse_counts("1..3").unwrap(), vec![1, 2, 3]);
    }
}
