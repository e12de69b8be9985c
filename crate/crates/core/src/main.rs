use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trackstat::experiment::{
    self, compare, load_expected, ExperimentConfig, ExperimentError, Filter, OutputFormat, SamplerKind,
};
use trackstat::tracks::{CarriedWeights, TrackError, TrainTrack};

#[derive(Parser)]
#[command(name = "trackstat", version, about = "Sample and classify multicurves carried by a train track")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Curves,
    Primitive,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Cone,
    Lex,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples, classify them and print the distribution of names
    Run {
        #[arg(long)]
        track: PathBuf,
        #[arg(long)]
        length: u64,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        filter: Option<FilterArg>,
        /// Name curves on the closed surface
        #[arg(long)]
        closed: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// CSV of `name,fraction` to test the distribution against
        #[arg(long)]
        expected: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "cone")]
        sampler: SamplerArg,
        #[arg(long, default_value_t = trackstat::surface::DEFAULT_MOVE_BUDGET)]
        move_budget: u64,
    },
    /// Print the number of carried multicurves of length at most L
    Count {
        #[arg(long)]
        track: PathBuf,
        #[arg(long)]
        length: u64,
    },
    /// Print the canonical name of the multicurve with the given branch weights
    Classify {
        #[arg(long)]
        track: PathBuf,
        /// Comma-separated branch weights
        #[arg(long)]
        weights: String,
        #[arg(long)]
        closed: bool,
    },
}

enum Failure {
    Invalid(String),
    Other(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io(_) | ExperimentError::Csv(_) | ExperimentError::Json(_) => Failure::Other(e.to_string()),
            ExperimentError::Track(TrackError::Io { .. }) => Failure::Other(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<TrackError> for Failure {
    fn from(e: TrackError) -> Self {
        ExperimentError::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn load(path: &Path) -> Result<TrainTrack, Failure> {
    let track = TrainTrack::load(path)?;
    let expected = track
        .expected_dimension()
        .map_or_else(|| "unknown".to_string(), |d| d.to_string());
    eprintln!(
        "track {}: {} branches, carried dimension {} (expected {expected})",
        path.display(),
        track.num_branches(),
        track.carried_dimension(),
    );
    Ok(track)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    match cli.command {
        Command::Count { track, length } => {
            let t = load(&track)?;
            let sampler = experiment::Sampler::new(t.into(), length, SamplerKind::Cone)?;
            writeln!(stdout.lock(), "{}", sampler.count())?;
        }
        Command::Classify { track, weights, closed } => {
            let t = load(&track)?;
            let w = weights
                .split(',')
                .map(|x| x.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Invalid(format!("bad weights {weights:?}")))?;
            let coords = t.to_multicurve(&CarriedWeights(w))?;
            let c = experiment::classify(t.base(), &coords, closed || t.is_closed())?;
            writeln!(stdout.lock(), "{}", c.name)?;
        }
        Command::Run {
            track,
            length,
            samples,
            seed,
            filter,
            closed,
            format,
            workers,
            expected,
            sampler,
            move_budget,
        } => {
            let t = load(&track)?;
            let mut config = ExperimentConfig::new(track, length, samples, seed);
            config.filter = match filter {
                None => Filter::None,
                Some(FilterArg::Curves) => Filter::Curves,
                Some(FilterArg::Primitive) => Filter::Primitive,
            };
            config.closed = closed;
            config.format = match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
            config.workers = workers.max(1);
            config.sampler = match sampler {
                SamplerArg::Cone => SamplerKind::Cone,
                SamplerArg::Lex => SamplerKind::Lex,
            };
            config.move_budget = move_budget;
            let expected = expected.map(|p| load_expected(&p)).transpose()?;
            let report = experiment::run_with_track(&config, t)?;
            for e in &report.excluded {
                eprintln!(
                    "warning: sample {} excluded ({}); weights {:?}, coordinates {:?}",
                    e.index, e.error, e.weights, e.coords
                );
            }
            eprintln!(
                "{} drawn, {} retained, {} filtered out, {} excluded; population {}",
                report.drawn, report.retained, report.filtered_out, report.errored, report.population
            );
            let comparison = expected.map(|e| compare(&report.counts, &e)).transpose()?;
            let mut out = stdout.lock();
            match config.format {
                OutputFormat::Csv => {
                    report.write_csv(&mut out)?;
                    if let Some(c) = &comparison {
                        eprintln!("{c}");
                    }
                }
                OutputFormat::Json => writeln!(out, "{}", report.to_json(comparison.as_ref())?)?,
            }
        }
    }
    Ok(())
}
