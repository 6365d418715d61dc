//! `redist-tda`: batch driver for ensemble generation, persistence diagrams and
//! the downstream analyses.

mod commands;
mod progress;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use redist_tda::chains::Party;
use redist_tda::io::{ExperimentConfig, IoError};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "redist-tda",
    version,
    about = "Topological analysis of districting ensembles"
)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed; overrides the config's `rng_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a ReCom or flip chain and write the retained plans.
    Ensemble {
        /// Bias the chain toward safe seats for this party, using `--election`.
        #[arg(long, value_parser = parse_party)]
        favor: Option<Party>,
        #[arg(long)]
        election: Option<String>,
    },
    /// Persistence diagram of every plan of an ensemble.
    Persist {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        election: Option<String>,
    },
    /// Wasserstein matching of two diagrams, or the distance matrix of a diagram directory.
    Wasserstein {
        #[arg(long, requires = "b", conflicts_with = "diagrams")]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        diagrams: Option<PathBuf>,
        /// Order `p >= 1`, or `inf` for the bottleneck distance.
        #[arg(long, default_value = "2")]
        p: f64,
    },
    /// Fréchet mean of a diagram directory.
    Frechet {
        #[arg(long)]
        diagrams: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Marking, localization heat maps and zoning of an ensemble.
    Zoning {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        election: Option<String>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Compare the Fréchet means of two elections on one ensemble.
    CompareElections {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long = "election-a")]
        election_a: String,
        #[arg(long = "election-b")]
        election_b: String,
        /// `optimal-l2` or `geographic`; defaults to the config's matching mode.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<redist_tda::analysis::MatchingMode>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Compare a Democratic-favoring with a Republican-favoring ensemble.
    CompareBiased {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        election: Option<String>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Stability experiments.
    Stability {
        #[command(subcommand)]
        mode: StabilityMode,
    },
    /// Generate a synthetic grid state.
    Synth {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// City as `row,col,radius,dem_intensity`; repeatable.
        #[arg(long = "city", value_parser = parse_city)]
        cities: Vec<redist_tda::synth::City>,
        #[arg(long)]
        base_dem_share: Option<f64>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct AnalysisArgs {
    /// Minimum persistence of a mean point to count as a feature.
    #[arg(long)]
    min_persistence: Option<f64>,
    /// Number of Fréchet seeds, or `all`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<Seeds>,
}

#[derive(Debug, Clone, Copy)]
enum Seeds {
    All,
    Count(usize),
}

#[derive(Subcommand, Debug)]
enum StabilityMode {
    /// Random vote perturbations on random district graphs.
    VoteCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        max_k: usize,
        #[arg(long, default_value_t = 0.1)]
        max_shift: f64,
    },
    /// Geographic bound on every qualifying step of a flip chain.
    Geo {
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long)]
        election: Option<String>,
    },
    /// Bottleneck distance to the start after each flip.
    FlipTrace {
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        election: Option<String>,
    },
    /// Flip drift from several ensemble plans against their mutual distances.
    Drift {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 1000)]
        flips: usize,
        /// Population tolerance for the flips (defaults to the ensemble's).
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        election: Option<String>,
    },
    /// Fraction of ReCom steps that keep the district graph.
    Preservation {
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
}

fn parse_party(s: &str) -> Result<Party, String> {
    match s.to_ascii_lowercase().as_str() {
        "democratic" | "dem" | "d" => Ok(Party::Democratic),
        "republican" | "rep" | "r" => Ok(Party::Republican),
        _ => Err(format!("unknown party {s:?} (democratic|republican)")),
    }
}

fn parse_mode(s: &str) -> Result<redist_tda::analysis::MatchingMode, String> {
    use redist_tda::analysis::MatchingMode;
    match s {
        "optimal-l2" | "optimal_l2" | "l2" => Ok(MatchingMode::OptimalL2),
        "geographic" => Ok(MatchingMode::Geographic),
        _ => Err(format!("unknown matching mode {s:?} (optimal-l2|geographic)")),
    }
}

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    if s == "all" {
        return Ok(Seeds::All);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Seeds::Count(n)),
        _ => Err(format!("expected a positive count or `all`, got {s:?}")),
    }
}

fn parse_city(s: &str) -> Result<redist_tda::synth::City, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [row, col, radius, intensity] = parts.as_slice() else {
        return Err(format!("expected row,col,radius,dem_intensity, got {s:?}"));
    };
    let bad = |what: &str| format!("bad {what} in city {s:?}");
    Ok(redist_tda::synth::City {
        row: row.parse().map_err(|_| bad("row"))?,
        col: col.parse().map_err(|_| bad("col"))?,
        radius: radius.parse().map_err(|_| bad("radius"))?,
        dem_intensity: intensity.parse().map_err(|_| bad("dem_intensity"))?,
    })
}

/// Invalid or missing configuration; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn is_config_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<ConfigError>()
            || matches!(e.downcast_ref::<IoError>(), Some(IoError::Config(_)))
            || matches!(
                e.downcast_ref::<redist_tda::graph::GraphError>(),
                Some(redist_tda::graph::GraphError::MissingAttribute(_))
            )
    })
}

/// Settings shared by every subcommand after merging flags into the config.
pub struct Context {
    pub config: Option<ExperimentConfig>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Context {
    pub fn config(&self) -> Result<&ExperimentConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| ConfigError("this command needs --config".into()).into())
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("cannot start {n} threads: {e}")))?;
    }
    let mut config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    if let (Some(cfg), Some(seed)) = (config.as_mut(), cli.seed) {
        cfg.rng_seed = seed;
    }
    let ctx = Context {
        seed: cli.seed.or(config.as_ref().map(|c| c.rng_seed)).unwrap_or(0),
        out: cli
            .out
            .or_else(|| config.as_ref().map(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("out")),
        config,
    };
    match cli.command {
        Command::Ensemble { favor, election } => commands::ensemble(&ctx, favor, election.as_deref()),
        Command::Persist { ensemble, election } => commands::persist(&ctx, &ensemble, election.as_deref()),
        Command::Wasserstein { a, b, diagrams, p } => commands::wasserstein(&ctx, a, b, diagrams, p),
        Command::Frechet { diagrams, analysis } => commands::frechet(&ctx, &diagrams, &analysis),
        Command::Zoning {
            ensemble,
            election,
            analysis,
        } => commands::zoning(&ctx, &ensemble, election.as_deref(), &analysis),
        Command::CompareElections {
            ensemble,
            election_a,
            election_b,
            mode,
            analysis,
        } => commands::compare_elections(&ctx, &ensemble, &election_a, &election_b, mode, &analysis),
        Command::CompareBiased {
            dem,
            rep,
            election,
            analysis,
        } => commands::compare_biased(&ctx, &dem, &rep, election.as_deref(), &analysis),
        Command::Stability { mode } => commands::stability(&ctx, mode),
        Command::Synth {
            rows,
            cols,
            cities,
            base_dem_share,
            noise,
        } => commands::synth(&ctx, rows, cols, &cities, base_dem_share, noise),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let config = is_config_error(&err);
            let record = json!({
                "error": {
                    "kind": if config { "config" } else { "runtime" },
                    "message": err.to_string(),
                    "causes": err.chain().skip(1).map(|e| e.to_string()).collect::<Vec<_>>(),
                }
            });
            eprintln!("{record}");
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
