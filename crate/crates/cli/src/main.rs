//! `hyperbergman`: systoles, kernel bounds and verification runs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperbergman::config::RunConfig;
use hyperbergman::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(name = "hyperbergman", version, about = "Bergman kernel bounds on hyperbolic Riemann surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for grids and trials.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Only use the cache and vendored fixtures.
    #[arg(long, global = true)]
    pub fixtures_only: bool,
    /// Newform cache directory (default: $HYPERBERGMAN_CACHE, then the config, then `cache`).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RatioPath {
    Det,
    Perm,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Systole and injectivity radius of a group.
    Systole {
        /// `cyclic-test`, `bolza`, `gamma0-N`, or a JSON presentation file.
        #[arg(long)]
        group: String,
        /// Search radius for word enumeration.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Kernel bound report for a radius or a group.
    Bound {
        #[arg(long, conflicts_with = "group", required_unless_present = "group")]
        r: Option<f64>,
        #[arg(long)]
        group: Option<String>,
    },
    /// Bergman kernel against the closed-form bound on a grid.
    #[command(name = "verify-thm21")]
    VerifyThm21 {
        #[arg(long)]
        level: u64,
        /// Minimum number of grid points.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Canonical over hyperbolic volume ratio on random product points.
    #[command(name = "verify-thm32")]
    VerifyThm32 {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum, default_value_t = RatioPath::Det)]
        path: RatioPath,
        /// Repeat the first coordinate in the last slot.
        #[arg(long)]
        duplicate_probe: bool,
    },
    /// Genus, systole and bound per level, plus the family bound.
    Sweep {
        /// Levels, comma separated (default: from the config).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u64>>,
    },
    /// Fetch, validate and cache newform coefficients.
    Fetch {
        #[arg(long, value_delimiter = ',', required = true)]
        level: Vec<u64>,
        /// Allow network access for levels without cache or fixture.
        #[arg(long, conflicts_with = "fixtures_only")]
        network: bool,
    },
}

pub enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &g.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if g.fixtures_only {
        cfg.fixtures_only = true;
    }
    cfg.cache_dir = g
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("HYPERBERGMAN_CACHE").map(PathBuf::from))
        .or(cfg.cache_dir)
        .or_else(|| Some(PathBuf::from("cache")));
    if g.out.is_some() {
        cfg.output_dir = None;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let cfg = load_config(&cli.global)?;
    let sink = output::Sink::new(cli.global.out.clone());
    commands::dispatch(cli.command, cfg, &sink)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            })
        }
    }
}
