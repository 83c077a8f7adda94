//! `freeconv`: free convolutions, random-matrix experiments and free entropy
//! from the command line. Exit codes: 0 success, 1 failed Fock check, 2 usage
//! or config error, 3 numeric divergence.

mod config;
mod convolve;
mod entropy;
mod error;
mod experiment;
mod fock_check;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freeconv::analytic::EntropyOptions;
use freeconv::rmt::Experiment;

use config::Config;
use convolve::Kind;
use error::CliError;
use spec::DistSpec;

#[derive(Parser)]
#[command(name = "freeconv", version, about = "Free additive and multiplicative convolution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moments of A ⊞ B or A ⊠ B, written to moments.json.
    Convolve {
        kind: Kind,
        a: String,
        b: String,
        /// Truncation order K.
        #[arg(long)]
        order: Option<usize>,
        /// Also solve for the density and write density.csv.
        #[arg(long)]
        density: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a named Monte Carlo experiment and write its report files.
    Experiment {
        name: String,
        /// Matrix size N.
        #[arg(long)]
        n: Option<usize>,
        /// Wishart shape ratio.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Variance profile σ² as an n×n CSV matrix (band).
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Diagonal profile f as n CSV values (band).
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        bin_width: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Free entropy of a `t,density` CSV file.
    Entropy {
        file: PathBuf,
        /// Nodes of the quantile-space scheme.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Compare Fock-space realizations with the combinatorial engine.
    FockCheck,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("FREECONV_THREADS") else {
        return Ok(());
    };
    let threads = value
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("FREECONV_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(e.to_string()))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Convolve { kind, a, b, order, density, eps, grid_points, out, config } => {
            let mut cfg = Config::load(config.as_deref())?;
            cfg.order = order.unwrap_or(cfg.order);
            cfg.density |= density;
            cfg.epsilon = eps.unwrap_or(cfg.epsilon);
            cfg.grid_points = grid_points.unwrap_or(cfg.grid_points);
            cfg.out = out.unwrap_or(cfg.out);
            if !(cfg.epsilon > 0.0) || cfg.grid_points < 2 {
                return Err(CliError::usage("epsilon must be positive and the grid needs at least 2 points"));
            }
            convolve::run(kind, &DistSpec::parse(&a)?, &DistSpec::parse(&b)?, &cfg)
        }
        Command::Experiment {
            name,
            n,
            lambda,
            seed,
            seeds,
            sizes,
            kernel,
            f,
            bin_width,
            tolerance,
            out,
            config,
        } => {
            let experiment: Experiment = name.parse()?;
            let mut cfg = Config::load(config.as_deref())?;
            cfg.out = out.unwrap_or(cfg.out);
            let e = &mut cfg.experiment;
            e.size = n.unwrap_or(e.size);
            e.ratio = lambda.unwrap_or(e.ratio);
            e.seed = seed.unwrap_or(e.seed);
            e.seeds = seeds.or(e.seeds);
            e.sizes = sizes.unwrap_or(std::mem::take(&mut e.sizes));
            e.bin_width = bin_width.or(e.bin_width);
            e.tolerance = tolerance.or(e.tolerance);
            match (kernel, f) {
                (Some(kernel), f) => {
                    if experiment != Experiment::Band {
                        return Err(CliError::usage("--kernel applies only to the band experiment"));
                    }
                    e.band = Some(experiment::band_model(&kernel, f.as_deref())?);
                }
                (None, Some(_)) => return Err(CliError::usage("--f needs --kernel")),
                (None, None) => {}
            }
            experiment::execute(experiment, &cfg)
        }
        Command::Entropy { file, nodes } => {
            let mut opts = EntropyOptions::default();
            opts.quantile_nodes = nodes.unwrap_or(opts.quantile_nodes);
            entropy::run(&file, &opts)
        }
        Command::FockCheck => fock_check::run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
