//! `scrank` command-line tool: generate planted instances, score graphs, run
//! experiments, and drive monotone-update systems.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    NotConverged = 2,
    InvalidInput = 3,
    IoError = 4,
}

#[derive(Parser, Debug)]
#[command(
    name = "scrank",
    version,
    about = "Celebrity and spammer scores for directed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random graph with planted celebrities and spammers.
    Generate {
        /// Output directory for graph.txt, truth.txt and manifest.txt.
        #[arg(long)]
        out: PathBuf,
        /// Print expected statistics and the memory estimate without generating.
        #[arg(long = "dry_run")]
        dry_run: bool,
        #[command(flatten)]
        params: Params,
    },
    /// Score every node of an edge list.
    Rank {
        #[arg(long)]
        graph: PathBuf,
        /// Output directory for scores.tsv, trace.csv and manifest.txt.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Run an experiment and write its report.
    Eval {
        #[arg(long, value_enum)]
        experiment: commands::Experiment,
        /// Edge list to score (required unless --scores is given).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Precomputed scores.tsv, used by pr and hist instead of scoring.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Planted truth file.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Comma-separated celebrity thresholds for the sweep.
        #[arg(long = "mu_c_grid", value_delimiter = ',')]
        mu_c_grid: Vec<f64>,
        /// Comma-separated spammer thresholds for the sweep.
        #[arg(long = "mu_s_grid", value_delimiter = ',')]
        mu_s_grid: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Run a monotone-update system and write its step trace.
    Muesli {
        /// System definition file.
        #[arg(long, conflicts_with = "builtin")]
        system: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<commands::Builtin>,
        /// round-robin, random, bursts:<k>, or a comma-separated cycle.
        #[arg(long, default_value = "round-robin")]
        activation: String,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long = "max_steps", default_value_t = 1_000_000)]
        max_steps: u64,
        /// Sigmoid steepness for the builtin systems.
        #[arg(long, default_value_t = 20.0)]
        steepness: f64,
        /// Output directory for run.csv and manifest.txt.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: Params,
    },
}

/// Parameters shared by every subcommand. Flag names match the config keys.
#[derive(Args, Debug, Default)]
struct Params {
    /// File of key=value lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "mu_c")]
    mu_c: Option<String>,
    #[arg(long = "sigma_c")]
    sigma_c: Option<String>,
    #[arg(long = "mu_s")]
    mu_s: Option<String>,
    #[arg(long = "sigma_s")]
    sigma_s: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "max_iters")]
    max_iters: Option<String>,
    /// 0, 1, a constant in [0, 1], or rand.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    #[arg(long = "burn_in")]
    burn_in: Option<String>,
    /// desk, paper-2M, or crawl-like.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "n_c")]
    n_c: Option<String>,
    #[arg(long = "n_s")]
    n_s: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "p_c")]
    p_c: Option<String>,
    #[arg(long = "p_s")]
    p_s: Option<String>,
    /// chung-lu or erdos-renyi.
    #[arg(long = "h_model")]
    h_model: Option<String>,
    #[arg(long)]
    exponent: Option<String>,
    #[arg(long = "avg_degree")]
    avg_degree: Option<String>,
    #[arg(long = "er_prob")]
    er_prob: Option<String>,
}

impl Params {
    fn flags(&self) -> [(&'static str, &Option<String>); 23] {
        [
            ("mu_c", &self.mu_c),
            ("sigma_c", &self.sigma_c),
            ("mu_s", &self.mu_s),
            ("sigma_s", &self.sigma_s),
            ("epsilon", &self.epsilon),
            ("max_iters", &self.max_iters),
            ("init", &self.init),
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("threshold", &self.threshold),
            ("bins", &self.bins),
            ("burn_in", &self.burn_in),
            ("preset", &self.preset),
            ("n", &self.n),
            ("n_c", &self.n_c),
            ("n_s", &self.n_s),
            ("p", &self.p),
            ("p_c", &self.p_c),
            ("p_s", &self.p_s),
            ("h_model", &self.h_model),
            ("exponent", &self.exponent),
            ("avg_degree", &self.avg_degree),
            ("er_prob", &self.er_prob),
        ]
    }

    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> scrank::Result<scrank::RunConfig> {
        let mut cfg = scrank::RunConfig::default();
        if let Some(path) = &self.config {
            cfg.load(path)?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn classify(err: &anyhow::Error) -> Status {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<scrank::Error>() {
            return match e {
                scrank::Error::Io { .. } => Status::IoError,
                _ => Status::InvalidInput,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return Status::IoError;
        }
    }
    Status::InvalidInput
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate {
            out,
            dry_run,
            params,
        } => params
            .resolve()
            .map_err(Into::into)
            .and_then(|cfg| commands::generate(&cfg, out, *dry_run)),
        Command::Rank { graph, out, params } => params
            .resolve()
            .map_err(Into::into)
            .and_then(|cfg| commands::rank(&cfg, graph, out)),
        Command::Eval {
            experiment,
            graph,
            scores,
            truth,
            mu_c_grid,
            mu_s_grid,
            out,
            params,
        } => params.resolve().map_err(Into::into).and_then(|cfg| {
            let inputs = commands::EvalInputs {
                graph: graph.as_deref(),
                scores: scores.as_deref(),
                truth: truth.as_deref(),
                mu_c_grid,
                mu_s_grid,
            };
            commands::eval(&cfg, *experiment, &inputs, out)
        }),
        Command::Muesli {
            system,
            builtin,
            activation,
            eps,
            max_steps,
            steepness,
            out,
            params,
        } => params.resolve().map_err(Into::into).and_then(|cfg| {
            let run = commands::MuesliRun {
                system: system.as_deref(),
                builtin: *builtin,
                activation,
                eps: *eps,
                max_steps: *max_steps,
                steepness: *steepness,
            };
            commands::muesli(&cfg, &run, out)
        }),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err) as u8)
        }
    }
}
