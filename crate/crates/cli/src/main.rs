//! `lamperti-lab`: simulation and verification experiments for scaled
//! Lamperti transforms of sub- and bi-fractional Brownian motion.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::Value;

use config::{key, FileConfig, Key, Kind, Settings, COMMON};
use error::{CliError, CliResult};

const AFTER_HELP: &str = "\
Every option can also be given in a config file (`key = value` per line, `#` \
starts a comment; keys use underscores, e.g. t_end for --t-end). A manifest.json \
written by an earlier run is accepted as a config file and reproduces that run. \
Flags override the file.

Defaults are desk scale: n = 2048, M = 500, seed = 42. Dense exact sampling is \
O(n^3), so grids of 10^5 points are out of reach; the ergodic command uses an \
O(n^2) stationary sampler instead.

Exit codes: 0 success, 2 usage or invalid parameters, 3 numerical failure, 4 I/O.";

#[derive(Parser, Debug)]
#[command(name = "lamperti-lab", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Master seed of the random substreams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true, env = "LAMPERTI_LAB_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Config file or manifest of a previous run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample raw paths of X(t^alpha) on a geometric grid with their Lamperti transforms.
    Simulate(ModelArgs),
    /// Empirical autocovariance of the Lamperti image against the closed form.
    Acf(AcfArgs),
    /// Time averages and characteristic function of one long stationary path.
    Ergodic(ErgodicArgs),
    /// Quadrature autocovariance of the Lamperti image of the Langevin-type process.
    Langevin(LangevinArgs),
    /// Closed-form mixing rates against fitted decay rates.
    Rates(RatesArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// `sub` or `bi`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "H")]
    h: Option<f64>,
    /// Bi-fractional exponent (bi family only).
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Grid points.
    #[arg(long)]
    n: Option<u64>,
    /// Number of paths.
    #[arg(long = "M")]
    m: Option<u64>,
    /// End of the latent time axis (the grid is t = e^u, u in [0, t_end]).
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct AcfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Largest lag in latent time.
    #[arg(long)]
    lag_max: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ErgodicArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    /// Length of the stationary path.
    #[arg(long)]
    t_end: Option<f64>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    k_grid: Option<String>,
    /// Row spacing of the running-moment table.
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct LangevinArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Normalisation constant c.
    #[arg(long)]
    c_norm: Option<f64>,
    /// Choose c so that Var at time 1 matches the driver.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    lag_max: Option<f64>,
    /// Number of tabulated lags on [0, lag_max].
    #[arg(long)]
    lags: Option<u64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    fit_lo: Option<f64>,
    #[arg(long)]
    fit_hi: Option<f64>,
    /// Compare against the driver covariance at alpha = 1 on a 5x5 grid.
    #[arg(long)]
    check_oracle: bool,
}

#[derive(Args, Debug, Clone)]
struct RatesArgs {
    /// Without H a default parameter sweep is run.
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

type Flags = Vec<(&'static str, Option<Value>)>;

fn flag<T: Into<Value>>(name: &'static str, v: Option<T>) -> (&'static str, Option<Value>) {
    (name, v.map(Into::into))
}

/// Boolean switches only override when present.
fn switch(name: &'static str, on: bool) -> (&'static str, Option<Value>) {
    (name, on.then_some(Value::Bool(true)))
}

const MODEL_KEYS: [Key; 4] = [
    key("family", Kind::Str, Some("sub")),
    key("H", Kind::Float, None),
    key("K", Kind::Float, None),
    key("alpha", Kind::Float, Some("1")),
];

impl ModelArgs {
    fn flags(&self) -> Flags {
        vec![
            flag("family", self.family.clone()),
            flag("H", self.h),
            flag("K", self.k),
            flag("alpha", self.alpha),
            flag("n", self.n),
            flag("M", self.m),
            flag("t_end", self.t_end),
        ]
    }
}

fn keys(extra: &[Key]) -> Vec<Key> {
    COMMON.iter().chain(MODEL_KEYS.iter()).chain(extra).copied().collect()
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Acf(_) => "acf",
            Command::Ergodic(_) => "ergodic",
            Command::Langevin(_) => "langevin",
            Command::Rates(_) => "rates",
        }
    }

    fn keys(&self) -> Vec<Key> {
        match self {
            Command::Simulate(_) => keys(&[
                key("n", Kind::Int, Some("2048")),
                key("M", Kind::Int, Some("500")),
                key("t_end", Kind::Float, Some("10")),
            ]),
            Command::Acf(_) => keys(&[
                key("n", Kind::Int, Some("1024")),
                key("M", Kind::Int, Some("500")),
                key("t_end", Kind::Float, Some("10")),
                key("lag_max", Kind::Float, Some("2")),
            ]),
            Command::Ergodic(_) => keys(&[
                key("n", Kind::Int, Some("10001")),
                key("t_end", Kind::Float, Some("100")),
                key("k_grid", Kind::Str, Some("-4:4:0.1")),
                key("stride", Kind::Int, Some("10")),
            ]),
            Command::Langevin(_) => keys(&[
                key("c_norm", Kind::Float, Some("1")),
                key("normalize", Kind::Bool, Some("false")),
                key("lag_max", Kind::Float, Some("8")),
                key("lags", Kind::Int, Some("33")),
                key("rel_tol", Kind::Float, Some("1e-6")),
                key("fit_lo", Kind::Float, Some("2")),
                key("fit_hi", Kind::Float, Some("8")),
                key("check_oracle", Kind::Bool, Some("false")),
            ]),
            Command::Rates(_) => COMMON
                .iter()
                .copied()
                .chain([key("H", Kind::Float, None), key("K", Kind::Float, None), key("alpha", Kind::Float, None)])
                .collect(),
        }
    }

    fn flags(&self) -> Flags {
        match self {
            Command::Simulate(a) => a.flags(),
            Command::Acf(a) => {
                let mut f = a.model.flags();
                f.push(flag("lag_max", a.lag_max));
                f
            }
            Command::Ergodic(a) => vec![
                flag("family", a.family.clone()),
                flag("H", a.h),
                flag("K", a.k),
                flag("alpha", a.alpha),
                flag("n", a.n),
                flag("t_end", a.t_end),
                flag("k_grid", a.k_grid.clone()),
                flag("stride", a.stride),
            ],
            Command::Langevin(a) => vec![
                flag("family", a.family.clone()),
                flag("H", a.h),
                flag("K", a.k),
                flag("alpha", a.alpha),
                flag("c_norm", a.c_norm),
                switch("normalize", a.normalize),
                flag("lag_max", a.lag_max),
                flag("lags", a.lags),
                flag("rel_tol", a.rel_tol),
                flag("fit_lo", a.fit_lo),
                flag("fit_hi", a.fit_hi),
                switch("check_oracle", a.check_oracle),
            ],
            Command::Rates(a) => vec![flag("H", a.h), flag("K", a.k), flag("alpha", a.alpha)],
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure thread pool: {e}")))?;
    }
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &file.command {
        if c != name {
            return Err(CliError::usage(format!("manifest was written by `{c}`, not `{name}`")));
        }
    }
    let mut flags = cli.command.flags();
    flags.push(flag("seed", cli.seed));
    flags.push(flag("output_dir", cli.out.as_ref().map(|p| p.display().to_string())));
    let settings = Settings::resolve(&cli.command.keys(), &file, flags)?;
    match cli.command {
        Command::Simulate(_) => commands::simulate(settings),
        Command::Acf(_) => commands::acf(settings),
        Command::Ergodic(_) => commands::ergodic(settings),
        Command::Langevin(_) => commands::langevin(settings),
        Command::Rates(_) => commands::rates(settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
