use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heavyeig_cli::commands::{self, CompareArgs, LawSource, SimulateArgs};
use heavyeig_cli::{CliError, CliResult};

/// Monte Carlo experiments on the largest eigenvalues of heavy-tailed sample
/// covariance matrices.
#[derive(Parser)]
#[command(name = "heavyeig", version)]
struct Cli {
    /// Worker threads (changes speed only, never output).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write results.csv and manifest.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides master_seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare a results.csv against the limit law; writes compare.csv and plotdata.csv.
    Compare {
        #[arg(long)]
        results: PathBuf,
        /// Experiment configuration the law is derived from.
        #[arg(long, conflicts_with = "alpha")]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Order statistics to compare (default: all tracked).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        thresholds: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Large-deviation ratio over a grid; writes ldcheck.csv.
    Ldcheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate limit-law quantities on a grid; writes limits.csv.
    Limits {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn out_dir(&self) -> &PathBuf {
        match self {
            Command::Simulate { out, .. }
            | Command::Compare { out, .. }
            | Command::Ldcheck { out, .. }
            | Command::Limits { out, .. } => out,
        }
    }
}

fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Simulate { config, out, seed } => {
            let outcome = commands::simulate(&SimulateArgs {
                config: config.clone(),
                out: out.clone(),
                seed: *seed,
            })?;
            log::info!(
                "wrote {} rows to {} (config digest {})",
                outcome.table.rows.len(),
                outcome.results_path.display(),
                outcome.digest
            );
        }
        Command::Compare {
            results,
            config,
            alpha,
            sigma2,
            k,
            thresholds,
            out,
        } => {
            let law = match (config, alpha) {
                (Some(path), _) => LawSource::Config(path.clone()),
                (None, Some(alpha)) => LawSource::Explicit {
                    alpha: *alpha,
                    sigma2: *sigma2,
                },
                (None, None) => unreachable!("clap requires --config or --alpha"),
            };
            let report = commands::compare(&CompareArgs {
                results: results.clone(),
                law,
                ks: k.clone(),
                thresholds: thresholds.clone(),
                out: out.clone(),
            })?;
            log::info!("compared {} (n, k, x) cells", report.rows.len());
        }
        Command::Ldcheck { config, out } => {
            let rows = commands::ldcheck(config, out)?;
            log::info!("{} grid points, {} flagged", rows.len(), rows.iter().filter(|r| r.flagged).count());
        }
        Command::Limits { config, out } => {
            let rows = commands::limits(config, out)?;
            log::info!("{} limit-law values", rows.len());
        }
    }
    Ok(())
}

fn report(err: &CliError, out: &std::path::Path) {
    let record = err.record();
    let json = serde_json::to_string(&record).expect("error record serializes");
    eprintln!("{json}");
    if out.is_dir() {
        // best effort: the error is already on stderr
        let _ = heavyeig_cli::output::write_atomic(&out.join("error.json"), format!("{json}\n").as_bytes());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not configure {threads} threads: {e}");
        }
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, cli.command.out_dir());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
