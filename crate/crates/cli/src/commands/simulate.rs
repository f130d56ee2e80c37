use std::path::{Path, PathBuf};
use std::time::Instant;

use heavyeig::montecarlo::run_experiment_with_progress;
use heavyeig::{ExperimentConfig, ResultTable};
use log::{info, warn};

use super::ensure_dir;
use crate::config::{digest, from_value, read_json};
use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, RunStatus};
use crate::output::{results_csv, write_atomic};

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    /// Replaces `master_seed` of the configuration.
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct SimulateOutcome {
    pub config: ExperimentConfig,
    pub table: ResultTable,
    pub results_path: PathBuf,
    pub digest: String,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<SimulateOutcome> {
    let mut value = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        match value.as_object_mut() {
            Some(map) => {
                map.insert("master_seed".into(), seed.into());
            }
            None => {
                return Err(CliError::Parse {
                    path: args.config.clone(),
                    message: "configuration must be a JSON object".into(),
                })
            }
        }
    }
    let config_digest = digest(&value);
    let config: ExperimentConfig = from_value(value, &args.config)?;
    let warnings = config.warnings();
    for w in &warnings {
        warn!("{w}");
    }

    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::start("simulate", config_digest.clone(), Some(config.master_seed));
    manifest.warnings = warnings;
    manifest.write(&args.out)?;

    let clock = Instant::now();
    let total = config.n_schedule.len() * config.replications;
    let step = (total / 10).max(1);
    let result = run_experiment_with_progress(&config, |done| {
        if done % step == 0 || done == total {
            info!("{done}/{total} replications");
        }
    });
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.finish(RunStatus::Failed, clock.elapsed().as_secs_f64());
            manifest.write(&args.out)?;
            return Err(CliError::Run(e));
        }
    };
    let results_path = args.out.join("results.csv");
    write_atomic(&results_path, &results_csv(&table))?;
    manifest.outputs.push(file_name(&results_path));
    manifest.finish(RunStatus::Complete, clock.elapsed().as_secs_f64());
    manifest.write(&args.out)?;
    Ok(SimulateOutcome {
        config,
        table,
        results_path,
        digest: config_digest,
    })
}

pub(crate) fn file_name(path: &Path) -> PathBuf {
    path.file_name().map(PathBuf::from).unwrap_or_else(|| path.to_path_buf())
}
