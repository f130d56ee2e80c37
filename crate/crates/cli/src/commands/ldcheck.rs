use std::path::Path;

use heavyeig::montecarlo::large_deviation_ratio;
use heavyeig::{Error, TailModel};
use log::warn;
use serde::{Deserialize, Serialize};

use super::{classify, ensure_dir, simulate::file_name};
use crate::config::{digest, from_value, read_json};
use crate::error::CliResult;
use crate::manifest::{RunManifest, RunStatus};
use crate::output::{real, write_atomic, CsvDoc, LDCHECK_SCHEMA};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdPoint {
    pub n: usize,
    pub x_n: f64,
    #[serde(default)]
    pub y_n: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdConfig {
    pub tail: TailModel,
    pub replications: usize,
    pub seed: u64,
    pub grid: Vec<LdPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdRow {
    pub n: usize,
    pub x_n: f64,
    pub y_n: f64,
    pub b_n: f64,
    pub denominator: f64,
    pub hits: u64,
    pub ratio: f64,
    pub std_error: f64,
    /// Fewer hits than the reliability floor.
    pub flagged: bool,
}

pub fn ldcheck(config_path: &Path, out: &Path) -> CliResult<Vec<LdRow>> {
    let value = read_json(config_path)?;
    let config_digest = digest(&value);
    let cfg: LdConfig = from_value(value, config_path)?;
    ensure_dir(out)?;
    let mut manifest = RunManifest::start("ldcheck", config_digest, Some(cfg.seed));
    manifest.write(out)?;
    let clock = std::time::Instant::now();

    let mut rows = Vec::new();
    for (i, pt) in cfg.grid.iter().enumerate() {
        // each grid point gets its own stream
        let seed = heavyeig::seed::derive(cfg.seed, &[i as u64]);
        let row = match large_deviation_ratio(&cfg.tail, pt.n, pt.x_n, pt.y_n, cfg.replications, seed) {
            Ok(est) => LdRow {
                n: pt.n,
                x_n: pt.x_n,
                y_n: pt.y_n,
                b_n: est.b_n,
                denominator: est.denominator,
                hits: est.hits,
                ratio: est.ratio,
                std_error: est.std_error,
                flagged: false,
            },
            Err(Error::InsufficientHits { hits, estimate, .. }) => {
                warn!("grid point {i}: only {hits} hits, estimate flagged");
                let a = cfg.tail.norming_constant(pt.n as f64).map_err(classify)?;
                let b_n = a * a;
                let denominator = pt.n as f64 * cfg.tail.survival((b_n * pt.x_n.max(pt.y_n)).sqrt());
                let phat = hits as f64 / cfg.replications as f64;
                LdRow {
                    n: pt.n,
                    x_n: pt.x_n,
                    y_n: pt.y_n,
                    b_n,
                    denominator,
                    hits,
                    ratio: estimate,
                    std_error: (phat * (1.0 - phat) / cfg.replications as f64).sqrt() / denominator,
                    flagged: true,
                }
            }
            Err(e) => {
                let err = classify(e);
                manifest.error = Some(err.to_string());
                manifest.finish(RunStatus::Failed, clock.elapsed().as_secs_f64());
                manifest.write(out)?;
                return Err(err);
            }
        };
        rows.push(row);
    }

    let header = [
        "n", "x_n", "y_n", "b_n", "denominator", "replications", "hits", "ratio", "std_error", "flagged",
    ]
    .map(String::from);
    let mut doc = CsvDoc::new(LDCHECK_SCHEMA, &header);
    for r in &rows {
        doc.row(&[
            r.n.to_string(),
            real(r.x_n),
            real(r.y_n),
            real(r.b_n),
            real(r.denominator),
            cfg.replications.to_string(),
            r.hits.to_string(),
            real(r.ratio),
            real(r.std_error),
            r.flagged.to_string(),
        ]);
    }
    let path = out.join("ldcheck.csv");
    write_atomic(&path, &doc.into_bytes())?;
    manifest.outputs.push(file_name(&path));
    manifest.finish(RunStatus::Complete, clock.elapsed().as_secs_f64());
    manifest.write(out)?;
    Ok(rows)
}
