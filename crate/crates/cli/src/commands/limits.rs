use std::path::Path;

use heavyeig::limits::{dependence_effect_constant, kth_eigenvalue_cdf, random_coeff_scale};
use heavyeig::{CoefficientProfile, LimitLaw64, RandomCoefficientModel};
use serde::{Deserialize, Serialize};

use super::{classify, ensure_dir, simulate::file_name};
use crate::config::{digest, from_value, read_json};
use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, RunStatus};
use crate::output::{real, write_atomic, CsvDoc, LIMITS_SCHEMA};

/// Parameters of `limits`. `sigma2` defaults to `Σ c_j²` of `profile`, else
/// to the random-coefficient scale, else to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub alpha: f64,
    #[serde(default)]
    pub sigma2: Option<f64>,
    #[serde(default)]
    pub profile: Option<CoefficientProfile>,
    #[serde(default)]
    pub random_coefficients: Option<RandomCoefficientModel>,
    pub x: Vec<f64>,
    #[serde(default = "first_only")]
    pub k: Vec<usize>,
}

fn first_only() -> Vec<usize> {
    vec![1]
}

/// `(quantity, k, x, value)`.
pub type LimitsEntry = (String, Option<usize>, Option<f64>, f64);

/// Writes `limits.csv` in long format: `quantity, k, x, value`.
pub fn limits(config_path: &Path, out: &Path) -> CliResult<Vec<LimitsEntry>> {
    let value = read_json(config_path)?;
    let config_digest = digest(&value);
    let cfg: LimitsConfig = from_value(value, config_path)?;
    if cfg.k.iter().any(|&k| k == 0) {
        return Err(CliError::Validation("k starts at 1".into()));
    }
    if cfg.x.iter().any(|&x| !(x > 0.0)) {
        return Err(CliError::Validation("x values must be positive".into()));
    }

    let mut entries: Vec<LimitsEntry> = Vec::new();
    let rc_scale = match &cfg.random_coefficients {
        Some(rc) => Some(random_coeff_scale(rc, cfg.alpha).map_err(classify)?),
        None => None,
    };
    let sigma2 = cfg
        .sigma2
        .or_else(|| cfg.profile.as_ref().map(|p| p.sum_squared().value))
        .or(rc_scale.map(|s| s.value))
        .unwrap_or(1.0);
    let law = LimitLaw64::new(cfg.alpha, sigma2).map_err(classify)?;

    ensure_dir(out)?;
    let mut manifest = RunManifest::start("limits", config_digest, None);
    manifest.write(out)?;
    let clock = std::time::Instant::now();

    entries.push(("sigma2".into(), None, None, sigma2));
    if let Some(p) = &cfg.profile {
        let d = dependence_effect_constant(p, cfg.alpha).map_err(classify)?;
        entries.push(("dependence_effect".into(), None, None, d));
    }
    if let Some(s) = rc_scale {
        entries.push(("random_coeff_scale".into(), None, None, s.value));
        entries.push(("random_coeff_scale_se".into(), None, None, s.std_error));
    }
    for &x in &cfg.x {
        entries.push(("intensity".into(), None, Some(x), law.intensity(x)));
    }
    for &k in &cfg.k {
        for &x in &cfg.x {
            entries.push(("cdf".into(), Some(k), Some(x), kth_eigenvalue_cdf(&law, k, x)));
        }
    }

    let mut doc = CsvDoc::new(LIMITS_SCHEMA, &["quantity", "k", "x", "value"].map(String::from));
    for (q, k, x, v) in &entries {
        doc.row(&[
            q.clone(),
            k.map(|k| k.to_string()).unwrap_or_default(),
            x.map(real).unwrap_or_default(),
            real(*v),
        ]);
    }
    let path = out.join("limits.csv");
    write_atomic(&path, &doc.into_bytes())?;
    manifest.outputs.push(file_name(&path));
    manifest.finish(RunStatus::Complete, clock.elapsed().as_secs_f64());
    manifest.write(out)?;
    Ok(entries)
}
