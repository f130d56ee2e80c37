use std::path::PathBuf;

use heavyeig::limits::kth_eigenvalue_cdf;
use heavyeig::montecarlo::{count_process_stats, empirical_cdf, ks_statistic};
use heavyeig::{ExperimentConfig, LimitLaw64};

use super::{classify, ensure_dir, simulate::file_name};
use crate::config::{digest, from_value, read_json};
use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, RunStatus};
use crate::output::{read_results, real, write_atomic, CsvDoc, COMPARE_SCHEMA, PLOTDATA_SCHEMA};

/// Where the theoretical law comes from.
#[derive(Debug, Clone)]
pub enum LawSource {
    /// The limit law of an experiment configuration.
    Config(PathBuf),
    Explicit { alpha: f64, sigma2: f64 },
}

#[derive(Debug, Clone)]
pub struct CompareArgs {
    pub results: PathBuf,
    pub law: LawSource,
    /// Order statistics to compare; all tracked ones when empty.
    pub ks: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub out: PathBuf,
}

/// One `(n, k, x)` line of `compare.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub n: usize,
    pub k: usize,
    pub x: f64,
    pub empirical: f64,
    pub theoretical: f64,
    /// KS distance of the whole `λ_(k)` column at this `n`.
    pub ks: f64,
    pub count_mean: f64,
    pub count_variance: f64,
    pub poisson_mean: f64,
    pub saturated: usize,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub law: LimitLaw64,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn ks(&self, n: usize, k: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n && r.k == k).map(|r| r.ks)
    }
}

fn compare_header() -> Vec<String> {
    [
        "n",
        "k",
        "x",
        "empirical_cdf",
        "theoretical_cdf",
        "abs_diff",
        "ks",
        "count_mean",
        "count_variance",
        "poisson_mean",
        "saturated",
    ]
    .map(String::from)
    .to_vec()
}

pub fn compare(args: &CompareArgs) -> CliResult<CompareReport> {
    let (law, config_digest) = match &args.law {
        LawSource::Config(path) => {
            let value = read_json(path)?;
            let d = digest(&value);
            let cfg: ExperimentConfig = from_value(value, path)?;
            (cfg.limit_law().map_err(classify)?, d)
        }
        LawSource::Explicit { alpha, sigma2 } => (
            LimitLaw64::new(*alpha, *sigma2).map_err(classify)?,
            digest(&serde_json::json!({ "alpha": alpha, "sigma2": sigma2 })),
        ),
    };
    let table = read_results(&args.results)?;
    let ks: Vec<usize> = if args.ks.is_empty() {
        (1..=table.k).collect()
    } else {
        args.ks.clone()
    };
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > table.k) {
        return Err(CliError::schema(
            &args.results,
            format!("no lambda_{bad} column (file tracks k = {})", table.k),
        ));
    }
    if args.thresholds.iter().any(|&x| !(x > 0.0)) {
        return Err(CliError::Validation("thresholds must be positive".into()));
    }
    if table.rows.is_empty() {
        return Err(CliError::schema(&args.results, "no data rows"));
    }

    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::start("compare", config_digest, None);
    manifest.write(&args.out)?;
    let clock = std::time::Instant::now();

    let mut rows = Vec::new();
    let mut compare_doc = CsvDoc::new(COMPARE_SCHEMA, &compare_header());
    let mut plot_doc = CsvDoc::new(
        PLOTDATA_SCHEMA,
        &["n", "k", "x", "empirical_cdf", "theoretical_cdf"].map(String::from),
    );
    for n in table.sample_sizes() {
        let points = table.scaled_points(n);
        let counts = count_process_stats(&points, &args.thresholds).map_err(classify)?;
        for &k in &ks {
            let mut col = table.eigen_column(n, k);
            let cdf = |x: f64| kth_eigenvalue_cdf(&law, k, x);
            let ks_dist = ks_statistic(&col, cdf).map_err(classify)?;
            for (x, c) in args.thresholds.iter().zip(&counts) {
                let row = CompareRow {
                    n,
                    k,
                    x: *x,
                    empirical: empirical_cdf(&col, *x),
                    theoretical: cdf(*x),
                    ks: ks_dist,
                    count_mean: c.mean,
                    count_variance: c.variance,
                    poisson_mean: law.intensity(*x),
                    saturated: c.saturated,
                };
                compare_doc.row(&[
                    n.to_string(),
                    k.to_string(),
                    real(row.x),
                    real(row.empirical),
                    real(row.theoretical),
                    real((row.empirical - row.theoretical).abs()),
                    real(row.ks),
                    real(row.count_mean),
                    real(row.count_variance),
                    real(row.poisson_mean),
                    row.saturated.to_string(),
                ]);
                rows.push(row);
            }
            col.sort_by(|a, b| a.total_cmp(b));
            let r = col.len() as f64;
            for (i, &x) in col.iter().enumerate() {
                plot_doc.row(&[
                    n.to_string(),
                    k.to_string(),
                    real(x),
                    real((i + 1) as f64 / r),
                    real(cdf(x)),
                ]);
            }
        }
    }
    let compare_path = args.out.join("compare.csv");
    let plot_path = args.out.join("plotdata.csv");
    write_atomic(&compare_path, &compare_doc.into_bytes())?;
    write_atomic(&plot_path, &plot_doc.into_bytes())?;
    manifest.outputs = vec![file_name(&compare_path), file_name(&plot_path)];
    manifest.finish(RunStatus::Complete, clock.elapsed().as_secs_f64());
    manifest.write(&args.out)?;
    Ok(CompareReport { law, rows })
}
