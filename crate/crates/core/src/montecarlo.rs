//! Seeded experiments and the statistics used to compare them with the limit
//! laws.
//!
//! Every replication draws from child streams derived from
//! `(master_seed, n, replication, role)` (see [`crate::seed`]), so a table is
//! a pure function of its configuration regardless of how replications are
//! scheduled.

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::{random_coeff_scale, random_coeff_scale_with, LimitLaw, RC_SCALE_MC_SEED};
use crate::linalg::Matrix;
use crate::linproc::{simulate_matrix, simulate_matrix_random_coeff, CoefficientProfile, RandomCoefficientModel};
use crate::rv_noise::TailModel;
use crate::seed::{child_seed, derive, rng_from_seed, row_seed, StreamRole};
use crate::spectra::{center_scale, centering_mu_with_sum, SpectralSample};

/// Slowly varying factor `l(n)` of the regularly varying dimension rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowlyVarying {
    /// `l(n) = 1`
    One,
    /// `l(n) = ln n`
    Log,
    /// `l(n) = ln ln n` (for `n ≥ 3`)
    LogLog,
    /// `l(n) = 1 / ln n`
    InvLog,
}

impl SlowlyVarying {
    pub fn eval(self, n: f64) -> f64 {
        match self {
            SlowlyVarying::One => 1.0,
            SlowlyVarying::Log => n.ln(),
            SlowlyVarying::LogLog => n.ln().ln(),
            SlowlyVarying::InvLog => 1.0 / n.ln(),
        }
    }
}

/// How the dimension `p` follows the sample size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PRule {
    /// One `p` per entry of the `n` schedule.
    Explicit { values: Vec<usize> },
    /// `p = round(c n^β)`.
    Power { c: f64, beta: f64 },
    /// `p = round(scale · n^κ · l(n))`.
    Regvar {
        kappa: f64,
        slowly_varying: SlowlyVarying,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `p = round(C exp(c n^κ))`.
    Expgrowth {
        #[serde(rename = "C")]
        big_c: f64,
        c: f64,
        kappa: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl PRule {
    /// `p` for the `index`-th schedule entry `n`.
    pub fn dimension(&self, index: usize, n: usize) -> Result<usize> {
        let nf = n as f64;
        let raw = match self {
            PRule::Explicit { values } => {
                return values
                    .get(index)
                    .copied()
                    .ok_or_else(|| invalid("p_rule", "explicit list shorter than n_schedule"));
            }
            PRule::Power { c, beta } => c * nf.powf(*beta),
            PRule::Regvar {
                kappa,
                slowly_varying,
                scale,
            } => scale * nf.powf(*kappa) * slowly_varying.eval(nf),
            PRule::Expgrowth { big_c, c, kappa } => big_c * (c * nf.powf(*kappa)).exp(),
        };
        if !(raw.is_finite() && raw >= 0.5 && raw < 1e9) {
            return Err(invalid("p_rule", format!("rule gives p = {raw} at n = {n}")));
        }
        Ok(raw.round() as usize)
    }
}

/// Upper end of the admissible growth exponent `β` in `p ≲ n^β` for tail
/// index `α` (`+∞` when unrestricted).
pub fn beta_upper_bound(alpha: f64) -> f64 {
    if alpha <= 1.0 {
        f64::INFINITY
    } else if alpha < 2.0 {
        ((2.0 - alpha) / (alpha - 1.0)).max(0.5)
    } else if alpha < 3.0 {
        (1.0 / 3.0f64).max((4.0 - alpha) / (4.0 * (alpha - 1.0)))
    } else {
        (4.0 - alpha) / (3.0 * alpha - 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    #[default]
    Auto,
    Off,
}

/// Row dynamics of the data matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum RowModel {
    Fixed(CoefficientProfile),
    Random(RandomCoefficientModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigSpec", into = "ConfigSpec")]
pub struct ExperimentConfig {
    pub tail: TailModel,
    pub rows: RowModel,
    pub n_schedule: Vec<usize>,
    pub p_rule: PRule,
    pub k: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub centering: Centering,
}

/// Serialized configuration: exactly one of `profile` and
/// `random_coefficients` is present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub tail: TailModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<CoefficientProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_coefficients: Option<RandomCoefficientModel>,
    pub n_schedule: Vec<usize>,
    pub p_rule: PRule,
    pub k: usize,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub centering: Centering,
}

impl TryFrom<ConfigSpec> for ExperimentConfig {
    type Error = Error;

    fn try_from(s: ConfigSpec) -> Result<Self> {
        let rows = match (s.profile, s.random_coefficients) {
            (Some(p), None) => RowModel::Fixed(p),
            (None, Some(rc)) => RowModel::Random(rc),
            (None, None) => RowModel::Fixed(CoefficientProfile::iid()),
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "profile",
                    "give either `profile` or `random_coefficients`, not both",
                ))
            }
        };
        let cfg = ExperimentConfig {
            tail: s.tail,
            rows,
            n_schedule: s.n_schedule,
            p_rule: s.p_rule,
            k: s.k,
            replications: s.replications,
            master_seed: s.master_seed,
            centering: s.centering,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<ExperimentConfig> for ConfigSpec {
    fn from(c: ExperimentConfig) -> Self {
        let (profile, random_coefficients) = match c.rows {
            RowModel::Fixed(p) => (Some(p), None),
            RowModel::Random(rc) => (None, Some(rc)),
        };
        ConfigSpec {
            tail: c.tail,
            profile,
            random_coefficients,
            n_schedule: c.n_schedule,
            p_rule: c.p_rule,
            k: c.k,
            replications: c.replications,
            master_seed: c.master_seed,
            centering: c.centering,
        }
    }
}

impl ExperimentConfig {
    /// Checks everything that would make a run fail or be meaningless.
    pub fn validate(&self) -> Result<()> {
        if !self.tail.satisfies_mean_condition() {
            return Err(invalid(
                "tail",
                "noise must have mean zero when alpha > 1 (set center_mean)",
            ));
        }
        if self.n_schedule.is_empty() {
            return Err(invalid("n_schedule", "empty schedule"));
        }
        if self.replications == 0 {
            return Err(invalid("replications", "need R ≥ 1"));
        }
        if self.k == 0 {
            return Err(invalid("k", "need k ≥ 1"));
        }
        if let PRule::Explicit { values } = &self.p_rule {
            if values.len() != self.n_schedule.len() {
                return Err(invalid("p_rule", "explicit list must match n_schedule"));
            }
        }
        for (i, &n) in self.n_schedule.iter().enumerate() {
            if n == 0 {
                return Err(invalid("n_schedule", "need n ≥ 1"));
            }
            let p = self.p_rule.dimension(i, n)?;
            if p < self.k {
                return Err(invalid("k", format!("k = {} exceeds p = {p} at n = {n}", self.k)));
            }
        }
        if let RowModel::Random(rc) = &self.rows {
            rc.uniform_bound()?;
        }
        Ok(())
    }

    /// Non-fatal notes, e.g. a growth exponent outside the proven regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let PRule::Power { beta, .. } = self.p_rule {
            let bound = beta_upper_bound(self.tail.alpha());
            if beta >= bound {
                out.push(format!(
                    "beta = {beta} is outside the admissible range beta < {bound} for alpha = {}",
                    self.tail.alpha()
                ));
            }
        }
        out
    }

    pub fn dimensions(&self) -> Result<Vec<(usize, usize)>> {
        self.n_schedule
            .iter()
            .enumerate()
            .map(|(i, &n)| Ok((n, self.p_rule.dimension(i, n)?)))
            .collect()
    }

    /// Limit law of the scaled eigenvalues: `σ² = Σ c_j²`, or the
    /// random-coefficient scale.
    pub fn limit_law(&self) -> Result<LimitLaw<f64>> {
        let sigma2 = match &self.rows {
            RowModel::Fixed(p) => p.sum_squared().value,
            RowModel::Random(rc) => random_coeff_scale(rc, self.tail.alpha())?.value,
        };
        LimitLaw::new(self.tail.alpha(), sigma2)
    }

    /// `E Σ_j c_j²` entering the centering (the stationary mean for random
    /// coefficients).
    fn mean_sum_squared(&self) -> Result<f64> {
        match &self.rows {
            RowModel::Fixed(p) => Ok(p.sum_squared().value),
            RowModel::Random(rc) if rc.is_finite() => rc.mean_sum_squared(),
            // at α = 2 the scale is the plain mean
            RowModel::Random(rc) => Ok(random_coeff_scale_with(
                rc,
                2.0,
                crate::limits::RC_SCALE_MC_STEPS,
                RC_SCALE_MC_SEED,
            )?
            .value),
        }
    }
}

/// One replication at one sample size. Eigenvalue and diagonal columns are
/// centered and scaled; the norms are divided by `a_np²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub p: usize,
    pub replication: usize,
    /// Noise stream seed of this replication.
    pub seed: u64,
    pub a_np: f64,
    pub mu: f64,
    pub eigen: Vec<f64>,
    pub diag: Vec<f64>,
    pub offdiag: f64,
    pub cross: f64,
    pub trace: f64,
}

impl ResultRow {
    /// Weyl coupling on the scaled values with slack `10⁻⁸ · trace / a_np²`.
    pub fn weyl_holds(&self) -> bool {
        let slack = 1e-8 * self.trace;
        self.eigen
            .iter()
            .zip(&self.diag)
            .all(|(l, s)| (l - s).abs() <= self.offdiag + slack)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub k: usize,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Column names in output order.
    pub fn columns(k: usize) -> Vec<String> {
        let mut c: Vec<String> = ["n", "p", "rep", "seed", "a_np", "mu"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        c.extend((1..=k).map(|j| format!("lambda_{j}")));
        c.extend((1..=k).map(|j| format!("diag_{j}")));
        c.extend(["offdiag_inf", "cross_max", "trace"].map(String::from));
        c
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.dedup();
        ns
    }

    pub fn rows_for(&self, n: usize) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    /// Scaled `λ_(j)` (1-based) over the replications at `n`.
    pub fn eigen_column(&self, n: usize, j: usize) -> Vec<f64> {
        self.rows_for(n).map(|r| r.eigen[j - 1]).collect()
    }

    pub fn scaled_points(&self, n: usize) -> Vec<Vec<f64>> {
        self.rows_for(n).map(|r| r.eigen.clone()).collect()
    }
}

/// Runs one replication.
pub fn run_replication(cfg: &ExperimentConfig, n: usize, p: usize, rep: usize) -> Result<ResultRow> {
    let noise_seed = child_seed(cfg.master_seed, n as u64, rep as u64, StreamRole::Noise);
    let x = match &cfg.rows {
        RowModel::Fixed(profile) => simulate_matrix(&cfg.tail, profile, p, n, noise_seed)?,
        RowModel::Random(rc) => {
            let theta_seed = child_seed(cfg.master_seed, n as u64, rep as u64, StreamRole::Theta);
            simulate_matrix_random_coeff(&cfg.tail, rc, p, n, noise_seed, theta_seed)?.0
        }
    };
    let sample = SpectralSample::compute(&x, cfg.k)?;
    let a_np = cfg.tail.norming_constant(n as f64 * p as f64)?;
    let mu = match cfg.centering {
        Centering::Off => 0.0,
        Centering::Auto => centering_mu_with_sum(&cfg.tail, cfg.mean_sum_squared()?, n, p)?,
    };
    let a2 = a_np * a_np;
    Ok(ResultRow {
        n,
        p,
        replication: rep,
        seed: noise_seed,
        a_np,
        mu,
        eigen: center_scale(&sample.eigen_topk, n, mu, a_np)?,
        diag: center_scale(&sample.diag_topk, n, mu, a_np)?,
        offdiag: sample.offdiag_inf_norm / a2,
        cross: sample.cross_max / a2,
        trace: sample.trace / a2,
    })
}

/// Runs every `(n, replication)` pair; rows come back sorted by `(n, r)` in
/// schedule order. The first failing replication (in that order) aborts the
/// run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    run_experiment_with_progress(cfg, |_| {})
}

/// [`run_experiment`] calling `progress(done)` after each finished
/// replication (from worker threads, in completion order).
pub fn run_experiment_with_progress<F>(cfg: &ExperimentConfig, progress: F) -> Result<ResultTable>
where
    F: Fn(usize) + Sync,
{
    cfg.validate()?;
    let dims = cfg.dimensions()?;
    let jobs: Vec<(usize, usize, usize)> = dims
        .iter()
        .flat_map(|&(n, p)| (0..cfg.replications).map(move |r| (n, p, r)))
        .collect();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<Result<ResultRow>> = jobs
        .par_iter()
        .map(|&(n, p, r)| {
            let row = run_replication(cfg, n, p, r).map_err(|e| Error::Replication {
                n,
                replication: r,
                source: Box::new(e),
            });
            progress(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1);
            row
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ResultTable { k: cfg.k, rows })
}

/// Kolmogorov–Smirnov distance `sup_x |F_R(x) − F(x)|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("sample", "empty sample"));
    }
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let r = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        let hi = ((i + 1) as f64 / r - f).abs();
        let lo = (i as f64 / r - f).abs();
        d.max(hi).max(lo)
    }))
}

/// Empirical CDF of `sample` at `x`.
pub fn empirical_cdf(sample: &[f64], x: f64) -> f64 {
    sample.iter().filter(|&&v| v <= x).count() as f64 / sample.len() as f64
}

pub fn median(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let m = s.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    }
}

/// Count statistics of `N(x, ∞)` across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct CountStats {
    pub threshold: f64,
    pub mean: f64,
    /// Sample variance (divisor `R − 1`; zero when `R = 1`).
    pub variance: f64,
    /// Empirical `P(N ≤ m)` for `m = 0..=4`.
    pub cdf: [f64; 5],
    /// Replications in which every tracked point exceeded `x`, so the count
    /// is only a lower bound.
    pub saturated: usize,
}

pub fn count_process_stats(points: &[Vec<f64>], thresholds: &[f64]) -> Result<Vec<CountStats>> {
    if points.is_empty() {
        return Err(invalid("points", "no replications"));
    }
    thresholds
        .iter()
        .map(|&x| {
            if !(x > 0.0) {
                return Err(invalid("threshold", format!("need x > 0, got {x}")));
            }
            let counts: Vec<usize> = points
                .iter()
                .map(|pts| pts.iter().filter(|&&v| v > x).count())
                .collect();
            let saturated = points
                .iter()
                .zip(&counts)
                .filter(|(pts, &c)| !pts.is_empty() && c == pts.len())
                .count();
            let r = counts.len() as f64;
            let mean = counts.iter().sum::<usize>() as f64 / r;
            let variance = if counts.len() > 1 {
                counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (r - 1.0)
            } else {
                0.0
            };
            let mut cdf = [0.0; 5];
            for (m, slot) in cdf.iter_mut().enumerate() {
                *slot = counts.iter().filter(|&&c| c <= m).count() as f64 / r;
            }
            Ok(CountStats {
                threshold: x,
                mean,
                variance,
                cdf,
                saturated,
            })
        })
        .collect()
}

/// Minimum numerator hits for a trustworthy large-deviation estimate.
pub const LD_MIN_HITS: u64 = 50;
/// `δ` in the growth condition `b_n x_n / n^{1+δ} → ∞` checked when `α/2 ≥ 1`.
pub const LD_DELTA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeDeviationEstimate {
    pub ratio: f64,
    pub std_error: f64,
    pub hits: u64,
    pub replications: usize,
    /// `b_n`, the `1/n` tail quantile of `Y = Z²`.
    pub b_n: f64,
    /// `n P(Y > b_n max{x_n, y_n})`.
    pub denominator: f64,
}

/// Estimates `P(Σ Y_t > b_n x_n, max Y_t > b_n y_n) / (n P(Y > b_n max{x_n, y_n}))`
/// for `Y_t = Z_t²` over `R` independent blocks of length `n`.
///
/// Block `r` uses the stream `row_seed(seed, r)`.
pub fn large_deviation_ratio(
    model: &TailModel,
    n: usize,
    x_n: f64,
    y_n: f64,
    replications: usize,
    seed: u64,
) -> Result<LargeDeviationEstimate> {
    if n == 0 || replications == 0 {
        return Err(invalid("n", "need n, R ≥ 1"));
    }
    if !(x_n > 0.0) || !(y_n >= 0.0) {
        return Err(invalid("x_n", "need x_n > 0 and y_n ≥ 0"));
    }
    // P(Y > b) ≤ 1/n ⇔ P(|Z| > √b) ≤ 1/n
    let a_n = model.norming_constant(n as f64)?;
    let b_n = a_n * a_n;
    let nf = n as f64;
    if model.alpha() / 2.0 >= 1.0 && b_n * x_n <= nf.powf(1.0 + LD_DELTA) {
        return Err(invalid(
            "x_n",
            format!(
                "b_n x_n = {:e} must exceed n^(1+{LD_DELTA}) = {:e} when alpha/2 ≥ 1",
                b_n * x_n,
                nf.powf(1.0 + LD_DELTA)
            ),
        ));
    }
    let level = b_n * x_n.max(y_n);
    let denominator = nf * model.survival(level.sqrt());
    let (sum_level, max_level) = (b_n * x_n, b_n * y_n);
    let sampler = model.sampler();
    let hits: u64 = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(row_seed(seed, r as u64));
            let (mut sum, mut max) = (0.0f64, 0.0f64);
            for _ in 0..n {
                let z: f64 = sampler.sample(&mut rng);
                let y = z * z;
                sum += y;
                max = max.max(y);
            }
            u64::from(sum > sum_level && max > max_level)
        })
        .sum();
    let rf = replications as f64;
    let phat = hits as f64 / rf;
    let ratio = phat / denominator;
    let std_error = (phat * (1.0 - phat) / rf).sqrt() / denominator;
    if hits < LD_MIN_HITS {
        return Err(Error::InsufficientHits {
            hits,
            required: LD_MIN_HITS,
            estimate: ratio,
        });
    }
    Ok(LargeDeviationEstimate {
        ratio,
        std_error,
        hits,
        replications,
        b_n,
        denominator,
    })
}

/// Result of [`pair_point_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairPointReport {
    /// KS distance of `max_i Σ_t Z_it² / a_np²` against `exp(−x^{-α/2})`.
    pub ks_max_sum: f64,
    /// `max_i Σ_t Z_it² / a_np²` per replication.
    pub max_sums: Vec<f64>,
    /// `(sum − max)/sum` at the row attaining the largest sum.
    pub ratios: Vec<f64>,
    pub median_ratio: f64,
}

/// Row sums and row maxima of squared iid noise coincide in the limit; this
/// measures both effects on `R` replications of a `p × n` noise matrix.
pub fn pair_point_check(
    model: &TailModel,
    n: usize,
    p: usize,
    replications: usize,
    seed: u64,
) -> Result<PairPointReport> {
    if !(model.alpha() < 2.0) {
        return Err(invalid("alpha", "pair point check needs alpha < 2"));
    }
    if n == 0 || p == 0 || replications == 0 {
        return Err(invalid("n", "need n, p, R ≥ 1"));
    }
    let a = model.norming_constant(n as f64 * p as f64)?;
    let a2 = a * a;
    let sampler = model.sampler();
    let per_rep: Vec<(f64, f64)> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let stream = derive(seed, &[n as u64, p as u64, r as u64, StreamRole::PairPoint as u64]);
            let (mut best_sum, mut best_max) = (f64::NEG_INFINITY, 0.0);
            for i in 0..p {
                let mut rng = rng_from_seed(row_seed(stream, i as u64));
                let (mut sum, mut max) = (0.0f64, 0.0f64);
                for _ in 0..n {
                    let z: f64 = sampler.sample(&mut rng);
                    let y = z * z;
                    sum += y;
                    max = max.max(y);
                }
                if sum > best_sum {
                    best_sum = sum;
                    best_max = max;
                }
            }
            let ratio = if best_sum > 0.0 {
                ((best_sum - best_max) / best_sum).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (best_sum / a2, ratio)
        })
        .collect();
    let max_sums: Vec<f64> = per_rep.iter().map(|v| v.0).collect();
    let ratios: Vec<f64> = per_rep.iter().map(|v| v.1).collect();
    let half = model.alpha() / 2.0;
    let ks_max_sum = ks_statistic(&max_sums, |x| if x > 0.0 { (-x.powf(-half)).exp() } else { 0.0 })?;
    Ok(PairPointReport {
        ks_max_sum,
        median_ratio: median(&ratios),
        max_sums,
        ratios,
    })
}

/// Draws `R` replications of the top `k` limit points (a synthetic results
/// column for self-tests of the comparison pipeline).
pub fn sample_limit_table<R: Rng + ?Sized>(
    law: &LimitLaw<f64>,
    k: usize,
    replications: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    (0..replications)
        .map(|_| crate::limits::sample_limit_points(law, k, rng))
        .collect()
}

/// Raw `p × n` noise matrix for replication `rep` (the identity-filter data
/// matrix of [`run_experiment`]).
pub fn noise_matrix(cfg: &ExperimentConfig, n: usize, p: usize, rep: usize) -> Result<Matrix<f64>> {
    let seed = child_seed(cfg.master_seed, n as u64, rep as u64, StreamRole::Noise);
    simulate_matrix(&cfg.tail, &CoefficientProfile::iid(), p, n, seed)
}
