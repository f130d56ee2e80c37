//! Limit laws for the scaled top eigenvalues.
//!
//! The scaled eigenvalues converge to a Poisson process with mean measure
//! `ν(x, ∞) = x^{-α/2} σ²^{α/2}`, whose points are `Γ_i^{-2/α} σ²` for the
//! partial sums `Γ_i` of unit exponentials. The `k`-th largest point `V_k`
//! therefore satisfies `P(V_k ≤ x) = P(N(x, ∞) ≤ k − 1) = e^{-ν} Σ_{m<k} ν^m/m!`.
//!
//! Some presentations print the exponential factor without the `σ²` scale;
//! the form here keeps the scale in every term, so that `k = 1` is the
//! Fréchet law `exp(−(x/σ²)^{-α/2})`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linproc::{
    sample_theta_chain, stationary_distribution, CoefficientProfile, RandomCoefficientModel,
    ThetaChain,
};
use crate::scalar::Real;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw<T> {
    pub alpha: T,
    pub sigma2: T,
}

impl<T: Real> LimitLaw<T> {
    pub fn new(alpha: T, sigma2: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::of(4.0)) {
            return Err(invalid("alpha", format!("alpha = {alpha} violates alpha ∈ (0, 4)")));
        }
        if !(sigma2 > T::zero() && sigma2.is_finite()) {
            return Err(invalid("sigma2", format!("need 0 < sigma2 < ∞, got {sigma2}")));
        }
        Ok(LimitLaw { alpha, sigma2 })
    }

    /// `ν(x, ∞)`.
    pub fn intensity(&self, x: T) -> T {
        poisson_intensity(self, x)
    }

    /// Median of the largest point: `σ² (ln 2)^{-2/α}`.
    pub fn largest_median(&self) -> T {
        self.sigma2 * T::LN_2().powf(-T::of(2.0) / self.alpha)
    }
}

/// `ν(x, ∞) = x^{-α/2} σ²^{α/2}`, written as `(x/σ²)^{-α/2}`.
pub fn poisson_intensity<T: Real>(law: &LimitLaw<T>, x: T) -> T {
    let half = law.alpha / T::of(2.0);
    (x / law.sigma2).powf(-half)
}

/// `P(V_1 ≤ x) = exp(−ν(x, ∞))`.
pub fn largest_eigenvalue_cdf<T: Real>(law: &LimitLaw<T>, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    (-poisson_intensity(law, x)).exp()
}

/// `P(V_k ≤ x) = e^{-ν} Σ_{m=0}^{k-1} ν^m / m!`.
pub fn kth_eigenvalue_cdf<T: Real>(law: &LimitLaw<T>, k: usize, x: T) -> T {
    assert!(k >= 1, "k starts at 1");
    if x <= T::zero() {
        return T::zero();
    }
    let nu = poisson_intensity(law, x);
    let mut term = T::one();
    let mut sum = T::one();
    for m in 1..k {
        term = term * nu / T::of_usize(m);
        sum += term;
    }
    // keep e^{-ν} ν^m/m! finite for large ν by summing in log space
    if !sum.is_finite() || nu > T::of(500.0) {
        let log_terms: Vec<T> = (0..k)
            .map(|m| {
                let lf = (1..=m).fold(T::zero(), |s, i| s + T::of_usize(i).ln());
                T::of_usize(m) * nu.ln() - lf - nu
            })
            .collect();
        let top = log_terms.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        let s: T = log_terms.iter().map(|&l| (l - top).exp()).sum();
        return (top + s.ln()).exp().min(T::one());
    }
    ((-nu).exp() * sum).min(T::one())
}

/// The `k` largest points of the limit process, descending.
pub fn sample_limit_points<T: Real, R: Rng + ?Sized>(
    law: &LimitLaw<T>,
    k: usize,
    rng: &mut R,
) -> Vec<T> {
    let expo = -2.0 / law.alpha.to_f64_lossy();
    let mut gamma = 0.0f64;
    (0..k)
        .map(|_| {
            // 1 - U lies in (0, 1]
            let u: f64 = 1.0 - rng.random::<f64>();
            gamma += -u.ln();
            T::of(gamma.powf(expo)) * law.sigma2
        })
        .collect()
}

/// `(Σ c_j²)^{α/2} / Σ |c_j|^α`.
pub fn dependence_effect_constant(profile: &CoefficientProfile, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 4.0) {
        return Err(invalid("alpha", format!("alpha = {alpha} violates alpha ∈ (0, 4)")));
    }
    let sq = profile.sum_squared().value;
    let pow = profile.sum_abs_pow(alpha).value;
    Ok(sq.powf(alpha / 2.0) / pow)
}

/// A constant together with its Monte Carlo standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Steps and seed of the long-run average used for continuous latent chains.
pub const RC_SCALE_MC_STEPS: usize = 1 << 20;
pub const RC_SCALE_MC_SEED: u64 = 0x5CA1_E000_0000_0001;

/// `(E_π |Σ_j c_j²(θ)|^{α/2})^{2/α}`.
///
/// Exact for finite chains. For the bounded AR(1) chain the expectation is a
/// long-run average over [`RC_SCALE_MC_STEPS`] steps, with a batch-means
/// standard error.
pub fn random_coeff_scale(rc: &RandomCoefficientModel, alpha: f64) -> Result<ScaleEstimate> {
    random_coeff_scale_with(rc, alpha, RC_SCALE_MC_STEPS, RC_SCALE_MC_SEED)
}

pub fn random_coeff_scale_with(
    rc: &RandomCoefficientModel,
    alpha: f64,
    steps: usize,
    seed: u64,
) -> Result<ScaleEstimate> {
    if !(alpha > 0.0 && alpha < 4.0) {
        return Err(invalid("alpha", format!("alpha = {alpha} violates alpha ∈ (0, 4)")));
    }
    let h = alpha / 2.0;
    if rc.is_finite() {
        let pi = stationary_distribution(rc)?;
        let mut m = 0.0;
        for (i, &w) in pi.iter().enumerate() {
            if w > 0.0 {
                m += w * rc.profile_of_state(i)?.sum_squared().value.powf(h);
            }
        }
        return Ok(ScaleEstimate {
            value: m.powf(1.0 / h),
            std_error: 0.0,
        });
    }
    debug_assert!(matches!(rc.chain(), ThetaChain::BoundedAr1 { .. }));
    const BATCHES: usize = 64;
    if steps < BATCHES * 16 {
        return Err(invalid("steps", format!("need at least {} steps", BATCHES * 16)));
    }
    let path = sample_theta_chain(rc, steps, &mut rng_from_seed(seed))?;
    let vals: Vec<f64> = path
        .values
        .iter()
        .map(|&t| Ok(rc.profile_for(t)?.sum_squared().value.powf(h)))
        .collect::<Result<_>>()?;
    let size = steps / BATCHES;
    let means: Vec<f64> = vals
        .chunks_exact(size)
        .take(BATCHES)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let se_m = (var / BATCHES as f64).sqrt();
    // delta method for m^{1/h}
    let value = m.powf(1.0 / h);
    Ok(ScaleEstimate {
        value,
        std_error: value / (h * m) * se_m,
    })
}
