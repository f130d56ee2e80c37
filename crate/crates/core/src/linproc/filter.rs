use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use super::{CoefficientProfile, RandomCoefficientModel, ThetaPath};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::rv_noise::{NoiseSampler, TailModel};
use crate::seed::{rng_from_seed, row_seed};

/// Noise for one row over times `t = 1 - J, …, n + J`, in time order.
///
/// Draw order is `Z_1, …, Z_n`, then `Z_{n+1}, Z_0, Z_{n+2}, Z_{-1}, …`, so a
/// larger `J` only appends draws and the values at shared times coincide.
pub fn row_noise<R: Rng + ?Sized>(
    sampler: &NoiseSampler,
    n: usize,
    lag: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut z = vec![0.0; n + 2 * lag];
    for slot in z[lag..lag + n].iter_mut() {
        *slot = sampler.sample(rng);
    }
    for k in 1..=lag {
        z[lag + n - 1 + k] = sampler.sample(rng);
        z[lag - k] = sampler.sample(rng);
    }
    z
}

/// Moving-average filter with taps `c_{-J..J}` (length `2J + 1`) over a noise
/// window; returns every output whose full support lies inside the window,
/// i.e. `X_t = Σ_j c_j Z_{t-j}` for `t` from the first to the last valid time.
///
/// Leading and trailing zero taps are trimmed first, so a causal MA(1) over
/// `[Z_1, Z_2, Z_3]` yields `[X_2, X_3]`.
pub fn apply_filter(taps: &[f64], noise: &[f64]) -> Vec<f64> {
    assert!(taps.len() % 2 == 1, "taps must be c_{{-J..J}}");
    let lag = (taps.len() / 2) as isize;
    let first = taps.iter().position(|&c| c != 0.0);
    let Some(first) = first else {
        return vec![0.0; noise.len().saturating_sub(taps.len() - 1)];
    };
    let last = taps.iter().rposition(|&c| c != 0.0).unwrap();
    // j ranges over [j_lo, j_hi]
    let j_lo = first as isize - lag;
    let j_hi = last as isize - lag;
    let span = (j_hi - j_lo) as usize;
    if noise.len() <= span {
        return Vec::new();
    }
    (span..noise.len())
        .map(|end| {
            // output time index t = end - j_lo ... with Z index t - j
            let t = end as isize + j_lo;
            (j_lo..=j_hi)
                .map(|j| taps[(j + lag) as usize] * noise[(t - j) as usize])
                .sum()
        })
        .collect()
}

fn filter_row(taps: &[f64], noise: &[f64], n: usize, lag: usize) -> Vec<f64> {
    // X_t for t = 1..n sits at noise index t - 1 + J
    (0..n)
        .map(|t| {
            let center = t + lag;
            let mut acc = 0.0;
            for (k, &c) in taps.iter().enumerate() {
                if c != 0.0 {
                    // j = k - J, noise index center - j
                    acc += c * noise[center + lag - k];
                }
            }
            acc
        })
        .collect()
}

fn check_profile(model: &TailModel, profile: &CoefficientProfile) -> Result<()> {
    let delta = model.alpha().min(1.0) * 0.99;
    let check = profile.check_summability(delta)?;
    if !check.pass {
        return Err(Error::NotSummable {
            delta,
            reason: format!("{:?} decays too slowly", profile.kind()),
        });
    }
    Ok(())
}

fn check_dims(p: usize, n: usize) -> Result<()> {
    if p == 0 || n == 0 {
        return Err(invalid("dimensions", format!("need p, n ≥ 1, got {p} x {n}")));
    }
    Ok(())
}

/// Simulates the `p × n` data matrix with iid linear-process rows.
///
/// Row `i` draws its noise from its own stream seeded by
/// `row_seed(seed, i)`, so the result is independent of scheduling.
pub fn simulate_matrix(
    model: &TailModel,
    profile: &CoefficientProfile,
    p: usize,
    n: usize,
    seed: u64,
) -> Result<Matrix<f64>> {
    check_dims(p, n)?;
    check_profile(model, profile)?;
    let sampler = model.sampler();
    let lag = profile.truncation_lag();
    let taps = profile.taps();
    let rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(row_seed(seed, i as u64));
            let noise = row_noise(&sampler, n, lag, &mut rng);
            filter_row(&taps, &noise, n, lag)
        })
        .collect();
    Matrix::from_vec(p, n, rows.into_iter().flatten().collect())
}

/// Simulates the data matrix of a random-coefficient model.
///
/// The latent chain uses `theta_seed` and the noise uses `noise_seed`; all
/// rows share the lag of the model's uniform coefficient bound.
pub fn simulate_matrix_random_coeff(
    model: &TailModel,
    rc: &RandomCoefficientModel,
    p: usize,
    n: usize,
    noise_seed: u64,
    theta_seed: u64,
) -> Result<(Matrix<f64>, ThetaPath)> {
    check_dims(p, n)?;
    let bound = rc.uniform_bound()?;
    check_profile(model, &bound)?;
    let lag = bound.truncation_lag();
    let path = super::sample_theta_chain(rc, p, &mut rng_from_seed(theta_seed))?;
    let profiles: Vec<CoefficientProfile> = (0..p)
        .map(|i| rc.profile_at(&path, i)?.with_truncation_lag(lag))
        .collect::<Result<_>>()?;
    let sampler = model.sampler();
    let rows: Vec<Vec<f64>> = profiles
        .par_iter()
        .enumerate()
        .map(|(i, profile)| {
            let mut rng = rng_from_seed(row_seed(noise_seed, i as u64));
            let noise = row_noise(&sampler, n, lag, &mut rng);
            filter_row(&profile.taps(), &noise, n, lag)
        })
        .collect();
    Ok((
        Matrix::from_vec(p, n, rows.into_iter().flatten().collect())?,
        path,
    ))
}
