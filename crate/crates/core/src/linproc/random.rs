//! Random-coefficient models: row `i` is filtered with `c_j(θ_i)` for a latent
//! chain `(θ_i)` independent of the noise.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CoefficientProfile, ProfileKind};
use crate::error::{invalid, Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Latent dynamics of `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chain", rename_all = "snake_case")]
pub enum ThetaChain {
    /// iid draws from `probs` over the finite state list.
    Iid { states: Vec<f64>, probs: Vec<f64> },
    /// Finite-state Markov chain.
    FiniteMarkov {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
    /// `θ_i = φ θ_{i-1} + ξ_i` with `ξ_i ~ Uniform[-bound, bound]`, started at
    /// zero and run for `burn_in` steps before the first recorded value.
    BoundedAr1 {
        phi: f64,
        bound: f64,
        #[serde(default = "default_burn_in")]
        burn_in: usize,
    },
}

fn default_burn_in() -> usize {
    1000
}

/// How `θ` selects the coefficients of a row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum CoeffMap {
    /// `θ ↦ MA(1) with parameter θ`.
    Ma1,
    /// `θ ↦ AR(1) with parameter θ`; needs `sup |θ| < 1`.
    Ar1,
    /// `θ ↦ θ · base`.
    Scaled { base: CoefficientProfile },
    /// One profile per state of a finite chain.
    Table { profiles: Vec<CoefficientProfile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RandomCoefficientSpec", into = "RandomCoefficientSpec")]
pub struct RandomCoefficientModel {
    chain: ThetaChain,
    coeff_map: CoeffMap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomCoefficientSpec {
    #[serde(flatten)]
    pub chain: ThetaChain,
    pub coeff_map: CoeffMap,
}

impl TryFrom<RandomCoefficientSpec> for RandomCoefficientModel {
    type Error = Error;

    fn try_from(spec: RandomCoefficientSpec) -> Result<Self> {
        RandomCoefficientModel::new(spec.chain, spec.coeff_map)
    }
}

impl From<RandomCoefficientModel> for RandomCoefficientSpec {
    fn from(m: RandomCoefficientModel) -> Self {
        RandomCoefficientSpec {
            chain: m.chain,
            coeff_map: m.coeff_map,
        }
    }
}

/// A sampled latent path. `indices` is set for finite chains.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPath {
    pub values: Vec<f64>,
    pub indices: Option<Vec<usize>>,
}

fn check_probability_vector(name: &'static str, probs: &[f64], len: usize) -> Result<()> {
    if probs.len() != len {
        return Err(invalid(name, format!("expected {len} entries, got {}", probs.len())));
    }
    if probs.iter().any(|&x| !(x >= 0.0)) {
        return Err(invalid(name, "negative or NaN probability"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > ROW_SUM_TOL {
        return Err(invalid(name, format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Whether every state reaches every other state.
fn is_irreducible(transition: &[Vec<f64>]) -> bool {
    let n = transition.len();
    (0..n).all(|start| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for (t, &p) in transition[s].iter().enumerate() {
                if p > 0.0 && !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.iter().all(|&x| x)
    })
}

impl RandomCoefficientModel {
    pub fn new(chain: ThetaChain, coeff_map: CoeffMap) -> Result<Self> {
        match &chain {
            ThetaChain::Iid { states, probs } => {
                if states.is_empty() {
                    return Err(invalid("states", "empty state space"));
                }
                check_probability_vector("probs", probs, states.len())?;
            }
            ThetaChain::FiniteMarkov {
                states,
                transition,
                initial,
            } => {
                if states.is_empty() {
                    return Err(invalid("states", "empty state space"));
                }
                if transition.len() != states.len() {
                    return Err(invalid("transition", "row count differs from state count"));
                }
                for row in transition {
                    check_probability_vector("transition", row, states.len())?;
                }
                check_probability_vector("initial", initial, states.len())?;
                if !is_irreducible(transition) {
                    return Err(Error::ReducibleChain);
                }
            }
            ThetaChain::BoundedAr1 { phi, bound, .. } => {
                if !(phi.abs() < 1.0) {
                    return Err(invalid("phi", format!("need |phi| < 1, got {phi}")));
                }
                if !(*bound > 0.0 && bound.is_finite()) {
                    return Err(invalid("bound", format!("need 0 < bound < ∞, got {bound}")));
                }
            }
        }
        let model = RandomCoefficientModel { chain, coeff_map };
        match &model.coeff_map {
            CoeffMap::Ar1 if model.theta_sup() >= 1.0 => {
                return Err(invalid(
                    "coeff_map",
                    format!("AR(1) map needs sup|θ| < 1, got {}", model.theta_sup()),
                ));
            }
            CoeffMap::Table { profiles } => match &model.chain {
                ThetaChain::BoundedAr1 { .. } => {
                    return Err(invalid("coeff_map", "table map needs a finite chain"));
                }
                _ if profiles.len() != model.states().len() => {
                    return Err(invalid("coeff_map", "one profile per state required"));
                }
                _ => {}
            },
            _ => {}
        }
        Ok(model)
    }

    pub fn chain(&self) -> &ThetaChain {
        &self.chain
    }

    pub fn coeff_map(&self) -> &CoeffMap {
        &self.coeff_map
    }

    fn states(&self) -> &[f64] {
        match &self.chain {
            ThetaChain::Iid { states, .. } | ThetaChain::FiniteMarkov { states, .. } => states,
            ThetaChain::BoundedAr1 { .. } => &[],
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.chain, ThetaChain::BoundedAr1 { .. })
    }

    /// `sup |θ|` over the state space (for the AR(1) chain, `bound / (1 - |φ|)`).
    pub fn theta_sup(&self) -> f64 {
        match &self.chain {
            ThetaChain::BoundedAr1 { phi, bound, .. } => bound / (1.0 - phi.abs()),
            _ => self.states().iter().fold(0.0, |m, s| m.max(s.abs())),
        }
    }

    /// Profile for a given θ value (not available for table maps).
    pub fn profile_for(&self, theta: f64) -> Result<CoefficientProfile> {
        match &self.coeff_map {
            CoeffMap::Ma1 => CoefficientProfile::ma1(theta),
            CoeffMap::Ar1 => CoefficientProfile::ar1(theta),
            CoeffMap::Scaled { base } => Ok(base.scaled(theta)),
            CoeffMap::Table { .. } => Err(invalid("coeff_map", "table maps are indexed by state")),
        }
    }

    /// Profile of finite state number `index`.
    pub fn profile_of_state(&self, index: usize) -> Result<CoefficientProfile> {
        match &self.coeff_map {
            CoeffMap::Table { profiles } => profiles
                .get(index)
                .cloned()
                .ok_or_else(|| invalid("state", format!("no state {index}"))),
            _ => {
                let theta = *self
                    .states()
                    .get(index)
                    .ok_or_else(|| invalid("state", format!("no state {index}")))?;
                self.profile_for(theta)
            }
        }
    }

    /// Profile of row `i` of a sampled path.
    pub fn profile_at(&self, path: &ThetaPath, i: usize) -> Result<CoefficientProfile> {
        match &path.indices {
            Some(idx) => self.profile_of_state(idx[i]),
            None => self.profile_for(path.values[i]),
        }
    }

    /// Deterministic envelope `c̃_j ≥ sup_θ |c_j(θ)|`, as a profile.
    pub fn uniform_bound(&self) -> Result<CoefficientProfile> {
        let sup = self.theta_sup();
        match &self.coeff_map {
            CoeffMap::Ma1 => CoefficientProfile::finite(vec![(0, 1.0), (1, sup)]),
            CoeffMap::Ar1 => CoefficientProfile::ar1(sup),
            CoeffMap::Scaled { base } => Ok(envelope(&[base.clone()]).scaled(sup)),
            CoeffMap::Table { profiles } => Ok(envelope(profiles)),
        }
    }

    /// Stationary mean of `Σ_j c_j²(θ)` (finite chains only).
    pub fn mean_sum_squared(&self) -> Result<f64> {
        let pi = stationary_distribution(self)?;
        pi.iter()
            .enumerate()
            .map(|(i, &w)| Ok(w * self.profile_of_state(i)?.sum_squared().value))
            .sum()
    }
}

/// Finite profile with `|c_j|` maximized over the given profiles.
fn envelope(profiles: &[CoefficientProfile]) -> CoefficientProfile {
    let lag = profiles.iter().map(|p| p.truncation_lag()).max().unwrap_or(0) as i64;
    let mut coefficients = Vec::new();
    for j in -lag..=lag {
        let m = profiles
            .iter()
            .map(|p| {
                if j.unsigned_abs() as usize <= p.truncation_lag() {
                    p.taps()[(j + p.truncation_lag() as i64) as usize].abs()
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        if m != 0.0 {
            coefficients.push((j, m));
        }
    }
    CoefficientProfile {
        kind: ProfileKind::Finite { coefficients },
        truncation_lag: lag as usize,
    }
}

fn categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding: fall back to the last state with positive mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Samples `θ_1, …, θ_p`.
pub fn sample_theta_chain<R: Rng + ?Sized>(
    model: &RandomCoefficientModel,
    p: usize,
    rng: &mut R,
) -> Result<ThetaPath> {
    if p == 0 {
        return Err(invalid("p", "need p ≥ 1"));
    }
    Ok(match &model.chain {
        ThetaChain::Iid { states, probs } => {
            let idx: Vec<usize> = (0..p).map(|_| categorical(probs, rng)).collect();
            ThetaPath {
                values: idx.iter().map(|&i| states[i]).collect(),
                indices: Some(idx),
            }
        }
        ThetaChain::FiniteMarkov {
            states,
            transition,
            initial,
        } => {
            let mut idx = Vec::with_capacity(p);
            let mut s = categorical(initial, rng);
            idx.push(s);
            for _ in 1..p {
                s = categorical(&transition[s], rng);
                idx.push(s);
            }
            ThetaPath {
                values: idx.iter().map(|&i| states[i]).collect(),
                indices: Some(idx),
            }
        }
        ThetaChain::BoundedAr1 {
            phi,
            bound,
            burn_in,
        } => {
            let mut theta = 0.0;
            let mut step = |rng: &mut R| {
                let xi = bound * (2.0 * rng.random::<f64>() - 1.0);
                theta = phi * theta + xi;
                theta
            };
            for _ in 0..*burn_in {
                step(rng);
            }
            ThetaPath {
                values: (0..p).map(|_| step(rng)).collect(),
                indices: None,
            }
        }
    })
}

/// Stationary law `π` of a finite chain (`πP = π`, `Σπ = 1`).
///
/// For iid chains this is the marginal. Errors on reducible or continuous
/// chains.
pub fn stationary_distribution(model: &RandomCoefficientModel) -> Result<Vec<f64>> {
    match &model.chain {
        ThetaChain::Iid { probs, .. } => Ok(probs.clone()),
        ThetaChain::FiniteMarkov { transition, .. } => markov_stationary(transition),
        ThetaChain::BoundedAr1 { .. } => Err(invalid(
            "chain",
            "continuous-state chain has no finite stationary vector",
        )),
    }
}

pub(crate) fn markov_stationary(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    if !is_irreducible(transition) {
        return Err(Error::ReducibleChain);
    }
    // (Pᵀ - I) π = 0 with the last equation replaced by Σπ = 1
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate().take(n - 1) {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = transition[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[n - 1] = vec![1.0; n];
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    let mut pi = solve(&a, &rhs)?;
    // one step of iterative refinement
    let residual: Vec<f64> = (0..n)
        .map(|i| rhs[i] - (0..n).map(|j| a[i][j] * pi[j]).sum::<f64>())
        .collect();
    let correction = solve(&a, &residual)?;
    for (p, c) in pi.iter_mut().zip(&correction) {
        *p += c;
    }
    for p in pi.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

/// Gaussian elimination with partial pivoting.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-300 {
            return Err(Error::ReducibleChain);
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Ok(x)
}
