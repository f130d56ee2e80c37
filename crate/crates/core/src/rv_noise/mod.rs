//! Regularly varying noise laws.
//!
//! Three families with exact survival functions are provided so that the
//! normalizing sequence `a_m` and truncated moments are computable without
//! estimation:
//!
//! * `ExactPareto`: `P(Z > x) = x^{-α}` on `x ≥ 1` (tail balance `q = 1`).
//! * `SymmetricPareto`: density `α/2 |x|^{-α-1}` on `|x| ≥ 1` (`q = 1/2`).
//! * `StudentT`: Student-t with `ν = α` degrees of freedom (`q = 1/2`).
//!
//! `a_m` is the generalized inverse `inf{x : P(|Z| > x) ≤ 1/m}`.

mod quadrature;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta_reg, gamma::ln_gamma};

use crate::error::{invalid, Error, Result};

const BISECTION_REL_TOL: f64 = 1e-14;
const QUADRATURE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    ExactPareto,
    SymmetricPareto,
    StudentT,
}

/// Serialized form of a [`TailModel`]; validated on conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailModelSpec {
    pub alpha: f64,
    pub family: NoiseFamily,
    #[serde(default)]
    pub center_mean: bool,
}

/// A regularly varying noise law with tail index `alpha ∈ (0, 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailModelSpec", into = "TailModelSpec")]
pub struct TailModel {
    alpha: f64,
    family: NoiseFamily,
    center_mean: bool,
}

impl TryFrom<TailModelSpec> for TailModel {
    type Error = Error;

    fn try_from(spec: TailModelSpec) -> Result<Self> {
        TailModel::new(spec.alpha, spec.family, spec.center_mean)
    }
}

impl From<TailModel> for TailModelSpec {
    fn from(m: TailModel) -> Self {
        TailModelSpec {
            alpha: m.alpha,
            family: m.family,
            center_mean: m.center_mean,
        }
    }
}

impl TailModel {
    /// Validates and builds a tail model.
    ///
    /// Rejects `alpha ∉ (0, 4)`, centering when the mean does not exist
    /// (`alpha ≤ 1`), and a non-zero-mean law when `alpha > 5/3`.
    pub fn new(alpha: f64, family: NoiseFamily, center_mean: bool) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 4.0) {
            return Err(invalid(
                "alpha",
                format!("alpha = {alpha} violates alpha ∈ (0, 4)"),
            ));
        }
        if center_mean && alpha <= 1.0 {
            return Err(invalid(
                "center_mean",
                format!("the mean does not exist for alpha = {alpha} ≤ 1"),
            ));
        }
        let model = TailModel {
            alpha,
            family,
            center_mean,
        };
        if alpha > 5.0 / 3.0 && model.mean() != 0.0 {
            return Err(invalid(
                "center_mean",
                format!("alpha = {alpha} ∈ (5/3, 4) requires mean-zero noise; set center_mean"),
            ));
        }
        Ok(model)
    }

    /// Un-shifted law without the mean-zero rule for `α > 5/3`.
    ///
    /// Meant for analytic functionals of the raw law (e.g. `E Z²` of an
    /// exact Pareto with `α = 3`); experiment configs reject such models.
    pub fn raw(alpha: f64, family: NoiseFamily) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 4.0) {
            return Err(invalid(
                "alpha",
                format!("alpha = {alpha} violates alpha ∈ (0, 4)"),
            ));
        }
        Ok(TailModel {
            alpha,
            family,
            center_mean: false,
        })
    }

    /// Whether the law meets the mean-zero requirement for `α ∈ (5/3, 4)`.
    pub fn satisfies_mean_condition(&self) -> bool {
        self.alpha <= 5.0 / 3.0 || self.mean() == 0.0
    }

    pub fn exact_pareto(alpha: f64) -> Result<Self> {
        Self::new(alpha, NoiseFamily::ExactPareto, false)
    }

    pub fn symmetric_pareto(alpha: f64) -> Result<Self> {
        Self::new(alpha, NoiseFamily::SymmetricPareto, false)
    }

    /// Student-t with `df` degrees of freedom, i.e. tail index `df`.
    pub fn student_t(df: f64) -> Result<Self> {
        Self::new(df, NoiseFamily::StudentT, false)
    }

    pub fn centered(self) -> Result<Self> {
        Self::new(self.alpha, self.family, true)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn center_mean(&self) -> bool {
        self.center_mean
    }

    /// Tail balance `q = lim P(Z > x) / P(|Z| > x)`.
    pub fn balance_q(&self) -> f64 {
        match self.family {
            NoiseFamily::ExactPareto => 1.0,
            NoiseFamily::SymmetricPareto | NoiseFamily::StudentT => 0.5,
        }
    }

    /// Mean of the un-shifted law (`+∞` for exact Pareto with `α ≤ 1`).
    fn raw_mean(&self) -> f64 {
        match self.family {
            NoiseFamily::ExactPareto if self.alpha > 1.0 => self.alpha / (self.alpha - 1.0),
            NoiseFamily::ExactPareto => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// Amount subtracted from each raw draw.
    fn shift(&self) -> f64 {
        if self.center_mean {
            self.raw_mean()
        } else {
            0.0
        }
    }

    /// Mean of the sampled law (`+∞` when it does not exist and `Z ≥ 1`).
    pub fn mean(&self) -> f64 {
        self.raw_mean() - self.shift()
    }

    /// `E[Z²]` of the sampled law, `+∞` when `α ≤ 2`.
    pub fn second_moment(&self) -> f64 {
        let a = self.alpha;
        if a <= 2.0 {
            return f64::INFINITY;
        }
        let raw = a / (a - 2.0);
        match self.family {
            NoiseFamily::ExactPareto => {
                let mu = self.shift();
                raw - mu * mu
            }
            _ => raw,
        }
    }

    /// Draws one variate. Prefer [`TailModel::sampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    pub fn sampler(&self) -> NoiseSampler {
        let kind = match self.family {
            NoiseFamily::ExactPareto => SamplerKind::Pareto {
                inv_alpha: 1.0 / self.alpha,
                shift: self.shift(),
            },
            NoiseFamily::SymmetricPareto => SamplerKind::Symmetric {
                inv_alpha: 1.0 / self.alpha,
            },
            NoiseFamily::StudentT => {
                SamplerKind::StudentT(rand_distr::StudentT::new(self.alpha).expect("alpha > 0"))
            }
        };
        NoiseSampler { kind }
    }

    /// `P(|Z| > x)` for `x ≥ 0`.
    pub fn survival(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        let a = self.alpha;
        match self.family {
            NoiseFamily::ExactPareto if self.center_mean => {
                // Z - μ with Z ≥ 1: the left tail is bounded by μ - 1.
                let mu = self.shift();
                let right = (mu + x).powf(-a);
                let left = if x < mu - 1.0 {
                    1.0 - (mu - x).powf(-a)
                } else {
                    0.0
                };
                (right + left).min(1.0)
            }
            NoiseFamily::ExactPareto | NoiseFamily::SymmetricPareto => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-a)
                }
            }
            NoiseFamily::StudentT => {
                if x == 0.0 {
                    return 1.0;
                }
                let nu = a;
                beta_reg(0.5 * nu, 0.5, nu / (nu + x * x))
            }
        }
    }

    /// Normalizing constant `a_m = inf{x : survival(x) ≤ 1/m}`.
    pub fn norming_constant(&self, m: f64) -> Result<f64> {
        if !(m >= 1.0) {
            return Err(invalid("m", format!("need m ≥ 1, got {m}")));
        }
        match self.family {
            NoiseFamily::ExactPareto | NoiseFamily::SymmetricPareto if !self.center_mean => {
                Ok(m.powf(1.0 / self.alpha))
            }
            _ => self.survival_inverse(1.0 / m),
        }
    }

    fn survival_inverse(&self, level: f64) -> Result<f64> {
        if self.survival(0.0) <= level {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut doublings = 0;
        while self.survival(hi) > level {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 2000 || !hi.is_finite() {
                return Err(Error::BracketFailure { level });
            }
        }
        while hi - lo > BISECTION_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.survival(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// `E[Z² 1{Z² ≤ level}]`.
    pub fn truncated_second_moment(&self, level: f64) -> Result<f64> {
        if !(level > 0.0) {
            return Err(invalid("level", format!("need level > 0, got {level}")));
        }
        let s = level.sqrt();
        let a = self.alpha;
        match self.family {
            NoiseFamily::ExactPareto if self.center_mean => {
                let mu = self.shift();
                let lower = (mu - s).max(1.0);
                let upper = mu + s;
                if upper - lower < 0.5 {
                    let f = |z: f64| (z - mu).powi(2) * a * z.powf(-a - 1.0);
                    quadrature::integrate(f, lower, upper, QUADRATURE_REL_TOL)
                } else {
                    let antiderivative = |z: f64| {
                        let quad = if a == 2.0 {
                            z.ln()
                        } else {
                            z.powf(2.0 - a) / (2.0 - a)
                        };
                        a * (quad - 2.0 * mu * z.powf(1.0 - a) / (1.0 - a))
                            - mu * mu * z.powf(-a)
                    };
                    Ok(antiderivative(upper) - antiderivative(lower))
                }
            }
            NoiseFamily::ExactPareto | NoiseFamily::SymmetricPareto => {
                if s <= 1.0 {
                    Ok(0.0)
                } else if a == 2.0 {
                    Ok(2.0 * s.ln())
                } else {
                    // α (s^{2-α} - 1) / (2 - α), stable near α = 2
                    let e = 2.0 - a;
                    Ok(a * (e * s.ln()).exp_m1() / e)
                }
            }
            NoiseFamily::StudentT => {
                let nu = a;
                let log_norm = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                let density = |x: f64| (log_norm - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()).exp();
                let head_end = s.min(1.0);
                let head = quadrature::integrate(|x| x * x * density(x), 0.0, head_end, QUADRATURE_REL_TOL)?;
                let tail = if s > 1.0 {
                    // x = e^u on [1, s]
                    quadrature::integrate(
                        |u| {
                            let x = u.exp();
                            x * x * x * density(x)
                        },
                        0.0,
                        s.ln(),
                        QUADRATURE_REL_TOL,
                    )?
                } else {
                    0.0
                };
                Ok(2.0 * (head + tail))
            }
        }
    }
}

/// Prepared sampler for a [`TailModel`].
#[derive(Debug, Clone, Copy)]
pub struct NoiseSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone, Copy)]
enum SamplerKind {
    Pareto { inv_alpha: f64, shift: f64 },
    Symmetric { inv_alpha: f64 },
    StudentT(rand_distr::StudentT<f64>),
}

impl Distribution<f64> for NoiseSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            SamplerKind::Pareto { inv_alpha, shift } => {
                // 1 - U lies in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                u.powf(-inv_alpha) - shift
            }
            SamplerKind::Symmetric { inv_alpha } => {
                let negative = rng.random::<bool>();
                let x = (1.0 - rng.random::<f64>()).powf(-inv_alpha);
                if negative {
                    -x
                } else {
                    x
                }
            }
            SamplerKind::StudentT(t) => t.sample(rng),
        }
    }
}

/// Draws `count` iid variates from `model`.
pub fn sample_noise<R: Rng + ?Sized>(model: &TailModel, count: usize, rng: &mut R) -> Vec<f64> {
    let sampler = model.sampler();
    (0..count).map(|_| sampler.sample(rng)).collect()
}
