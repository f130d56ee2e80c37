//! Linear-process coefficient profiles and data-matrix simulation.
//!
//! A row of the data matrix is `X_t = Σ_{|j| ≤ J} c_j Z_{t-j}`, where the
//! two-sided sum is truncated at the lag `J` stored in the profile.

mod filter;
mod random;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use filter::{apply_filter, row_noise, simulate_matrix, simulate_matrix_random_coeff};
pub use random::{
    sample_theta_chain, stationary_distribution, CoeffMap, RandomCoefficientModel, ThetaChain,
    ThetaPath,
};

/// Default relative truncation tolerance: `Σ_{|j|>J} |c_j| ≤ tol · Σ_j |c_j|`.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-10;

/// Largest lag chosen automatically for slowly decaying (FARIMA) profiles.
pub const MAX_AUTO_LAG: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// Explicit `(j, c_j)` pairs; unspecified lags are zero.
    Finite { coefficients: Vec<(i64, f64)> },
    /// `c_0 = 1`, `c_1 = theta`.
    Ma1 { theta: f64 },
    /// `c_j = phi^j` for `j ≥ 0`, `|phi| < 1`.
    Ar1 { phi: f64 },
    /// Fractional filter `(1 - B)^{-d}` with `d < 0`.
    Farima { d: f64 },
}

/// A truncated sum together with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum {
    pub value: f64,
    pub tail_bound: f64,
}

impl TruncatedSum {
    fn exact(value: f64) -> Self {
        TruncatedSum {
            value,
            tail_bound: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummabilityCheck {
    pub pass: bool,
    /// Bound on `Σ_{|j|>J} |c_j|^δ` (`+∞` on failure).
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec", into = "ProfileSpec")]
pub struct CoefficientProfile {
    kind: ProfileKind,
    truncation_lag: usize,
}

/// Serialized form of a profile; `truncation_lag` defaults to the smallest
/// lag meeting `truncation_tol` (capped at [`MAX_AUTO_LAG`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(flatten)]
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_lag: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_tol: Option<f64>,
}

impl TryFrom<ProfileSpec> for CoefficientProfile {
    type Error = Error;

    fn try_from(spec: ProfileSpec) -> Result<Self> {
        let profile = CoefficientProfile::with_tolerance(
            spec.kind,
            spec.truncation_tol.unwrap_or(DEFAULT_TRUNCATION_TOL),
        )?;
        match spec.truncation_lag {
            Some(lag) => profile.with_truncation_lag(lag),
            None => Ok(profile),
        }
    }
}

impl From<CoefficientProfile> for ProfileSpec {
    fn from(p: CoefficientProfile) -> Self {
        ProfileSpec {
            kind: p.kind,
            truncation_lag: Some(p.truncation_lag),
            truncation_tol: None,
        }
    }
}

impl CoefficientProfile {
    /// Builds a profile whose lag is the smallest `J` with relative tail
    /// `Σ_{|j|>J}|c_j| / Σ_j|c_j| ≤ tol`, capped at [`MAX_AUTO_LAG`].
    pub fn with_tolerance(kind: ProfileKind, tol: f64) -> Result<Self> {
        validate_kind(&kind)?;
        if !(tol > 0.0) {
            return Err(invalid("truncation_tol", format!("need tol > 0, got {tol}")));
        }
        let truncation_lag = match &kind {
            ProfileKind::Finite { coefficients } => coefficients
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(j, _)| j.unsigned_abs() as usize)
                .max()
                .unwrap_or(0),
            ProfileKind::Ma1 { .. } => 1,
            ProfileKind::Ar1 { phi } => {
                let a = phi.abs();
                if a == 0.0 {
                    0
                } else {
                    // |φ|^{J+1} ≤ tol
                    ((tol.ln() / a.ln()).ceil() as usize).saturating_sub(1)
                }
            }
            ProfileKind::Farima { d } => {
                // Σ_j |c_j| = 2 for -1 < d < 0; exact tail is |Σ_{j≤J} c_j|
                let head = farima_sum_abs_pow(*d, 1, 1.0);
                let total = head.value + head.tail_bound;
                let mut lag = 1;
                let mut c = 1.0;
                let mut partial = 1.0;
                for j in 1..=MAX_AUTO_LAG {
                    c *= (j as f64 - 1.0 + d) / j as f64;
                    partial += c;
                    lag = j;
                    if j as f64 > -d && partial.abs() <= tol * total {
                        break;
                    }
                }
                lag
            }
        };
        Ok(CoefficientProfile {
            kind,
            truncation_lag,
        })
    }

    pub fn new(kind: ProfileKind) -> Result<Self> {
        Self::with_tolerance(kind, DEFAULT_TRUNCATION_TOL)
    }

    /// The iid profile `c = δ_0`.
    pub fn iid() -> Self {
        CoefficientProfile {
            kind: ProfileKind::Finite {
                coefficients: vec![(0, 1.0)],
            },
            truncation_lag: 0,
        }
    }

    pub fn finite(coefficients: Vec<(i64, f64)>) -> Result<Self> {
        Self::new(ProfileKind::Finite { coefficients })
    }

    pub fn ma1(theta: f64) -> Result<Self> {
        Self::new(ProfileKind::Ma1 { theta })
    }

    pub fn ar1(phi: f64) -> Result<Self> {
        Self::new(ProfileKind::Ar1 { phi })
    }

    /// FARIMA(0, d, 0) truncated at `lag`.
    pub fn farima(d: f64, lag: usize) -> Result<Self> {
        Self::new(ProfileKind::Farima { d })?.with_truncation_lag(lag)
    }

    pub fn with_truncation_lag(mut self, lag: usize) -> Result<Self> {
        if let ProfileKind::Finite { coefficients } = &self.kind {
            let needed = coefficients
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(j, _)| j.unsigned_abs() as usize)
                .max()
                .unwrap_or(0);
            if lag < needed {
                return Err(invalid(
                    "truncation_lag",
                    format!("finite profile has nonzero lag {needed} > {lag}"),
                ));
            }
        }
        self.truncation_lag = lag;
        Ok(self)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn truncation_lag(&self) -> usize {
        self.truncation_lag
    }

    /// Coefficient `c_j` of the untruncated filter.
    pub fn coeff(&self, j: i64) -> f64 {
        match &self.kind {
            ProfileKind::Finite { coefficients } => coefficients
                .iter()
                .filter(|(l, _)| *l == j)
                .map(|(_, c)| c)
                .sum(),
            ProfileKind::Ma1 { theta } => match j {
                0 => 1.0,
                1 => *theta,
                _ => 0.0,
            },
            ProfileKind::Ar1 { phi } => {
                if j >= 0 {
                    phi.powi(j as i32)
                } else {
                    0.0
                }
            }
            ProfileKind::Farima { d } => {
                if j < 0 {
                    return 0.0;
                }
                let mut c = 1.0;
                for i in 1..=j {
                    c *= (i as f64 - 1.0 + d) / i as f64;
                }
                c
            }
        }
    }

    /// Coefficients `c_{-J}, …, c_J` used by the simulation.
    pub fn taps(&self) -> Vec<f64> {
        let lag = self.truncation_lag as i64;
        match &self.kind {
            ProfileKind::Farima { d } => {
                let mut taps = vec![0.0; 2 * lag as usize + 1];
                let mut c = 1.0;
                taps[lag as usize] = c;
                for j in 1..=lag {
                    c *= (j as f64 - 1.0 + d) / j as f64;
                    taps[(lag + j) as usize] = c;
                }
                taps
            }
            ProfileKind::Ar1 { phi } => {
                let mut taps = vec![0.0; 2 * lag as usize + 1];
                let mut c = 1.0;
                for j in 0..=lag {
                    taps[(lag + j) as usize] = c;
                    c *= phi;
                }
                taps
            }
            _ => (-lag..=lag).map(|j| self.coeff(j)).collect(),
        }
    }

    /// Profile with every coefficient multiplied by `s` (as a finite profile).
    pub fn scaled(&self, s: f64) -> CoefficientProfile {
        let lag = self.truncation_lag as i64;
        let coefficients = self
            .taps()
            .into_iter()
            .zip(-lag..=lag)
            .filter(|(c, _)| *c != 0.0)
            .map(|(c, j)| (j, s * c))
            .collect();
        CoefficientProfile {
            kind: ProfileKind::Finite { coefficients },
            truncation_lag: self.truncation_lag,
        }
    }

    /// `Σ_j c_j²`: closed form for MA(1) and AR(1), truncated otherwise.
    pub fn sum_squared(&self) -> TruncatedSum {
        match &self.kind {
            ProfileKind::Ma1 { theta } => TruncatedSum::exact(1.0 + theta * theta),
            ProfileKind::Ar1 { phi } => TruncatedSum::exact(1.0 / (1.0 - phi * phi)),
            _ => self.sum_abs_pow(2.0),
        }
    }

    /// `Σ_j |c_j|^e`: closed form for MA(1) and AR(1), truncated at `J`
    /// with a tail bound for FARIMA.
    pub fn sum_abs_pow(&self, exponent: f64) -> TruncatedSum {
        debug_assert!(exponent > 0.0);
        match &self.kind {
            ProfileKind::Finite { coefficients } => {
                let mut lags: Vec<i64> = coefficients.iter().map(|(j, _)| *j).collect();
                lags.sort_unstable();
                lags.dedup();
                TruncatedSum::exact(
                    lags.into_iter()
                        .map(|j| self.coeff(j).abs().powf(exponent))
                        .sum(),
                )
            }
            ProfileKind::Ma1 { theta } => TruncatedSum::exact(1.0 + theta.abs().powf(exponent)),
            ProfileKind::Ar1 { phi } => {
                TruncatedSum::exact(1.0 / (1.0 - phi.abs().powf(exponent)))
            }
            ProfileKind::Farima { d } => farima_sum_abs_pow(*d, self.truncation_lag, exponent),
        }
    }

    /// `Σ_{|j|>J} |c_j|` for the profile's lag `J`.
    pub fn truncation_tail(&self) -> f64 {
        match &self.kind {
            ProfileKind::Finite { .. } | ProfileKind::Ma1 { .. } => 0.0,
            ProfileKind::Ar1 { phi } => {
                let a = phi.abs();
                a.powi(self.truncation_lag as i32 + 1) / (1.0 - a)
            }
            ProfileKind::Farima { d } => farima_sum_abs_pow(*d, self.truncation_lag, 1.0).tail_bound,
        }
    }

    /// Whether `Σ_j |c_j|^δ < ∞`, judged from the analytic decay rate.
    pub fn check_summability(&self, delta: f64) -> Result<SummabilityCheck> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", format!("need delta ∈ (0, 1], got {delta}")));
        }
        let lag = self.truncation_lag;
        Ok(match &self.kind {
            ProfileKind::Finite { .. } | ProfileKind::Ma1 { .. } => SummabilityCheck {
                pass: true,
                tail_estimate: 0.0,
            },
            ProfileKind::Ar1 { phi } => {
                let a = phi.abs().powf(delta);
                SummabilityCheck {
                    pass: true,
                    tail_estimate: a.powi(lag as i32 + 1) / (1.0 - a),
                }
            }
            ProfileKind::Farima { d } => {
                // |c_j| ≍ j^{d-1}: p-series with exponent δ(1 - d)
                if delta * (1.0 - d) > 1.0 {
                    SummabilityCheck {
                        pass: true,
                        tail_estimate: farima_sum_abs_pow(*d, lag, delta).tail_bound,
                    }
                } else {
                    SummabilityCheck {
                        pass: false,
                        tail_estimate: f64::INFINITY,
                    }
                }
            }
        })
    }
}

fn validate_kind(kind: &ProfileKind) -> Result<()> {
    match kind {
        ProfileKind::Finite { coefficients } => {
            if coefficients.iter().any(|(_, c)| !c.is_finite()) {
                return Err(invalid("coefficients", "non-finite coefficient"));
            }
        }
        ProfileKind::Ma1 { theta } => {
            if !theta.is_finite() {
                return Err(invalid("theta", "non-finite"));
            }
        }
        ProfileKind::Ar1 { phi } => {
            if !(phi.abs() < 1.0) {
                return Err(invalid("phi", format!("need |phi| < 1, got {phi}")));
            }
        }
        ProfileKind::Farima { d } => {
            if !(*d < 0.0) {
                return Err(invalid("d", format!("need d < 0, got {d}")));
            }
        }
    }
    Ok(())
}

/// `Σ_{j ≤ J} |c_j|^e` for the fractional filter plus a bound on the rest.
///
/// For `i > 1 - d` the ratio `|c_i / c_{i-1}| = 1 - (1-d)/i` gives
/// `|c_j| ≤ |c_J| ((J+1)/(j+1))^{1-d}`, hence
/// `Σ_{j>J} |c_j|^e ≤ |c_J|^e (J+1) / (e(1-d) - 1)`. For `e = 1` the tail is
/// exact: `Σ_j c_j = 0` and all terms beyond `J > -d` share one sign.
fn farima_sum_abs_pow(d: f64, lag: usize, exponent: f64) -> TruncatedSum {
    // make sure the bound's monotone regime has been reached
    let sign_lag = (-d).ceil() as usize + 1;
    let stop = lag.max(sign_lag);
    let mut c = 1.0;
    let mut value = 1.0;
    let mut extra = 0.0;
    let mut signed = 1.0;
    let mut c_stop = 1.0;
    for j in 1..=stop {
        c *= (j as f64 - 1.0 + d) / j as f64;
        let term = c.abs().powf(exponent);
        if j <= lag {
            value += term;
        } else {
            extra += term;
        }
        signed += c;
        c_stop = c;
    }
    let s = exponent * (1.0 - d);
    let tail_bound = if exponent == 1.0 {
        signed.abs() + extra
    } else if s > 1.0 {
        c_stop.abs().powf(exponent) * (stop as f64 + 1.0) / (s - 1.0) + extra
    } else {
        f64::INFINITY
    };
    TruncatedSum { value, tail_bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn closed_form_coefficients() {
        let ar = CoefficientProfile::ar1(0.5).unwrap();
        assert_eq!(ar.coeff(3), 0.125);
        assert_eq!(ar.coeff(-1), 0.0);
        let ma = CoefficientProfile::ma1(0.7).unwrap();
        assert_eq!(ma.coeff(1), 0.7);
        assert_eq!(ma.coeff(0), 1.0);
        assert_eq!(ma.coeff(2), 0.0);
        let fa = CoefficientProfile::farima(-0.3, 10).unwrap();
        assert!((fa.coeff(2) - (-0.105)).abs() < 1e-15);
        assert!((fa.coeff(2) - (-0.3 * 0.7 / 2.0)).abs() < 1e-16);
    }

    #[test]
    fn farima_recursion_matches_gamma_formula() {
        // c_j = Γ(j + d) / (Γ(d) Γ(j + 1)), with Γ(d) = Γ(d + 1) / d
        for d in [-0.3, -0.45, -0.05] {
            let profile = CoefficientProfile::farima(d, 1000).unwrap();
            let taps = profile.taps();
            for j in 1..=1000usize {
                let jf = j as f64;
                let oracle = d * (ln_gamma(jf + d) - ln_gamma(d + 1.0) - ln_gamma(jf + 1.0)).exp();
                let got = taps[1000 + j];
                assert!(((got - oracle) / oracle).abs() <= 1e-10, "d={d} j={j}");
                if j % 97 == 0 {
                    assert_eq!(profile.coeff(j as i64), got);
                }
            }
        }
    }

    #[test]
    fn sums_of_squares() {
        assert_eq!(CoefficientProfile::ma1(0.5).unwrap().sum_squared().value, 1.25);
        let ar = CoefficientProfile::ar1(0.5).unwrap().sum_squared();
        assert!((ar.value - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(CoefficientProfile::iid().sum_squared().value, 1.0);
    }

    #[test]
    fn sums_of_abs_powers() {
        assert_eq!(CoefficientProfile::ma1(1.0).unwrap().sum_abs_pow(2.0).value, 2.0);
        assert_eq!(CoefficientProfile::ar1(0.5).unwrap().sum_abs_pow(1.0).value, 2.0);
    }

    #[test]
    fn farima_abs_sum_matches_long_direct_summation() {
        let lag = 1_000_000;
        let d = -0.3;
        let mut direct = 1.0;
        let mut c = 1.0f64;
        for j in 1..=lag {
            c *= (j as f64 - 1.0 + d) / j as f64;
            direct += c.abs();
        }
        let profile = CoefficientProfile::farima(d, lag).unwrap();
        let got = profile.sum_abs_pow(1.0);
        assert!((got.value - direct).abs() < 1e-8);
        // Σ_j |c_j| = 2 exactly for -1 < d < 0
        assert!((got.value + got.tail_bound - 2.0).abs() < 1e-10);
    }

    #[test]
    fn farima_tail_bound_dominates_the_tail() {
        let d = -0.4;
        for exponent in [0.9, 1.0, 2.0] {
            let short = CoefficientProfile::farima(d, 50).unwrap().sum_abs_pow(exponent);
            let long = CoefficientProfile::farima(d, 200_000).unwrap().sum_abs_pow(exponent);
            let observed = long.value - short.value;
            assert!(observed <= short.tail_bound, "e={exponent}");
            assert!(short.tail_bound.is_finite());
        }
    }

    #[test]
    fn summability_rules() {
        let ar = CoefficientProfile::ar1(0.9).unwrap();
        assert!(ar.check_summability(0.5).unwrap().pass);
        let f5 = CoefficientProfile::farima(-0.5, 100).unwrap();
        assert!(f5.check_summability(0.9).unwrap().pass);
        let f1 = CoefficientProfile::farima(-0.1, 100).unwrap();
        let check = f1.check_summability(0.5).unwrap();
        assert!(!check.pass && check.tail_estimate.is_infinite());
        assert!(ar.check_summability(0.0).is_err());
        assert!(ar.check_summability(1.5).is_err());
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        assert!(CoefficientProfile::ar1(1.0).is_err());
        assert!(CoefficientProfile::ar1(-1.2).is_err());
        assert!(CoefficientProfile::farima(0.1, 10).is_err());
        assert!(CoefficientProfile::finite(vec![(0, 1.0), (3, 0.5)])
            .unwrap()
            .with_truncation_lag(2)
            .is_err());
    }

    #[test]
    fn automatic_lag_meets_tolerance() {
        for phi in [0.1, 0.5, -0.9, 0.99] {
            let p = CoefficientProfile::ar1(phi).unwrap();
            let total = p.sum_abs_pow(1.0).value;
            assert!(p.truncation_tail() <= DEFAULT_TRUNCATION_TOL * total);
            let shorter = p.clone().with_truncation_lag(p.truncation_lag() - 1).unwrap();
            assert!(shorter.truncation_tail() > DEFAULT_TRUNCATION_TOL * total);
        }
        let f = CoefficientProfile::new(ProfileKind::Farima { d: -0.3 }).unwrap();
        assert_eq!(f.truncation_lag(), MAX_AUTO_LAG);
        let loose = CoefficientProfile::with_tolerance(ProfileKind::Farima { d: -0.8 }, 1e-2).unwrap();
        assert!(loose.truncation_tail() <= 1e-2 * 2.0);
        assert!(loose.truncation_lag() < MAX_AUTO_LAG);
    }

    #[test]
    fn profile_round_trips_through_json() {
        let p = CoefficientProfile::ar1(0.3).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: CoefficientProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
        let spec: CoefficientProfile =
            serde_json::from_str(r#"{"kind":"ma1","theta":2.0}"#).unwrap();
        assert_eq!(spec.truncation_lag(), 1);
        assert!(serde_json::from_str::<CoefficientProfile>(r#"{"kind":"ar1","phi":1.5}"#).is_err());
    }
}
