//! Sample covariance spectra and the diagonal-coupling diagnostics.
//!
//! For a `p × n` matrix `X` the Gram matrix `XXᵀ` has diagonal
//! `S_i = Σ_t X_it²`. Its top eigenvalues are compared against the diagonal
//! order statistics; by Weyl's inequality
//! `|λ_(k) − S_(k)| ≤ ‖XXᵀ − D‖₂ ≤ ‖XXᵀ − D‖_∞`.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::{dot, symmetric_eigenvalues, top_k_eigenvalues_with, EigenOptions, Matrix};
use crate::linproc::CoefficientProfile;
use crate::rv_noise::TailModel;
use crate::scalar::Real;

/// Per-replication spectral summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample<T> {
    /// `λ_(1) ≥ … ≥ λ_(k)` of `XXᵀ`.
    pub eigen_topk: Vec<T>,
    /// `S_(1) ≥ … ≥ S_(k)`.
    pub diag_topk: Vec<T>,
    pub offdiag_inf_norm: T,
    /// `max_{i<j} Σ_t |X_it X_jt|`; zero when `p = 1`.
    pub cross_max: T,
    pub trace: T,
}

impl<T: Real> SpectralSample<T> {
    pub fn compute(x: &Matrix<T>, k: usize) -> Result<Self> {
        Self::compute_with(x, k, &EigenOptions::default())
    }

    pub fn compute_with(x: &Matrix<T>, k: usize, opts: &EigenOptions) -> Result<Self> {
        let g = gram_matrix(x)?;
        let eigen_topk = top_k_eigenvalues_with(&g, k, opts)?;
        let cross_max = if x.rows() >= 2 {
            cross_product_max(x)?
        } else {
            T::zero()
        };
        Ok(SpectralSample {
            eigen_topk,
            diag_topk: diag_order_stats(&g, k),
            offdiag_inf_norm: offdiag_infinity_norm(&g),
            cross_max,
            trace: g.trace(),
        })
    }

    /// `max_j |λ_(j) − S_(j)|`.
    pub fn weyl_gap(&self) -> T {
        self.eigen_topk
            .iter()
            .zip(&self.diag_topk)
            .fold(T::zero(), |m, (&l, &s)| m.max((l - s).abs()))
    }

    /// Whether the Weyl coupling holds up to `10⁻⁸ · trace`.
    pub fn weyl_holds(&self) -> bool {
        self.weyl_gap() <= self.offdiag_inf_norm + T::of(1e-8) * self.trace
    }
}

/// `XXᵀ`, computed on the upper triangle and mirrored.
pub fn gram_matrix<T: Real>(x: &Matrix<T>) -> Result<Matrix<T>> {
    let (p, n) = (x.rows(), x.cols());
    if p == 0 || n == 0 {
        return Err(invalid("X", format!("need p, n ≥ 1, got {p} x {n}")));
    }
    let upper: Vec<Vec<T>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let ri = x.row(i);
            (i..p).map(|j| dot(ri, x.row(j))).collect()
        })
        .collect();
    let mut g = Matrix::zeros(p, p);
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            g[(i, i + off)] = v;
            g[(i + off, i)] = v;
        }
    }
    Ok(g)
}

fn sort_desc<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

/// Top `k` diagonal entries, descending (all of them if `k ≥ p`).
pub fn diag_order_stats<T: Real>(a: &Matrix<T>, k: usize) -> Vec<T> {
    let mut d = a.diagonal();
    sort_desc(&mut d);
    d.truncate(k);
    d
}

/// `max_i Σ_{j≠i} |A_ij|`.
pub fn offdiag_infinity_norm<T: Real>(a: &Matrix<T>) -> T {
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(T::zero(), |s, (_, &v)| s + v.abs())
        })
        .fold(T::zero(), T::max)
}

/// Exact `‖A − D‖₂` by full decomposition; intended for small `p`.
pub fn offdiag_operator_norm<T: Real>(a: &Matrix<T>) -> Result<T> {
    let mut b = a.clone();
    for i in 0..b.rows().min(b.cols()) {
        b[(i, i)] = T::zero();
    }
    let eig = symmetric_eigenvalues(&b)?;
    Ok(eig.iter().fold(T::zero(), |m, &v| m.max(v.abs())))
}

/// `max_{i<j} Σ_t |X_it X_jt|`.
///
/// Pairs are visited in decreasing order of the Cauchy–Schwarz bound
/// `‖X_i‖ ‖X_j‖` and skipped once the bound cannot beat the running maximum;
/// every evaluated pair uses the same summation as the brute-force scan, so
/// the result is identical to it.
pub fn cross_product_max<T: Real>(x: &Matrix<T>) -> Result<T> {
    let p = x.rows();
    if p < 2 {
        return Err(invalid("X", format!("need p ≥ 2 rows, got {p}")));
    }
    let abs: Vec<Vec<T>> = (0..p)
        .map(|i| x.row(i).iter().map(|v| v.abs()).collect())
        .collect();
    let norms: Vec<T> = abs.iter().map(|r| dot(r, r).sqrt()).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // rounding slack on the bound keeps the pruning exact
    let slack = T::one() + T::of(64.0) * T::epsilon() * T::of_usize(x.cols().max(1));
    let mut best = T::zero();
    for (pos, &i) in order.iter().enumerate() {
        if pos + 1 < p && norms[i] * norms[order[pos + 1]] * slack < best {
            break;
        }
        for &j in &order[pos + 1..] {
            if norms[i] * norms[j] * slack < best {
                break;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let v = dot(&abs[a], &abs[b]);
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// `(v − n μ) / a²` elementwise.
pub fn center_scale<T: Real>(values: &[T], n: usize, mu: T, a_np: T) -> Result<Vec<T>> {
    if !(a_np > T::zero()) {
        return Err(invalid("a_np", format!("need a_np > 0, got {a_np}")));
    }
    let shift = T::of_usize(n) * mu;
    let a2 = a_np * a_np;
    Ok(values.iter().map(|&v| (v - shift) / a2).collect())
}

/// Centering constant `μ_{X,α}`: zero below `α = 2`, the truncated second
/// moment at level `a_{np}²` at `α = 2`, and `E[Z²] Σ c_j²` above.
pub fn centering_mu(
    model: &TailModel,
    profile: &CoefficientProfile,
    n: usize,
    p: usize,
) -> Result<f64> {
    centering_mu_with_sum(model, profile.sum_squared().value, n, p)
}

/// [`centering_mu`] with `Σ c_j²` supplied directly (used for random
/// coefficients, where it is the stationary mean).
pub fn centering_mu_with_sum(model: &TailModel, sum_sq: f64, n: usize, p: usize) -> Result<f64> {
    let alpha = model.alpha();
    if alpha < 2.0 {
        return Ok(0.0);
    }
    let m2 = model.second_moment();
    if m2.is_finite() {
        return Ok(m2 * sum_sq);
    }
    let a = model.norming_constant((n as f64) * (p as f64))?;
    Ok(model.truncated_second_moment(a * a)? * sum_sq)
}
