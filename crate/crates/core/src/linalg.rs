//! Dense matrices and symmetric eigenvalue solvers.
//!
//! Two solvers back [`top_k_eigenvalues`]:
//!
//! * full decomposition: Householder reduction to tridiagonal form followed
//!   by implicit QL iterations (eigenvalues only);
//! * Lanczos with full reorthogonalization, stopped once every requested
//!   Ritz pair has residual `|β_j s_{j,i}|` below tolerance.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds from row-major data; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(
                "data",
                format!("expected {} entries, got {}", rows * cols, data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("rows", "ragged rows"));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Returns a copy with rows permuted so that row `i` is `self.row(perm[i])`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in perm {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Checks `|a_ij - a_ji| ≤ rel_tol · max|a|`.
    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let bound = rel_tol * self.max_abs();
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= bound))
    }

    fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Dot product with a fixed four-lane summation order.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = T::zero();
    for (&x, &y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

/// Which algorithm computes the top of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    /// Full decomposition for `p < full_threshold` unless only a few
    /// eigenvalues of a moderately large matrix are wanted
    /// (`p ≥ 64`, `k ≤ p / 8`); Lanczos otherwise.
    #[default]
    Auto,
    Full,
    Lanczos,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub method: EigenMethod,
    pub full_threshold: usize,
    /// Residual tolerance for Lanczos, relative to `max(1, |θ_max|)`.
    pub tol: f64,
    /// Cap on the Krylov dimension (clamped to `p`).
    pub max_krylov: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            method: EigenMethod::Auto,
            full_threshold: 512,
            tol: 1e-12,
            max_krylov: usize::MAX,
        }
    }
}

impl EigenOptions {
    pub fn with_method(method: EigenMethod) -> Self {
        EigenOptions {
            method,
            ..Self::default()
        }
    }
}

/// All eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    check_symmetric(a)?;
    let (mut d, mut e) = tridiagonalize(a);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

/// The `k` algebraically largest eigenvalues of a symmetric matrix, descending.
pub fn top_k_eigenvalues<T: Real>(a: &Matrix<T>, k: usize) -> Result<Vec<T>> {
    top_k_eigenvalues_with(a, k, &EigenOptions::default())
}

pub fn top_k_eigenvalues_with<T: Real>(
    a: &Matrix<T>,
    k: usize,
    opts: &EigenOptions,
) -> Result<Vec<T>> {
    let p = a.rows();
    if k == 0 || k > p {
        return Err(invalid("k", format!("need 1 ≤ k ≤ p = {p}, got {k}")));
    }
    let use_full = match opts.method {
        EigenMethod::Full => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => p < opts.full_threshold && !(p >= 64 && 8 * k <= p),
    };
    if use_full {
        let mut all = symmetric_eigenvalues(a)?;
        all.truncate(k);
        Ok(all)
    } else {
        check_symmetric(a)?;
        lanczos_top_k(a, k, opts)
    }
}

fn check_symmetric<T: Real>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(invalid(
            "matrix",
            format!("not square: {} x {}", a.rows(), a.cols()),
        ));
    }
    if !a.is_symmetric(T::of(1e-10)) {
        return Err(invalid("matrix", "not symmetric within 1e-10 relative"));
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// Returns the diagonal `d` and the off-diagonal `e` with `e[i]` coupling
/// `i` and `i + 1` (`e[n-1] = 0`). Only the lower triangle is touched.
fn tridiagonalize<T: Real>(a: &Matrix<T>) -> (Vec<T>, Vec<T>) {
    let n = a.rows();
    let mut w = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let two = T::of(2.0);
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        // x = w[k+1.., k]
        for i in 0..m {
            v[i] = w[(k + 1 + i, k)];
        }
        let xnorm = norm(&v[..m]);
        d[k] = w[(k, k)];
        if xnorm == T::zero() {
            e[k] = T::zero();
            continue;
        }
        let alpha = if v[0] > T::zero() { -xnorm } else { xnorm };
        e[k] = alpha;
        v[0] -= alpha;
        let vnorm = norm(&v[..m]);
        if vnorm == T::zero() {
            continue;
        }
        for vi in v[..m].iter_mut() {
            *vi /= vnorm;
        }
        // p = W v on the trailing block, lower-triangle storage
        for x in p[..m].iter_mut() {
            *x = T::zero();
        }
        for i in 0..m {
            let row = w.row(k + 1 + i);
            let mut acc = row[k + 1 + i] * v[i];
            for j in 0..i {
                let aij = row[k + 1 + j];
                acc += aij * v[j];
                p[j] += aij * v[i];
            }
            p[i] += acc;
        }
        let kk = dot(&v[..m], &p[..m]);
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        // W -= 2 (v pᵀ + p vᵀ)
        for i in 0..m {
            let (vi, pi) = (v[i], p[i]);
            let row = w.row_mut(k + 1 + i);
            for j in 0..=i {
                row[k + 1 + j] -= two * (vi * p[j] + pi * v[j]);
            }
        }
    }
    if n >= 2 {
        d[n - 2] = w[(n - 2, n - 2)];
        e[n - 2] = w[(n - 1, n - 2)];
    }
    if n >= 1 {
        d[n - 1] = w[(n - 1, n - 1)];
        e[n - 1] = T::zero();
    }
    (d, e)
}

/// Implicit QL iterations on a symmetric tridiagonal matrix.
///
/// On return `d` holds the eigenvalues (unordered). When `z` is given (an
/// `n × n` matrix, usually the identity) its columns are rotated into the
/// eigenvectors.
pub(crate) fn tridiagonal_ql<T: Real>(
    d: &mut [T],
    e: &mut [T],
    mut z: Option<&mut Matrix<T>>,
) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    let two = T::of(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: e[l].abs().to_f64_lossy(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Deterministic pseudo-random unit-free start vectors for Lanczos.
fn start_vector<T: Real>(n: usize, salt: u64) -> Vec<T> {
    let mut state = salt.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ 0x1234_5678_9ABC_DEF0;
    (0..n)
        .map(|_| {
            state = crate::seed::mix64(state.wrapping_add(0x9E37_79B9_7F4A_7C15));
            // uniform in [-1, 1)
            T::of((state >> 11) as f64 / (1u64 << 52) as f64 - 1.0)
        })
        .collect()
}

fn orthogonalize<T: Real>(v: &mut [T], basis: &[Vec<T>]) {
    // two passes of classical Gram–Schmidt
    for _ in 0..2 {
        for q in basis {
            let h = dot(q, v);
            for (vi, &qi) in v.iter_mut().zip(q) {
                *vi -= h * qi;
            }
        }
    }
}

fn lanczos_top_k<T: Real>(a: &Matrix<T>, k: usize, opts: &EigenOptions) -> Result<Vec<T>> {
    let n = a.rows();
    let max_dim = opts.max_krylov.clamp(k, n);
    let tol = T::of(opts.tol);
    let scale = a.max_abs() * T::of_usize(n);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(max_dim.min(64));
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new(); // betas[j] couples j and j + 1

    let mut q = start_vector::<T>(n, 0);
    let qn = norm(&q);
    q.iter_mut().for_each(|x| *x /= qn);
    let mut w = vec![T::zero(); n];
    let mut restarts = 1u64;
    let mut last_residual = f64::INFINITY;

    loop {
        a.mul_vec_into(&q, &mut w);
        let alpha = dot(&q, &w);
        basis.push(q.clone());
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let beta = norm(&w);
        let j = basis.len();

        let exhausted = j == n;
        let invariant = beta <= T::epsilon() * scale;
        let check = exhausted || j >= max_dim || (j >= k && (j % 4 == 0 || invariant));
        if check {
            let (ritz, residuals) = ritz_pairs(&alphas, &betas, beta)?;
            // descending order of Ritz values
            let mut order: Vec<usize> = (0..ritz.len()).collect();
            order.sort_by(|&x, &y| ritz[y].partial_cmp(&ritz[x]).unwrap_or(std::cmp::Ordering::Equal));
            if ritz.len() >= k {
                let top = ritz[order[0]].abs().max(T::one());
                let worst = order[..k]
                    .iter()
                    .map(|&i| residuals[i])
                    .fold(T::zero(), T::max);
                last_residual = (worst / top).to_f64_lossy();
                if exhausted || worst <= tol * top {
                    return Ok(order[..k].iter().map(|&i| ritz[i]).collect());
                }
            }
            if j >= max_dim {
                return Err(Error::NoConvergence {
                    iterations: j,
                    residual: last_residual,
                });
            }
        }

        if invariant {
            // Krylov space is invariant: continue with a fresh direction.
            let mut fresh = start_vector::<T>(n, restarts);
            restarts += 1;
            orthogonalize(&mut fresh, &basis);
            let fnorm = norm(&fresh);
            if fnorm <= T::of(1e-3) {
                if restarts > 64 {
                    return Err(Error::NoConvergence {
                        iterations: j,
                        residual: last_residual,
                    });
                }
                continue;
            }
            fresh.iter_mut().for_each(|x| *x /= fnorm);
            betas.push(T::zero());
            q = fresh;
        } else {
            betas.push(beta);
            q = w.iter().map(|&x| x / beta).collect();
        }
    }
}

/// Eigenvalues of the Lanczos tridiagonal matrix and the residual bound
/// `|β · s_last,i|` of each Ritz pair.
fn ritz_pairs<T: Real>(alphas: &[T], betas: &[T], beta_next: T) -> Result<(Vec<T>, Vec<T>)> {
    let m = alphas.len();
    let mut d = alphas.to_vec();
    let mut e: Vec<T> = betas.to_vec();
    e.push(T::zero());
    let mut z = Matrix::identity(m);
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;
    let residuals = (0..m).map(|i| (beta_next * z[(m - 1, i)]).abs()).collect();
    Ok((d, residuals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_by_two() {
        let a = sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        for method in [EigenMethod::Full, EigenMethod::Lanczos] {
            let ev = top_k_eigenvalues_with(&a, 2, &EigenOptions::with_method(method)).unwrap();
            assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn identity_with_both_solvers() {
        let a = Matrix::<f64>::identity(3);
        for method in [EigenMethod::Full, EigenMethod::Lanczos] {
            let ev = top_k_eigenvalues_with(&a, 2, &EigenOptions::with_method(method)).unwrap();
            assert_eq!(ev.len(), 2);
            assert!(ev.iter().all(|&x| (x - 1.0).abs() < 1e-14), "{ev:?}");
        }
    }

    #[test]
    fn tridiagonal_with_known_spectrum() {
        // path-graph Laplacian-like matrix: 2 on the diagonal, -1 off it
        let n = 12;
        let mut a = Matrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let mut exact: Vec<f64> = (1..=n)
            .map(|j| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let all = symmetric_eigenvalues(&a).unwrap();
        for (x, y) in all.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-13);
        }
        let top = top_k_eigenvalues_with(&a, 4, &EigenOptions::with_method(EigenMethod::Lanczos)).unwrap();
        for (x, y) in top.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ql_eigenvectors_diagonalize() {
        let mut d = vec![1.0, 2.0, 3.0, 4.0];
        let mut e = vec![0.5, 0.25, 0.125, 0.0];
        let (d0, e0) = (d.clone(), e.clone());
        let mut z = Matrix::identity(4);
        tridiagonal_ql(&mut d, &mut e, Some(&mut z)).unwrap();
        for i in 0..4 {
            let v: Vec<f64> = (0..4).map(|r| z[(r, i)]).collect();
            for r in 0..4 {
                let mut tv = d0[r] * v[r];
                if r > 0 {
                    tv += e0[r - 1] * v[r - 1];
                }
                if r < 3 {
                    tv += e0[r] * v[r + 1];
                }
                assert!((tv - d[i] * v[r]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = sym(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(top_k_eigenvalues(&a, 1).is_err());
        let b = Matrix::<f64>::identity(2);
        assert!(top_k_eigenvalues(&b, 0).is_err());
        assert!(top_k_eigenvalues(&b, 3).is_err());
    }

    #[test]
    fn lanczos_cap_reports_non_convergence() {
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 1e-3).collect();
        let a = Matrix::from_diagonal(&diag);
        let opts = EigenOptions {
            method: EigenMethod::Lanczos,
            max_krylov: 3,
            ..EigenOptions::default()
        };
        match top_k_eigenvalues_with(&a, 3, &opts) {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn single_precision_path() {
        let a = Matrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = top_k_eigenvalues(&a, 2).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-5 && (ev[1] - 1.0).abs() < 1e-5);
    }
}
