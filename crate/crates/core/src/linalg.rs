//! Solvers specialised to truncated operators.
//!
//! `M(T - σ)` is a symmetric matrix with non-positive off-diagonal entries.
//! For `σ` below the bottom of the spectrum it is a non-singular M-matrix,
//! and Gaussian elimination without pivoting never subtracts quantities of
//! the same sign off the diagonal. Solutions for non-negative right-hand
//! sides are therefore computed without cancellation and stay non-negative.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::truncation::TruncatedOperator;

/// Sparse `LDLᵀ` of `M(T + shift)` eliminating in reverse vertex order
/// (leaves before the root for breadth-first orderings, so trees and paths
/// see no fill-in).
#[derive(Clone, Debug)]
pub struct MFactor {
    measure: Vec<f64>,
    /// Pivot `D_k`, indexed by vertex.
    pivot: Vec<f64>,
    /// `(i, l_ik)` for vertices `i` eliminated after `k`; `l_ik <= 0`.
    lower: Vec<Vec<(usize, f64)>>,
}

impl MFactor {
    /// Factors `M(T + shift)`. Fails with [`Error::NoConvergence`] if a
    /// pivot is not positive, i.e. if `-shift` is not below the spectrum.
    pub fn new(op: &TruncatedOperator, shift: f64) -> Result<Self> {
        let n = op.len();
        let m = op.measure();
        let mut rows: Vec<HashMap<usize, f64>> = (0..n)
            .map(|i| op.arcs(i).iter().map(|&(j, b)| (j, -b)).collect())
            .collect();
        let mut diag: Vec<f64> = (0..n).map(|i| m[i] * (op.diag()[i] + shift)).collect();
        let mut done = vec![false; n];
        let mut pivot = vec![0.0; n];
        let mut lower = vec![Vec::new(); n];
        for k in (0..n).rev() {
            let d = diag[k];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NoConvergence(format!(
                    "non-positive pivot {d:e} at {}: shifted operator is not positive definite",
                    op.ids()[k]
                )));
            }
            done[k] = true;
            pivot[k] = d;
            let row: Vec<(usize, f64)> = rows[k]
                .iter()
                .filter(|(j, _)| !done[**j])
                .map(|(&j, &a)| (j, a))
                .collect();
            for &(i, a_ik) in &row {
                let l = a_ik / d;
                for &(j, a_kj) in &row {
                    if i == j {
                        diag[i] -= l * a_kj;
                    } else {
                        *rows[i].entry(j).or_insert(0.0) -= l * a_kj;
                    }
                }
                lower[k].push((i, l));
            }
            rows[k] = HashMap::new();
        }
        Ok(MFactor { measure: m.to_vec(), pivot, lower })
    }

    /// Solves `(T + shift) g = f`.
    pub fn solve(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let mut y: Vec<f64> = f.iter().zip(&self.measure).map(|(a, m)| a * m).collect();
        for k in (0..n).rev() {
            let yk = y[k];
            for &(i, l) in &self.lower[k] {
                y[i] -= l * yk;
            }
        }
        for k in 0..n {
            y[k] /= self.pivot[k];
        }
        for k in 0..n {
            let mut acc = y[k];
            for &(i, l) in &self.lower[k] {
                acc -= l * y[i];
            }
            y[k] = acc;
        }
        y
    }
}

/// Eigenvalues (ascending) and `ℓ²(m)`-orthonormal eigenvectors (columns)
/// from a dense symmetric eigendecomposition.
pub fn dense_eigen(op: &TruncatedOperator) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(op.symmetrized_dense());
    let n = op.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &k) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, c)] = eig.eigenvectors[(i, k)] / op.measure()[i].sqrt();
        }
    }
    (values, vecs)
}

/// Cyclic two-sided Jacobi on the symmetrized operator. An off-diagonal
/// entry is annihilated once it is below `ε √(a_pp a_qq)`, which keeps
/// relative accuracy for strongly graded positive definite matrices where
/// the QR algorithm only resolves eigenvalues down to `ε max|λ|`.
/// Eigenvalues ascending, `ℓ²(m)`-orthonormal eigenvectors as columns.
pub fn graded_eigen(op: &TruncatedOperator) -> (Vec<f64>, DMatrix<f64>) {
    let n = op.len();
    let mut a = op.symmetrized_dense();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                if apq.abs() <= f64::EPSILON * (a[(p, p)] * a[(q, q)]).abs().sqrt() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let tau = s / (1.0 + c);
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        let np = akp - s * (akq + tau * akp);
                        let nq = akq + s * (akp - tau * akq);
                        a[(k, p)] = np;
                        a[(p, k)] = np;
                        a[(k, q)] = nq;
                        a[(q, k)] = nq;
                    }
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp - s * (vkq + tau * vkp);
                    v[(k, q)] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &k) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, c)] = v[(i, k)] / op.measure()[i].sqrt();
        }
    }
    (values, vecs)
}

/// `e^{-tT} f` from the dense eigendecomposition.
pub fn dense_semigroup(op: &TruncatedOperator, t: f64, f: &[f64]) -> Vec<f64> {
    let (vals, vecs) = dense_eigen(op);
    let n = op.len();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let col = vecs.column(k);
        let coef: f64 = (0..n).map(|i| col[i] * f[i] * op.measure()[i]).sum::<f64>() * (-t * vals[k]).exp();
        for i in 0..n {
            out[i] += coef * col[i];
        }
    }
    out
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, beta)` below `x`.
pub fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alpha.len() {
        let off = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] };
        q = alpha[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = f64::EPSILON * (alpha[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by bisection.
pub fn tridiagonal_max(alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    let off = |i: usize| -> f64 {
        let l = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { beta[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..n).map(|i| alpha[i] - off(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| alpha[i] + off(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Last component of the unit eigenvector of the tridiagonal for the
/// eigenvalue `theta`, by two steps of inverse iteration.
fn tridiagonal_last_component(alpha: &[f64], beta: &[f64], theta: f64) -> f64 {
    let n = alpha.len();
    let shift = theta + 1e-13 * theta.abs().max(1.0);
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        // Thomas algorithm for (T - shift) y = x
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = alpha[0] - shift;
        if piv == 0.0 {
            piv = 1e-300;
        }
        if n > 1 {
            c[0] = beta[0] / piv;
        }
        d[0] = x[0] / piv;
        for i in 1..n {
            let mut p = alpha[i] - shift - beta[i - 1] * c[i - 1];
            if p == 0.0 {
                p = 1e-300;
            }
            if i + 1 < n {
                c[i] = beta[i] / p;
            }
            d[i] = (x[i] - beta[i - 1] * d[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = d.iter().map(|v| v / norm).collect();
    }
    x[n - 1]
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub value: f64,
    pub iterations: usize,
    /// `|β_k s_k|`, the Ritz residual.
    pub residual: f64,
}

/// Largest eigenvalue of `T` (self-adjoint in `ℓ²(m)`) by Lanczos without
/// reorthogonalisation, stopping on the Ritz residual.
pub fn lanczos_max(op: &TruncatedOperator, tol: f64, max_iter: usize, seed: u64) -> LanczosResult {
    let n = op.len();
    let sq: Vec<f64> = op.measure().iter().map(|m| m.sqrt()).collect();
    // symmetric S = M^{1/2} T M^{-1/2}
    let apply_s = |v: &[f64]| -> Vec<f64> {
        let w: Vec<f64> = v.iter().zip(&sq).map(|(a, s)| a / s).collect();
        op.apply(&w).iter().zip(&sq).map(|(a, s)| a * s).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let nq = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.iter_mut().for_each(|v| *v /= nq);
    let mut q_prev = vec![0.0; n];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = LanczosResult { value: 0.0, iterations: 0, residual: f64::INFINITY };
    let limit = max_iter.min(n.max(1) * 4);
    for k in 0..limit {
        let mut w = apply_s(&q);
        let a: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for i in 0..n {
            w[i] -= a * q[i] + b_prev * q_prev[i];
        }
        alpha.push(a);
        let b = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let check = k % 10 == 9 || b <= 1e-14 * a.abs().max(1.0) || k + 1 == limit;
        if check {
            let theta = tridiagonal_max(&alpha, &beta);
            let s = tridiagonal_last_component(&alpha, &beta, theta);
            last = LanczosResult { value: theta, iterations: k + 1, residual: (b * s).abs() };
            if last.residual <= tol * theta.abs().max(1e-300) || b <= 1e-14 * a.abs().max(1.0) {
                return last;
            }
        }
        beta.push(b);
        q_prev = std::mem::replace(&mut q, w.iter().map(|v| v / b).collect());
    }
    last
}
