//! Jacobi-rotation kernels: two-sided for Hermitian eigenproblems, one-sided
//! (Hestenes) for singular values. Both work on any size; the public wrappers
//! in the parent module enforce the side cap.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 80;

/// Rotation parameters `(c, s, e)` that zero the `(p, q)` entry of a Hermitian
/// 2×2 block `[[app, apq], [conj(apq), aqq]]`.
///
/// The unitary acts on columns as `col_p ← c·col_p − s·conj(e)·col_q`,
/// `col_q ← s·col_p + c·conj(e)·col_q`.
#[inline]
fn rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> (T, T, C<T>) {
    let b = apq.norm();
    let e = apq.unscale(b);
    let theta = (aqq - app) / (T::two() * b);
    let t = if theta.abs() > T::lit(1e150) {
        T::half() / theta
    } else {
        let sgn = if theta >= T::zero() {
            T::one()
        } else {
            -T::one()
        };
        sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    (c, t * c, e)
}

#[inline]
fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, e: C<T>) {
    let ec = e.conj();
    for k in 0..m.rows() {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = a.scale(c) - b * ec.scale(s);
        m[(k, q)] = a.scale(s) + b * ec.scale(c);
    }
}

#[inline]
fn rotate_rows<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, e: C<T>) {
    for k in 0..m.cols() {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = a.scale(c) - b * e.scale(s);
        m[(q, k)] = a.scale(s) + b * e.scale(c);
    }
}

/// Cyclic Jacobi on an (assumed Hermitian) matrix. Returns eigenvalues in
/// descending order with matching eigenvector columns; ties keep the order in
/// which the sweep left them.
pub(crate) fn eigh<T: Real>(h: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let tiny = T::min_positive_value().sqrt();
    if scale > T::zero() {
        let target = T::epsilon() * scale;
        for _ in 0..MAX_SWEEPS {
            let off: T = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum::<T>()
                .sqrt();
            if off <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.norm() <= tiny {
                        continue;
                    }
                    let (c, s, e) = rotation(a[(p, p)].re, a[(q, q)].re, apq);
                    rotate_columns(&mut a, p, q, c, s, e);
                    rotate_rows(&mut a, p, q, c, s, e);
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                    a[(p, p)].im = T::zero();
                    a[(q, q)].im = T::zero();
                    rotate_columns(&mut v, p, q, c, s, e);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    (values, vectors)
}

/// Thin SVD `a = u·diag(σ)·v†` with `σ` descending, `u` m×k and `v` n×k,
/// k = min(m, n). Columns of `u` belonging to zero singular values are zero.
pub(crate) fn svd<T: Real>(a: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>, ComplexMatrix<T>) {
    if a.rows() < a.cols() {
        let (s, u, v) = svd(&a.adjoint());
        return (s, v, u);
    }
    let (m, n) = (a.rows(), a.cols());
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = C::<T>::zero();
                for k in 0..m {
                    let x = u[(k, p)];
                    let y = u[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= T::epsilon() * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let (c, s, e) = rotation(alpha, beta, gamma);
                rotate_columns(&mut u, p, q, c, s, e);
                rotate_columns(&mut v, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n)
        .map(|j| (0..m).map(|k| u[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let u_out = ComplexMatrix::from_fn(m, n, |r, k| {
        let j = order[k];
        if norms[j] > T::zero() {
            u[(r, j)].unscale(norms[j])
        } else {
            Complex::zero()
        }
    });
    let v_out = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    (sigma, u_out, v_out)
}
