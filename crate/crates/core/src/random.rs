//! Seeded samplers. Every stochastic routine in the crate draws from a
//! ChaCha stream keyed by a user seed plus a tag path, so results do not
//! depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{inner, norm, ComplexMatrix};
use crate::scalar::{Real, C};
use crate::states::DensityOperator;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a tag path.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t)))
}

pub fn rng_from(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

/// Uniform sample from `[lo, hi)`.
pub fn uniform<T: Real, R: Rng + ?Sized>(lo: T, hi: T, rng: &mut R) -> T {
    let u: f64 = rng.random();
    lo + (hi - lo) * T::lit(u)
}

/// Complex Ginibre matrix (i.i.d. standard normal real and imaginary parts).
pub fn random_matrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| C::new(normal(rng), normal(rng)))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    random_matrix(n, n, rng).symmetrized()
}

/// Gram-Schmidt on the columns, in order. Columns that collapse are left at
/// zero; callers orthonormalize full-rank inputs only.
pub fn orthonormalize_columns<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut v = m.column(j);
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = norm(&v);
        if n > T::zero() {
            v.iter_mut().for_each(|x| *x = x.unscale(n));
        }
        cols.push(v);
    }
    ComplexMatrix::from_columns(&cols).expect("equal column lengths")
}

/// Haar-distributed unitary (orthonormalized Ginibre columns).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    orthonormalize_columns(&random_matrix(n, n, rng))
}

/// Uniform point on the probability simplex.
pub fn random_simplex<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| T::lit(x / total)).collect()
}

/// `U·diag(p)·U†`.
pub fn rotated_spectrum<T: Real>(spectrum: &[T], u: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d = ComplexMatrix::from_real_diag(spectrum);
    u.matmul(&d)
        .and_then(|m| m.matmul(&u.adjoint()))
        .expect("square shapes")
        .symmetrized()
}

/// Full-rank density operator: simplex spectrum rotated by a Haar unitary.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator<T> {
    let spec = random_simplex(n, rng);
    let u = random_unitary(n, rng);
    DensityOperator::from_trusted(rotated_spectrum(&spec, &u))
}

/// Uniformly random unit vector.
pub fn random_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    let v: Vec<C<T>> = (0..n).map(|_| C::new(normal(rng), normal(rng))).collect();
    let nv = norm(&v);
    v.into_iter().map(|z| z.unscale(nv)).collect()
}
