//! Dense complex linear algebra for small operators (side ≤ [`MAX_SIDE`]).
//!
//! Everything here is a pure function of its inputs. Kronecker products use
//! first-factor-major indexing: joint index `i·dim_e + j` for factor indices
//! `(i, j)`.

mod jacobi;
mod matrix;

pub use matrix::{inner, kron_vec, norm, ComplexMatrix};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

/// Largest operator side accepted by the public routines. Covers a 2⊗4 joint
/// system and 4⊗4 broadcast marginals.
pub const MAX_SIDE: usize = 16;

const HERMITIAN_GATE: f64 = 1e-10;
const PSD_GATE: f64 = 1e-10;
const NORMALIZATION_GATE: f64 = 1e-10;
const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen<T> {
    /// Descending.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// `V·diag(f(λ))·V†`.
    pub fn reassemble(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

/// Schmidt decomposition `v = Σ_n c_n·|a_n⟩⊗|e_n⟩` of a bipartite vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm<T> {
    /// Strictly positive, descending.
    pub coefficients: Vec<T>,
    pub basis_a: Vec<Vec<C<T>>>,
    pub basis_e: Vec<Vec<C<T>>>,
}

impl<T: Real> SchmidtForm<T> {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> Vec<C<T>> {
        let len =
            self.basis_a.first().map_or(0, Vec::len) * self.basis_e.first().map_or(0, Vec::len);
        let mut out = vec![C::zero(); len];
        for ((c, a), e) in self
            .coefficients
            .iter()
            .zip(&self.basis_a)
            .zip(&self.basis_e)
        {
            for (slot, z) in out.iter_mut().zip(kron_vec(a, e)) {
                *slot += z.scale(*c);
            }
        }
        out
    }
}

fn check_side(side: usize) -> Result<()> {
    if side > MAX_SIDE {
        Err(Error::TooLarge {
            side,
            cap: MAX_SIDE,
        })
    } else {
        Ok(())
    }
}

fn check_square<T: Real>(m: &ComplexMatrix<T>, context: &'static str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context,
            expected: m.rows(),
            found: m.cols(),
        });
    }
    check_side(m.rows())
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_square(h, "Hermitian operator")?;
    let dev = h.hermitian_deviation();
    if dev > T::tol(HERMITIAN_GATE) {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    Ok(h.symmetrized())
}

/// Kronecker product `a ⊗ b`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_side(a.rows() * b.rows())?;
    check_side(a.cols() * b.cols())?;
    Ok(tensor_unchecked(a, b))
}

pub(crate) fn tensor_unchecked<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let (q, r) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * q, a.cols() * r, |i, j| {
        a[(i / q, j / r)] * b[(i % q, j % r)]
    })
}

/// Marginal of an operator on `H_A ⊗ H_E`.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dim_a: usize,
    dim_e: usize,
    keep: Keep,
) -> Result<ComplexMatrix<T>> {
    check_square(m, "partial trace")?;
    if m.rows() != dim_a * dim_e {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: dim_a * dim_e,
            found: m.rows(),
        });
    }
    Ok(match keep {
        Keep::First => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_e).map(|j| m[(i * dim_e + j, k * dim_e + j)]).sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(dim_e, dim_e, |j, l| {
            (0..dim_a).map(|i| m[(i * dim_e + j, i * dim_e + l)]).sum()
        }),
    })
}

/// Marginal of the pure state `|v⟩⟨v|` without forming the joint operator.
pub fn reduced_state<T: Real>(
    v: &[C<T>],
    dim_a: usize,
    dim_e: usize,
    keep: Keep,
) -> Result<ComplexMatrix<T>> {
    if v.len() != dim_a * dim_e {
        return Err(Error::DimensionMismatch {
            context: "reduced state",
            expected: dim_a * dim_e,
            found: v.len(),
        });
    }
    Ok(match keep {
        Keep::First => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_e)
                .map(|j| v[i * dim_e + j] * v[k * dim_e + j].conj())
                .sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(dim_e, dim_e, |j, l| {
            (0..dim_a)
                .map(|i| v[i * dim_e + j] * v[i * dim_e + l].conj())
                .sum()
        }),
    })
}

/// Hermitian eigendecomposition, eigenvalues descending.
///
/// The input is symmetrized before decomposition; asymmetry above `1e-10`
/// is rejected.
pub fn herm_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    let h = check_hermitian(h)?;
    let (values, vectors) = jacobi::eigh(&h);
    Ok(Eigen { values, vectors })
}

/// Singular values (descending) with left and right singular vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd<T> {
    pub values: Vec<T>,
    pub u: ComplexMatrix<T>,
    pub v: ComplexMatrix<T>,
}

/// Thin SVD. Not capped: the one-sided kernel is only ever fed small inputs,
/// including the commutant systems of the broadcast analysis.
pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    let (values, u, v) = jacobi::svd(a);
    Svd { values, u, v }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    Ok(herm_eig(h)?.values.iter().map(|x| x.abs()).sum())
}

/// Square root of a positive-semidefinite operator. Eigenvalues in
/// `[-1e-10, 0)` are treated as zero.
pub fn psd_sqrt<T: Real>(p: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = herm_eig(p)?;
    if let Some(&min) = eig.values.last() {
        if min < -T::tol(PSD_GATE) {
            return Err(Error::NotPositive {
                eigenvalue: min.to_f64_lossy(),
            });
        }
    }
    // eigenvalues at rounding level are zero; their square roots would not be
    let floor =
        eig.values.first().map_or(T::zero(), |&top| top.abs()) * T::epsilon() * T::lit(64.0);
    Ok(eig.reassemble(|l| if l <= floor { C::zero() } else { re(l.sqrt()) }))
}

/// `exp(i·t·H)` for Hermitian `H`, through the eigendecomposition.
pub fn expi_hermitian<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    let eig = herm_eig(h)?;
    Ok(eig.reassemble(|l| C::from_polar(T::one(), l * t)))
}

/// Schmidt decomposition of a normalized vector on `C^dim_a ⊗ C^dim_e`.
///
/// Coefficients below `1e-12` are dropped, so a product vector has rank one.
pub fn schmidt<T: Real>(v: &[C<T>], dim_a: usize, dim_e: usize) -> Result<SchmidtForm<T>> {
    if v.len() != dim_a * dim_e {
        return Err(Error::DimensionMismatch {
            context: "Schmidt decomposition",
            expected: dim_a * dim_e,
            found: v.len(),
        });
    }
    check_side(v.len())?;
    let n = norm(v);
    if (n - T::one()).abs() > T::tol(NORMALIZATION_GATE) {
        return Err(Error::NotNormalized {
            norm: n.to_f64_lossy(),
        });
    }
    let coeff = ComplexMatrix::from_fn(dim_a, dim_e, |i, j| v[i * dim_e + j]);
    let Svd {
        values,
        u,
        v: right,
    } = svd(&coeff);
    let cutoff = T::tol(SCHMIDT_CUTOFF);
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > cutoff).collect();
    Ok(SchmidtForm {
        coefficients: keep.iter().map(|&k| values[k]).collect(),
        basis_a: keep.iter().map(|&k| u.column(k)).collect(),
        basis_e: keep
            .iter()
            .map(|&k| right.column(k).into_iter().map(|z| z.conj()).collect())
            .collect(),
    })
}

/// Standard basis vector `|k⟩` of length `n`.
pub fn basis_vector<T: Real>(n: usize, k: usize) -> Vec<C<T>> {
    let mut v = vec![C::zero(); n];
    v[k] = C::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_unitary, rng_from};
    use num_complex::Complex;

    fn c(x: f64) -> C<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn tensor_identity_and_projectors() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let p = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(
            tensor(&p, &p).unwrap(),
            ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn tensor_matches_index_definition() {
        let mut rng = rng_from(11, &[]);
        let a = random_matrix::<f64, _>(2, 2, &mut rng);
        let b = random_matrix::<f64, _>(3, 3, &mut rng);
        let t = tensor(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(t[(i * 3 + k, j * 3 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_rejects_oversized_result() {
        let a = ComplexMatrix::<f64>::identity(5);
        assert!(matches!(tensor(&a, &a), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn partial_trace_examples() {
        let ket00 = basis_vector::<f64>(4, 0);
        let rho = ComplexMatrix::projector(&ket00);
        let kept = partial_trace(&rho, 2, 2, Keep::First).unwrap();
        assert_eq!(kept, ComplexMatrix::from_real_diag(&[1.0, 0.0]));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(h), c(0.0), c(0.0), c(h)];
        let bell_rho = ComplexMatrix::projector(&bell);
        for keep in [Keep::First, Keep::Second] {
            let m = partial_trace(&bell_rho, 2, 2, keep).unwrap();
            let half = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
            assert!(m.max_abs_diff(&half).unwrap() < 1e-15);
        }
        assert!(partial_trace(&bell_rho, 3, 2, Keep::First).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = rng_from(5, &[]);
        let a = random_matrix::<f64, _>(2, 2, &mut rng);
        let b = random_matrix::<f64, _>(3, 3, &mut rng);
        let kept = partial_trace(&tensor(&a, &b).unwrap(), 2, 3, Keep::First).unwrap();
        let expect = a.scale(b.trace());
        assert!(kept.max_abs_diff(&expect).unwrap() < 1e-12);
        let kept = partial_trace(&tensor(&a, &b).unwrap(), 2, 3, Keep::Second).unwrap();
        let expect = b.scale(a.trace());
        assert!(kept.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn reduced_state_agrees_with_partial_trace() {
        let mut rng = rng_from(6, &[]);
        let u = random_unitary::<f64, _>(6, &mut rng);
        let v = u.column(0);
        let joint = ComplexMatrix::projector(&v);
        for keep in [Keep::First, Keep::Second] {
            let a = reduced_state(&v, 2, 3, keep).unwrap();
            let b = partial_trace(&joint, 2, 3, keep).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
        }
    }

    #[test]
    fn herm_eig_known_spectra() {
        let d = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(herm_eig(&d).unwrap().values, vec![3.0, 2.0, 1.0]);
        let x = ComplexMatrix::new(2, 2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let e = herm_eig(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn herm_eig_reconstructs_random_hermitian() {
        let mut rng = rng_from(7, &[]);
        for n in [1usize, 2, 3, 5, 8, 16] {
            let h = random_hermitian::<f64, _>(n, &mut rng);
            let e = herm_eig(&h).unwrap();
            let back = e.reassemble(re);
            assert!(back.max_abs_diff(&h).unwrap() < 1e-9, "n={n}");
            let vv = e.vectors.adjoint().matmul(&e.vectors).unwrap();
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)).unwrap() < 1e-9);
            for k in 0..n {
                let hv = h.apply(&e.vector(k)).unwrap();
                for (a, b) in hv.iter().zip(e.vector(k)) {
                    assert!((a - b.scale(e.values[k])).norm() < 1e-9);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn herm_eig_rejects_asymmetric() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_single_precision() {
        let mut rng = rng_from(8, &[]);
        let h = random_hermitian::<f32, _>(4, &mut rng);
        let e = herm_eig(&h).unwrap();
        assert!(e.reassemble(re).max_abs_diff(&h).unwrap() < 1e-4);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(
            trace_norm(&ComplexMatrix::from_real_diag(&[0.5, -0.5])).unwrap(),
            1.0
        );
        let pair = crate::states::alice_pair(0.5 * 0.6f64.asin()).unwrap();
        let diff =
            &ComplexMatrix::projector(&pair.ket1()) - &ComplexMatrix::projector(&pair.ket0());
        assert!((trace_norm(&diff).unwrap() - 1.6).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_examples() {
        let i3 = ComplexMatrix::<f64>::identity(3);
        assert!(psd_sqrt(&i3).unwrap().max_abs_diff(&i3).unwrap() < 1e-15);
        let r = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(
            r.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0]))
                .unwrap()
                < 1e-15
        );
        let mut rng = rng_from(9, &[]);
        let a = random_matrix::<f64, _>(4, 4, &mut rng);
        let p = a.matmul(&a.adjoint()).unwrap();
        let s = psd_sqrt(&p).unwrap();
        assert!(s.matmul(&s).unwrap().max_abs_diff(&p).unwrap() < 1e-9);
        let neg = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPositive { .. })));
        let noisy = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        assert!(psd_sqrt(&noisy).is_ok());
    }

    #[test]
    fn schmidt_examples() {
        let prod = kron_vec(&basis_vector::<f64>(2, 0), &basis_vector(2, 1));
        let s = schmidt(&prod, 2, 2).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(h), c(0.0), c(0.0), c(h)];
        let s = schmidt(&bell, 2, 2).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.coefficients.iter().all(|x| (x - h).abs() < 1e-12));

        assert!(matches!(
            schmidt(&[c(1.0), c(1.0), c(0.0), c(0.0)], 2, 2),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn schmidt_reconstructs_and_matches_gram_spectrum() {
        let mut rng = rng_from(10, &[]);
        for _ in 0..20 {
            let v = random_unitary::<f64, _>(6, &mut rng).column(0);
            let s = schmidt(&v, 2, 3).unwrap();
            assert!(s.rank() <= 2);
            let back = s.reconstruct();
            assert!(back.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-9));
            // oracle: squared singular values are eigenvalues of M·M†
            let m = ComplexMatrix::from_fn(2, 3, |i, j| v[i * 3 + j]);
            let gram = herm_eig(&m.matmul(&m.adjoint()).unwrap()).unwrap();
            for (k, x) in s.coefficients.iter().enumerate() {
                assert!((x * x - gram.values[k]).abs() < 1e-12);
            }
            let total: f64 = s.coefficients.iter().map(|x| x * x).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for basis in [&s.basis_a, &s.basis_e] {
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((inner(&basis[i], &basis[j]) - c(want)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn svd_of_wide_and_tall_matrices() {
        let mut rng = rng_from(12, &[]);
        for (m, n) in [(3, 5), (5, 3), (4, 4), (32, 16)] {
            let a = random_matrix::<f64, _>(m, n, &mut rng);
            let Svd { values, u, v } = svd(&a);
            let k = m.min(n);
            let back = ComplexMatrix::from_fn(m, n, |i, j| {
                (0..k)
                    .map(|r| u[(i, r)] * values[r] * v[(j, r)].conj())
                    .sum()
            });
            assert!(back.max_abs_diff(&a).unwrap() < 1e-10, "{m}x{n}");
        }
    }

    #[test]
    fn expi_of_zero_is_identity() {
        let z = ComplexMatrix::<f64>::zeros(4, 4);
        let u = expi_hermitian(&z, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-15);
    }

    #[test]
    fn ones_and_zeros_helpers() {
        let e = basis_vector::<f64>(3, 2);
        assert_eq!(e[2], C::one());
        assert_eq!(norm(&e), 1.0);
    }
}
