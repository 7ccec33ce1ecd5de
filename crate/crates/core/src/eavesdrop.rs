//! Eve's interaction as an isometry from Alice's qubit into system ⊗ ancilla,
//! and the marginals it leaves behind.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, expi_hermitian, inner, kron_vec, norm, reduced_state, ComplexMatrix, Keep,
};
use crate::scalar::{re, Real, C};
use crate::states::{DensityOperator, StatePair};

/// Dimension of Alice's system.
pub const DIM_A: usize = 2;
/// Largest ancilla ever needed: at most four relative states can be independent.
pub const MAX_DIM_E: usize = 4;

const ISOMETRY_GATE: f64 = 1e-10;

/// Action of `Û` on `|a₀⟩|ψ⟩` and `|a₁⟩|ψ⟩`, stored as two joint vectors of
/// length `2·dim_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry<T> {
    dim_e: usize,
    columns: [Vec<C<T>>; 2],
}

fn check_dim_e(dim_e: usize) -> Result<()> {
    if (1..=MAX_DIM_E).contains(&dim_e) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: "dimE",
            value: dim_e as f64,
            lo: 1.0,
            hi: MAX_DIM_E as f64,
        })
    }
}

impl<T: Real> Isometry<T> {
    /// Validates orthonormality of the two columns within `1e-10`.
    pub fn from_columns(col0: Vec<C<T>>, col1: Vec<C<T>>, dim_e: usize) -> Result<Self> {
        check_dim_e(dim_e)?;
        for col in [&col0, &col1] {
            if col.len() != DIM_A * dim_e {
                return Err(Error::DimensionMismatch {
                    context: "isometry column",
                    expected: DIM_A * dim_e,
                    found: col.len(),
                });
            }
        }
        let gate = T::tol(ISOMETRY_GATE);
        let n0 = norm(&col0);
        let n1 = norm(&col1);
        for n in [n0, n1] {
            if (n - T::one()).abs() > gate {
                return Err(Error::NotNormalized {
                    norm: n.to_f64_lossy(),
                });
            }
        }
        let ip = inner(&col0, &col1).norm();
        if ip > gate {
            return Err(Error::Malformed(format!(
                "isometry columns are not orthogonal (overlap {:e})",
                ip.to_f64_lossy()
            )));
        }
        Ok(Self {
            dim_e,
            columns: [col0, col1],
        })
    }

    /// The do-nothing interaction `|a_m⟩|e₀⟩ ↦ |a_m⟩|e₀⟩`.
    pub fn identity(dim_e: usize) -> Result<Self> {
        check_dim_e(dim_e)?;
        let e0 = basis_vector(dim_e, 0);
        Ok(Self {
            dim_e,
            columns: [
                kron_vec(&basis_vector(DIM_A, 0), &e0),
                kron_vec(&basis_vector(DIM_A, 1), &e0),
            ],
        })
    }

    pub fn dim_a(&self) -> usize {
        DIM_A
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// `V|a_m⟩`.
    pub fn column(&self, m: usize) -> &[C<T>] {
        &self.columns[m]
    }

    /// Relative ancilla state `|R_mn⟩` in `V|a_m⟩ = Σ_n |a_n⟩|R_mn⟩`.
    pub fn relative_state(&self, m: usize, n: usize) -> &[C<T>] {
        &self.columns[m][n * self.dim_e..(n + 1) * self.dim_e]
    }
}

/// Number of real generator parameters for a given ancilla dimension.
pub fn generator_len(dim_e: usize) -> usize {
    let n = DIM_A * dim_e;
    n * n
}

/// Hermitian matrix from `n²` reals: the diagonal first, then real and
/// imaginary parts of the strict upper triangle in row-major order.
pub fn hermitian_from_params<T: Real>(params: &[T], n: usize) -> Result<ComplexMatrix<T>> {
    if params.len() != n * n {
        return Err(Error::WrongParameterCount {
            expected: n * n,
            found: params.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = re(params[i]);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C::new(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(h)
}

/// `V = exp(i·H(params))` restricted to inputs `|a_m⟩|e₀⟩`.
pub fn isometry_from_generator<T: Real>(params: &[T], dim_e: usize) -> Result<Isometry<T>> {
    check_dim_e(dim_e)?;
    let n = DIM_A * dim_e;
    let h = hermitian_from_params(params, n)?;
    let u = expi_hermitian(&h, T::one())?;
    Ok(Isometry {
        dim_e,
        columns: [u.column(0), u.column(dim_e)],
    })
}

/// Joint states after the interaction and their two marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct PostInteraction<T> {
    pub dim_e: usize,
    pub joint: [Vec<C<T>>; 2],
    /// Bob's states `ρ^A_s`.
    pub rho_a: [DensityOperator<T>; 2],
    /// Eve's states `ρ^E_s`.
    pub rho_e: [DensityOperator<T>; 2],
}

pub fn evolve<T: Real>(pair: &StatePair<T>, v: &Isometry<T>) -> Result<PostInteraction<T>> {
    let (c, s) = (re(pair.alpha().cos()), re(pair.alpha().sin()));
    let mix = |w0: C<T>, w1: C<T>| -> Vec<C<T>> {
        v.columns[0]
            .iter()
            .zip(&v.columns[1])
            .map(|(x, y)| x * w0 + y * w1)
            .collect()
    };
    let joint = [mix(c, s), mix(s, c)];
    let marg = |j: &Vec<C<T>>, keep| -> Result<DensityOperator<T>> {
        Ok(DensityOperator::from_trusted(reduced_state(
            j, DIM_A, v.dim_e, keep,
        )?))
    };
    Ok(PostInteraction {
        dim_e: v.dim_e,
        rho_a: [marg(&joint[0], Keep::First)?, marg(&joint[1], Keep::First)?],
        rho_e: [
            marg(&joint[0], Keep::Second)?,
            marg(&joint[1], Keep::Second)?,
        ],
        joint,
    })
}

/// Whether the Gram matrix of the relative states `⟨R_{m'n'}|R_{mn}⟩` is
/// invariant under flipping every index `0 ↔ 1`.
pub fn symmetry_check<T: Real>(v: &Isometry<T>, tol: T) -> bool {
    let idx = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let gram = |(a, b): (usize, usize), (c, d): (usize, usize)| {
        inner(v.relative_state(a, b), v.relative_state(c, d))
    };
    let flip = |(a, b): (usize, usize)| (1 - a, 1 - b);
    idx.iter().all(|&p| {
        idx.iter()
            .all(|&q| (gram(p, q) - gram(flip(p), flip(q))).norm() <= tol)
    })
}

/// Gram entries `⟨R_{m'n'}|R_{mn}⟩` in the order (00, 01, 10, 11).
pub fn relative_gram<T: Real>(v: &Isometry<T>) -> [[C<T>; 4]; 4] {
    let idx = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut g = [[C::zero(); 4]; 4];
    for (i, &(a, b)) in idx.iter().enumerate() {
        for (j, &(c, d)) in idx.iter().enumerate() {
            g[i][j] = inner(v.relative_state(a, b), v.relative_state(c, d));
        }
    }
    g
}
