//! Broadcasting and nondisturbing measurement for pairs of density
//! operators: commutation tests, the measure-and-prepare broadcaster,
//! numerical broadcast-fidelity search, common invariant blocks, and the
//! product-preserving eavesdropping predicate.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, inner, norm, psd_sqrt, svd, ComplexMatrix};
use crate::metrics::fidelity;
use crate::optimize::NelderMead;
use crate::random::{
    random_density, random_simplex, random_unitary, rng_from, rotated_spectrum, uniform,
};
use crate::scalar::{re, Real, C};
use crate::states::DensityOperator;
use crate::tradeoff::SearchBudget;

/// Commutators at or below this norm count as commuting.
pub const COMMUTING_TOL: f64 = 1e-8;
/// A pair is numerically broadcastable when the search scores at least
/// `1 − BROADCAST_MARGIN`.
pub const BROADCAST_MARGIN: f64 = 1e-6;
/// Largest input dimension for the broadcast search.
pub const MAX_BROADCAST_DIM: usize = 4;
/// Largest dimension for the block analysis.
pub const MAX_BLOCK_DIM: usize = 8;
const BLOCK_CHECK_TOL: f64 = 1e-8;
const EIGENBASIS_ATTEMPTS: u64 = 8;
const PREDICATE_TOL: f64 = 1e-9;

const TAG_EIGENBASIS: u64 = 0x45;
const TAG_BROADCAST: u64 = 0x42;
const TAG_BLOCKS: u64 = 0x4b;
const TAG_PROBE: u64 = 0x50;

fn same_dim<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    context: &'static str,
) -> Result<usize> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    Ok(rho0.dim())
}

/// Frobenius norm of `ρ₀ρ₁ − ρ₁ρ₀`.
pub fn commutator_norm<T: Real>(rho0: &DensityOperator<T>, rho1: &DensityOperator<T>) -> Result<T> {
    same_dim(rho0, rho1, "commutator")?;
    Ok(rho0.matrix().commutator(rho1.matrix())?.frobenius_norm())
}

pub fn commutes<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    tol: T,
) -> Result<bool> {
    Ok(commutator_norm(rho0, rho1)? <= tol)
}

fn require_commuting<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    tol: T,
) -> Result<()> {
    let c = commutator_norm(rho0, rho1)?;
    if c <= tol {
        Ok(())
    } else {
        Err(Error::NotCommuting {
            commutator_norm: c.to_f64_lossy(),
        })
    }
}

fn max_off_diagonal<T: Real>(m: &ComplexMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn in_basis<T: Real>(basis: &ComplexMatrix<T>, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    basis
        .adjoint()
        .matmul(m)
        .and_then(|x| x.matmul(basis))
        .expect("square shapes")
}

/// Orthonormal basis (as columns) diagonalizing both operators, from the
/// eigenvectors of `ρ₀ + c·ρ₁` for seeded random `c`.
pub fn common_eigenbasis<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    tol: T,
) -> Result<ComplexMatrix<T>> {
    require_commuting(rho0, rho1, tol)?;
    let check = T::lit(BLOCK_CHECK_TOL);
    for attempt in 0..EIGENBASIS_ATTEMPTS {
        let mut rng = rng_from(0, &[TAG_EIGENBASIS, attempt]);
        let c: T = uniform(T::half(), T::lit(1.5), &mut rng);
        let mix = rho0.matrix() + &rho1.matrix().scale_real(c);
        let basis = herm_eig(&mix)?.vectors;
        if max_off_diagonal(&in_basis(&basis, rho0.matrix())) <= check
            && max_off_diagonal(&in_basis(&basis, rho1.matrix())) <= check
        {
            return Ok(basis);
        }
    }
    Err(Error::DegeneracyUnresolved {
        attempts: EIGENBASIS_ATTEMPTS as usize,
    })
}

/// The channel `ρ ↦ Σ_b ⟨b|ρ|b⟩ |b⟩⟨b| ⊗ |b⟩⟨b|` over a common eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurePrepare<T> {
    basis: ComplexMatrix<T>,
}

impl<T: Real> MeasurePrepare<T> {
    pub fn basis(&self) -> &ComplexMatrix<T> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Kraus operators `|b⟩|b⟩⟨b|`, each `d² × d`.
    pub fn kraus(&self) -> Vec<ComplexMatrix<T>> {
        let d = self.dim();
        (0..d)
            .map(|b| {
                let v = self.basis.column(b);
                ComplexMatrix::from_fn(d * d, d, |r, x| v[r / d] * v[r % d] * v[x].conj())
            })
            .collect()
    }

    fn populations(&self, rho: &DensityOperator<T>) -> Result<Vec<T>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "broadcast input",
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        (0..self.dim())
            .map(|b| {
                let v = self.basis.column(b);
                Ok(inner(&v, &rho.matrix().apply(&v)?).re)
            })
            .collect()
    }

    /// Joint output on the two-copy space.
    pub fn apply(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        let d = self.dim();
        let p = self.populations(rho)?;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for (b, pb) in p.iter().enumerate() {
            let v = self.basis.column(b);
            let vv: Vec<C<T>> = (0..d * d).map(|r| v[r / d] * v[r % d]).collect();
            out = &out + &ComplexMatrix::outer(&vv, &vv).scale_real(*pb);
        }
        Ok(DensityOperator::from_trusted(out))
    }

    /// Both output marginals, which coincide.
    pub fn marginals(&self, rho: &DensityOperator<T>) -> Result<[DensityOperator<T>; 2]> {
        let p = self.populations(rho)?;
        let m = rotated_spectrum(&p, &self.basis);
        Ok([
            DensityOperator::from_trusted(m.clone()),
            DensityOperator::from_trusted(m),
        ])
    }

    /// The Stinespring isometry `|x⟩ ↦ Σ_b ⟨b|x⟩ |b⟩|b⟩|0⟩` with an ancilla
    /// of dimension `anc_dim`.
    fn isometry(&self, anc_dim: usize) -> ComplexMatrix<T> {
        let d = self.dim();
        ComplexMatrix::from_fn(d * d * anc_dim, d, |r, x| {
            if r % anc_dim != 0 {
                return C::zero();
            }
            let (i, j) = (r / (d * anc_dim), (r / anc_dim) % d);
            (0..d)
                .map(|b| self.basis[(i, b)] * self.basis[(j, b)] * self.basis[(x, b)].conj())
                .sum()
        })
    }
}

/// Builds the measure-and-prepare broadcaster for a commuting pair.
pub fn measure_prepare_broadcaster<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
) -> Result<MeasurePrepare<T>> {
    let basis = common_eigenbasis(rho0, rho1, T::lit(COMMUTING_TOL))?;
    Ok(MeasurePrepare { basis })
}

/// Outcome of the broadcast-fidelity search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BroadcastReport<T> {
    pub commuting: bool,
    pub commutator_norm: T,
    /// Minimum of the four marginal fidelities of the best candidate.
    pub best_score: T,
    pub score_definition: &'static str,
    /// Real and imaginary parts of the best isometry's entries, row-major.
    pub witness_params: Vec<T>,
    /// `per_state[s][slot]`: fidelity of output slot `slot` with `ρ_s`.
    pub per_state: [[T; 2]; 2],
    /// Best score found by the search alone.
    pub search_score: T,
    /// Score of the measure-and-prepare candidate, for commuting pairs.
    pub constructive_score: Option<T>,
    pub anc_dim: usize,
    pub budget: SearchBudget,
}

impl<T: Real> BroadcastReport<T> {
    pub fn broadcastable(&self) -> bool {
        self.best_score >= T::one() - T::lit(BROADCAST_MARGIN)
    }
}

struct BroadcastProblem<'a, T> {
    d: usize,
    anc: usize,
    targets: [&'a DensityOperator<T>; 2],
    roots: [ComplexMatrix<T>; 2],
}

impl<T: Real> BroadcastProblem<'_, T> {
    fn rows(&self) -> usize {
        self.d * self.d * self.anc
    }

    fn isometry(&self, params: &[T]) -> Option<ComplexMatrix<T>> {
        let (n, d) = (self.rows(), self.d);
        let raw = ComplexMatrix::from_fn(n, d, |r, c| {
            let k = 2 * (r * d + c);
            C::new(params[k], params[k + 1])
        });
        let v = crate::random::orthonormalize_columns(&raw);
        (0..d)
            .all(|c| (norm(&v.column(c)) - T::one()).abs() < T::lit(1e-9))
            .then_some(v)
    }

    fn params_of(&self, v: &ComplexMatrix<T>) -> Vec<T> {
        v.entries().iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Output marginals for input `ρ_s`, computed from `W = V·√ρ_s`.
    fn marginals(&self, v: &ComplexMatrix<T>, s: usize) -> [ComplexMatrix<T>; 2] {
        let (d, anc) = (self.d, self.anc);
        let w = v.matmul(&self.roots[s]).expect("shapes");
        let idx = |i: usize, j: usize, a: usize| i * d * anc + j * anc + a;
        let first = ComplexMatrix::from_fn(d, d, |i, k| {
            let mut acc = C::zero();
            for j in 0..d {
                for a in 0..anc {
                    for c in 0..d {
                        acc += w[(idx(i, j, a), c)] * w[(idx(k, j, a), c)].conj();
                    }
                }
            }
            acc
        });
        let second = ComplexMatrix::from_fn(d, d, |j, l| {
            let mut acc = C::zero();
            for i in 0..d {
                for a in 0..anc {
                    for c in 0..d {
                        acc += w[(idx(i, j, a), c)] * w[(idx(i, l, a), c)].conj();
                    }
                }
            }
            acc
        });
        [first, second]
    }

    fn fidelities(&self, v: &ComplexMatrix<T>) -> Option<[[T; 2]; 2]> {
        let mut f = [[T::zero(); 2]; 2];
        for (s, row) in f.iter_mut().enumerate() {
            for (slot, m) in self.marginals(v, s).into_iter().enumerate() {
                row[slot] = fidelity(&DensityOperator::from_trusted(m), self.targets[s]).ok()?;
            }
        }
        Some(f)
    }

    fn score(f: &[[T; 2]; 2]) -> T {
        f.iter().flatten().fold(T::infinity(), |m, x| m.min(*x))
    }
}

/// Maximizes the smallest marginal fidelity over isometries
/// `C^d → C^d ⊗ C^d ⊗ C^anc_dim` followed by discarding the ancilla. The
/// isometry is parameterized by its raw entries, orthonormalized column by
/// column. For commuting pairs the measure-and-prepare channel is scored as
/// an extra candidate.
pub fn broadcast_fidelity_search<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    anc_dim: Option<usize>,
    budget: &SearchBudget,
) -> Result<BroadcastReport<T>> {
    let d = same_dim(rho0, rho1, "broadcast search")?;
    if d > MAX_BROADCAST_DIM {
        return Err(Error::TooLarge {
            side: d,
            cap: MAX_BROADCAST_DIM,
        });
    }
    let anc = anc_dim.unwrap_or(d * d);
    if anc == 0 || anc > d * d {
        return Err(Error::OutOfRange {
            field: "anc_dim",
            value: anc as f64,
            lo: 1.0,
            hi: (d * d) as f64,
        });
    }
    budget.validate()?;
    let problem = BroadcastProblem {
        d,
        anc,
        targets: [rho0, rho1],
        roots: [psd_sqrt(rho0.matrix())?, psd_sqrt(rho1.matrix())?],
    };
    let k = 2 * problem.rows() * d;
    let nm = NelderMead::new(budget.iterations, T::lit(budget.tolerance), T::half());
    let runs: Vec<(Vec<T>, T)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from(
                budget.seed,
                &[TAG_BROADCAST, d as u64, anc as u64, r as u64],
            );
            let start: Vec<T> = (0..k)
                .map(|_| uniform(-T::one(), T::one(), &mut rng))
                .collect();
            let eval = |x: &[T]| problem.isometry(x).and_then(|v| problem.fidelities(&v));
            let smooth = nm.minimize(
                |x| match eval(x) {
                    Some(f) => f.iter().flatten().map(|v| T::one() - *v).sum(),
                    None => T::infinity(),
                },
                &start,
            );
            let run = nm.minimize(
                |x| match eval(x) {
                    Some(f) => -BroadcastProblem::score(&f),
                    None => T::infinity(),
                },
                &smooth.x,
            );
            (run.x, -run.f)
        })
        .collect();
    let (search_params, search_score) = runs
        .into_iter()
        .fold(None, |best: Option<(Vec<T>, T)>, cand| match best {
            Some(b) if cand.1.partial_cmp(&b.1) != Some(Ordering::Greater) => Some(b),
            _ => Some(cand),
        })
        .expect("at least one restart");

    let c_norm = commutator_norm(rho0, rho1)?;
    let commuting = c_norm <= T::lit(COMMUTING_TOL);
    let constructive = if commuting {
        let v = measure_prepare_broadcaster(rho0, rho1)?.isometry(anc);
        let f = problem
            .fidelities(&v)
            .ok_or(Error::NumericalInconsistency {
                what: "measure-and-prepare fidelity",
                value: f64::NAN,
            })?;
        Some((problem.params_of(&v), f))
    } else {
        None
    };
    let search_v = problem
        .isometry(&search_params)
        .ok_or(Error::NumericalInconsistency {
            what: "broadcast search isometry",
            value: search_score.to_f64_lossy(),
        })?;
    let search_f = problem
        .fidelities(&search_v)
        .ok_or(Error::NumericalInconsistency {
            what: "broadcast search fidelity",
            value: search_score.to_f64_lossy(),
        })?;
    let search_score = BroadcastProblem::score(&search_f);
    let constructive_score = constructive
        .as_ref()
        .map(|(_, f)| BroadcastProblem::score(f));
    let (witness_params, per_state) = match constructive {
        Some((p, f)) if BroadcastProblem::score(&f) > search_score => (p, f),
        _ => (problem.params_of(&search_v), search_f),
    };
    Ok(BroadcastReport {
        commuting,
        commutator_norm: c_norm,
        best_score: BroadcastProblem::score(&per_state),
        score_definition: "min-marginal-fidelity",
        witness_params,
        per_state,
        search_score,
        constructive_score,
        anc_dim: anc,
        budget: *budget,
    })
}

/// Decomposition of the space into common invariant subspaces of a pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStructure<T> {
    /// Orthogonal projectors, ordered by block dimension (descending), then
    /// by `p0` and `p1` (descending).
    #[serde(skip)]
    pub projectors: Vec<ComplexMatrix<T>>,
    pub block_dims: Vec<usize>,
    /// `tr(Π_k ρ₀)`.
    pub p0: Vec<T>,
    /// `tr(Π_k ρ₁)`.
    pub p1: Vec<T>,
    /// Real dimension of the commutant of the pair.
    pub commutant_dim: usize,
    /// `max_{s, j≠k} ‖Π_j ρ_s Π_k‖_F`.
    pub off_block_residual: T,
}

impl<T: Real> BlockStructure<T> {
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    fn trivial(d: usize) -> Self {
        Self {
            projectors: vec![ComplexMatrix::identity(d)],
            block_dims: vec![d],
            p0: vec![T::one()],
            p1: vec![T::one()],
            commutant_dim: 1,
            off_block_residual: T::zero(),
        }
    }
}

/// Hermitian basis element `k` of `d × d` matrices: diagonal units, then
/// `E_ij + E_ji` and `i(E_ij − E_ji)` for `i < j`.
fn hermitian_basis<T: Real>(d: usize) -> Vec<ComplexMatrix<T>> {
    let mut out: Vec<ComplexMatrix<T>> = (0..d)
        .map(|i| {
            ComplexMatrix::from_fn(d, d, |r, c| {
                if r == i && c == i {
                    C::one()
                } else {
                    C::zero()
                }
            })
        })
        .collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(i, j)] = C::one();
            s[(j, i)] = C::one();
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = C::new(T::zero(), T::one());
            a[(j, i)] = C::new(T::zero(), -T::one());
            out.push(a);
        }
    }
    out
}

/// Real basis of `{X Hermitian : [X, ρ₀] = [X, ρ₁] = 0}` as coefficient
/// vectors over [`hermitian_basis`].
fn commutant<T: Real>(rho0: &ComplexMatrix<T>, rho1: &ComplexMatrix<T>, tol: T) -> Vec<Vec<T>> {
    let d = rho0.rows();
    let basis = hermitian_basis::<T>(d);
    let columns: Vec<Vec<C<T>>> = basis
        .iter()
        .map(|x| {
            let mut col = Vec::with_capacity(4 * d * d);
            for rho in [rho0, rho1] {
                for z in x.commutator(rho).expect("square").entries() {
                    col.push(re(z.re));
                    col.push(re(z.im));
                }
            }
            col
        })
        .collect();
    let system = ComplexMatrix::from_columns(&columns).expect("equal lengths");
    let dec = svd(&system);
    let n = d * d;
    let mut null = Vec::new();
    for k in 0..n {
        let sigma = dec.values.get(k).copied().unwrap_or(T::zero());
        if sigma <= tol {
            let v = dec.v.column(k);
            // real and imaginary parts are both real null vectors
            let (r, i): (Vec<T>, Vec<T>) = v.iter().map(|z| (z.re, z.im)).unzip();
            if norm_real(&r) >= norm_real(&i) {
                null.push(r);
            } else {
                null.push(i);
            }
        }
    }
    null
}

fn norm_real<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

fn blocks_from_element<T: Real>(
    x: &ComplexMatrix<T>,
    rho: [&ComplexMatrix<T>; 2],
    tol: T,
) -> Result<Option<(Vec<ComplexMatrix<T>>, T)>> {
    let d = x.rows();
    let eig = herm_eig(x)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match groups.last_mut() {
            Some(g) if (eig.values[*g.last().expect("nonempty")] - eig.values[k]).abs() <= tol => {
                g.push(k)
            }
            _ => groups.push(vec![k]),
        }
    }
    let projectors: Vec<ComplexMatrix<T>> = groups
        .iter()
        .map(|g| {
            g.iter().fold(ComplexMatrix::zeros(d, d), |acc, &k| {
                &acc + &ComplexMatrix::projector(&eig.vector(k))
            })
        })
        .collect();
    let mut residual = T::zero();
    for r in rho {
        for (j, pj) in projectors.iter().enumerate() {
            for (k, pk) in projectors.iter().enumerate() {
                if j != k {
                    let block = pj.matmul(r)?.matmul(pk)?;
                    residual = residual.max(block.frobenius_norm());
                }
            }
        }
    }
    Ok((residual <= T::lit(BLOCK_CHECK_TOL)).then_some((projectors, residual)))
}

/// Finest decomposition into common invariant subspaces, from the
/// eigenspaces of a random Hermitian element of the commutant. `tol` is
/// both the null-space threshold and the eigenvalue clustering tolerance.
pub fn common_block_structure<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    tol: T,
) -> Result<BlockStructure<T>> {
    let d = same_dim(rho0, rho1, "block structure")?;
    if d > MAX_BLOCK_DIM {
        return Err(Error::TooLarge {
            side: d,
            cap: MAX_BLOCK_DIM,
        });
    }
    let (r0, r1) = (rho0.matrix(), rho1.matrix());
    let null = commutant(r0, r1, tol);
    if null.len() <= 1 {
        return Ok(BlockStructure {
            commutant_dim: null.len().max(1),
            ..BlockStructure::trivial(d)
        });
    }
    let basis = hermitian_basis::<T>(d);
    for attempt in 0..EIGENBASIS_ATTEMPTS {
        let mut rng = rng_from(0, &[TAG_BLOCKS, d as u64, attempt]);
        let mut coeffs = vec![T::zero(); d * d];
        for v in &null {
            let g: T = uniform(-T::one(), T::one(), &mut rng);
            for (c, x) in coeffs.iter_mut().zip(v) {
                *c += g * *x;
            }
        }
        let x = basis
            .iter()
            .zip(&coeffs)
            .fold(ComplexMatrix::zeros(d, d), |acc, (b, c)| {
                &acc + &b.scale_real(*c)
            });
        let Some((projectors, residual)) = blocks_from_element(&x, [r0, r1], tol)? else {
            continue;
        };
        let mut blocks: Vec<(ComplexMatrix<T>, usize, T, T)> = projectors
            .into_iter()
            .map(|p| {
                let dim = p.trace().re.round().to_usize().unwrap_or(0);
                let p0 = p.matmul(r0).expect("square").trace().re;
                let p1 = p.matmul(r1).expect("square").trace().re;
                (p, dim, p0, p1)
            })
            .collect();
        blocks.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then(b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal))
                .then(b.3.partial_cmp(&a.3).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut out = BlockStructure {
            projectors: Vec::new(),
            block_dims: Vec::new(),
            p0: Vec::new(),
            p1: Vec::new(),
            commutant_dim: null.len(),
            off_block_residual: residual,
        };
        for (p, dim, p0, p1) in blocks {
            out.projectors.push(p);
            out.block_dims.push(dim);
            out.p0.push(p0);
            out.p1.push(p1);
        }
        return Ok(out);
    }
    Ok(BlockStructure {
        commutant_dim: null.len(),
        ..BlockStructure::trivial(d)
    })
}

/// Whether a measurement can extract information about which state was
/// sent while leaving both states unchanged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondisturbingVerdict<T> {
    pub exists: bool,
    pub blocks: BlockStructure<T>,
    /// Total-variation distance between the block distributions.
    pub total_variation: T,
    /// `max_s ‖Σ_k Π_k ρ_s Π_k − ρ_s‖_F`.
    pub residual: T,
}

pub fn nondisturbing_information<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    tol: T,
) -> Result<NondisturbingVerdict<T>> {
    let blocks = common_block_structure(rho0, rho1, T::lit(BLOCK_CHECK_TOL))?;
    let total_variation = T::half()
        * blocks
            .p0
            .iter()
            .zip(&blocks.p1)
            .map(|(a, b)| (*a - *b).abs())
            .sum::<T>();
    let mut residual = T::zero();
    for rho in [rho0.matrix(), rho1.matrix()] {
        let pinched = blocks
            .projectors
            .iter()
            .try_fold(ComplexMatrix::zeros(rho.rows(), rho.rows()), |acc, p| {
                Ok::<_, Error>(&acc + &p.matmul(rho)?.matmul(p)?)
            })?;
        residual = residual.max((&pinched - rho).frobenius_norm());
    }
    Ok(NondisturbingVerdict {
        exists: blocks.len() >= 2 && total_variation > tol,
        blocks,
        total_variation,
        residual,
    })
}

/// Pair categories sampled by [`conjecture_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeCategory {
    /// Independent Haar-rotated random spectra.
    Random,
    /// Block-diagonal pairs with differing block weights, rotated by a
    /// common unitary.
    Engineered,
}

impl ProbeCategory {
    pub fn tag(&self) -> &'static str {
        match self {
            ProbeCategory::Random => "random",
            ProbeCategory::Engineered => "engineered",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTrial<T> {
    pub index: usize,
    pub category: ProbeCategory,
    /// Whether the pair was built with a nontrivial common block structure
    /// and differing block weights.
    pub predicted: bool,
    pub exists: bool,
    pub block_dims: Vec<usize>,
    pub total_variation: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub category: ProbeCategory,
    pub trials: usize,
    pub exists_true: usize,
    pub exists_false: usize,
    pub agree: usize,
    pub disagree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport<T> {
    pub dim: usize,
    pub seed: u64,
    pub categories: Vec<CategoryCounts>,
    pub trials: Vec<ProbeTrial<T>>,
}

/// Block sizes of engineered pairs: one two-dimensional block (when there is
/// room for a complement) and one-dimensional blocks for the rest.
fn engineered_blocks(dim: usize) -> Vec<usize> {
    if dim <= 2 {
        vec![1; dim]
    } else {
        let mut v = vec![2];
        v.extend(std::iter::repeat_n(1, dim - 2));
        v
    }
}

/// `⊕_k w_k σ_k` for block states `σ_k` and weights `w_k`.
pub fn block_diagonal<T: Real>(blocks: &[ComplexMatrix<T>], weights: &[T]) -> ComplexMatrix<T> {
    let d: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(d, d);
    let mut off = 0;
    for (b, w) in blocks.iter().zip(weights) {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)].scale(*w);
            }
        }
        off += b.rows();
    }
    out
}

fn engineered_pair<T: Real>(dim: usize, seed: u64, index: usize) -> [DensityOperator<T>; 2] {
    let mut rng = rng_from(seed, &[TAG_PROBE, dim as u64, index as u64]);
    let sizes = engineered_blocks(dim);
    let u = random_unitary::<T, _>(dim, &mut rng);
    [0, 1].map(|_| {
        let blocks: Vec<ComplexMatrix<T>> = sizes
            .iter()
            .map(|&n| random_density::<T, _>(n, &mut rng).into_matrix())
            .collect();
        let weights = random_simplex::<T, _>(sizes.len(), &mut rng);
        let m = block_diagonal(&blocks, &weights);
        DensityOperator::from_trusted(
            u.matmul(&m)
                .and_then(|x| x.matmul(&u.adjoint()))
                .expect("square"),
        )
    })
}

fn random_pair<T: Real>(dim: usize, seed: u64, index: usize) -> [DensityOperator<T>; 2] {
    let mut rng = rng_from(seed, &[TAG_PROBE, dim as u64, index as u64]);
    [random_density(dim, &mut rng), random_density(dim, &mut rng)]
}

/// Compares the nondisturbing-information verdict against how each pair was
/// built. Even trial indices are random pairs, odd ones engineered.
pub fn conjecture_probe<T: Real>(
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ConjectureReport<T>> {
    if !(2..=MAX_BROADCAST_DIM).contains(&dim) {
        return Err(Error::OutOfRange {
            field: "dim",
            value: dim as f64,
            lo: 2.0,
            hi: MAX_BROADCAST_DIM as f64,
        });
    }
    let rows: Vec<Result<ProbeTrial<T>>> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let (category, [r0, r1]) = if index % 2 == 0 {
                (ProbeCategory::Random, random_pair(dim, seed, index))
            } else {
                (ProbeCategory::Engineered, engineered_pair(dim, seed, index))
            };
            let v = nondisturbing_information(&r0, &r1, T::lit(BLOCK_CHECK_TOL))?;
            Ok(ProbeTrial {
                index,
                category,
                predicted: category == ProbeCategory::Engineered,
                exists: v.exists,
                block_dims: v.blocks.block_dims,
                total_variation: v.total_variation,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let categories = [ProbeCategory::Random, ProbeCategory::Engineered]
        .into_iter()
        .filter_map(|category| {
            let of: Vec<&ProbeTrial<T>> = rows.iter().filter(|r| r.category == category).collect();
            (!of.is_empty()).then(|| {
                let exists_true = of.iter().filter(|r| r.exists).count();
                let agree = of.iter().filter(|r| r.exists == r.predicted).count();
                CategoryCounts {
                    category,
                    trials: of.len(),
                    exists_true,
                    exists_false: of.len() - exists_true,
                    agree,
                    disagree: of.len() - agree,
                }
            })
        })
        .collect();
    Ok(ConjectureReport {
        dim,
        seed,
        categories,
        trials: rows,
    })
}

/// Leading factorization `(σ₁, |a⟩, |e⟩, σ₂)` of a vector on
/// `C^dim_a ⊗ C^dim_e`, with `σ₂` the second Schmidt coefficient.
fn factor<T: Real>(v: &[C<T>], dim_a: usize, dim_e: usize) -> (Vec<C<T>>, Vec<C<T>>, T) {
    let coeff = ComplexMatrix::from_fn(dim_a, dim_e, |i, j| v[i * dim_e + j]);
    let dec = svd(&coeff);
    let second = dec.values.get(1).copied().unwrap_or(T::zero());
    let e = dec.v.column(0).into_iter().map(|z| z.conj()).collect();
    (dec.u.column(0), e, second)
}

/// Whether `out_s = |s⟩|σ_s⟩` with the system parts of `in_s` unchanged and
/// distinguishable ancilla records `|⟨σ₀|σ₁⟩| < 1`.
pub fn illegal_eavesdropping_predicate<T: Real>(
    in0: &[C<T>],
    in1: &[C<T>],
    out0: &[C<T>],
    out1: &[C<T>],
    dim_a: usize,
    dim_e: usize,
) -> Result<bool> {
    let tol = T::lit(PREDICATE_TOL);
    let n = dim_a * dim_e;
    for v in [in0, in1, out0, out1] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                context: "eavesdropping predicate",
                expected: n,
                found: v.len(),
            });
        }
        let nv = norm(v);
        if (nv - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                norm: nv.to_f64_lossy(),
            });
        }
    }
    let (a0, _, r0) = factor(in0, dim_a, dim_e);
    let (a1, _, r1) = factor(in1, dim_a, dim_e);
    if r0 > tol || r1 > tol {
        return Err(Error::Malformed("inputs must be product vectors".into()));
    }
    let overlap = inner(&a0, &a1).norm();
    if overlap <= tol {
        return Err(Error::Malformed("input system parts are orthogonal".into()));
    }
    if overlap >= T::one() - tol {
        return Err(Error::Malformed("input system parts are identical".into()));
    }
    let (b0, s0, q0) = factor(out0, dim_a, dim_e);
    let (b1, s1, q1) = factor(out1, dim_a, dim_e);
    if q0 > tol || q1 > tol {
        return Ok(false);
    }
    if inner(&a0, &b0).norm() < T::one() - tol || inner(&a1, &b1).norm() < T::one() - tol {
        return Ok(false);
    }
    Ok(inner(&s0, &s1).norm() < T::one() - tol)
}
