//! Alice's two-state source and validated density operators.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::scalar::{re, Real, C};

/// The pair `|0⟩ = cos α|a₀⟩ + sin α|a₁⟩`, `|1⟩ = sin α|a₀⟩ + cos α|a₁⟩`,
/// prepared with equal probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair<T> {
    alpha: T,
}

impl<T: Real> StatePair<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn ket0(&self) -> Vec<C<T>> {
        vec![re(self.alpha.cos()), re(self.alpha.sin())]
    }

    pub fn ket1(&self) -> Vec<C<T>> {
        vec![re(self.alpha.sin()), re(self.alpha.cos())]
    }

    pub fn ket(&self, s: usize) -> Vec<C<T>> {
        if s == 0 {
            self.ket0()
        } else {
            self.ket1()
        }
    }

    /// `S = ⟨0|1⟩ = sin 2α`.
    pub fn overlap(&self) -> T {
        (T::two() * self.alpha).sin()
    }
}

/// Builds the pair for `alpha ∈ [0, π/4]`.
pub fn alice_pair<T: Real>(alpha: T) -> Result<StatePair<T>> {
    if !(alpha >= T::zero() && alpha <= T::FRAC_PI_4()) {
        return Err(Error::OutOfRange {
            field: "alpha",
            value: alpha.to_f64_lossy(),
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_4,
        });
    }
    Ok(StatePair { alpha })
}

/// Builds the pair whose overlap is `s ∈ [0, 1]`.
pub fn pair_from_overlap<T: Real>(s: T) -> Result<StatePair<T>> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::OutOfRange {
            field: "overlap",
            value: s.to_f64_lossy(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    alice_pair((s.asin() * T::half()).min(T::FRAC_PI_4()))
}

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// `|v⟩⟨v|` for a vector normalized by the caller.
    pub fn pure(v: &[C<T>]) -> Self {
        Self::from_trusted(ComplexMatrix::projector(v))
    }

    /// Wraps a matrix produced by a trusted construction (partial trace of a
    /// normalized state, rotated simplex spectrum). Only symmetrizes.
    pub(crate) fn from_trusted(m: ComplexMatrix<T>) -> Self {
        Self {
            matrix: m.symmetrized(),
        }
    }

    pub fn to_f64(&self) -> DensityOperator<f64> {
        DensityOperator {
            matrix: self.matrix.to_f64(),
        }
    }
}

/// Checks Hermiticity, unit trace and positivity, each within `tol`, and
/// returns the symmetrized operator.
pub fn validate_density<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<DensityOperator<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "density operator",
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let sym = m.symmetrized();
    let tr = sym.trace().re;
    if (tr - T::one()).abs() > tol {
        return Err(Error::TraceNotOne {
            deviation: (tr - T::one()).abs().to_f64_lossy(),
        });
    }
    let eig = herm_eig(&sym)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotPositive {
                eigenvalue: min.to_f64_lossy(),
            });
        }
    }
    Ok(DensityOperator { matrix: sym })
}

/// On-disk form: `{"dim": d, "matrix": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityDocument {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl DensityDocument {
    pub fn from_operator(rho: &DensityOperator<f64>) -> Self {
        let m = rho.matrix();
        Self {
            dim: m.rows(),
            matrix: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix<f64>> {
        if self.matrix.len() != self.dim {
            return Err(Error::Schema(format!(
                "expected {} rows, found {}",
                self.dim,
                self.matrix.len()
            )));
        }
        if let Some((i, row)) = self
            .matrix
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.dim)
        {
            return Err(Error::Schema(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                self.dim
            )));
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(|[a, b]| Complex::new(*a, *b))
            .collect();
        ComplexMatrix::new(self.dim, self.dim, data)
    }
}

/// Parses and validates a density-operator JSON document (tolerance `1e-10`).
pub fn parse_density_json(text: &str) -> Result<DensityOperator<f64>> {
    let doc: DensityDocument =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    validate_density(&doc.to_matrix()?, 1e-10)
}

pub fn density_to_json(rho: &DensityOperator<f64>) -> String {
    serde_json::to_string(&DensityDocument::from_operator(rho)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn m2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix<f64> {
        ComplexMatrix::new(2, 2, vec![re(a), re(b), re(c), re(d)]).unwrap()
    }

    #[test]
    fn alice_pair_limits() {
        let p = alice_pair(0.0).unwrap();
        assert_eq!(p.ket0(), vec![re(1.0), re(0.0)]);
        assert_eq!(p.ket1(), vec![re(0.0), re(1.0)]);
        assert_eq!(p.overlap(), 0.0);

        let p = alice_pair(FRAC_PI_4).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for k in [p.ket0(), p.ket1()] {
            assert!(k.iter().all(|z| (z.re - h).abs() < 1e-15));
        }
        assert!((p.overlap() - 1.0).abs() < 1e-15);

        let p = alice_pair(FRAC_PI_8).unwrap();
        assert!((p.overlap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn alice_pair_rejects_outside_window() {
        assert!(alice_pair(-0.01).is_err());
        assert!(alice_pair(0.8).is_err());
        assert!(alice_pair(f64::NAN).is_err());
    }

    #[test]
    fn pair_from_overlap_roundtrip() {
        let p = pair_from_overlap(0.6f64).unwrap();
        assert!((p.overlap() - 0.6).abs() < 1e-15);
        assert!(pair_from_overlap(1.2).is_err());
    }

    #[test]
    fn validate_density_examples() {
        assert!(validate_density(&m2(0.5, 0.0, 0.0, 0.5), 1e-10).is_ok());
        match validate_density(&m2(0.7, 0.0, 0.0, 0.4), 1e-10) {
            Err(Error::TraceNotOne { deviation }) => assert!((deviation - 0.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match validate_density(&m2(0.5, 0.6, 0.6, 0.5), 1e-10) {
            Err(Error::NotPositive { eigenvalue }) => assert!((eigenvalue + 0.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            validate_density(&m2(0.5, 0.1, 0.0, 0.5), 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn json_rejects_ragged_rows() {
        let bad = r#"{"dim": 2, "matrix": [[[0.5,0],[0,0]],[[0.5,0]]]}"#;
        assert!(matches!(parse_density_json(bad), Err(Error::Schema(_))));
        let good = r#"{"dim": 2, "matrix": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        assert_eq!(parse_density_json(good).unwrap().dim(), 2);
        let extra = r#"{"dim": 1, "matrix": [[[1,0]]], "x": 1}"#;
        assert!(parse_density_json(extra).is_err());
    }

    proptest! {
        #[test]
        fn overlap_matches_inner_product(alpha in 0.0..=FRAC_PI_4) {
            let p = alice_pair(alpha).unwrap();
            let ip = inner(&p.ket0(), &p.ket1());
            prop_assert!((ip.re - (2.0 * alpha).sin()).abs() < 1e-12);
            prop_assert!(ip.im.abs() < 1e-15);
        }

        #[test]
        fn accepted_density_is_its_own_symmetrization(seed in any::<u64>()) {
            let mut rng = crate::random::rng_from(seed, &[]);
            let rho: DensityOperator<f64> = crate::random::random_density(3, &mut rng);
            let v = validate_density(rho.matrix(), 1e-10).unwrap();
            prop_assert_eq!(v.matrix(), &v.matrix().symmetrized());
        }

        #[test]
        fn json_roundtrip(seed in any::<u64>()) {
            let mut rng = crate::random::rng_from(seed, &[]);
            let rho: DensityOperator<f64> = crate::random::random_density(3, &mut rng);
            let back = parse_density_json(&density_to_json(&rho)).unwrap();
            prop_assert_eq!(back, rho);
        }
    }
}
