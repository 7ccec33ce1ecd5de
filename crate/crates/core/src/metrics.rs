//! Disturbance, Helstrom error, the closed-form family surface, the optimal
//! frontier, and fidelity.
//!
//! All closed forms assume equal priors. Probabilities and disturbances are
//! clamped to their ranges only within `1e-12`; anything larger is reported
//! as a [`Error::NumericalInconsistency`].

use serde::Serialize;

use crate::eavesdrop::PostInteraction;
use crate::error::{Error, Result};
use crate::linalg::{inner, psd_sqrt, svd, trace_norm};
use crate::scalar::{clamp_within, Real};
use crate::states::{DensityOperator, StatePair};

const CLAMP_SLACK: f64 = 1e-12;
/// A clamp of `G` larger than this is surfaced as a warning.
pub const G_CLAMP_WARNING: f64 = 1e-9;
/// Below this the gain/disturbance ratio is undefined.
pub const ZERO_DISTURBANCE: f64 = 1e-15;

fn clamp_prob<T: Real>(x: T, hi: T, what: &'static str) -> Result<T> {
    clamp_within(x, T::zero(), hi, T::tol(CLAMP_SLACK)).ok_or(Error::NumericalInconsistency {
        what,
        value: x.to_f64_lossy(),
    })
}

fn check_overlap<T: Real>(s: T, inclusive_one: bool) -> Result<()> {
    let ok = s >= T::zero() && (s < T::one() || (inclusive_one && s <= T::one()));
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: "overlap",
            value: s.to_f64_lossy(),
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// `D = 1 − ½⟨0|ρ^A₀|0⟩ − ½⟨1|ρ^A₁|1⟩`.
pub fn disturbance<T: Real>(pair: &StatePair<T>, post: &PostInteraction<T>) -> Result<T> {
    let mut d = T::one();
    for s in 0..2 {
        let rho = post.rho_a[s].matrix();
        if rho.rows() != 2 {
            return Err(Error::DimensionMismatch {
                context: "disturbance",
                expected: 2,
                found: rho.rows(),
            });
        }
        let ket = pair.ket(s);
        let img = rho.apply(&ket)?;
        d -= T::half() * inner(&ket, &img).re;
    }
    clamp_prob(d, T::one(), "disturbance")
}

/// Minimum error probability for discriminating `rho0` (prior `prior0`) from
/// `rho1` (prior `1 − prior0`): `½(1 − ‖p₁ρ₁ − p₀ρ₀‖₁)`.
pub fn helstrom_error<T: Real>(
    rho0: &DensityOperator<T>,
    rho1: &DensityOperator<T>,
    prior0: T,
) -> Result<T> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            context: "Helstrom error",
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    if !(prior0 >= T::zero() && prior0 <= T::one()) {
        return Err(Error::OutOfRange {
            field: "prior0",
            value: prior0.to_f64_lossy(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let prior1 = T::one() - prior0;
    let diff = &rho1.matrix().scale_real(prior1) - &rho0.matrix().scale_real(prior0);
    let pe = T::half() * (T::one() - trace_norm(&diff)?);
    clamp_prob(pe, T::half(), "error probability")
}

/// `½(1 − √(1−S²))`, the smallest error probability for two pure states.
pub fn pe_min<T: Real>(s_overlap: T) -> T {
    T::half() * (T::one() - (T::one() - s_overlap * s_overlap).sqrt())
}

/// Parameters `(λ, φ, θ)` of the symmetric real interaction family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams<T> {
    pub lambda: T,
    pub phi: T,
    pub theta: T,
}

impl<T: Real> FamilyParams<T> {
    /// Accepts only the canonical windows `λ ∈ [0, π/2]`, `φ ∈ [0, π]`,
    /// `θ ∈ [0, π)`.
    pub fn new(lambda: T, phi: T, theta: T) -> Result<Self> {
        let pi = T::PI();
        let check = |field, v: T, hi: T, closed: bool| {
            let ok = v >= T::zero() && (v < hi || (closed && v <= hi));
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange {
                    field,
                    value: v.to_f64_lossy(),
                    lo: 0.0,
                    hi: hi.to_f64_lossy(),
                })
            }
        };
        check("lambda", lambda, T::FRAC_PI_2(), true)?;
        check("phi", phi, pi, true)?;
        check("theta", theta, pi, false)?;
        Ok(Self { lambda, phi, theta })
    }

    /// Folds arbitrary angles into the canonical windows. The closed forms
    /// depend on `λ` through `cos²λ` and `sin²2λ` (even, period π), and on
    /// `φ`, `θ` only through period-π functions.
    pub fn canonical(lambda: T, phi: T, theta: T) -> Self {
        let pi = T::PI();
        let wrap = |x: T| {
            let r = x % pi;
            if r < T::zero() {
                r + pi
            } else {
                r
            }
        };
        let l = wrap(lambda);
        Self {
            lambda: if l > T::FRAC_PI_2() { pi - l } else { l },
            phi: wrap(phi),
            theta: wrap(theta),
        }
    }

    /// The values `(d, g)` of the closed forms, unclamped.
    pub fn raw_surface(&self, s: T) -> (T, T) {
        let two = T::two();
        let (cl, sl2) = (self.lambda.cos(), (two * self.lambda).sin());
        let (c2p, s2p) = ((two * self.phi).cos(), (two * self.phi).sin());
        let (st, s2t, c2t, ct) = (
            self.theta.sin(),
            (two * self.theta).sin(),
            (two * self.theta).cos(),
            self.theta.cos(),
        );
        let half = T::half();
        let d = cl * cl * (st * st - half * s * c2p * s2t + half * s * s * (T::one() - s2p) * c2t);
        let g = cl.powi(4) * c2p * c2p + half * sl2 * sl2 * (T::one() - s2p) * ct * ct;
        (d, g)
    }
}

/// Where a [`TradeoffPoint`] came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source<T> {
    ClosedForm(FamilyParams<T>),
    Isometry { dim_e: usize, params: Vec<T> },
}

impl<T> Source<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Source::ClosedForm(_) => "closed-form",
            Source::Isometry { .. } => "isometry",
        }
    }
}

/// An (error probability, disturbance, gain) triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffPoint<T> {
    pub pe: T,
    pub d: T,
    pub g: T,
    /// Amount by which `g` had to be pulled back into `[0, 1]`.
    pub g_clamp: T,
    pub source: Source<T>,
}

impl<T: Real> TradeoffPoint<T> {
    pub fn has_clamp_warning(&self) -> bool {
        self.g_clamp > T::lit(G_CLAMP_WARNING)
    }
}

/// The family surface at `p` for overlap `S ∈ [0, 1)`.
pub fn closed_forms<T: Real>(p: &FamilyParams<T>, s_overlap: T) -> Result<TradeoffPoint<T>> {
    check_overlap(s_overlap, false)?;
    let (d_raw, g_raw) = p.raw_surface(s_overlap);
    let g = g_raw.max(T::zero()).min(T::one());
    let g_clamp = (g - g_raw).abs();
    let d = clamp_prob(d_raw, T::one(), "closed-form disturbance")?;
    let pe = T::half() - T::half() * (T::one() - s_overlap * s_overlap).sqrt() * g.sqrt();
    Ok(TradeoffPoint {
        pe: clamp_prob(pe, T::half(), "closed-form error probability")?,
        d,
        g,
        g_clamp,
        source: Source::ClosedForm(*p),
    })
}

/// Gain implied by an error probability: `G = (1 − 2P_e)²/(1 − S²)`.
pub fn gain_from_pe<T: Real>(pe: T, s_overlap: T) -> T {
    let x = T::one() - T::two() * pe;
    x * x / (T::one() - s_overlap * s_overlap)
}

/// Minimal disturbance at error probability `pe`:
/// `D = ½ − ½·{S²G + [1 − S²(1 − √(1−G))]²}^{1/2}`.
///
/// Defined on `[pe_min, ½]`; the `G = 1` endpoint is included.
pub fn frontier_d<T: Real>(pe: T, s_overlap: T) -> Result<T> {
    check_overlap(s_overlap, false)?;
    let lo = pe_min(s_overlap);
    let slack = T::tol(CLAMP_SLACK);
    if pe.is_nan() || pe < lo - slack || pe > T::half() + slack {
        return Err(Error::InfeasibleTarget {
            pe: pe.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
            hi: 0.5,
        });
    }
    let pe = pe.max(lo).min(T::half());
    let s2 = s_overlap * s_overlap;
    // 1 − G = (r − x)(r + x)/r² with r = √(1−S²), x = 1 − 2P_e; the endpoint
    // P_e = pe_min is pinned to G = 1 exactly.
    let r = (T::one() - s2).sqrt();
    let x = T::one() - T::two() * pe;
    let one_minus_g = if pe <= lo {
        T::zero()
    } else {
        ((r - x) * (r + x) / (r * r)).max(T::zero())
    };
    let g = T::one() - one_minus_g;
    let bracket = T::one() - s2 * (T::one() - one_minus_g.sqrt());
    let d = T::half() - T::half() * (s2 * g + bracket * bracket).sqrt();
    clamp_prob(d, T::one(), "frontier disturbance")
}

/// Largest error probability reachable at disturbance at most `d` on the
/// frontier, by bisection on the nonincreasing frontier.
pub fn frontier_pe_at<T: Real>(d: T, s_overlap: T) -> Result<T> {
    check_overlap(s_overlap, false)?;
    let mut lo = pe_min(s_overlap);
    let mut hi = T::half();
    if frontier_d(lo, s_overlap)? <= d {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = T::half() * (lo + hi);
        if frontier_d(mid, s_overlap)? > d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// The ratio `G/D`.
pub fn figure_of_merit<T: Real>(p: &FamilyParams<T>, s_overlap: T) -> Result<T> {
    let pt = closed_forms(p, s_overlap)?;
    if pt.d <= T::lit(ZERO_DISTURBANCE) {
        return Err(Error::DivisionByZeroDisturbance);
    }
    Ok(pt.g / pt.d)
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn fidelity<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity",
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    // tr √(√ρ σ √ρ) is the sum of singular values of √ρ·√σ; that route
    // stays accurate for rank-deficient inputs.
    let product = psd_sqrt(rho.matrix())?.matmul(&psd_sqrt(sigma.matrix())?)?;
    let f: T = svd(&product).values.into_iter().sum();
    Ok((f * f).max(T::zero()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eavesdrop::{evolve, generator_len, isometry_from_generator, Isometry};
    use crate::linalg::{basis_vector, herm_eig, ComplexMatrix};
    use crate::random::{random_density, random_state, rng_from, uniform};
    use crate::states::{alice_pair, pair_from_overlap};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn fp(l: f64, p: f64, t: f64) -> FamilyParams<f64> {
        FamilyParams::new(l, p, t).unwrap()
    }

    #[test]
    fn disturbance_examples() {
        let pair = alice_pair(0.0f64).unwrap();
        let post = evolve(&pair, &Isometry::identity(2).unwrap()).unwrap();
        assert_eq!(disturbance(&pair, &post).unwrap(), 0.0);

        // Bob receives I/2 for both inputs.
        let mixed = DensityOperator::from_trusted(ComplexMatrix::from_real_diag(&[0.5, 0.5]));
        let post = PostInteraction {
            rho_a: [mixed.clone(), mixed.clone()],
            ..post
        };
        assert!((disturbance(&pair, &post).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disturbance_matches_quadratic_form_oracle() {
        let pair = alice_pair(FRAC_PI_8).unwrap();
        for seed in 0..10 {
            let mut rng = rng_from(seed, &[]);
            let params: Vec<f64> = (0..generator_len(2))
                .map(|_| uniform(-PI, PI, &mut rng))
                .collect();
            let post = evolve(&pair, &isometry_from_generator(&params, 2).unwrap()).unwrap();
            // F_s² = Σ_{ij} conj(k_i) ρ_ij k_j summed by hand
            let mut fsq = [0.0; 2];
            for (s, acc) in fsq.iter_mut().enumerate() {
                let k = pair.ket(s);
                let m = post.rho_a[s].matrix();
                for i in 0..2 {
                    for j in 0..2 {
                        *acc += (k[i].conj() * m[(i, j)] * k[j]).re;
                    }
                }
            }
            let oracle = 1.0 - 0.5 * (fsq[0] + fsq[1]);
            assert!((disturbance(&pair, &post).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn helstrom_examples() {
        let mut rng = rng_from(1, &[]);
        let rho: DensityOperator<f64> = random_density(3, &mut rng);
        assert!((helstrom_error(&rho, &rho, 0.5).unwrap() - 0.5).abs() < 1e-15);

        let e0 = DensityOperator::pure(&basis_vector::<f64>(2, 0));
        let e1 = DensityOperator::pure(&basis_vector::<f64>(2, 1));
        assert!(helstrom_error(&e0, &e1, 0.5).unwrap().abs() < 1e-15);

        let pair = pair_from_overlap(0.6f64).unwrap();
        let r0 = DensityOperator::pure(&pair.ket0());
        let r1 = DensityOperator::pure(&pair.ket1());
        assert!((helstrom_error(&r0, &r1, 0.5).unwrap() - 0.1).abs() < 1e-12);

        let big = DensityOperator::pure(&basis_vector::<f64>(3, 0));
        assert!(helstrom_error(&e0, &big, 0.5).is_err());
        assert!(helstrom_error(&e0, &e1, 1.5).is_err());
    }

    #[test]
    fn helstrom_unequal_priors() {
        let e0 = DensityOperator::pure(&basis_vector::<f64>(2, 0));
        assert!((helstrom_error(&e0, &e0, 0.8).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        for (phi, theta) in [(0.3, 1.1), (2.0, 0.0), (0.0, 3.0)] {
            let pt = closed_forms(&fp(FRAC_PI_2, phi, theta), 0.6).unwrap();
            assert!(pt.d.abs() < 1e-15);
            assert!(pt.g.abs() < 1e-15);
            assert!((pt.pe - 0.5).abs() < 1e-15);
        }
        for s in [0.0, 0.3, 0.6, 0.9] {
            let pt = closed_forms(&fp(0.0, 0.0, 0.0), s).unwrap();
            assert!((pt.d - 0.5 * s * s).abs() < 1e-15);
            assert!((pt.g - 1.0).abs() < 1e-15);
            assert!((pt.pe - pe_min(s)).abs() < 1e-15);

            let pt = closed_forms(&fp(0.0, FRAC_PI_4, 0.0), s).unwrap();
            assert!(pt.d.abs() < 1e-15 && pt.g.abs() < 1e-15);
            assert!((pt.pe - 0.5).abs() < 1e-15);
        }
        assert!(closed_forms(&fp(0.0, 0.0, 0.0), 1.0).is_err());
        assert!(closed_forms(&fp(0.0, 0.0, 0.0), -0.1).is_err());
    }

    #[test]
    fn family_params_windows() {
        assert!(FamilyParams::new(2.0, 0.0, 0.0).is_err());
        assert!(FamilyParams::new(0.0, 0.0, PI).is_err());
        assert!(FamilyParams::new(FRAC_PI_2, PI, 0.0).is_ok());
        let c = FamilyParams::canonical(-0.3, 4.0, -1.0);
        assert!(FamilyParams::new(c.lambda, c.phi, c.theta).is_ok());
        let a = FamilyParams {
            lambda: -0.3f64,
            phi: 4.0,
            theta: -1.0,
        }
        .raw_surface(0.7);
        let b = c.raw_surface(0.7);
        assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
    }

    #[test]
    fn frontier_examples() {
        for s in [0.1f64, 0.6, 0.95] {
            assert!(frontier_d(0.5, s).unwrap().abs() < 1e-15);
        }
        for pe in [0.0f64, 0.1, 0.3, 0.5] {
            assert!(frontier_d(pe, 0.0).unwrap().abs() < 1e-15);
        }
        let s = 0.5f64.sqrt();
        let d = frontier_d(pe_min(s), s).unwrap();
        assert!((d - (0.5 - 0.5 * 0.75f64.sqrt())).abs() < 1e-12);
        assert!((d - 0.0669873).abs() < 1e-7);
        assert!(matches!(
            frontier_d(pe_min(s) - 1e-6, s),
            Err(Error::InfeasibleTarget { .. })
        ));
        assert!(frontier_d(0.51, s).is_err());
    }

    #[test]
    fn frontier_endpoint_equals_measure_and_resend_optimum() {
        // At G = 1 Eve records the Helstrom outcome; Bob's best resend state for
        // outcome k is the top eigenvector of Σ_s p(k|s)|s⟩⟨s|.
        for s in [0.2f64, 0.6, 0.9] {
            let pair = pair_from_overlap(s).unwrap();
            let (c2, s2) = (pair.alpha().cos().powi(2), pair.alpha().sin().powi(2));
            let m = &DensityOperator::pure(&pair.ket0()).matrix().scale_real(c2)
                + &DensityOperator::pure(&pair.ket1()).matrix().scale_real(s2);
            let top = herm_eig(&m).unwrap().values[0];
            let fd = frontier_d(pe_min(s), s).unwrap();
            assert!(
                (fd - (1.0 - top)).abs() < 1e-12,
                "{s}: {fd} vs {}",
                1.0 - top
            );
        }
    }

    #[test]
    fn frontier_is_nonincreasing() {
        for k in 1..10 {
            let s = k as f64 / 10.0;
            let lo = pe_min(s);
            let n = ((0.5 - lo) / 1e-3).floor() as usize;
            let mut prev = f64::INFINITY;
            for i in 0..=n {
                let pe = (lo + i as f64 * 1e-3).min(0.5);
                let d = frontier_d(pe, s).unwrap();
                assert!(d <= prev + 1e-15, "S={s} pe={pe}");
                prev = d;
            }
        }
    }

    #[test]
    fn frontier_inverse() {
        for s in [0.3f64, 0.6, 0.9] {
            let pe = frontier_pe_at(1e-9, s).unwrap();
            assert!((frontier_d(pe, s).unwrap() - 1e-9).abs() < 1e-15);
            // quartic behaviour near pe = 1/2: D ≈ S²x⁴/(1−S²)
            let x = 0.5 - pe;
            let approx = s * s * x.powi(4) / (1.0 - s * s);
            assert!((approx / 1e-9 - 1.0).abs() < 0.05);
        }
        assert_eq!(frontier_pe_at(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn figure_of_merit_examples() {
        let r = figure_of_merit(&fp(0.0, 0.0, 0.0), 0.6).unwrap();
        assert!((r - 1.0 / 0.18).abs() < 1e-12);
        assert_eq!(
            figure_of_merit(&fp(0.0, FRAC_PI_4, 0.0), 0.6),
            Err(Error::DivisionByZeroDisturbance)
        );
    }

    #[test]
    fn figure_of_merit_lambda_dependence() {
        // G/D = [cos²λ·X + 2 sin²λ·Y]/B with X = cos²2φ, Y = (1 − sin2φ)cos²θ,
        // so λ = 0 maximizes the ratio exactly when X ≥ 2Y.
        let cases = [
            (0.7, 0.3f64, true),
            (0.6, 1.2, true),
            (0.2, 0.3, false),
            (0.1, 0.0, false),
        ];
        for (phi, theta, lambda_zero_best) in cases {
            let x = (2.0f64 * phi).cos().powi(2);
            let y = (1.0 - (2.0f64 * phi).sin()) * theta.cos().powi(2);
            assert_eq!(x >= 2.0 * y, lambda_zero_best);
            let at_zero = figure_of_merit(&fp(0.0, phi, theta), 0.5).unwrap();
            for l in [0.3, 0.6, 0.9] {
                let r = figure_of_merit(&fp(l, phi, theta), 0.5).unwrap();
                assert_eq!(
                    at_zero >= r,
                    lambda_zero_best,
                    "phi={phi} theta={theta} l={l}"
                );
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = rng_from(3, &[]);
        let rho: DensityOperator<f64> = random_density(3, &mut rng);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);

        let e0 = DensityOperator::pure(&basis_vector::<f64>(2, 0));
        let e1 = DensityOperator::pure(&basis_vector::<f64>(2, 1));
        assert!(fidelity(&e0, &e1).unwrap().abs() < 1e-12);

        for _ in 0..10 {
            let a = random_state::<f64, _>(3, &mut rng);
            let b = random_state::<f64, _>(3, &mut rng);
            let want = inner(&a, &b).norm_sqr();
            let got = fidelity(&DensityOperator::pure(&a), &DensityOperator::pure(&b)).unwrap();
            assert!((got - want).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn lambda_zero_gain_is_cos2phi_squared(phi in 0.0..PI, theta in 0.0..PI, s in 0.0..0.99f64) {
            let pt = closed_forms(&FamilyParams { lambda: 0.0, phi, theta }, s).unwrap();
            prop_assert!((pt.g - (2.0 * phi).cos().powi(2)).abs() < 1e-12);
        }

        #[test]
        fn family_never_beats_helstrom(l in 0.0..FRAC_PI_2, phi in 0.0..PI, theta in 0.0..PI, s in 0.0..0.999f64) {
            let pt = closed_forms(&FamilyParams { lambda: l, phi, theta }, s).unwrap();
            prop_assert!(pt.pe >= pe_min(s) - 1e-12);
            prop_assert!(!pt.has_clamp_warning());
            let expect = 0.5 - 0.5 * (1.0 - s * s).sqrt() * pt.g.sqrt();
            prop_assert!((pt.pe - expect).abs() < 1e-12);
        }

        #[test]
        fn helstrom_swap_symmetry(seed in any::<u64>(), p in 0.0..=1.0f64) {
            let mut rng = rng_from(seed, &[]);
            let a: DensityOperator<f64> = random_density(3, &mut rng);
            let b: DensityOperator<f64> = random_density(3, &mut rng);
            let x = helstrom_error(&a, &b, p).unwrap();
            let y = helstrom_error(&b, &a, 1.0 - p).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}
